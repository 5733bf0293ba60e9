//! Two-level laminar instances and the exact selection DP.
//!
//! A laminar instance has candidate radius-ρ1 balls around `L1` and
//! radius-ρ2 balls around `L2`, where balls on the same level cover
//! pairwise disjoint point sets and each `L2` ball meets at most one `L1`
//! ball. Under those conditions maximum coverage splits cleanly across
//! subtrees, so a small budgeted DP computes it exactly.

use crate::metric::MetricSpace;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LaminarError {
    #[error("expected {0} weights, got {1}")]
    WrongWeightCount(usize, usize),
    #[error("radii (ρ1={0}, ρ2={1}) must be finite with ρ1 ≥ ρ2 ≥ 0")]
    BadRadii(f64, f64),
    #[error("level-{level} center {id} out of range, space has {n} points")]
    IndexOutOfRange { level: usize, id: usize, n: usize },
    #[error("level-{level} center {id} listed twice")]
    DuplicateCenter { level: usize, id: usize },
    #[error("level-{level} balls around {a} and {b} both cover point {shared}")]
    LevelOverlap {
        level: usize,
        a: usize,
        b: usize,
        shared: usize,
    },
    #[error("child ball at {child} meets parent balls at both {parent_a} and {parent_b}")]
    AmbiguousParent {
        child: usize,
        parent_a: usize,
        parent_b: usize,
    },
}

/// One candidate small ball hanging off a parent: `gain_open` is its
/// marginal weight when the parent ball is open, `gain_closed` its full
/// weight otherwise.
#[derive(Debug, Clone)]
pub(crate) struct ChildArm {
    pub id: usize,
    pub gain_open: u64,
    pub gain_closed: u64,
}

/// A parent candidate (or the virtual root when `parent` is `None`, which
/// can never be opened) together with its child candidates.
#[derive(Debug, Clone)]
pub(crate) struct Subtree {
    pub parent: Option<usize>,
    pub parent_gain: u64,
    pub children: Vec<ChildArm>,
}

/// Knapsack rows over one subtree's children: `rows[j][c]` is the best gain
/// from choosing exactly `c` of the first `j` children (`None` =
/// unreachable). Ties prefer skipping, so backtracking by table equality is
/// deterministic.
fn local_rows(st: &Subtree, bit: bool) -> Vec<Vec<Option<u64>>> {
    let len = st.children.len();
    let mut cur: Vec<Option<u64>> = vec![None; len + 1];
    cur[0] = Some(0);
    let mut rows = vec![cur.clone()];
    for arm in &st.children {
        let g = if bit { arm.gain_open } else { arm.gain_closed };
        let mut next = cur.clone();
        for c in 0..len {
            if let Some(v) = cur[c] {
                let cand = v + g;
                if next[c + 1].is_none_or(|x| cand > x) {
                    next[c + 1] = Some(cand);
                }
            }
        }
        rows.push(next.clone());
        cur = next;
    }
    rows
}

fn backtrack_children(
    st: &Subtree,
    rows: &[Vec<Option<u64>>],
    bit: bool,
    mut c: usize,
) -> Vec<usize> {
    let mut picked = Vec::new();
    for j in (0..st.children.len()).rev() {
        let val = rows[j + 1][c];
        if rows[j][c] == val {
            continue;
        }
        let g = if bit {
            st.children[j].gain_open
        } else {
            st.children[j].gain_closed
        };
        debug_assert_eq!(rows[j][c - 1].map(|v| v + g), val);
        picked.push(st.children[j].id);
        c -= 1;
    }
    picked.reverse();
    picked
}

/// Budgeted max coverage over disjoint subtrees: open at most `k1` parents
/// and `k2` children. Returns (best coverage, opened parent ids, opened
/// child ids). Exact because gains never interact across subtrees.
pub(crate) fn max_coverage(
    subtrees: &[Subtree],
    k1: usize,
    k2: usize,
) -> (u64, Vec<usize>, Vec<usize>) {
    let n = subtrees.len();
    let openable = subtrees.iter().filter(|s| s.parent.is_some()).count();
    let total_children: usize = subtrees.iter().map(|s| s.children.len()).sum();
    let amax = k1.min(openable);
    let bmax = k2.min(total_children);

    let locals: Vec<[Vec<Vec<Option<u64>>>; 2]> = subtrees
        .iter()
        .map(|s| [local_rows(s, false), local_rows(s, true)])
        .collect();

    let mut g: Vec<Vec<Vec<Option<u64>>>> = vec![vec![vec![None; bmax + 1]; amax + 1]; n + 1];
    g[0][0][0] = Some(0);
    for i in 0..n {
        for a in 0..=amax {
            for b in 0..=bmax {
                let Some(base) = g[i][a][b] else { continue };
                for bit in 0..2usize {
                    if bit == 1 && (subtrees[i].parent.is_none() || a + 1 > amax) {
                        continue;
                    }
                    let pg = if bit == 1 { subtrees[i].parent_gain } else { 0 };
                    let rows = &locals[i][bit];
                    let last = subtrees[i].children.len();
                    for c in 0..=last.min(bmax - b) {
                        if let Some(lv) = rows[last][c] {
                            let cand = base + pg + lv;
                            let slot = &mut g[i + 1][a + bit][b + c];
                            if slot.is_none_or(|x| cand > x) {
                                *slot = Some(cand);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut best = (0u64, 0usize, 0usize);
    for a in 0..=amax {
        for b in 0..=bmax {
            if let Some(v) = g[n][a][b] {
                if v > best.0 {
                    best = (v, a, b);
                }
            }
        }
    }

    let (mut a, mut b) = (best.1, best.2);
    let mut parents = Vec::new();
    let mut child_segments: Vec<Vec<usize>> = Vec::new();
    for i in (0..n).rev() {
        let target = g[i + 1][a][b].expect("backtrack state must be reachable");
        let mut matched = false;
        'branches: for bit in 0..2usize {
            if bit == 1 && (subtrees[i].parent.is_none() || a == 0) {
                continue;
            }
            let pg = if bit == 1 { subtrees[i].parent_gain } else { 0 };
            let rows = &locals[i][bit];
            let last = subtrees[i].children.len();
            for c in 0..=last.min(b) {
                if let (Some(base), Some(lv)) = (g[i][a - bit][b - c], rows[last][c]) {
                    if base + pg + lv == target {
                        if bit == 1 {
                            parents.push(subtrees[i].parent.unwrap());
                        }
                        child_segments.push(backtrack_children(&subtrees[i], rows, bit == 1, c));
                        a -= bit;
                        b -= c;
                        matched = true;
                        break 'branches;
                    }
                }
            }
        }
        assert!(matched, "selection DP backtrack failed");
    }
    parents.reverse();
    let children: Vec<usize> = child_segments.into_iter().rev().flatten().collect();
    (best.0, parents, children)
}

/// A validated laminar instance ready for [`laminar_dp`].
#[derive(Debug)]
pub struct LaminarInstance<'a> {
    space: &'a MetricSpace,
    weights: &'a [u64],
    rho1: f64,
    rho2: f64,
    k1: usize,
    k2: usize,
    target: u64,
    subtrees: Vec<Subtree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub chosen_l1: Vec<usize>,
    pub chosen_l2: Vec<usize>,
    pub covered_weight: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LaminarOutcome {
    Feasible(DpSolution),
    Infeasible { best_coverage: u64 },
}

/// Builds the laminar structure: each `L2` center is assigned to the unique
/// `L1` ball its own ball meets, orphans go to the first `L1` center, and an
/// empty `L1` yields a single virtual root. Rejects inputs whose same-level
/// balls share points.
#[allow(clippy::too_many_arguments)]
pub fn build_laminar<'a>(
    space: &'a MetricSpace,
    weights: &'a [u64],
    l1: &[usize],
    l2: &[usize],
    rho1: f64,
    rho2: f64,
    k1: usize,
    k2: usize,
    target: u64,
) -> Result<LaminarInstance<'a>, LaminarError> {
    let n = space.n();
    if weights.len() != n {
        return Err(LaminarError::WrongWeightCount(n, weights.len()));
    }
    if !(rho1.is_finite() && rho2.is_finite() && rho1 >= rho2 && rho2 >= 0.0) {
        return Err(LaminarError::BadRadii(rho1, rho2));
    }
    for (level, ids) in [(1usize, l1), (2, l2)] {
        let mut seen = vec![false; n];
        for &id in ids {
            if id >= n {
                return Err(LaminarError::IndexOutOfRange { level, id, n });
            }
            if seen[id] {
                return Err(LaminarError::DuplicateCenter { level, id });
            }
            seen[id] = true;
        }
    }

    let set_weight =
        |set: &crate::metric::PointSet| -> u64 { set.iter().map(|p| weights[p]).sum() };
    let b1: Vec<_> = l1.iter().map(|&v| space.ball_all(v, rho1)).collect();
    let b2: Vec<_> = l2.iter().map(|&u| space.ball_all(u, rho2)).collect();
    for (level, ids, balls) in [(1usize, l1, &b1), (2, l2, &b2)] {
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let shared = balls[i].intersect(&balls[j]);
                if let Some(&p) = shared.as_slice().first() {
                    return Err(LaminarError::LevelOverlap {
                        level,
                        a: ids[i],
                        b: ids[j],
                        shared: p,
                    });
                }
            }
        }
    }

    let mut assigned_children: Vec<Vec<usize>> = vec![Vec::new(); l1.len().max(1)];
    for (ui, &u) in l2.iter().enumerate() {
        let mut hits = (0..l1.len()).filter(|&vi| !b2[ui].intersect(&b1[vi]).is_empty());
        match (hits.next(), hits.next()) {
            (Some(vi), None) => assigned_children[vi].push(ui),
            (Some(vi), Some(vj)) => {
                return Err(LaminarError::AmbiguousParent {
                    child: u,
                    parent_a: l1[vi],
                    parent_b: l1[vj],
                });
            }
            (None, _) => assigned_children[0].push(ui),
        }
    }

    let subtrees: Vec<Subtree> = if l1.is_empty() {
        vec![Subtree {
            parent: None,
            parent_gain: 0,
            children: l2
                .iter()
                .enumerate()
                .map(|(ui, &u)| {
                    let w = set_weight(&b2[ui]);
                    ChildArm {
                        id: u,
                        gain_open: w,
                        gain_closed: w,
                    }
                })
                .collect(),
        }]
    } else {
        l1.iter()
            .enumerate()
            .map(|(vi, &v)| Subtree {
                parent: Some(v),
                parent_gain: set_weight(&b1[vi]),
                children: assigned_children[vi]
                    .iter()
                    .map(|&ui| ChildArm {
                        id: l2[ui],
                        gain_open: set_weight(&b2[ui].minus(&b1[vi])),
                        gain_closed: set_weight(&b2[ui]),
                    })
                    .collect(),
            })
            .collect()
    };

    Ok(LaminarInstance {
        space,
        weights,
        rho1,
        rho2,
        k1,
        k2,
        target,
        subtrees,
    })
}

impl LaminarInstance<'_> {
    pub fn space(&self) -> &MetricSpace {
        self.space
    }

    pub fn weights(&self) -> &[u64] {
        self.weights
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    pub fn rho2(&self) -> f64 {
        self.rho2
    }

    pub fn budgets(&self) -> (usize, usize) {
        (self.k1, self.k2)
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    /// Parent ids per subtree; `None` marks the virtual root.
    pub fn parent_ids(&self) -> Vec<Option<usize>> {
        self.subtrees.iter().map(|s| s.parent).collect()
    }

    pub fn children_ids(&self, subtree: usize) -> Vec<usize> {
        self.subtrees[subtree]
            .children
            .iter()
            .map(|a| a.id)
            .collect()
    }

    /// Best budget-respecting selection regardless of the target.
    pub fn optimum(&self) -> DpSolution {
        let (covered_weight, chosen_l1, chosen_l2) = max_coverage(&self.subtrees, self.k1, self.k2);
        DpSolution {
            chosen_l1,
            chosen_l2,
            covered_weight,
        }
    }
}

/// Exact feasibility: covers at least `target` weight within budgets, or
/// reports the best achievable coverage.
pub fn laminar_dp(instance: &LaminarInstance) -> LaminarOutcome {
    let best = instance.optimum();
    if best.covered_weight >= instance.target {
        LaminarOutcome::Feasible(best)
    } else {
        LaminarOutcome::Infeasible {
            best_coverage: best.covered_weight,
        }
    }
}
