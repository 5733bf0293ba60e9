//! Greedy ball-packing primitives: priority-ordered clustering, radius
//! compression, two-level cluster trees and the outlier k-center greedy.

use crate::instance::{Ball, Instance, Solution};
use crate::laminar::{max_coverage, ChildArm, Subtree};
use crate::lp::CoverageVector;
use crate::metric::{MetricSpace, PointSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GreedyError {
    #[error("cannot cluster an empty point set")]
    EmptyGround,
}

/// A partition of a point set into balls around representatives, in
/// selection order. Part `i` is `children()[i]` with representative
/// `representatives()[i]`, and the representative belongs to its part.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    representatives: Vec<usize>,
    children: Vec<PointSet>,
}

impl Partition {
    pub fn from_parts(parts: Vec<(usize, PointSet)>) -> Self {
        let (representatives, children) = parts.into_iter().unzip();
        Partition {
            representatives,
            children,
        }
    }

    /// Number of parts.
    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn representatives(&self) -> &[usize] {
        &self.representatives
    }

    pub fn children(&self) -> &[PointSet] {
        &self.children
    }

    pub fn parts(&self) -> impl Iterator<Item = (usize, &PointSet)> + '_ {
        self.representatives
            .iter()
            .copied()
            .zip(self.children.iter())
    }

    pub fn child_of(&self, rep: usize) -> Option<&PointSet> {
        self.representatives
            .iter()
            .position(|&r| r == rep)
            .map(|i| &self.children[i])
    }

    /// All covered points.
    pub fn ground_set(&self) -> PointSet {
        self.children.iter().flat_map(|c| c.iter()).collect()
    }
}

/// Greedy priority clustering: repeatedly takes the highest-priority
/// remaining point (lowest index on ties), assigns it everything within
/// `r`, and removes the part. Representatives end up pairwise more than
/// `r` apart and never have lower priority than their children.
pub fn priority_cluster(
    space: &MetricSpace,
    within: &PointSet,
    priorities: &[f64],
    r: f64,
) -> Result<Partition, GreedyError> {
    if within.is_empty() {
        return Err(GreedyError::EmptyGround);
    }
    assert_eq!(priorities.len(), space.n(), "priority per point required");
    let mut remaining: Vec<usize> = within.iter().collect();
    let mut representatives = Vec::new();
    let mut children = Vec::new();
    while !remaining.is_empty() {
        let mut best = 0;
        for i in 1..remaining.len() {
            if priorities[remaining[i]] > priorities[remaining[best]] {
                best = i;
            }
        }
        let v = remaining[best];
        let (part, rest): (Vec<usize>, Vec<usize>) = remaining
            .into_iter()
            .partition(|&u| space.distance(v, u) <= r);
        representatives.push(v);
        children.push(PointSet::new(part));
        remaining = rest;
    }
    Ok(Partition {
        representatives,
        children,
    })
}

/// Clusters the whole space at radius twice the smallest class radius,
/// taking the lowest-index remaining point each round. If the result has
/// at most `k_t` parts, balls of that radius at the representatives cover
/// everything; otherwise the representatives form a separated core that a
/// smaller instance must mostly cover.
pub fn radii_compression(instance: &Instance) -> Partition {
    let space = instance.space();
    let r_t = instance
        .classes()
        .last()
        .expect("at least one class")
        .radius;
    priority_cluster(
        space,
        &PointSet::full(space.n()),
        &vec![0.0; space.n()],
        2.0 * r_t,
    )
    .expect("instance spaces are nonempty")
}

/// Two nested greedy clusterings of a coverage vector: level 2 partitions
/// the space at radius `alpha2 * r2` by total coverage, level 1 partitions
/// the level-2 representatives at radius `alpha1 * r1` by class-1 coverage.
#[derive(Debug, Clone)]
pub struct TwoLevelTree {
    pub level1: Partition,
    pub level2: Partition,
    pub alpha1: f64,
    pub alpha2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl TwoLevelTree {
    pub fn l1(&self) -> &[usize] {
        self.level1.representatives()
    }

    pub fn l2(&self) -> &[usize] {
        self.level2.representatives()
    }

    /// Weight of the level-2 subtree below `u`.
    pub fn subtree_weight(&self, u: usize, weights: &[u64]) -> u64 {
        self.level2
            .child_of(u)
            .map(|c| c.iter().map(|x| weights[x]).sum())
            .unwrap_or(0)
    }
}

pub fn two_level_tree(
    space: &MetricSpace,
    coverages: &CoverageVector,
    r1: f64,
    r2: f64,
    alpha1: f64,
    alpha2: f64,
) -> TwoLevelTree {
    assert!(
        alpha1 >= 2.0 && alpha2 >= 2.0,
        "expansion factors below 2 lose separation"
    );
    let n = space.n();
    let total: Vec<f64> = (0..n).map(|v| coverages.total(v)).collect();
    let level2 = priority_cluster(space, &PointSet::full(n), &total, alpha2 * r2)
        .expect("space is nonempty");
    let l2: PointSet = level2.representatives().iter().copied().collect();
    let level1 = priority_cluster(space, &l2, &coverages.cov1, alpha1 * r1)
        .expect("level-2 representatives are nonempty");
    TwoLevelTree {
        level1,
        level2,
        alpha1,
        alpha2,
        r1,
        r2,
    }
}

/// Picks at most `k1` level-1 and `k2` level-2 vertices maximizing the
/// covered subtree weight (exactly, via the laminar selection DP), and
/// returns the corresponding balls when they reach the target: radius
/// `alpha1*r1 + alpha2*r2` at level-1 picks, `alpha2*r2` at level-2 picks.
pub fn round_tree(
    tree: &TwoLevelTree,
    weights: &[u64],
    k1: usize,
    k2: usize,
    m: u64,
) -> Option<Solution> {
    let subtrees: Vec<Subtree> = tree
        .level1
        .parts()
        .map(|(v, child)| {
            let arms: Vec<ChildArm> = child
                .iter()
                .map(|u| {
                    let w = tree.subtree_weight(u, weights);
                    ChildArm {
                        id: u,
                        gain_open: 0,
                        gain_closed: w,
                    }
                })
                .collect();
            Subtree {
                parent: Some(v),
                parent_gain: arms.iter().map(|a| a.gain_closed).sum(),
                children: arms,
            }
        })
        .collect();
    let (covered, parents, children) = max_coverage(&subtrees, k1, k2);
    if covered < m {
        return None;
    }
    let mut balls: Vec<Ball> = parents
        .into_iter()
        .map(|v| Ball {
            center: v,
            class_index: 0,
            radius: tree.alpha1 * tree.r1 + tree.alpha2 * tree.r2,
        })
        .collect();
    balls.extend(children.into_iter().map(|u| Ball {
        center: u,
        class_index: 1,
        radius: tree.alpha2 * tree.r2,
    }));
    Some(Solution { balls })
}

/// Greedy heuristic for k-center with outliers: `k` times, open a ball of
/// radius `3r` at the point whose radius-`r` ball holds the most uncovered
/// weight. Succeeds whenever some `k` balls of radius `r` cover weight `m`.
pub fn robust_kcenter_greedy(
    space: &MetricSpace,
    weights: &[u64],
    k: usize,
    r: f64,
    m: u64,
) -> Option<Solution> {
    let n = space.n();
    assert_eq!(weights.len(), n);
    let mut covered = vec![false; n];
    let mut covered_weight = 0u64;
    let mut balls = Vec::new();
    for _ in 0..k {
        if covered_weight >= m {
            break;
        }
        let gain = |v: usize| -> u64 {
            (0..n)
                .filter(|&u| !covered[u] && space.distance(v, u) <= r)
                .map(|u| weights[u])
                .sum()
        };
        let mut best = 0;
        let mut best_gain = gain(0);
        for v in 1..n {
            let g = gain(v);
            if g > best_gain {
                best = v;
                best_gain = g;
            }
        }
        if best_gain == 0 {
            break;
        }
        balls.push(Ball {
            center: best,
            class_index: 0,
            radius: 3.0 * r,
        });
        for u in 0..n {
            if !covered[u] && space.distance(best, u) <= 3.0 * r {
                covered[u] = true;
                covered_weight += weights[u];
            }
        }
    }
    if covered_weight >= m {
        Some(Solution { balls })
    } else {
        None
    }
}
