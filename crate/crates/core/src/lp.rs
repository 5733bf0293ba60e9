//! LP feasibility machinery for the round-or-cut loops.
//!
//! `build_lp1` produces the natural covering relaxation with opening
//! variables `x_{v,i}` and coverage variables `cov_{v,i}`. Feasibility is
//! decided by a dense phase-1 simplex, which is plenty at the instance
//! sizes this crate targets. `CutPool` accumulates the inequalities the
//! solvers learn; cuts live purely in coverage space.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::instance::Instance;
use thiserror::Error;

/// Absolute tolerance shared by feasibility tests, residual checks and
/// cut-violation checks.
pub const EPS_LP: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("variable {0} out of range, LP has {1} variables")]
    VarOutOfRange(usize, usize),
    #[error("coefficient {0} for variable {1} is not finite")]
    BadCoefficient(f64, usize),
    #[error("right-hand side {0} is not finite")]
    BadRhs(f64),
    #[error("simplex iteration limit {0} exceeded")]
    IterationLimit(usize),
    #[error("no pivot available in a bounded phase-1 problem, tableau corrupt")]
    TableauCorrupt,
    #[error("simplex answer violates constraint {row} by {violation}")]
    ResidualTooLarge { row: usize, violation: f64 },
    #[error("this LP formulation requires exactly 2 classes, instance has {0}")]
    WrongClassCount(usize),
    #[error("cut already in pool, the round-or-cut loop is stalled")]
    DuplicateCut,
    #[error("cut not violated by the current point (violation {0}), refusing to add")]
    CutNotViolated(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    sense: Sense,
    rhs: f64,
}

/// Feasibility LP over nonnegative variables.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    names: Vec<String>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Feasible(Vec<f64>),
    Infeasible,
}

impl LinearProgram {
    pub fn new() -> LinearProgram {
        LinearProgram::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>) -> usize {
        self.names.push(name.into());
        self.names.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn var_name(&self, j: usize) -> &str {
        &self.names[j]
    }

    /// Adds `Σ terms ⋛ rhs`. Repeated variable mentions are consolidated.
    pub fn add_constraint(
        &mut self,
        terms: &[(usize, f64)],
        sense: Sense,
        rhs: f64,
    ) -> Result<usize, LpError> {
        if !rhs.is_finite() {
            return Err(LpError::BadRhs(rhs));
        }
        let mut map: BTreeMap<usize, f64> = BTreeMap::new();
        for &(j, c) in terms {
            if j >= self.names.len() {
                return Err(LpError::VarOutOfRange(j, self.names.len()));
            }
            if !c.is_finite() {
                return Err(LpError::BadCoefficient(c, j));
            }
            *map.entry(j).or_insert(0.0) += c;
        }
        let coeffs: Vec<(usize, f64)> = map.into_iter().filter(|&(_, c)| c != 0.0).collect();
        self.rows.push(Row { coeffs, sense, rhs });
        Ok(self.rows.len() - 1)
    }

    /// Largest violation of any constraint (or of nonnegativity) by
    /// `assignment`; 0 when satisfied everywhere.
    pub fn max_violation(&self, assignment: &[f64]) -> f64 {
        assert_eq!(assignment.len(), self.names.len());
        let rows = self.rows.iter().map(|row| {
            let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * assignment[j]).sum();
            match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
            }
        });
        let bounds = assignment.iter().map(|&x| -x);
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Phase-1 simplex: finds a nonnegative point satisfying every
    /// constraint, or decides none exists. Dantzig pricing with a switch to
    /// Bland's rule to rule out cycling.
    pub fn feasible_point(&self) -> Result<LpOutcome, LpError> {
        let ns = self.names.len();
        let m = self.rows.len();
        if m == 0 {
            return Ok(LpOutcome::Feasible(vec![0.0; ns]));
        }

        // Columns: structural, one slack per row, artificials for rows whose
        // slack cannot start basic.
        let mut cols = ns + m;
        let mut art_of_row: Vec<Option<usize>> = vec![None; m];
        let mut a: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut b: Vec<f64> = Vec::with_capacity(m);
        let mut basic: Vec<usize> = vec![0; m];
        for (i, row) in self.rows.iter().enumerate() {
            let mut r = vec![0.0; ns + m];
            for &(j, c) in &row.coeffs {
                r[j] = c;
            }
            r[ns + i] = match row.sense {
                Sense::Le => 1.0,
                Sense::Ge => -1.0,
            };
            let mut rhs = row.rhs;
            if rhs < 0.0 {
                for x in r.iter_mut() {
                    *x = -*x;
                }
                rhs = -rhs;
            }
            a.push(r);
            b.push(rhs);
        }
        for i in 0..m {
            if a[i][ns + i] == 1.0 {
                basic[i] = ns + i;
            } else {
                art_of_row[i] = Some(cols);
                basic[i] = cols;
                cols += 1;
            }
        }
        for i in 0..m {
            a[i].resize(cols, 0.0);
            if let Some(j) = art_of_row[i] {
                a[i][j] = 1.0;
            }
        }

        // Reduced-cost row for "minimize sum of artificials".
        let mut obj = vec![0.0; cols];
        for i in 0..m {
            if art_of_row[i].is_some() {
                for j in 0..cols {
                    obj[j] += a[i][j];
                }
            }
        }
        for j in (ns + m)..cols {
            obj[j] -= 1.0;
        }

        let is_art = |j: usize| j >= ns + m;
        let bland_after = 2 * (m + cols);
        let cap = 2000 + 200 * (m + cols);
        let mut iters = 0usize;
        loop {
            let entering = if iters < bland_after {
                let mut best: Option<(f64, usize)> = None;
                for j in 0..cols {
                    if !is_art(j) && obj[j] > PIVOT_TOL && best.is_none_or(|(bv, _)| obj[j] > bv) {
                        best = Some((obj[j], j));
                    }
                }
                best.map(|(_, j)| j)
            } else {
                (0..cols).find(|&j| !is_art(j) && obj[j] > PIVOT_TOL)
            };
            let Some(je) = entering else { break };

            let mut leave: Option<(f64, usize)> = None;
            for i in 0..m {
                if a[i][je] > PIVOT_TOL {
                    let ratio = b[i] / a[i][je];
                    let better = match leave {
                        None => true,
                        Some((br, bi)) => {
                            ratio < br - 1e-12
                                || ((ratio - br).abs() <= 1e-12 && basic[i] < basic[bi])
                        }
                    };
                    if better {
                        leave = Some((ratio, i));
                    }
                }
            }
            let Some((_, il)) = leave else {
                return Err(LpError::TableauCorrupt);
            };

            let piv = a[il][je];
            for j in 0..cols {
                a[il][j] /= piv;
            }
            b[il] /= piv;
            a[il][je] = 1.0;
            for i in 0..m {
                if i == il {
                    continue;
                }
                let f = a[i][je];
                if f != 0.0 {
                    for j in 0..cols {
                        a[i][j] -= f * a[il][j];
                    }
                    b[i] -= f * b[il];
                    a[i][je] = 0.0;
                    if b[i] < 0.0 && b[i] > -1e-9 {
                        b[i] = 0.0;
                    }
                }
            }
            let f = obj[je];
            if f != 0.0 {
                for j in 0..cols {
                    obj[j] -= f * a[il][j];
                }
                obj[je] = 0.0;
            }
            basic[il] = je;
            iters += 1;
            if iters > cap {
                return Err(LpError::IterationLimit(cap));
            }
        }

        let residual_art: f64 = (0..m).filter(|&i| is_art(basic[i])).map(|i| b[i]).sum();
        if residual_art > EPS_LP {
            return Ok(LpOutcome::Infeasible);
        }

        let mut x = vec![0.0; ns];
        for i in 0..m {
            if basic[i] < ns {
                x[basic[i]] = b[i].max(0.0);
            }
        }
        for (idx, row) in self.rows.iter().enumerate() {
            let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * x[j]).sum();
            let violation = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
            };
            if violation > EPS_LP {
                return Err(LpError::ResidualTooLarge {
                    row: idx,
                    violation,
                });
            }
        }
        Ok(LpOutcome::Feasible(x))
    }

    /// CPLEX-style LP text, for eyeballing or feeding to an external solver.
    pub fn to_lp_text(&self) -> String {
        let mut s = String::from("Minimize\n obj:");
        if let Some(name) = self.names.first() {
            write!(s, " 0 {name}").unwrap();
        }
        s.push_str("\nSubject To\n");
        for (i, row) in self.rows.iter().enumerate() {
            write!(s, " c{i}:").unwrap();
            if row.coeffs.is_empty() {
                write!(s, " 0 {}", self.names.first().map_or("x", |n| n)).unwrap();
            }
            for &(j, c) in &row.coeffs {
                let sign = if c < 0.0 { '-' } else { '+' };
                write!(s, " {sign} {} {}", c.abs(), self.names[j]).unwrap();
            }
            let op = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
            };
            writeln!(s, " {op} {}", row.rhs).unwrap();
        }
        s.push_str("End\n");
        s
    }
}

/// Fractional per-point coverage split by class (index 0 = larger radius).
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageVector {
    pub cov1: Vec<f64>,
    pub cov2: Vec<f64>,
}

impl CoverageVector {
    pub fn zero(n: usize) -> CoverageVector {
        CoverageVector {
            cov1: vec![0.0; n],
            cov2: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.cov1.len()
    }

    pub fn class(&self, class_index: usize) -> &[f64] {
        match class_index {
            0 => &self.cov1,
            1 => &self.cov2,
            _ => panic!("coverage vector has 2 classes, asked for {class_index}"),
        }
    }

    pub fn total(&self, v: usize) -> f64 {
        self.cov1[v] + self.cov2[v]
    }
}

/// Variable indices of the covering LP, fixed by construction order:
/// allowed `x` vars of class 0, then class 1, then all `cov` vars.
#[derive(Debug, Clone)]
pub struct Lp1Layout {
    x: [Vec<Option<usize>>; 2],
    cov: [Vec<usize>; 2],
}

impl Lp1Layout {
    pub fn n(&self) -> usize {
        self.cov[0].len()
    }

    /// Opening variable for class `class_index` at `v`; `None` when a center
    /// restriction omits it.
    pub fn x(&self, class_index: usize, v: usize) -> Option<usize> {
        self.x[class_index][v]
    }

    pub fn cov(&self, class_index: usize, v: usize) -> usize {
        self.cov[class_index][v]
    }
}

#[derive(Debug)]
pub struct Lp1 {
    pub lp: LinearProgram,
    pub layout: Lp1Layout,
}

/// The covering relaxation for a 2-class instance:
/// cov_i(v) ≤ Σ_{u ∈ B(v,r_i)} x_{u,i}, cov_1(v)+cov_2(v) ≤ 1,
/// Σ_v x_{v,i} ≤ k_i, Σ_v w_v·cov(v) ≥ m. Center restrictions omit the
/// corresponding x variables.
pub fn build_lp1(instance: &Instance) -> Result<Lp1, LpError> {
    let t = instance.classes().len();
    if t != 2 {
        return Err(LpError::WrongClassCount(t));
    }
    let n = instance.n();
    let space = instance.space();
    let mut lp = LinearProgram::new();
    let mut x = [vec![None; n], vec![None; n]];
    for (class, xs) in x.iter_mut().enumerate() {
        for (v, slot) in xs.iter_mut().enumerate() {
            if instance.center_allowed(class, v) {
                *slot = Some(lp.add_var(format!("x_{}_{}", v, class + 1)));
            }
        }
    }
    let cov = [0, 1].map(|class| {
        (0..n)
            .map(|v| lp.add_var(format!("cov_{}_{}", v, class + 1)))
            .collect::<Vec<_>>()
    });

    for class in 0..2 {
        let r = instance.classes()[class].radius;
        for v in 0..n {
            let mut terms = vec![(cov[class][v], 1.0)];
            for u in space.ball_all(v, r).iter() {
                if let Some(j) = x[class][u] {
                    terms.push((j, -1.0));
                }
            }
            lp.add_constraint(&terms, Sense::Le, 0.0)?;
        }
    }
    for v in 0..n {
        lp.add_constraint(&[(cov[0][v], 1.0), (cov[1][v], 1.0)], Sense::Le, 1.0)?;
    }
    for (class, xs) in x.iter().enumerate() {
        let terms: Vec<_> = xs.iter().flatten().map(|&j| (j, 1.0)).collect();
        lp.add_constraint(&terms, Sense::Le, instance.classes()[class].budget as f64)?;
    }
    let mut target_terms = Vec::with_capacity(2 * n);
    for v in 0..n {
        let w = instance.weights()[v] as f64;
        target_terms.push((cov[0][v], w));
        target_terms.push((cov[1][v], w));
    }
    lp.add_constraint(&target_terms, Sense::Ge, instance.coverage_target() as f64)?;

    Ok(Lp1 {
        lp,
        layout: Lp1Layout { x, cov },
    })
}

/// Pulls the coverage variables out of an LP assignment, clamped into [0,1].
pub fn extract_coverages(layout: &Lp1Layout, assignment: &[f64]) -> CoverageVector {
    let n = layout.n();
    let grab = |class: usize| -> Vec<f64> {
        (0..n)
            .map(|v| assignment[layout.cov(class, v)].clamp(0.0, 1.0))
            .collect()
    };
    CoverageVector {
        cov1: grab(0),
        cov2: grab(1),
    }
}

/// An inequality over coverage variables only, keyed by (point, class).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearInequality {
    pub terms: BTreeMap<(usize, usize), f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl LinearInequality {
    pub fn lhs(&self, cov: &CoverageVector) -> f64 {
        self.terms
            .iter()
            .map(|(&(v, class), &c)| c * cov.class(class)[v])
            .sum()
    }

    /// Amount by which `cov` violates the inequality; 0 when satisfied.
    pub fn violation(&self, cov: &CoverageVector) -> f64 {
        let lhs = self.lhs(cov);
        let gap = match self.sense {
            Sense::Le => lhs - self.rhs,
            Sense::Ge => self.rhs - lhs,
        };
        gap.max(0.0)
    }

    pub fn satisfied(&self, cov: &CoverageVector, eps: f64) -> bool {
        self.violation(cov) <= eps
    }

    pub fn add_to_lp(&self, lp: &mut LinearProgram, layout: &Lp1Layout) -> Result<(), LpError> {
        let terms: Vec<(usize, f64)> = self
            .terms
            .iter()
            .map(|(&(v, class), &c)| (layout.cov(class, v), c))
            .collect();
        lp.add_constraint(&terms, self.sense, self.rhs).map(|_| ())
    }
}

/// The cuts learned so far in one round-or-cut loop.
#[derive(Debug, Clone, Default)]
pub struct CutPool {
    cuts: Vec<LinearInequality>,
}

impl CutPool {
    pub fn new() -> CutPool {
        CutPool::default()
    }

    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn cuts(&self) -> &[LinearInequality] {
        &self.cuts
    }

    /// Admits `cut` only if it is new and cuts off `current`. A duplicate
    /// means the loop relearned something, i.e. it is stalled.
    pub fn add_cut(
        &mut self,
        cut: LinearInequality,
        current: &CoverageVector,
    ) -> Result<(), LpError> {
        if self.cuts.contains(&cut) {
            return Err(LpError::DuplicateCut);
        }
        let violation = cut.violation(current);
        if violation <= EPS_LP {
            return Err(LpError::CutNotViolated(violation));
        }
        self.cuts.push(cut);
        Ok(())
    }

    pub fn apply(&self, lp: &mut LinearProgram, layout: &Lp1Layout) -> Result<(), LpError> {
        for cut in &self.cuts {
            cut.add_to_lp(lp, layout)?;
        }
        Ok(())
    }
}
