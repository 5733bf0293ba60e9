//! Brute-force ground truth at tiny scales.
//!
//! Exhaustive center enumeration with coverage bitmasks and an optimistic
//! pruning bound. Deliberately obvious code: this module is the referee
//! for everything clever elsewhere.

use std::collections::BTreeSet;

use crate::instance::{Ball, Instance, Solution};
use crate::lp::CoverageVector;
use thiserror::Error;

/// Size limits for exhaustive enumeration.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    pub max_points: usize,
    pub max_total_budget: usize,
}

impl Default for OracleCaps {
    fn default() -> OracleCaps {
        OracleCaps {
            max_points: 14,
            max_total_budget: 6,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("instance has {0} points, oracle capped at {1}")]
    TooManyPoints(usize, usize),
    #[error("effective total budget {0} exceeds oracle cap {1}")]
    BudgetTooLarge(usize, usize),
    #[error("no candidate dilation is feasible")]
    NoFeasibleDilation,
    #[error("coverage enumeration requires exactly 2 classes, instance has {0}")]
    WrongClassCount(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub feasible: bool,
    pub witness: Option<Solution>,
    pub optimum_dilation: Option<f64>,
}

struct ClassBalls {
    budget: usize,
    radius: f64,
    balls: Vec<(usize, u32)>,
    best_ball_weight: u64,
}

fn mask_weight(weights: &[u64], mask: u32) -> u64 {
    weights
        .iter()
        .enumerate()
        .filter(|&(v, _)| mask >> v & 1 == 1)
        .map(|(_, &w)| w)
        .sum()
}

fn prepare(
    instance: &Instance,
    alpha: f64,
    caps: OracleCaps,
) -> Result<Vec<ClassBalls>, OracleError> {
    let n = instance.n();
    let limit = caps.max_points.min(32);
    if n > limit {
        return Err(OracleError::TooManyPoints(n, limit));
    }
    let space = instance.space();
    let weights = instance.weights();
    let mut prepared = Vec::with_capacity(instance.classes().len());
    let mut effective_total = 0usize;
    for (ci, class) in instance.classes().iter().enumerate() {
        let radius = alpha * class.radius;
        let balls: Vec<(usize, u32)> = (0..n)
            .filter(|&u| instance.center_allowed(ci, u))
            .map(|u| {
                let mut mask = 0u32;
                for p in space.ball_all(u, radius).iter() {
                    mask |= 1 << p;
                }
                (u, mask)
            })
            .collect();
        let budget = class.budget.min(balls.len());
        effective_total += budget;
        let best_ball_weight = balls
            .iter()
            .map(|&(_, mask)| mask_weight(weights, mask))
            .max()
            .unwrap_or(0);
        prepared.push(ClassBalls {
            budget,
            radius,
            balls,
            best_ball_weight,
        });
    }
    if effective_total > caps.max_total_budget {
        return Err(OracleError::BudgetTooLarge(
            effective_total,
            caps.max_total_budget,
        ));
    }
    Ok(prepared)
}

struct Search<'a, F> {
    classes: &'a [ClassBalls],
    weights: &'a [u64],
    target: u64,
    /// suffix_bound[ci] = best conceivable weight from classes after ci.
    suffix_bound: Vec<u64>,
    chosen: Vec<Vec<usize>>,
    visit: F,
}

impl<F: FnMut(&[Vec<usize>], u32, u64) -> bool> Search<'_, F> {
    /// Returns false when the visitor asked to stop.
    fn run(&mut self, ci: usize, idx: usize, left: usize, mask: u32, covered: u64) -> bool {
        if ci == self.classes.len() {
            return (self.visit)(&self.chosen, mask, covered);
        }
        let cb = &self.classes[ci];
        let optimistic = covered + left as u64 * cb.best_ball_weight + self.suffix_bound[ci];
        if optimistic < self.target {
            return true;
        }
        if idx == cb.balls.len() || left == 0 {
            let next_budget = self.classes.get(ci + 1).map_or(0, |c| c.budget);
            return self.run(ci + 1, 0, next_budget, mask, covered);
        }
        if !self.run(ci, idx + 1, left, mask, covered) {
            return false;
        }
        let (center, bmask) = self.classes[ci].balls[idx];
        let gained = mask_weight(self.weights, bmask & !mask);
        self.chosen[ci].push(center);
        let keep_going = self.run(ci, idx + 1, left - 1, mask | bmask, covered + gained);
        self.chosen[ci].pop();
        keep_going
    }
}

fn for_each_tuple<F: FnMut(&[Vec<usize>], u32, u64) -> bool>(
    classes: &[ClassBalls],
    weights: &[u64],
    target: u64,
    visit: F,
) {
    let t = classes.len();
    let mut suffix_bound = vec![0u64; t];
    for ci in (0..t.saturating_sub(1)).rev() {
        suffix_bound[ci] =
            suffix_bound[ci + 1] + classes[ci + 1].budget as u64 * classes[ci + 1].best_ball_weight;
    }
    let mut search = Search {
        classes,
        weights,
        target,
        suffix_bound,
        chosen: vec![Vec::new(); t],
        visit,
    };
    let first_budget = classes.first().map_or(0, |c| c.budget);
    search.run(0, 0, first_budget, 0, 0);
}

fn tuple_to_solution(classes: &[ClassBalls], chosen: &[Vec<usize>]) -> Solution {
    let balls = chosen
        .iter()
        .enumerate()
        .flat_map(|(ci, centers)| {
            centers.iter().map(move |&center| Ball {
                center,
                class_index: ci,
                radius: classes[ci].radius,
            })
        })
        .collect();
    Solution { balls }
}

/// Exact feasibility of `instance` with all radii dilated by `alpha`.
pub fn brute_feasible(
    instance: &Instance,
    alpha: f64,
    caps: OracleCaps,
) -> Result<OracleResult, OracleError> {
    let classes = prepare(instance, alpha, caps)?;
    let m = instance.coverage_target();
    let mut witness: Option<Solution> = None;
    for_each_tuple(&classes, instance.weights(), m, |chosen, _, covered| {
        if covered >= m {
            witness = Some(tuple_to_solution(&classes, chosen));
            false
        } else {
            true
        }
    });
    Ok(OracleResult {
        feasible: witness.is_some(),
        witness,
        optimum_dilation: None,
    })
}

/// All dilations at which feasibility can change: pairwise distances divided
/// by each positive class radius, plus zero.
pub fn candidate_dilations(instance: &Instance) -> Vec<f64> {
    let space = instance.space();
    let mut out = vec![0.0];
    for class in instance.classes() {
        if class.radius > 0.0 {
            for u in 0..space.n() {
                for v in u + 1..space.n() {
                    out.push(space.distance(u, v) / class.radius);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Exact smallest feasible dilation, found by binary search over the
/// candidate set (feasibility is monotone in the dilation).
pub fn brute_optimum(instance: &Instance, caps: OracleCaps) -> Result<OracleResult, OracleError> {
    let lambda = candidate_dilations(instance);
    let top = brute_feasible(instance, *lambda.last().unwrap(), caps)?;
    if !top.feasible {
        return Err(OracleError::NoFeasibleDilation);
    }
    let mut lo = 0usize;
    let mut hi = lambda.len() - 1;
    while lo < hi {
        let mid = (lo + hi) / 2;
        if brute_feasible(instance, lambda[mid], caps)?.feasible {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let best = brute_feasible(instance, lambda[hi], caps)?;
    Ok(OracleResult {
        feasible: true,
        witness: best.witness,
        optimum_dilation: Some(lambda[hi]),
    })
}

/// Every integral dilation-1 solution (deduplicated by coverage) of a
/// 2-class instance, paired with its canonical coverage vector: a covered
/// point is charged to the smallest class index that covers it.
pub fn enumerate_integral_solutions(
    instance: &Instance,
    caps: OracleCaps,
) -> Result<Vec<(Solution, CoverageVector)>, OracleError> {
    let t = instance.classes().len();
    if t != 2 {
        return Err(OracleError::WrongClassCount(t));
    }
    let classes = prepare(instance, 1.0, caps)?;
    let n = instance.n();
    let m = instance.coverage_target();
    let mut seen: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut out: Vec<(Solution, CoverageVector)> = Vec::new();
    for_each_tuple(&classes, instance.weights(), m, |chosen, _, covered| {
        if covered < m {
            return true;
        }
        let union_of = |ci: usize| -> u32 {
            chosen[ci]
                .iter()
                .map(|&c| {
                    classes[ci]
                        .balls
                        .iter()
                        .find(|&&(center, _)| center == c)
                        .expect("chosen centers come from the ball list")
                        .1
                })
                .fold(0, |acc, mask| acc | mask)
        };
        let mask1 = union_of(0);
        let mask2 = union_of(1) & !mask1;
        if seen.insert((mask1, mask2)) {
            let bit = |mask: u32, v: usize| if mask >> v & 1 == 1 { 1.0 } else { 0.0 };
            let cov = CoverageVector {
                cov1: (0..n).map(|v| bit(mask1, v)).collect(),
                cov2: (0..n).map(|v| bit(mask2, v)).collect(),
            };
            out.push((tuple_to_solution(&classes, chosen), cov));
        }
        true
    });
    Ok(out)
}

/// Canonical coverage vectors of all integral dilation-1 solutions; the
/// generators used to audit cut validity.
pub fn enumerate_integral_coverages(
    instance: &Instance,
    caps: OracleCaps,
) -> Result<Vec<CoverageVector>, OracleError> {
    Ok(enumerate_integral_solutions(instance, caps)?
        .into_iter()
        .map(|(_, cov)| cov)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::instance::RadiusClass;
    use crate::lp::{build_lp1, EPS_LP};
    use crate::metric::{MetricSpace, PointSet};

    fn line(coords: &[f64]) -> MetricSpace {
        MetricSpace::from_points(&coords.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    fn inst(coords: &[f64], classes: &[(usize, f64)], m: u64) -> Instance {
        Instance::new(
            line(coords),
            classes
                .iter()
                .map(|&(budget, radius)| RadiusClass { budget, radius })
                .collect(),
            m,
        )
        .unwrap()
    }

    #[test]
    fn zero_target_always_feasible() {
        let r = brute_feasible(
            &inst(&[0.0, 50.0], &[(0, 1.0)], 0),
            1.0,
            OracleCaps::default(),
        )
        .unwrap();
        assert!(r.feasible);
        assert!(r.witness.unwrap().balls.is_empty());
    }

    #[test]
    fn one_small_ball_cannot_cover_two_far_points() {
        let instance = inst(&[0.0, 10.0], &[(1, 1.0)], 2);
        let caps = OracleCaps::default();
        assert!(!brute_feasible(&instance, 1.0, caps).unwrap().feasible);
        let at_ten = brute_feasible(&instance, 10.0, caps).unwrap();
        assert!(at_ten.feasible);
        let report = instance
            .scale(10.0)
            .verify(&at_ten.witness.unwrap())
            .unwrap();
        assert!(report.feasible_for_target);
    }

    #[test]
    fn three_equidistant_points_need_dilation_two() {
        let d = vec![
            vec![0.0, 2.0, 2.0],
            vec![2.0, 0.0, 2.0],
            vec![2.0, 2.0, 0.0],
        ];
        let space = MetricSpace::from_matrix(d, true).unwrap();
        let instance = Instance::new(
            space,
            vec![
                RadiusClass {
                    budget: 1,
                    radius: 1.0,
                },
                RadiusClass {
                    budget: 1,
                    radius: 1.0,
                },
            ],
            3,
        )
        .unwrap();
        let r = brute_optimum(&instance, OracleCaps::default()).unwrap();
        assert_eq!(r.optimum_dilation, Some(2.0));
        let report = instance.scale(2.0).verify(&r.witness.unwrap()).unwrap();
        assert!(report.feasible_for_target);
    }

    #[test]
    fn single_point_has_optimum_zero() {
        let r = brute_optimum(&inst(&[5.0], &[(1, 2.0)], 1), OracleCaps::default()).unwrap();
        assert_eq!(r.optimum_dilation, Some(0.0));
    }

    #[test]
    fn zero_budget_with_demand_has_no_dilation() {
        let err =
            brute_optimum(&inst(&[0.0, 1.0], &[(0, 1.0)], 1), OracleCaps::default()).unwrap_err();
        assert_eq!(err, OracleError::NoFeasibleDilation);
    }

    #[test]
    fn caps_are_enforced() {
        let caps = OracleCaps::default();
        let coords: Vec<f64> = (0..15).map(|i| i as f64).collect();
        assert_eq!(
            brute_feasible(&inst(&coords, &[(1, 1.0)], 0), 1.0, caps).unwrap_err(),
            OracleError::TooManyPoints(15, 14)
        );
        assert_eq!(
            brute_feasible(
                &inst(
                    &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0],
                    &[(4, 1.0), (4, 0.5)],
                    0
                ),
                1.0,
                caps
            )
            .unwrap_err(),
            OracleError::BudgetTooLarge(8, 6)
        );
        // Budgets above the number of allowed centers count at their
        // effective size.
        assert!(brute_feasible(&inst(&[0.0, 1.0], &[(50, 1.0)], 2), 1.0, caps).is_ok());
    }

    #[test]
    fn feasibility_is_monotone_in_dilation() {
        for seed in 0..25u64 {
            let g = gen::uniform(
                seed,
                7,
                &[
                    RadiusClass {
                        budget: 2,
                        radius: 6.0,
                    },
                    RadiusClass {
                        budget: 1,
                        radius: 2.0,
                    },
                ],
                Some(6),
            );
            let instance = g.instance();
            let caps = OracleCaps::default();
            let mut seen_feasible = false;
            for lambda in candidate_dilations(&instance) {
                let feasible = brute_feasible(&instance, lambda, caps).unwrap().feasible;
                assert!(
                    !seen_feasible || feasible,
                    "seed {seed} regressed at {lambda}"
                );
                seen_feasible |= feasible;
            }
        }
    }

    #[test]
    fn planted_instances_have_optimum_at_most_one() {
        for seed in 0..20u64 {
            let g = gen::planted(
                seed,
                9,
                &[
                    RadiusClass {
                        budget: 2,
                        radius: 7.0,
                    },
                    RadiusClass {
                        budget: 1,
                        radius: 2.0,
                    },
                ],
                Some(7),
            );
            let r = brute_optimum(&g.instance(), OracleCaps::default()).unwrap();
            assert!(r.optimum_dilation.unwrap() <= 1.0, "seed {seed}");
        }
    }

    #[test]
    fn coverage_enumeration_zero_budgets() {
        let vectors = enumerate_integral_coverages(
            &inst(&[0.0, 1.0], &[(0, 1.0), (0, 0.5)], 0),
            OracleCaps::default(),
        )
        .unwrap();
        assert_eq!(vectors, vec![CoverageVector::zero(2)]);
    }

    #[test]
    fn coverage_enumeration_single_point() {
        let vectors = enumerate_integral_coverages(
            &inst(&[0.0], &[(1, 1.0), (0, 0.5)], 0),
            OracleCaps::default(),
        )
        .unwrap();
        assert_eq!(vectors.len(), 2);
        assert!(vectors.contains(&CoverageVector::zero(1)));
        assert!(vectors.contains(&CoverageVector {
            cov1: vec![1.0],
            cov2: vec![0.0],
        }));
    }

    #[test]
    fn coverage_enumeration_respects_target() {
        // With m = 2 the empty and single-point coverages disappear.
        let vectors = enumerate_integral_coverages(
            &inst(&[0.0, 3.0], &[(2, 1.0), (0, 0.5)], 2),
            OracleCaps::default(),
        )
        .unwrap();
        assert_eq!(vectors.len(), 1);
        assert_eq!(vectors[0].cov1, vec![1.0, 1.0]);
    }

    #[test]
    fn canonical_vectors_prefer_the_first_class() {
        let vectors = enumerate_integral_coverages(
            &inst(&[0.0], &[(1, 1.0), (1, 1.0)], 1),
            OracleCaps::default(),
        )
        .unwrap();
        for cov in &vectors {
            if cov.cov1[0] == 1.0 {
                assert_eq!(cov.cov2[0], 0.0);
            }
        }
        assert!(vectors
            .iter()
            .any(|c| c.cov1 == vec![1.0] && c.cov2 == vec![0.0]));
        // cov2-only appears too: the tuple that opens only a class-2 ball.
        assert!(vectors
            .iter()
            .any(|c| c.cov1 == vec![0.0] && c.cov2 == vec![1.0]));
    }

    #[test]
    fn every_integral_solution_substitutes_into_the_relaxation() {
        let instance = inst(&[0.0, 2.0, 5.0, 9.0], &[(1, 2.0), (1, 1.0)], 2);
        let lp1 = build_lp1(&instance).unwrap();
        let pairs = enumerate_integral_solutions(&instance, OracleCaps::default()).unwrap();
        assert!(!pairs.is_empty());
        for (solution, cov) in &pairs {
            let mut assignment = vec![0.0; lp1.lp.num_vars()];
            for ball in &solution.balls {
                assignment[lp1.layout.x(ball.class_index, ball.center).unwrap()] = 1.0;
            }
            for v in 0..instance.n() {
                assignment[lp1.layout.cov(0, v)] = cov.cov1[v];
                assignment[lp1.layout.cov(1, v)] = cov.cov2[v];
            }
            assert!(lp1.lp.max_violation(&assignment) <= EPS_LP);
            let report = instance.verify(solution).unwrap();
            assert!(report.feasible_for_target);
        }
    }

    #[test]
    fn restricted_centers_never_get_picked() {
        let instance = inst(&[0.0, 3.0], &[(1, 5.0), (0, 1.0)], 1)
            .with_center_restriction(vec![Some(PointSet::new(vec![1])), None])
            .unwrap();
        let pairs = enumerate_integral_solutions(&instance, OracleCaps::default()).unwrap();
        for (solution, _) in &pairs {
            for ball in &solution.balls {
                assert_eq!(ball.center, 1);
            }
        }
        let best = brute_feasible(&instance, 1.0, OracleCaps::default()).unwrap();
        assert!(best.feasible);
        assert!(best.witness.unwrap().balls.iter().all(|b| b.center == 1));
    }
}
