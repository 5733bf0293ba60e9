//! Problem instances and solution checking.

use crate::metric::{MetricSpace, PointSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("instance needs at least one radius class")]
    NoClasses,
    #[error("class {0} has radius {1}, must be finite and nonnegative")]
    BadRadius(usize, f64),
    #[error("class radii must be nonincreasing, class {0} has {1} after {2}")]
    RadiiNotSorted(usize, f64, f64),
    #[error("expected {0} weights, got {1}")]
    WrongWeightCount(usize, usize),
    #[error("point {0} has weight 0, weights must be positive")]
    ZeroWeight(usize),
    #[error("coverage target {0} exceeds total weight {1}")]
    TargetTooLarge(u64, u64),
    #[error("expected {0} center restriction entries, got {1}")]
    WrongRestrictionCount(usize, usize),
    #[error("center restriction for class {0} mentions point {1}, space has {2} points")]
    RestrictionOutOfRange(usize, usize, usize),
    #[error("ball {0} centered at {1}, space has {2} points")]
    CenterOutOfRange(usize, usize, usize),
    #[error("ball {0} uses class {1}, instance has {2} classes")]
    ClassOutOfRange(usize, usize, usize),
    #[error("ball {0} has radius {1}, must be finite and nonnegative")]
    BadBallRadius(usize, f64),
}

/// A budget of `budget` balls at scaled radius `radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusClass {
    pub budget: usize,
    pub radius: f64,
}

/// Weighted NUkC instance: cover weight `coverage_target` using at most
/// `budget` balls of radius `dilation * radius` per class.
#[derive(Debug, Clone)]
pub struct Instance {
    space: MetricSpace,
    weights: Vec<u64>,
    classes: Vec<RadiusClass>,
    coverage_target: u64,
    center_restriction: Vec<Option<PointSet>>,
}

impl Instance {
    /// Unit-weight instance.
    pub fn new(
        space: MetricSpace,
        classes: Vec<RadiusClass>,
        coverage_target: u64,
    ) -> Result<Instance, InstanceError> {
        let weights = vec![1; space.n()];
        Instance::with_weights(space, weights, classes, coverage_target)
    }

    pub fn with_weights(
        space: MetricSpace,
        weights: Vec<u64>,
        classes: Vec<RadiusClass>,
        coverage_target: u64,
    ) -> Result<Instance, InstanceError> {
        if classes.is_empty() {
            return Err(InstanceError::NoClasses);
        }
        for (i, c) in classes.iter().enumerate() {
            if !c.radius.is_finite() || c.radius < 0.0 {
                return Err(InstanceError::BadRadius(i, c.radius));
            }
            if i > 0 && c.radius > classes[i - 1].radius {
                return Err(InstanceError::RadiiNotSorted(
                    i,
                    c.radius,
                    classes[i - 1].radius,
                ));
            }
        }
        if weights.len() != space.n() {
            return Err(InstanceError::WrongWeightCount(space.n(), weights.len()));
        }
        if let Some(v) = weights.iter().position(|&w| w == 0) {
            return Err(InstanceError::ZeroWeight(v));
        }
        let total: u64 = weights.iter().sum();
        if coverage_target > total {
            return Err(InstanceError::TargetTooLarge(coverage_target, total));
        }
        let t = classes.len();
        Ok(Instance {
            space,
            weights,
            classes,
            coverage_target,
            center_restriction: vec![None; t],
        })
    }

    /// Restricts where balls of each class may be centered (`None` entries
    /// stay unrestricted).
    pub fn with_center_restriction(
        mut self,
        restriction: Vec<Option<PointSet>>,
    ) -> Result<Instance, InstanceError> {
        if restriction.len() != self.classes.len() {
            return Err(InstanceError::WrongRestrictionCount(
                self.classes.len(),
                restriction.len(),
            ));
        }
        for (i, set) in restriction.iter().enumerate() {
            if let Some(set) = set {
                if let Some(p) = set.iter().find(|&p| p >= self.space.n()) {
                    return Err(InstanceError::RestrictionOutOfRange(i, p, self.space.n()));
                }
            }
        }
        self.center_restriction = restriction;
        Ok(self)
    }

    pub fn space(&self) -> &MetricSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn classes(&self) -> &[RadiusClass] {
        &self.classes
    }

    pub fn coverage_target(&self) -> u64 {
        self.coverage_target
    }

    pub fn center_restriction(&self, class_index: usize) -> Option<&PointSet> {
        self.center_restriction[class_index].as_ref()
    }

    pub fn has_center_restrictions(&self) -> bool {
        self.center_restriction.iter().any(|r| r.is_some())
    }

    /// May class-`class_index` balls be centered at `v`?
    pub fn center_allowed(&self, class_index: usize, v: usize) -> bool {
        match &self.center_restriction[class_index] {
            Some(set) => set.contains(v),
            None => true,
        }
    }

    /// Same instance with all class radii multiplied by `alpha`.
    pub fn scale(&self, alpha: f64) -> Instance {
        assert!(alpha.is_finite() && alpha >= 0.0);
        let mut scaled = self.clone();
        for c in &mut scaled.classes {
            c.radius *= alpha;
        }
        scaled
    }

    /// Checks a solution: covered weight, budget compliance and dilation.
    pub fn verify(&self, solution: &Solution) -> Result<VerificationReport, InstanceError> {
        let n = self.space.n();
        let t = self.classes.len();
        for (i, b) in solution.balls.iter().enumerate() {
            if b.center >= n {
                return Err(InstanceError::CenterOutOfRange(i, b.center, n));
            }
            if b.class_index >= t {
                return Err(InstanceError::ClassOutOfRange(i, b.class_index, t));
            }
            if !b.radius.is_finite() || b.radius < 0.0 {
                return Err(InstanceError::BadBallRadius(i, b.radius));
            }
        }
        let covered_weight = (0..n)
            .filter(|&u| {
                solution
                    .balls
                    .iter()
                    .any(|b| self.space.distance(b.center, u) <= b.radius)
            })
            .map(|u| self.weights[u])
            .sum();
        let mut budget_ok = true;
        for (i, class) in self.classes.iter().enumerate() {
            let opened = solution.balls.iter().filter(|b| b.class_index == i);
            if opened.clone().count() > class.budget {
                budget_ok = false;
            }
            if opened.clone().any(|b| !self.center_allowed(i, b.center)) {
                budget_ok = false;
            }
        }
        let per_class_dilation: Vec<Option<f64>> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, class)| {
                let radii = solution
                    .balls
                    .iter()
                    .filter(|b| b.class_index == i)
                    .map(|b| b.radius);
                if class.radius > 0.0 {
                    Some(radii.fold(0.0, |acc: f64, r| acc.max(r / class.radius)))
                } else if radii.clone().all(|r| r == 0.0) {
                    Some(1.0)
                } else {
                    None
                }
            })
            .collect();
        let dilation = per_class_dilation
            .iter()
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)));
        Ok(VerificationReport {
            covered_weight,
            dilation,
            per_class_dilation,
            budget_ok,
            feasible_for_target: covered_weight >= self.coverage_target && budget_ok,
        })
    }
}

/// One opened ball.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: usize,
    pub class_index: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Solution {
    pub balls: Vec<Ball>,
}

impl Solution {
    pub fn empty() -> Solution {
        Solution { balls: Vec::new() }
    }
}

/// Result of [`Instance::verify`]. `dilation` is `None` when some class of
/// radius zero opened a ball of positive radius, which no finite dilation
/// explains.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub covered_weight: u64,
    pub dilation: Option<f64>,
    pub per_class_dilation: Vec<Option<f64>>,
    pub budget_ok: bool,
    pub feasible_for_target: bool,
}
