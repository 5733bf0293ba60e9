//! On-disk JSON formats: instances, solutions and run reports.

use anyhow::{bail, Context, Result};
use nukc_core::instance::{Ball, Instance, RadiusClass, Solution, VerificationReport};
use nukc_core::metric::{MetricSpace, PointSet};
use serde::{Deserialize, Serialize};

/// One ball class: at most `k` balls of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub k: usize,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallFile {
    pub center: usize,
    pub class_index: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub balls: Vec<BallFile>,
}

impl SolutionFile {
    pub fn from_solution(solution: &Solution) -> SolutionFile {
        SolutionFile {
            balls: solution
                .balls
                .iter()
                .map(|b| BallFile {
                    center: b.center,
                    class_index: b.class_index,
                    radius: b.radius,
                })
                .collect(),
        }
    }

    pub fn to_solution(&self) -> Solution {
        Solution {
            balls: self
                .balls
                .iter()
                .map(|b| Ball {
                    center: b.center,
                    class_index: b.class_index,
                    radius: b.radius,
                })
                .collect(),
        }
    }
}

/// Instance document. Exactly one of `points` (vectors, Euclidean) and
/// `distance_matrix` must be present; `weights` defaults to all ones;
/// `allowed_centers` restricts per-class center choices; `planted_solution`
/// is an optional sidecar recording a known dilation-1 witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance_matrix: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
    pub classes: Vec<ClassSpec>,
    pub coverage_target: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allowed_centers: Option<Vec<Option<Vec<usize>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub planted_solution: Option<SolutionFile>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance> {
        let space = match (&self.points, &self.distance_matrix) {
            (Some(points), None) => MetricSpace::from_points(points)
                .context("instance file: field \"points\" is invalid")?,
            (None, Some(matrix)) => MetricSpace::from_matrix(matrix.clone(), true)
                .context("instance file: field \"distance_matrix\" is invalid")?,
            (Some(_), Some(_)) => {
                bail!("instance file: give either \"points\" or \"distance_matrix\", not both")
            }
            (None, None) => {
                bail!("instance file: one of \"points\" or \"distance_matrix\" is required")
            }
        };
        let classes: Vec<RadiusClass> = self
            .classes
            .iter()
            .map(|c| RadiusClass {
                budget: c.k,
                radius: c.r,
            })
            .collect();
        let instance = match &self.weights {
            Some(w) => Instance::with_weights(space, w.clone(), classes, self.coverage_target),
            None => Instance::new(space, classes, self.coverage_target),
        }
        .context("instance file: fields \"classes\"/\"weights\"/\"coverage_target\" are invalid")?;
        match &self.allowed_centers {
            None => Ok(instance),
            Some(lists) => {
                let restriction = lists
                    .iter()
                    .map(|l| l.as_ref().map(|ids| PointSet::new(ids.clone())))
                    .collect();
                instance
                    .with_center_restriction(restriction)
                    .context("instance file: field \"allowed_centers\" is invalid")
            }
        }
    }
}

/// Verification section of a report: coverage, dilation and budget checks,
/// with any budget violations spelled out per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationFile {
    pub covered_weight: u64,
    pub coverage_target: u64,
    pub dilation: Option<f64>,
    pub per_class_dilation: Vec<Option<f64>>,
    pub budget_ok: bool,
    pub budget_violations: Vec<String>,
    pub feasible_for_target: bool,
}

impl VerificationFile {
    pub fn build(
        instance: &Instance,
        solution: &Solution,
        report: &VerificationReport,
    ) -> VerificationFile {
        let mut violations = Vec::new();
        for (i, class) in instance.classes().iter().enumerate() {
            let opened = solution.balls.iter().filter(|b| b.class_index == i).count();
            if opened > class.budget {
                violations.push(format!(
                    "class {i}: {opened} balls opened, budget is {}",
                    class.budget
                ));
            }
            for b in solution.balls.iter().filter(|b| b.class_index == i) {
                if !instance.center_allowed(i, b.center) {
                    violations.push(format!("class {i}: center {} is not allowed", b.center));
                }
            }
        }
        VerificationFile {
            covered_weight: report.covered_weight,
            coverage_target: instance.coverage_target(),
            dilation: report.dilation,
            per_class_dilation: report.per_class_dilation.clone(),
            budget_ok: report.budget_ok,
            budget_violations: violations,
            feasible_for_target: report.feasible_for_target,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutCounts {
    pub outer: usize,
    pub inner: usize,
}

/// Machine-readable result of one solve run. The `solution` and
/// `verification` sections are present exactly when `outcome` is
/// `"solution"`; `certificate` accompanies `"infeasible_at_one"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    pub outcome: String,
    pub algorithm: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tag: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dilation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    pub lp_solves: usize,
    pub cuts: CutCounts,
    pub wall_time_ms: f64,
}
