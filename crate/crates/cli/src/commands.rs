//! The three subcommands: solve, generate and verify.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nukc_core::gen;
use nukc_core::instance::{Instance, RadiusClass};
use nukc_core::solver::{
    binary_search_dilation, solve_2nukc, solve_3nukc, solve_contracted, solve_kcenter,
    solve_robust2, solve_robust_kcenter, CutKind, DilationSearchOutcome, FeasibilityOutcome,
    SolveOptions, SolveTrace, SolverError,
};

use crate::schema::{
    ClassSpec, CutCounts, InstanceFile, RunReport, SolutionFile, VerificationFile,
};

pub const EXIT_SOLUTION: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Auto,
    Robust2,
    Contracted,
    Nukc2,
    Nukc3,
    Kcenter,
    RobustKcenter,
}

#[derive(Debug, Clone, Copy)]
pub enum Mode {
    Fixed(f64),
    Search,
}

type SolveFn =
    fn(&Instance, &SolveOptions) -> Result<(FeasibilityOutcome, SolveTrace), SolverError>;

/// Picks the solver. `auto` dispatches on class count and on whether the
/// coverage target demands everything.
fn dispatch(algorithm: Algorithm, instance: &Instance) -> Result<(&'static str, SolveFn)> {
    Ok(match algorithm {
        Algorithm::Auto => {
            let t = instance.classes().len();
            let robust = instance.coverage_target() < instance.total_weight();
            match (t, robust) {
                (1, false) => ("kcenter", solve_kcenter as SolveFn),
                (1, true) => ("robust-kcenter", solve_robust_kcenter),
                (2, false) => ("nukc2", solve_2nukc),
                (2, true) => ("robust2", solve_robust2),
                (3, false) => ("nukc3", solve_3nukc),
                (3, true) => bail!(
                    "no solver handles robust 3-class instances; \
                     raise coverage_target to the total weight or drop a class"
                ),
                (t, _) => bail!("auto dispatch handles 1 to 3 classes, instance has {t}"),
            }
        }
        Algorithm::Robust2 => ("robust2", solve_robust2 as SolveFn),
        Algorithm::Contracted => ("contracted", solve_contracted),
        Algorithm::Nukc2 => ("nukc2", solve_2nukc),
        Algorithm::Nukc3 => ("nukc3", solve_3nukc),
        Algorithm::Kcenter => ("kcenter", solve_kcenter),
        Algorithm::RobustKcenter => ("robust-kcenter", solve_robust_kcenter),
    })
}

fn cut_counts(trace: &SolveTrace) -> CutCounts {
    let outer = trace
        .records
        .iter()
        .filter(|r| matches!(r.kind, CutKind::Outer))
        .count();
    CutCounts {
        outer,
        inner: trace.records.len() - outer,
    }
}

pub fn read_instance(path: &Path) -> Result<InstanceFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{}: instance schema violation", path.display()))
}

pub fn read_solution(path: &Path) -> Result<SolutionFile> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text)
        .with_context(|| format!("{}: solution schema violation", path.display()))
}

fn blank_report(algorithm: &str, mode: String, trace: &SolveTrace) -> RunReport {
    RunReport {
        outcome: String::new(),
        algorithm: algorithm.to_owned(),
        mode,
        tag: None,
        dilation: None,
        solution: None,
        verification: None,
        certificate: None,
        certified: None,
        lp_solves: trace.lp_solves,
        cuts: cut_counts(trace),
        wall_time_ms: 0.0,
    }
}

pub fn cmd_solve(
    path: &Path,
    algorithm: Algorithm,
    mode: Mode,
    max_iterations: Option<usize>,
) -> Result<(RunReport, i32)> {
    let file = read_instance(path)?;
    let instance = file.to_instance()?;
    let (name, solve) = dispatch(algorithm, &instance)?;
    let mut options = SolveOptions::default();
    if let Some(cap) = max_iterations {
        options.round_cap = Some(cap);
    }
    let start = Instant::now();
    let (mut report, code) = match mode {
        Mode::Fixed(lambda) => {
            if !(lambda.is_finite() && lambda >= 0.0) {
                bail!("--dilation must be finite and nonnegative, got {lambda}");
            }
            let (outcome, trace) = solve(&instance.scale(lambda), &options)?;
            let mut report = blank_report(name, format!("dilation:{lambda}"), &trace);
            let code = match outcome {
                FeasibilityOutcome::Solution { solution, tag } => {
                    let checked = instance.verify(&solution)?;
                    report.outcome = "solution".into();
                    report.tag = Some(tag);
                    report.dilation = Some(lambda);
                    report.verification =
                        Some(VerificationFile::build(&instance, &solution, &checked));
                    report.solution = Some(SolutionFile::from_solution(&solution));
                    EXIT_SOLUTION
                }
                FeasibilityOutcome::InfeasibleAtOne { certificate } => {
                    report.outcome = "infeasible_at_one".into();
                    report.certificate = Some(certificate);
                    report.certified = Some(true);
                    EXIT_INFEASIBLE
                }
                FeasibilityOutcome::NotFoundUncertified => {
                    report.outcome = "not_found".into();
                    report.certified = Some(false);
                    EXIT_UNCERTIFIED
                }
            };
            (report, code)
        }
        Mode::Search => {
            let (outcome, trace) = binary_search_dilation(&instance, &options, solve)?;
            let mut report = blank_report(name, "binary-search".into(), &trace);
            let code = match outcome {
                DilationSearchOutcome::Found {
                    dilation,
                    solution,
                    tag,
                } => {
                    let checked = instance.verify(&solution)?;
                    report.outcome = "solution".into();
                    report.tag = Some(tag);
                    report.dilation = Some(dilation);
                    report.verification =
                        Some(VerificationFile::build(&instance, &solution, &checked));
                    report.solution = Some(SolutionFile::from_solution(&solution));
                    EXIT_SOLUTION
                }
                DilationSearchOutcome::Infeasible { certified } => {
                    report.outcome = if certified {
                        "infeasible_at_one".into()
                    } else {
                        "not_found".into()
                    };
                    report.certified = Some(certified);
                    if certified {
                        EXIT_INFEASIBLE
                    } else {
                        EXIT_UNCERTIFIED
                    }
                }
            };
            (report, code)
        }
    };
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((report, code))
}

/// Parses "k1:r1,k2:r2[,...]" into classes; radii must be non-increasing.
pub fn parse_classes(spec: &str) -> Result<Vec<RadiusClass>> {
    let mut out: Vec<RadiusClass> = Vec::new();
    for (i, part) in spec.split(',').enumerate() {
        let (k, r) = part
            .trim()
            .split_once(':')
            .with_context(|| format!("class {i}: expected \"k:r\", got {part:?}"))?;
        let budget: usize = k
            .trim()
            .parse()
            .with_context(|| format!("class {i}: bad budget {k:?}"))?;
        let radius: f64 = r
            .trim()
            .parse()
            .with_context(|| format!("class {i}: bad radius {r:?}"))?;
        if !radius.is_finite() || radius < 0.0 {
            bail!("class {i}: radius must be finite and nonnegative, got {radius}");
        }
        if let Some(prev) = out.last() {
            if radius > prev.radius {
                bail!(
                    "class {i}: radius {radius} exceeds the previous class radius {}; \
                     list classes with non-increasing radii",
                    prev.radius
                );
            }
        }
        out.push(RadiusClass { budget, radius });
    }
    Ok(out)
}

pub fn cmd_generate(
    seed: u64,
    n: usize,
    classes: &str,
    planted: bool,
    target: Option<u64>,
) -> Result<InstanceFile> {
    if n == 0 {
        bail!("--n must be at least 1");
    }
    let classes = parse_classes(classes)?;
    let generated = if planted {
        gen::planted(seed, n, &classes, target)
    } else {
        gen::uniform(seed, n, &classes, target)
    };
    Ok(InstanceFile {
        points: Some(generated.points.iter().map(|p| p.to_vec()).collect()),
        distance_matrix: None,
        weights: Some(generated.weights.clone()),
        classes: generated
            .classes
            .iter()
            .map(|c| ClassSpec {
                k: c.budget,
                r: c.radius,
            })
            .collect(),
        coverage_target: generated.coverage_target,
        allowed_centers: None,
        planted_solution: generated
            .planted_solution
            .as_ref()
            .map(SolutionFile::from_solution),
    })
}

pub fn cmd_verify(instance_path: &Path, solution_path: &Path) -> Result<(VerificationFile, i32)> {
    let instance = read_instance(instance_path)?.to_instance()?;
    let solution = read_solution(solution_path)?.to_solution();
    let report = instance.verify(&solution)?;
    let file = VerificationFile::build(&instance, &solution, &report);
    let code = if file.feasible_for_target {
        EXIT_SOLUTION
    } else {
        EXIT_INFEASIBLE
    };
    Ok((file, code))
}
