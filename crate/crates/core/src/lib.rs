//! Solvers for the non-uniform k-center problem with outliers (NUkC).
//!
//! An instance consists of a finite (pseudo-)metric space, integer point
//! weights, radius classes `(k_i, r_i)` with `r_1 >= ... >= r_t`, and a
//! coverage target `m`. A solution opens at most `k_i` balls per class and
//! is judged by its dilation: the largest factor by which an opened radius
//! exceeds its class radius. The library provides
//!
//! * constant-factor feasibility solvers: [`solver::solve_robust2`] (two
//!   classes with outliers, dilation at most 10), [`solver::solve_3nukc`]
//!   (three classes, full coverage, at most 22), [`solver::solve_2nukc`]
//!   (two classes, full coverage, at most 8),
//! * an exact dynamic program for laminar instances ([`laminar`]),
//! * brute-force oracles for small instances ([`oracle`]),
//! * dilation optimization by binary search over the candidate set
//!   ([`solver::binary_search_dilation`]),
//! * deterministic instance generators used by tests and the CLI ([`gen`]).
//!
//! Everything is deterministic: greedy ties break toward the lowest point
//! index and randomness only enters through explicitly seeded generators.

// Points, LP columns, and DP cells are plain indices throughout; indexed
// loops are the house idiom and several pivot loops touch two rows at once.
#![allow(clippy::needless_range_loop)]

pub mod gen;
pub mod greedy;
pub mod instance;
pub mod laminar;
pub mod lp;
pub mod metric;
pub mod oracle;
pub mod solver;

pub use greedy::{Partition, TwoLevelTree};
pub use instance::{Ball, Instance, RadiusClass, Solution, VerificationReport};
pub use lp::{CoverageVector, CutPool, LinearInequality, LinearProgram};
pub use metric::{IndexMap, MetricSpace, PointSet};
pub use solver::{FeasibilityOutcome, SolveOptions, SolveTrace};
