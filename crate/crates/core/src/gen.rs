//! Seeded random instance generation.
//!
//! `planted` builds instances around a known dilation-1 solution: centers
//! are instance points, the remaining points are scattered strictly inside
//! the prescribed balls, and any uncovered slack becomes far-away outliers.
//! All generators are deterministic in the seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Ball, Instance, RadiusClass, Solution};
use crate::metric::MetricSpace;

const BOX_SIDE: f64 = 100.0;

/// A generated instance plus the data needed to serialize or test it.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<u64>,
    pub classes: Vec<RadiusClass>,
    pub coverage_target: u64,
    /// Dilation-1 witness, present for planted instances.
    pub planted_solution: Option<Solution>,
}

impl Generated {
    pub fn instance(&self) -> Instance {
        let coords: Vec<Vec<f64>> = self.points.iter().map(|p| p.to_vec()).collect();
        let space = MetricSpace::from_points(&coords).expect("generated points are well formed");
        Instance::with_weights(
            space,
            self.weights.clone(),
            self.classes.clone(),
            self.coverage_target,
        )
        .expect("generated instances are well formed")
    }
}

/// Instance with a planted dilation-1 solution covering at least
/// `target` points (default: all). Unit weights.
pub fn planted(seed: u64, n: usize, classes: &[RadiusClass], target: Option<u64>) -> Generated {
    assert!(n >= 1, "need at least one point");
    assert!(!classes.is_empty(), "need at least one class");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Place as many centers as budgets and n allow; record (class, index).
    let mut raw: Vec<[f64; 2]> = Vec::with_capacity(n);
    let mut center_slots: Vec<(usize, usize)> = Vec::new();
    'placing: for (ci, class) in classes.iter().enumerate() {
        for _ in 0..class.budget {
            if raw.len() == n {
                break 'placing;
            }
            center_slots.push((ci, raw.len()));
            raw.push([
                rng.random_range(0.0..BOX_SIDE),
                rng.random_range(0.0..BOX_SIDE),
            ]);
        }
    }
    let placed = raw.len();

    let mut m = target.unwrap_or(n as u64).min(n as u64);
    if center_slots.is_empty() {
        m = 0;
    }
    let covered_goal = (placed as u64).max(m) as usize;

    // Scatter covered points strictly inside a random planted ball.
    for _ in placed..covered_goal {
        let &(ci, center) = &center_slots[rng.random_range(0..center_slots.len())];
        let r = classes[ci].radius;
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        let dist = r * rng.random_range(0.0..0.999);
        raw.push([
            raw[center][0] + dist * theta.cos(),
            raw[center][1] + dist * theta.sin(),
        ]);
    }

    // Slack becomes outliers far from the box and from each other.
    for j in 0..n - covered_goal {
        raw.push([1.0e4 + 1.0e4 * j as f64, 1.0e4]);
    }

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let points: Vec<[f64; 2]> = perm.iter().map(|&old| raw[old]).collect();

    let balls = center_slots
        .iter()
        .map(|&(ci, center)| Ball {
            center: inv[center],
            class_index: ci,
            radius: classes[ci].radius,
        })
        .collect();

    Generated {
        points,
        weights: vec![1; n],
        classes: classes.to_vec(),
        coverage_target: m,
        planted_solution: Some(Solution { balls }),
    }
}

/// Uniform scatter in a box, no feasibility guarantee. Unit weights.
pub fn uniform(seed: u64, n: usize, classes: &[RadiusClass], target: Option<u64>) -> Generated {
    assert!(n >= 1, "need at least one point");
    assert!(!classes.is_empty(), "need at least one class");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            [
                rng.random_range(0.0..BOX_SIDE),
                rng.random_range(0.0..BOX_SIDE),
            ]
        })
        .collect();
    Generated {
        points,
        weights: vec![1; n],
        classes: classes.to_vec(),
        coverage_target: target.unwrap_or(n as u64).min(n as u64),
        planted_solution: None,
    }
}

/// Weighted 2-class instance with r_2 = 0 and pairwise-distinct points,
/// the shape the contracted solver consumes. Random weights in 1..=5 and a
/// random coverage target.
pub fn contracted(seed: u64, n: usize, k1: usize, k2: usize, r1: f64) -> Generated {
    assert!(n >= 1, "need at least one point");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
    while points.len() < n {
        let p = [
            rng.random_range(0.0..BOX_SIDE),
            rng.random_range(0.0..BOX_SIDE),
        ];
        if points
            .iter()
            .all(|q| (q[0] - p[0]).hypot(q[1] - p[1]) > 1e-9)
        {
            points.push(p);
        }
    }
    let weights: Vec<u64> = (0..n).map(|_| rng.random_range(1..=5)).collect();
    let total: u64 = weights.iter().sum();
    Generated {
        points,
        weights,
        classes: vec![
            RadiusClass {
                budget: k1,
                radius: r1,
            },
            RadiusClass {
                budget: k2,
                radius: 0.0,
            },
        ],
        coverage_target: rng.random_range(0..=total),
        planted_solution: None,
    }
}
