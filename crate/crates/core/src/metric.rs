//! Finite pseudo-metric spaces stored as dense distance matrices.
//!
//! Points are identified by their index `0..n`. Distances of zero between
//! distinct points are allowed (co-located points); validation tolerates
//! ingestion noise up to `1e-9 * max(max entry, 1)` but all queries use the
//! stored values exactly.

use crate::greedy::Partition;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("point set is empty")]
    Empty,
    #[error("point {0} has dimension {1}, expected {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("distance matrix row {0} has length {1}, expected {2}")]
    NotSquare(usize, usize, usize),
    #[error("distance entry ({0},{1}) is {2}, must be finite and nonnegative")]
    BadEntry(usize, usize, f64),
    #[error("diagonal entry ({0},{0}) is {1}, must be zero")]
    NonzeroDiagonal(usize, f64),
    #[error("asymmetric pair ({0},{1}): {2} vs {3}")]
    Asymmetric(usize, usize, f64, f64),
    #[error("triangle inequality violated at ({0},{1},{2}): d={3} > {4}")]
    TriangleViolation(usize, usize, usize, f64, f64),
    #[error("restriction keeps no points")]
    EmptyRestriction,
    #[error("point index {0} out of range for {1} points")]
    IndexOutOfRange(usize, usize),
    #[error("partition does not cover/partition the space: {0}")]
    BadPartition(String),
}

/// Sorted, duplicate-free set of point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet(Vec<usize>);

impl PointSet {
    /// Builds a set from arbitrary indices, sorting and deduplicating.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        PointSet(indices)
    }

    /// The full set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        PointSet((0..n).collect())
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn intersect(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|p| other.contains(*p)).collect())
    }

    /// Set difference `self \ other`.
    pub fn minus(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|p| !other.contains(*p)).collect())
    }
}

impl FromIterator<usize> for PointSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

/// Index translation produced by [`MetricSpace::restrict`]: the restricted
/// space renumbers kept points consecutively.
#[derive(Debug, Clone)]
pub struct IndexMap {
    new_to_old: Vec<usize>,
    old_to_new: Vec<Option<usize>>,
}

impl IndexMap {
    pub fn identity(n: usize) -> Self {
        IndexMap {
            new_to_old: (0..n).collect(),
            old_to_new: (0..n).map(Some).collect(),
        }
    }

    pub fn to_old(&self, new: usize) -> usize {
        self.new_to_old[new]
    }

    pub fn to_new(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.new_to_old.len()
    }

    pub fn is_empty(&self) -> bool {
        self.new_to_old.is_empty()
    }
}

/// Finite pseudo-metric space over points `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace {
    dist: Vec<Vec<f64>>,
}

impl MetricSpace {
    /// Euclidean metric over coordinate vectors of equal dimension.
    pub fn from_points(coords: &[Vec<f64>]) -> Result<MetricSpace, MetricError> {
        if coords.is_empty() {
            return Err(MetricError::Empty);
        }
        let dim = coords[0].len();
        for (i, c) in coords.iter().enumerate() {
            if c.len() != dim {
                return Err(MetricError::DimensionMismatch(i, c.len(), dim));
            }
        }
        let n = coords.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..i {
                let d = coords[i]
                    .iter()
                    .zip(&coords[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                dist[i][j] = d;
                dist[j][i] = d;
            }
        }
        Ok(MetricSpace { dist })
    }

    /// Wraps an explicit distance matrix. With `validate`, checks shape,
    /// entry sanity, symmetry and the triangle inequality up to the noise
    /// tolerance; the matrix is stored as given either way.
    pub fn from_matrix(matrix: Vec<Vec<f64>>, validate: bool) -> Result<MetricSpace, MetricError> {
        if matrix.is_empty() {
            return Err(MetricError::Empty);
        }
        let n = matrix.len();
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::NotSquare(i, row.len(), n));
            }
        }
        if validate {
            let mut max_entry: f64 = 0.0;
            for (i, row) in matrix.iter().enumerate() {
                for (j, &d) in row.iter().enumerate() {
                    if !d.is_finite() || d < 0.0 {
                        return Err(MetricError::BadEntry(i, j, d));
                    }
                    max_entry = max_entry.max(d);
                }
            }
            let eps = 1e-9 * max_entry.max(1.0);
            for i in 0..n {
                if matrix[i][i].abs() > eps {
                    return Err(MetricError::NonzeroDiagonal(i, matrix[i][i]));
                }
                for j in 0..i {
                    if (matrix[i][j] - matrix[j][i]).abs() > eps {
                        return Err(MetricError::Asymmetric(i, j, matrix[i][j], matrix[j][i]));
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let lhs = matrix[i][j];
                        let rhs = matrix[i][k] + matrix[k][j];
                        if lhs > rhs + eps {
                            return Err(MetricError::TriangleViolation(i, j, k, lhs, rhs));
                        }
                    }
                }
            }
        }
        Ok(MetricSpace { dist: matrix })
    }

    pub fn n(&self) -> usize {
        self.dist.len()
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    /// Closed ball `{u in within : d(center, u) <= r}`.
    pub fn ball(&self, center: usize, r: f64, within: &PointSet) -> PointSet {
        PointSet(
            within
                .iter()
                .filter(|&u| self.dist[center][u] <= r)
                .collect(),
        )
    }

    /// Closed ball within the whole space.
    pub fn ball_all(&self, center: usize, r: f64) -> PointSet {
        self.ball(center, r, &PointSet::full(self.n()))
    }

    /// Submetric on `keep`, renumbered consecutively in ascending order of
    /// the original indices.
    pub fn restrict(&self, keep: &PointSet) -> Result<(MetricSpace, IndexMap), MetricError> {
        if keep.is_empty() {
            return Err(MetricError::EmptyRestriction);
        }
        let n = self.n();
        if let Some(p) = keep.iter().find(|&p| p >= n) {
            return Err(MetricError::IndexOutOfRange(p, n));
        }
        let new_to_old: Vec<usize> = keep.iter().collect();
        let mut old_to_new = vec![None; n];
        for (new, &old) in new_to_old.iter().enumerate() {
            old_to_new[old] = Some(new);
        }
        let dist = new_to_old
            .iter()
            .map(|&i| new_to_old.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        Ok((
            MetricSpace { dist },
            IndexMap {
                new_to_old,
                old_to_new,
            },
        ))
    }

    /// Collapses each part of a partition onto its representative. Point `j`
    /// of the result is `partition.representatives()[j]`; the returned
    /// weights count the members of each part.
    pub fn contract(&self, partition: &Partition) -> Result<(MetricSpace, Vec<u64>), MetricError> {
        let n = self.n();
        let mut seen = vec![false; n];
        for (rep, child) in partition.parts() {
            if rep >= n {
                return Err(MetricError::IndexOutOfRange(rep, n));
            }
            if !child.contains(rep) {
                return Err(MetricError::BadPartition(format!(
                    "representative {rep} is not in its own part"
                )));
            }
            for u in child.iter() {
                if u >= n {
                    return Err(MetricError::IndexOutOfRange(u, n));
                }
                if seen[u] {
                    return Err(MetricError::BadPartition(format!(
                        "point {u} appears in two parts"
                    )));
                }
                seen[u] = true;
            }
        }
        if let Some(u) = seen.iter().position(|&s| !s) {
            return Err(MetricError::BadPartition(format!("point {u} is uncovered")));
        }
        let reps = partition.representatives();
        let dist = reps
            .iter()
            .map(|&i| reps.iter().map(|&j| self.dist[i][j]).collect())
            .collect();
        let weights = partition
            .parts()
            .map(|(_, child)| child.len() as u64)
            .collect();
        Ok((MetricSpace { dist }, weights))
    }
}
