//! Candidate point sets: uniform grids restricted to the unit ball, and the
//! fill distance of a selection within a candidate set.

use crate::error::{Error, Result};
use crate::kernel::sq_dist;

// ======================================================================
// Point storage
// ======================================================================

/// A list of points of fixed dimension, stored as one flat coordinate
/// buffer. Point `i` occupies `coords[i * dim .. (i + 1) * dim]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    /// Creates an empty set of points of the given dimension (`dim >= 1`).
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            dim,
            coords: Vec::new(),
        }
    }

    /// Creates an empty set with capacity reserved for `n` points.
    pub fn with_capacity(dim: usize, n: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            dim,
            coords: Vec::with_capacity(n * dim),
        }
    }

    /// Builds a point set from a flat coordinate buffer whose length must be
    /// a multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidParameter(format!(
                "flat coordinate buffer of length {} is not a multiple of dim {}",
                coords.len(),
                dim
            )));
        }
        Ok(Self { dim, coords })
    }

    /// Appends one point; its length must match the set dimension.
    pub fn push(&mut self, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        self.coords.extend_from_slice(point);
        Ok(())
    }

    /// Spatial dimension of every point in the set.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Whether the set contains no points.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `i`.
    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterates over all points in index order.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Extracts the subset at the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut out = Self::with_capacity(self.dim, indices.len());
        for &i in indices {
            out.coords.extend_from_slice(self.point(i));
        }
        out
    }
}

// ======================================================================
// Ball discretization
// ======================================================================

/// Discretizes the closed unit ball by intersecting it with the uniform
/// tensor grid of `per_axis` points per axis on `[-1, 1]^dim`.
///
/// Axis coordinates are `-1 + 2 * i / (per_axis - 1)` for
/// `i = 0..per_axis`, so both endpoints are included. A grid point is kept
/// when its squared Euclidean norm is at most one, with no tolerance slack.
/// Points are emitted in lexicographic order of their grid indices, which
/// fixes the candidate indexing used everywhere downstream.
///
/// The result may be empty (for example `dim = 2, per_axis = 2` keeps only
/// the four corners of the square, all outside the ball).
pub fn discretize_ball(dim: usize, per_axis: usize) -> Result<PointSet> {
    if dim == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    if per_axis < 2 {
        return Err(Error::InvalidParameter(format!(
            "per_axis must be at least 2, got {per_axis}"
        )));
    }
    let axis: Vec<f64> = (0..per_axis)
        .map(|i| -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64)
        .collect();

    let mut pts = PointSet::new(dim);
    let mut idx = vec![0usize; dim];
    let mut point = vec![0.0f64; dim];
    'outer: loop {
        for (c, &i) in point.iter_mut().zip(&idx) {
            *c = axis[i];
        }
        if point.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            pts.push(&point)?;
        }
        // Advance the odometer: the last axis varies fastest, so points come
        // out in lexicographic order of (idx[0], idx[1], ...).
        for pos in (0..dim).rev() {
            idx[pos] += 1;
            if idx[pos] < per_axis {
                continue 'outer;
            }
            idx[pos] = 0;
        }
        break;
    }
    Ok(pts)
}

// ======================================================================
// Fill distance
// ======================================================================

/// Largest distance from any candidate to its nearest selected point:
/// `max_{c in candidates} min_{s in selected} |c - s|`.
///
/// Brute force over all pairs; with the grid sizes used by the benchmarks
/// this stays within about 10^7 distance evaluations per call. Errors if the
/// selection is empty or the dimensions disagree.
pub fn fill_distance(selected: &PointSet, candidates: &PointSet) -> Result<f64> {
    if selected.is_empty() {
        return Err(Error::EmptySelection);
    }
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if selected.dim() != candidates.dim() {
        return Err(Error::DimensionMismatch {
            expected: candidates.dim(),
            got: selected.dim(),
        });
    }
    let mut worst = 0.0f64;
    for c in candidates.iter() {
        let mut nearest = f64::INFINITY;
        for s in selected.iter() {
            let d = sq_dist(c, s);
            if d < nearest {
                nearest = d;
            }
        }
        if nearest > worst {
            worst = nearest;
        }
    }
    Ok(worst.sqrt())
}

// ======================================================================
// Tests
// ======================================================================
