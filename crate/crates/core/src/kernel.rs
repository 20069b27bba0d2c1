//! Radial kernels on the unit ball: the Gaussian family and the compactly
//! supported Wendland family for dimensions up to three.
//!
//! All kernels are normalized so that `K(x, x) = 1`. Evaluation is symmetric
//! bit-for-bit: `eval(x, y)` and `eval(y, x)` reduce to the same radial
//! computation on the same distance.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

/// Numerical breakdown threshold and related constants live in the greedy
/// module; kernels themselves are parameter-validated only.
const MAX_WENDLAND_INDEX: u8 = 2;

// ======================================================================
// Families and smoothness
// ======================================================================

/// Supported radial kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    /// Infinitely smooth kernel `exp(-(shape * r)^2)`.
    Gaussian,
    /// Compactly supported polynomial kernel of smoothness index `k`
    /// (valid in dimensions 1..=3). Support radius is `1 / shape`.
    Wendland {
        /// Smoothness index, `0..=2`.
        k: u8,
    },
}

impl KernelFamily {
    /// Stable textual identifier used in CLIs, CSV output, and metadata.
    pub fn id(&self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Wendland { k: 0 } => "wendland-k0",
            KernelFamily::Wendland { k: 1 } => "wendland-k1",
            KernelFamily::Wendland { k: 2 } => "wendland-k2",
            KernelFamily::Wendland { .. } => unreachable!("validated at construction"),
        }
    }

    /// Parses the identifiers accepted by [`KernelFamily::id`].
    pub fn parse_id(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "wendland-k0" => Ok(KernelFamily::Wendland { k: 0 }),
            "wendland-k1" => Ok(KernelFamily::Wendland { k: 1 }),
            "wendland-k2" => Ok(KernelFamily::Wendland { k: 2 }),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel id {other:?} (expected gaussian | wendland-k0 | wendland-k1 | wendland-k2)"
            ))),
        }
    }
}

/// Smoothness classification of a kernel, which determines the expected
/// decay model of the greedy power function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothnessClass {
    /// Sobolev-type smoothness of the given order; power decay is algebraic.
    Finite(f64),
    /// Infinitely smooth; power decay is exponential in `n^(1/dim)`.
    Infinite,
}

// ======================================================================
// Kernel specification
// ======================================================================

/// A fully specified kernel: family, shape parameter, and spatial dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    family: KernelFamily,
    shape: f64,
    dim: usize,
}

impl KernelSpec {
    /// Creates a validated kernel specification.
    ///
    /// `shape` must be positive and finite. `dim` must be in `1..=3` for
    /// Wendland kernels (positive definiteness of this polynomial family
    /// holds only up to dimension three); the Gaussian accepts any positive
    /// dimension.
    pub fn new(family: KernelFamily, shape: f64, dim: usize) -> Result<Self> {
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shape parameter must be positive and finite, got {shape}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dimension must be at least 1".into(),
            ));
        }
        if let KernelFamily::Wendland { k } = family {
            if k > MAX_WENDLAND_INDEX {
                return Err(Error::InvalidParameter(format!(
                    "Wendland smoothness index must be 0..=2, got {k}"
                )));
            }
            if dim > 3 {
                return Err(Error::InvalidParameter(format!(
                    "Wendland kernels are positive definite only for dim <= 3, got {dim}"
                )));
            }
        }
        Ok(Self { family, shape, dim })
    }

    /// The kernel family.
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    /// The shape parameter.
    pub fn shape(&self) -> f64 {
        self.shape
    }

    /// The spatial dimension points must have.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Smoothness classification of this kernel in its dimension.
    ///
    /// The Wendland kernel of index `k` generates a Sobolev space of order
    /// `(dim + 2k + 1) / 2` on `R^dim`; the Gaussian is infinitely smooth.
    pub fn smoothness(&self) -> SmoothnessClass {
        match self.family {
            KernelFamily::Gaussian => SmoothnessClass::Infinite,
            KernelFamily::Wendland { k } => {
                SmoothnessClass::Finite((self.dim as f64 + 2.0 * f64::from(k) + 1.0) / 2.0)
            }
        }
    }

    /// Evaluates the radial profile at distance `r >= 0`.
    ///
    /// All profiles satisfy `eval_radial(0) == 1`. The Wendland profiles
    /// vanish identically for `shape * r >= 1` via truncation before
    /// exponentiation, so there is no sign error outside the support.
    #[inline]
    pub fn eval_radial(&self, r: f64) -> f64 {
        let s = self.shape * r;
        match self.family {
            KernelFamily::Gaussian => (-(s * s)).exp(),
            KernelFamily::Wendland { k } => {
                let t = (1.0 - s).max(0.0);
                match k {
                    0 => t * t,
                    1 => {
                        let t2 = t * t;
                        t2 * t2 * (4.0 * s + 1.0)
                    }
                    2 => {
                        let t2 = t * t;
                        // Normalized so the profile equals 1 at the origin.
                        t2 * t2 * t2 * ((35.0 * s + 18.0) * s + 3.0) / 3.0
                    }
                    _ => unreachable!("validated at construction"),
                }
            }
        }
    }

    /// Evaluates `K(x, y)` for two points of dimension [`KernelSpec::dim`].
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if y.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: y.len(),
            });
        }
        Ok(self.eval_radial(dist(x, y)))
    }

    /// Evaluates `K(x, p)` for every point `p` in `pts`, in order.
    ///
    /// Returns an empty vector for an empty point set.
    pub fn kernel_column(&self, x: &[f64], pts: &PointSet) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if pts.dim() != self.dim && !pts.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: pts.dim(),
            });
        }
        Ok(pts
            .iter()
            .map(|p| self.eval_radial(dist(x, p)))
            .collect())
    }

    /// Assembles the symmetric kernel matrix `A[i][j] = K(p_i, p_j)`.
    ///
    /// The points must be pairwise distinct; a duplicate pair makes the
    /// matrix singular and is rejected up front.
    pub fn kernel_matrix(&self, pts: &PointSet) -> Result<DMatrix<f64>> {
        if pts.dim() != self.dim && !pts.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: pts.dim(),
            });
        }
        let n = pts.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if pts.point(i) == pts.point(j) {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.eval_radial(0.0);
            for j in (i + 1)..n {
                let v = self.eval_radial(dist(pts.point(i), pts.point(j)));
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        Ok(a)
    }
}

/// Euclidean distance between two equal-length slices.
#[inline]
pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    sq_dist(x, y).sqrt()
}

/// Squared Euclidean distance between two equal-length slices.
#[inline]
pub(crate) fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

// ======================================================================
// Tests
// ======================================================================
