//! Reference estimates for the benchmark experiments.
//!
//! These constants are previously reported numerical estimates for the
//! standard protocol (unit ball, shape 1, tolerance 1e-15). They calibrate
//! overlay curves and the suite's within/outside-band report; they are
//! estimates from one particular fitting procedure, not ground truth, so
//! nothing compares against them tightly.

use pgreedy::{Error, KernelFamily, KernelSpec, Result};

/// Reference exponential-decay estimates for the Gaussian kernel:
/// `max_power ~ c2_hat * exp(-c3_hat * n^(1/dim))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianReference {
    pub dim: usize,
    pub c2_hat: f64,
    pub c3_hat: f64,
}

/// Reported Gaussian estimates for dimensions 1, 2, 3.
pub const GAUSSIAN_REFERENCE: [GaussianReference; 3] = [
    GaussianReference {
        dim: 1,
        c2_hat: 3.47,
        c3_hat: 1.22,
    },
    GaussianReference {
        dim: 2,
        c2_hat: 5.10,
        c3_hat: 1.80,
    },
    GaussianReference {
        dim: 3,
        c2_hat: 6.37,
        c3_hat: 2.31,
    },
];

/// Looks up the Gaussian reference for a dimension.
pub fn gaussian_reference(dim: usize) -> Option<&'static GaussianReference> {
    GAUSSIAN_REFERENCE.iter().find(|r| r.dim == dim)
}

/// Reference algebraic-decay estimates for the Wendland families, one row
/// per (nominal smoothness, dimension): the prefactor of the proven bound
/// `c1_hat * n^(-beta/dim + 1/2)` and of the observed faster rate
/// `c * n^(-beta/dim)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WendlandReference {
    pub beta: f64,
    pub dim: usize,
    pub bound_c1_hat: f64,
    pub improved_c: f64,
}

/// Reported Wendland estimates for nominal smoothness 2 and 3 in
/// dimensions 1, 2, 3.
pub const WENDLAND_REFERENCE: [WendlandReference; 6] = [
    WendlandReference {
        beta: 2.0,
        dim: 1,
        bound_c1_hat: 0.003,
        improved_c: 0.08,
    },
    WendlandReference {
        beta: 2.0,
        dim: 2,
        bound_c1_hat: 0.01,
        improved_c: 0.34,
    },
    WendlandReference {
        beta: 2.0,
        dim: 3,
        bound_c1_hat: 0.02,
        improved_c: 0.49,
    },
    WendlandReference {
        beta: 3.0,
        dim: 1,
        bound_c1_hat: 0.03,
        improved_c: 0.32,
    },
    WendlandReference {
        beta: 3.0,
        dim: 2,
        bound_c1_hat: 0.02,
        improved_c: 0.52,
    },
    WendlandReference {
        beta: 3.0,
        dim: 3,
        bound_c1_hat: 0.02,
        improved_c: 0.67,
    },
];

/// Looks up the Wendland reference for a (nominal smoothness, dimension)
/// pair.
pub fn wendland_reference(beta: f64, dim: usize) -> Option<&'static WendlandReference> {
    WENDLAND_REFERENCE
        .iter()
        .find(|r| r.beta == beta && r.dim == dim)
}

/// Comparison bands used by the suite report (absolute for exponents,
/// relative for the Gaussian rate constant).
pub const GAUSSIAN_C3_RELATIVE_BAND: f64 = 0.35;
pub const WENDLAND_EXPONENT_BAND: f64 = 0.3;
pub const FILL_EXPONENT_BAND: f64 = 0.15;

/// Wendland smoothness index `k` used for a nominal benchmark smoothness
/// level: level 2 runs use `k = 0` and level 3 runs use `k = 1`, in every
/// dimension.
///
/// The polynomial is the same across dimensions, so the achieved native
/// Sobolev order `(dim + 2k + 1) / 2` equals the nominal label only in
/// dimension 3 (the anchor pairing) and is lower below: `k = 0` achieves
/// orders 1, 1.5, 2 and `k = 1` achieves 2, 2.5, 3 for `dim` = 1, 2, 3.
/// Rate expectations are therefore stated against the achieved order,
/// while the nominal label is recorded in the run metadata.
pub fn wendland_order_for(beta: f64) -> Result<u8> {
    if beta == 2.0 {
        Ok(0)
    } else if beta == 3.0 {
        Ok(1)
    } else {
        Err(Error::InvalidParameter(format!(
            "no benchmark Wendland series for nominal smoothness {beta}; use 2 or 3"
        )))
    }
}

/// The Wendland kernel used for nominal smoothness `beta` in `dim`
/// dimensions.
pub fn wendland_kernel_for(beta: f64, shape: f64, dim: usize) -> Result<KernelSpec> {
    let k = wendland_order_for(beta)?;
    KernelSpec::new(KernelFamily::Wendland { k }, shape, dim)
}
