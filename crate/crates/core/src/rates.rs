//! Decay-rate fitting for greedy traces and the matching reference curves.
//!
//! The maximum power per iteration decays algebraically (`c * n^p`) for
//! kernels of finite smoothness and exponentially in `n^(1/d)`
//! (`c2 * exp(-c3 * n^(1/d))`) for infinitely smooth kernels. Both models
//! are linear after a log transform, so they are fitted with ordinary least
//! squares on the transformed coordinates, over an explicit iteration
//! window that skips the pre-asymptotic head and the
//! cancellation-contaminated tail of a trace.

use crate::error::{Error, Result};
use crate::greedy::GreedyTrace;

// ======================================================================
// Fit window
// ======================================================================

/// Inclusive range of iteration numbers (1-based) used for a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitWindow {
    /// First iteration included (>= 1).
    pub lo: usize,
    /// Last iteration included (>= lo).
    pub hi: usize,
}

impl FitWindow {
    /// Creates a validated window (`1 <= lo <= hi`).
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo == 0 {
            return Err(Error::InvalidParameter(
                "fit window must start at iteration 1 or later".into(),
            ));
        }
        if hi < lo {
            return Err(Error::InvalidParameter(format!(
                "fit window is empty: lo = {lo}, hi = {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// Number of iterations in the window.
    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    /// Whether the window is empty (never true for validated windows).
    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

/// The default fit window for a trace: drop the first quarter of the
/// iterations (the asymptotic regime has not set in yet) and every tail row
/// whose squared maximum power has sunk below `100 * tol_sq` (dominated by
/// cancellation noise near the stopping tolerance).
///
/// Fails with an insufficient-data error when fewer than 3 rows survive.
pub fn default_window(trace: &GreedyTrace) -> Result<FitWindow> {
    let len = trace.rows.len();
    let lo = len / 4 + 1;
    let noise_floor = 100.0 * trace.stop.tol_sq;
    let hi = trace
        .rows
        .iter()
        .rev()
        .find(|row| row.max_power * row.max_power >= noise_floor)
        .map(|row| row.n)
        .unwrap_or(0);
    if hi < lo || hi - lo + 1 < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: hi.saturating_sub(lo).saturating_add(usize::from(hi >= lo)),
        });
    }
    FitWindow::new(lo, hi)
}

// ======================================================================
// Fitted models
// ======================================================================

/// A fitted decay model for the maximum power (or the fill distance) as a
/// function of the iteration number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateModel {
    /// `c * n^p` with `c > 0`.
    Algebraic { c: f64, p: f64 },
    /// `c2 * exp(-c3 * n^(1/dim))` with `c2 > 0`.
    Exponential { c2: f64, c3: f64, dim: usize },
}

/// A fitted decay model together with the window it was fitted on and the
/// coefficient of determination in the linearized coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// The fitted model.
    pub model: RateModel,
    /// Iteration window the fit used.
    pub window: FitWindow,
    /// R-squared of the ordinary least-squares fit on the transformed
    /// (linearized) coordinates, in [0, 1].
    pub r_squared: f64,
}

/// Fits `max_power ~ c * n^p` over the window by least squares of
/// `ln(max_power)` against `ln(n)`.
///
/// Requires at least 3 rows in the window and strictly positive power
/// values throughout it.
pub fn fit_algebraic(trace: &GreedyTrace, window: &FitWindow) -> Result<RateFit> {
    let (xs, ys) = windowed_series(trace, window, |row| row.max_power, "max_power")?;
    let xs: Vec<f64> = xs.iter().map(|&n| n.ln()).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(RateFit {
        model: RateModel::Algebraic {
            c: intercept.exp(),
            p: slope,
        },
        window: *window,
        r_squared,
    })
}

/// Fits `max_power ~ c2 * exp(-c3 * n^(1/dim))` over the window by least
/// squares of `ln(max_power)` against `n^(1/dim)`.
pub fn fit_exponential(trace: &GreedyTrace, dim: usize, window: &FitWindow) -> Result<RateFit> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let (xs, ys) = windowed_series(trace, window, |row| row.max_power, "max_power")?;
    let exponent = 1.0 / dim as f64;
    let xs: Vec<f64> = xs.iter().map(|&n| n.powf(exponent)).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(RateFit {
        model: RateModel::Exponential {
            c2: intercept.exp(),
            c3: -slope,
            dim,
        },
        window: *window,
        r_squared,
    })
}

/// Fits `fill_distance ~ c * n^p` over the window by log-log least squares.
///
/// Requires the trace to have fill distances recorded at every window row.
pub fn fit_fill_decay(trace: &GreedyTrace, window: &FitWindow) -> Result<RateFit> {
    for row in rows_in_window(trace, window)? {
        if row.fill_distance.is_none() {
            return Err(Error::MissingFillData);
        }
    }
    let (xs, ys) = windowed_series(
        trace,
        window,
        |row| row.fill_distance.unwrap_or(f64::NAN),
        "fill_distance",
    )?;
    let xs: Vec<f64> = xs.iter().map(|&n| n.ln()).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(RateFit {
        model: RateModel::Algebraic {
            c: intercept.exp(),
            p: slope,
        },
        window: *window,
        r_squared,
    })
}

/// Returns the window rows, validating that the window lies inside the
/// trace and holds at least 3 rows.
fn rows_in_window<'t>(
    trace: &'t GreedyTrace,
    window: &FitWindow,
) -> Result<impl Iterator<Item = &'t crate::greedy::TraceRow>> {
    FitWindow::new(window.lo, window.hi)?;
    let last = trace.rows.last().map(|r| r.n).unwrap_or(0);
    if window.hi > last {
        return Err(Error::InvalidParameter(format!(
            "fit window ends at {} but the trace has {} iterations",
            window.hi, last
        )));
    }
    if window.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: window.len(),
        });
    }
    let lo = window.lo;
    let hi = window.hi;
    Ok(trace.rows.iter().filter(move |r| lo <= r.n && r.n <= hi))
}

/// Extracts `(n, ln(value))` pairs over the window, rejecting non-positive
/// values (whose logarithm would poison the fit).
fn windowed_series(
    trace: &GreedyTrace,
    window: &FitWindow,
    value: impl Fn(&crate::greedy::TraceRow) -> f64,
    what: &str,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut xs = Vec::with_capacity(window.len());
    let mut ys = Vec::with_capacity(window.len());
    for row in rows_in_window(trace, window)? {
        let v = value(row);
        if !(v > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "{what} must be positive throughout the fit window, got {v} at n = {}",
                row.n
            )));
        }
        xs.push(row.n as f64);
        ys.push(v.ln());
    }
    if xs.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: xs.len(),
        });
    }
    Ok((xs, ys))
}

/// Ordinary least squares `y = slope * x + intercept`, returning
/// `(slope, intercept, r_squared)` with r-squared computed on the same
/// coordinates. Degenerate data with zero variance in `y` fits exactly
/// (`r_squared = 1`).
fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let fitted = slope * x + intercept;
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    (slope, intercept, r_squared)
}

// ======================================================================
// Reference curves
// ======================================================================

/// Converts raw rate constants `(c1, c2, c3)` into the constants that
/// appear in the n-dependent decay bounds for dimension `dim` and
/// smoothness `beta`:
///
/// ```text
/// hat_c1 = c1 * 2^(5 beta / d - 3/2)
/// hat_c2 = sqrt(2 c2)
/// hat_c3 = 2^(-1 - 2/d) * c3
/// ```
///
/// All three inputs must be positive.
pub fn derived_bound_constants(c1: f64, c2: f64, c3: f64, beta: f64, dim: usize) -> (f64, f64, f64) {
    assert!(
        c1 > 0.0 && c2 > 0.0 && c3 > 0.0 && dim > 0,
        "rate constants and dimension must be positive"
    );
    let d = dim as f64;
    let hat_c1 = c1 * 2f64.powf(5.0 * beta / d - 1.5);
    let hat_c2 = (2.0 * c2).sqrt();
    let hat_c3 = 2f64.powf(-1.0 - 2.0 / d) * c3;
    (hat_c1, hat_c2, hat_c3)
}

/// A reference decay curve to overlay against measured traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateCurve {
    /// `c1_hat * n^(-beta/d + 1/2)`: the proven bound for kernels of
    /// finite smoothness `beta`.
    AlgebraicBound { c1_hat: f64, beta: f64 },
    /// `c * n^(-beta/d)`: the empirically observed algebraic rate, half an
    /// order faster than the proven bound.
    AlgebraicImproved { c: f64, beta: f64 },
    /// `c2_hat * exp(-c3_hat * n^(1/d))`: the proven bound for infinitely
    /// smooth kernels.
    ExponentialBound { c2_hat: f64, c3_hat: f64 },
}

/// Evaluates a reference curve at the given iteration numbers.
///
/// Algebraic curves require `n >= 1`; the exponential bound is defined for
/// `n = 0` as well (where it equals `c2_hat`).
pub fn theoretical_curve(curve: &RateCurve, dim: usize, n_values: &[usize]) -> Vec<f64> {
    assert!(dim > 0, "dimension must be positive");
    let d = dim as f64;
    n_values
        .iter()
        .map(|&n| {
            let n = n as f64;
            match *curve {
                RateCurve::AlgebraicBound { c1_hat, beta } => c1_hat * n.powf(-beta / d + 0.5),
                RateCurve::AlgebraicImproved { c, beta } => c * n.powf(-beta / d),
                RateCurve::ExponentialBound { c2_hat, c3_hat } => {
                    c2_hat * (-c3_hat * n.powf(1.0 / d)).exp()
                }
            }
        })
        .collect()
}

// ======================================================================
// Tests
// ======================================================================
