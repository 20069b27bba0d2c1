//! Deterministic serialization of run artifacts.
//!
//! Three artifact kinds: the per-iteration trace as CSV, a JSON metadata
//! sidecar describing how the trace was produced, and the aggregated
//! fit-summary CSV. Floating-point values are written with Rust's shortest
//! round-trip formatting, so identical runs serialize byte-identically and
//! values parse back exactly.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::greedy::GreedyTrace;
use crate::interpolate::Interpolant;
use crate::kernel::{KernelSpec, SmoothnessClass};
use crate::rates::{RateFit, RateModel};

fn io_err(e: std::io::Error) -> Error {
    Error::Output(e.to_string())
}

// ======================================================================
// Trace CSV
// ======================================================================

/// Writes a greedy trace as CSV with header
/// `n,selected_index,x1[,x2,...],max_power,fill_distance`.
///
/// The fill column is left blank on rows without a recorded fill distance.
pub fn write_trace_csv(trace: &GreedyTrace, mut w: impl Write) -> Result<()> {
    let dim = trace.kernel.dim();
    write!(w, "n,selected_index").map_err(io_err)?;
    for axis in 1..=dim {
        write!(w, ",x{axis}").map_err(io_err)?;
    }
    writeln!(w, ",max_power,fill_distance").map_err(io_err)?;
    for row in &trace.rows {
        write!(w, "{},{}", row.n, row.selected_index).map_err(io_err)?;
        for c in &row.point {
            write!(w, ",{c}").map_err(io_err)?;
        }
        write!(w, ",{}", row.max_power).map_err(io_err)?;
        match row.fill_distance {
            Some(h) => writeln!(w, ",{h}").map_err(io_err)?,
            None => writeln!(w, ",").map_err(io_err)?,
        }
    }
    Ok(())
}

/// Renders a greedy trace to an in-memory CSV string.
pub fn trace_csv_string(trace: &GreedyTrace) -> Result<String> {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Output(e.to_string()))
}

// ======================================================================
// Metadata sidecar
// ======================================================================

/// Kernel description for the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct KernelMeta {
    /// Kernel family identifier (e.g. `gaussian`, `wendland-k1`).
    pub family: String,
    /// Shape parameter.
    pub shape: f64,
    /// Spatial dimension.
    pub dim: usize,
    /// `"finite"` or `"infinite"`.
    pub smoothness_class: String,
    /// Native smoothness order, present for the finite class only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothness_order: Option<f64>,
}

impl KernelMeta {
    fn new(spec: &KernelSpec) -> Self {
        let (class, order) = match spec.smoothness() {
            SmoothnessClass::Finite(beta) => ("finite", Some(beta)),
            SmoothnessClass::Infinite => ("infinite", None),
        };
        Self {
            family: spec.family().id().to_string(),
            shape: spec.shape(),
            dim: spec.dim(),
            smoothness_class: class.to_string(),
            smoothness_order: order,
        }
    }
}

/// Candidate-grid description for the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    /// Domain identifier; always the closed unit ball.
    pub domain: String,
    /// Grid resolution per axis, when the grid came from the standard
    /// discretization.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_axis: Option<usize>,
    /// Number of candidates.
    pub candidate_count: usize,
}

/// Stop-criteria description for the metadata sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct StopMeta {
    /// Tolerance on the maximum squared power.
    pub tol_sq: f64,
    /// Selection cap.
    pub max_n: usize,
}

/// Everything needed to interpret and reproduce a trace file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    /// Kernel the run used.
    pub kernel: KernelMeta,
    /// Candidate grid description.
    pub grid: GridMeta,
    /// Stop criteria.
    pub stop: StopMeta,
    /// Tie-break rule of the selection step.
    pub tie_break: String,
    /// Why the run stopped.
    pub termination: String,
    /// Number of iterations recorded.
    pub iterations: usize,
    /// Whether fill distances were recorded.
    pub record_fill: bool,
    /// Version of this library.
    pub library_version: String,
    /// Nominal smoothness label of the experiment, when the run belongs to
    /// a named benchmark family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_nominal: Option<f64>,
}

impl RunMetadata {
    /// Assembles the sidecar for a trace. `per_axis` records the grid
    /// resolution when known; `beta_nominal` labels benchmark runs.
    pub fn new(trace: &GreedyTrace, per_axis: Option<usize>, beta_nominal: Option<f64>) -> Self {
        Self {
            kernel: KernelMeta::new(&trace.kernel),
            grid: GridMeta {
                domain: "unit-ball".to_string(),
                per_axis,
                candidate_count: trace.candidate_count,
            },
            stop: StopMeta {
                tol_sq: trace.stop.tol_sq,
                max_n: trace.stop.max_n,
            },
            tie_break: "lowest-index".to_string(),
            termination: trace.termination.as_str().to_string(),
            iterations: trace.rows.len(),
            record_fill: trace.record_fill,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            beta_nominal,
        }
    }

    /// Writes the sidecar as pretty-printed JSON (field order fixed, so
    /// output is deterministic).
    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut w, self).map_err(|e| Error::Output(e.to_string()))?;
        writeln!(w).map_err(io_err)
    }
}

// ======================================================================
// Fit summary CSV
// ======================================================================

/// What a fitted model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitTarget {
    /// Decay of the maximum power function.
    MaxPower,
    /// Decay of the fill distance.
    FillDistance,
}

/// One line of the aggregated fit summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    /// Kernel family identifier.
    pub kernel: String,
    /// Spatial dimension.
    pub dim: usize,
    /// Nominal smoothness label, blank for infinitely smooth kernels.
    pub beta: Option<f64>,
    /// Model label: `algebraic`, `exponential`, or `fill`.
    pub model: String,
    /// Fitted prefactor (`c` or `c2`).
    pub c: f64,
    /// Fitted exponent `p` (algebraic) or rate `c3` (exponential).
    pub p_or_c3: f64,
    /// First iteration of the fit window.
    pub window_lo: usize,
    /// Last iteration of the fit window.
    pub window_hi: usize,
    /// Fit quality in the linearized coordinates.
    pub r_squared: f64,
}

impl SummaryRow {
    /// Builds a summary line from a fit result.
    pub fn from_fit(
        spec: &KernelSpec,
        beta: Option<f64>,
        target: FitTarget,
        fit: &RateFit,
    ) -> Self {
        let (model, c, p_or_c3) = match (target, fit.model) {
            (FitTarget::FillDistance, RateModel::Algebraic { c, p }) => ("fill", c, p),
            (FitTarget::MaxPower, RateModel::Algebraic { c, p }) => ("algebraic", c, p),
            (_, RateModel::Exponential { c2, c3, .. }) => ("exponential", c2, c3),
        };
        Self {
            kernel: spec.family().id().to_string(),
            dim: spec.dim(),
            beta,
            model: model.to_string(),
            c,
            p_or_c3,
            window_lo: fit.window.lo,
            window_hi: fit.window.hi,
            r_squared: fit.r_squared,
        }
    }
}

/// Writes the fit summary as CSV with header
/// `kernel,dim,beta,model,c,p_or_c3,window_lo,window_hi,r_squared`.
pub fn write_summary_csv(rows: &[SummaryRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "kernel,dim,beta,model,c,p_or_c3,window_lo,window_hi,r_squared").map_err(io_err)?;
    for row in rows {
        write!(w, "{},{},", row.kernel, row.dim).map_err(io_err)?;
        if let Some(beta) = row.beta {
            write!(w, "{beta}").map_err(io_err)?;
        }
        writeln!(
            w,
            ",{},{},{},{},{},{}",
            row.model, row.c, row.p_or_c3, row.window_lo, row.window_hi, row.r_squared
        )
        .map_err(io_err)?;
    }
    Ok(())
}

// ======================================================================
// Interpolant export
// ======================================================================

/// Writes an interpolant as CSV: one row per center with its coordinates
/// and its coefficient in the kernel-translate basis, header
/// `x1[,x2,...],alpha`.
pub fn write_interpolant_csv(interp: &Interpolant, mut w: impl Write) -> Result<()> {
    let centers = interp.centers();
    let alpha = interp.translate_coefficients()?;
    for axis in 1..=centers.dim() {
        if axis > 1 {
            write!(w, ",").map_err(io_err)?;
        }
        write!(w, "x{axis}").map_err(io_err)?;
    }
    writeln!(w, ",alpha").map_err(io_err)?;
    for (point, a) in centers.iter().zip(&alpha) {
        for c in point {
            write!(w, "{c},").map_err(io_err)?;
        }
        writeln!(w, "{a}").map_err(io_err)?;
    }
    Ok(())
}

// ======================================================================
// Tests
// ======================================================================
