//! Experiment configuration: defaults, validation, and derived names.

use std::path::PathBuf;

use pgreedy::rates::FitWindow;
use pgreedy::{Error, KernelFamily, KernelSpec, Result, StopCriteria};

/// Default tolerance on the maximum squared power.
pub const DEFAULT_TOL_SQ: f64 = 1e-15;
/// Default cap on the number of selections.
pub const DEFAULT_MAX_N: usize = 1000;
/// Default shape parameter.
pub const DEFAULT_SHAPE: f64 = 1.0;
/// Default memory cap (1 GiB) on the candidates x selections table.
pub const DEFAULT_MEMORY_CAP: u64 = 1 << 30;

/// The benchmark grid resolution per axis for dimensions 1, 2, 3. The
/// two- and three-dimensional values give unit-ball grids of 10000 and
/// 10144 points, matching the one-dimensional resolution in size.
pub fn default_per_axis(dim: usize) -> Result<usize> {
    match dim {
        1 => Ok(10_000),
        2 => Ok(114),
        3 => Ok(28),
        _ => Err(Error::InvalidParameter(format!(
            "no default grid resolution for dimension {dim}; pass one explicitly"
        ))),
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Name used for artifact directories and plot titles.
    pub name: String,
    /// Kernel to run with.
    pub kernel: KernelSpec,
    /// Grid resolution per axis.
    pub per_axis: usize,
    /// Stop criteria (tolerance on squared power, selection cap).
    pub stop: StopCriteria,
    /// Record the fill distance each iteration.
    pub record_fill: bool,
    /// Explicit fit window; `None` selects the default window.
    pub fit_window: Option<FitWindow>,
    /// Directory the artifacts are written into.
    pub output_dir: PathBuf,
    /// Also write plot files.
    pub emit_plots: bool,
    /// Refuse runs whose candidates x selections table would exceed this
    /// many bytes.
    pub memory_cap_bytes: u64,
    /// Nominal smoothness label for benchmark families (drives reference
    /// comparisons and overlay curves of finitely smooth kernels).
    pub beta_nominal: Option<f64>,
}

impl ExperimentConfig {
    /// A configuration with the benchmark defaults for the kernel's
    /// dimension: default grid, tolerance 1e-15, at most 1000 selections,
    /// no fill recording, no plots.
    pub fn new(kernel: KernelSpec, output_dir: PathBuf) -> Result<Self> {
        Ok(Self {
            name: derived_name(&kernel, None),
            kernel,
            per_axis: default_per_axis(kernel.dim())?,
            stop: StopCriteria::new(DEFAULT_TOL_SQ, DEFAULT_MAX_N)?,
            record_fill: false,
            fit_window: None,
            output_dir,
            emit_plots: false,
            memory_cap_bytes: DEFAULT_MEMORY_CAP,
            beta_nominal: None,
        })
    }

    /// Validates the parts not already guarded by the constituent types.
    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.kernel.dim()) {
            return Err(Error::InvalidParameter(format!(
                "experiments support dimensions 1 to 3, got {}",
                self.kernel.dim()
            )));
        }
        if self.per_axis < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be at least 2 per axis, got {}",
                self.per_axis
            )));
        }
        StopCriteria::new(self.stop.tol_sq, self.stop.max_n)?;
        Ok(())
    }

    /// Size in bytes of the Newton-column table for `candidate_count`
    /// candidates under this configuration's selection cap.
    pub fn table_bytes(&self, candidate_count: usize) -> u64 {
        candidate_count as u64 * self.stop.max_n as u64 * 8
    }

    /// Fails when the Newton table would exceed the memory cap.
    pub fn check_memory(&self, candidate_count: usize) -> Result<()> {
        let need = self.table_bytes(candidate_count);
        if need > self.memory_cap_bytes {
            return Err(Error::InvalidParameter(format!(
                "grid of {candidate_count} candidates with max_n = {} needs {need} bytes \
                 for the basis table, above the cap of {} bytes",
                self.stop.max_n, self.memory_cap_bytes
            )));
        }
        Ok(())
    }
}

/// Canonical run name: kernel id, dimension, and the nominal smoothness
/// label when present (e.g. `wendland-k1-d2-beta2`).
pub fn derived_name(kernel: &KernelSpec, beta_nominal: Option<f64>) -> String {
    let mut name = format!("{}-d{}", kernel.family().id(), kernel.dim());
    if let Some(beta) = beta_nominal {
        name.push_str(&format!("-beta{beta}"));
    }
    name
}

/// Parses a `lo:hi` fit-window override.
pub fn parse_fit_window(s: &str) -> Result<FitWindow> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| {
        Error::InvalidParameter(format!("fit window must look like lo:hi, got {s:?}"))
    })?;
    let lo: usize = lo
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad fit window start {lo:?}")))?;
    let hi: usize = hi
        .trim()
        .parse()
        .map_err(|_| Error::InvalidParameter(format!("bad fit window end {hi:?}")))?;
    FitWindow::new(lo, hi)
}

/// Parses a kernel family id and assembles the spec.
pub fn kernel_spec(id: &str, shape: f64, dim: usize) -> Result<KernelSpec> {
    KernelSpec::new(KernelFamily::parse_id(id)?, shape, dim)
}
