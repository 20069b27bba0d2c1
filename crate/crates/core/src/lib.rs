//! Kernel-based approximation with greedy, data-independent center
//! selection.
//!
//! The crate selects interpolation centers from a candidate grid by
//! repeatedly picking the point where the current power function is largest,
//! updating the power function incrementally through a Newton basis (one
//! column of a matrix-free pivoted factorization per step). On top of the
//! selection engine it provides:
//!
//! - [`kernel`]: Gaussian and compactly supported Wendland kernels,
//! - [`geometry`]: unit-ball grids and fill distances,
//! - [`greedy`]: the selection loop, its state, and its trace,
//! - [`interpolate`]: Newton-basis interpolation plus a dense direct route
//!   used to cross-check the incremental quantities,
//! - [`rates`]: least-squares decay-rate fits and theoretical rate curves,
//! - [`io`]: deterministic CSV and JSON serialization of run artifacts.
//!
//! Runs are fully deterministic: identical inputs produce bit-identical
//! traces and serialized artifacts.

pub mod error;
pub mod geometry;
pub mod greedy;
pub mod interpolate;
pub mod io;
pub mod kernel;
pub mod rates;

#[doc(inline)]
pub use error::{Error, Result};
#[doc(inline)]
pub use geometry::{discretize_ball, fill_distance, PointSet};
#[doc(inline)]
pub use greedy::{run_pgreedy, GreedyRun, GreedyState, GreedyTrace, RunOptions, StopCriteria};
#[doc(inline)]
pub use interpolate::{direct_solve, power_function_direct, Interpolant};
#[doc(inline)]
pub use kernel::{KernelFamily, KernelSpec, SmoothnessClass};
#[doc(inline)]
pub use rates::{
    default_window, fit_algebraic, fit_exponential, fit_fill_decay, FitWindow, RateFit, RateModel,
};
