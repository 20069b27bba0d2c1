//! Command-line benchmark driver for power-function greedy interpolation.
//!
//! Exit codes: 0 on success, 1 on configuration errors, 2 when a run stops
//! on a pivot breakdown, 3 when a suite finishes with failed entries.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use pgreedy::Error;
use pgreedy_cli::config::{self, ExperimentConfig};
use pgreedy_cli::runner::{run_experiment, ExperimentOutcome};
use pgreedy_cli::suite::run_suite;

#[derive(Debug, Parser)]
#[command(
    name = "pgreedy",
    version,
    about = "Greedy kernel point selection benchmark",
    after_help = "Exit codes: 0 success, 1 configuration error, 2 pivot breakdown, 3 suite with failed runs."
)]
struct Cli {
    /// Kernel family: gaussian, wendland-k0, wendland-k1, or wendland-k2.
    #[arg(long, required_unless_present = "suite", conflicts_with = "suite")]
    kernel: Option<String>,

    /// Kernel shape parameter.
    #[arg(long, default_value_t = config::DEFAULT_SHAPE)]
    shape: f64,

    /// Spatial dimension (1, 2, or 3).
    #[arg(long, required_unless_present = "suite", conflicts_with = "suite")]
    dim: Option<usize>,

    /// Grid points per axis before restriction to the unit ball.
    /// Defaults to 10000 (d=1), 114 (d=2), or 28 (d=3).
    #[arg(long, conflicts_with = "suite")]
    per_axis: Option<usize>,

    /// Stop once the maximum squared power value drops below this.
    #[arg(long, default_value_t = config::DEFAULT_TOL_SQ)]
    tol: f64,

    /// Stop after this many selections.
    #[arg(long, default_value_t = config::DEFAULT_MAX_N)]
    max_n: usize,

    /// Record the fill distance of the selected set at every step.
    #[arg(long, conflicts_with = "suite")]
    record_fill: bool,

    /// Rows used for rate fitting, as `lo:hi` (1-based, inclusive).
    #[arg(long, conflicts_with = "suite")]
    fit_window: Option<String>,

    /// Output directory for run artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Also render SVG convergence plots.
    #[arg(long)]
    plots: bool,

    /// Run every experiment described in this TOML suite file.
    #[arg(long)]
    suite: Option<PathBuf>,

    /// Cap, in bytes, on the memory budgeted for basis storage.
    #[arg(long, default_value_t = config::DEFAULT_MEMORY_CAP)]
    memory_cap: u64,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let code = match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    };
    std::process::exit(code);
}

fn execute(cli: Cli) -> Result<i32, Error> {
    if let Some(suite_path) = &cli.suite {
        let outcome = run_suite(suite_path, &cli.out, cli.plots, cli.memory_cap)?;
        for run in &outcome.results {
            match &run.result {
                Ok(o) => println!("{}: {}", run.name, outcome_line(o)),
                Err(e) => println!("{}: failed ({e})", run.name),
            }
        }
        let outside = outcome.comparisons.iter().filter(|c| !c.within).count();
        println!(
            "suite: {} runs, {} fits, {} comparisons outside tolerance",
            outcome.results.len(),
            outcome.summary.len(),
            outside
        );
        if outcome.any_failure() {
            Ok(3)
        } else if outcome.any_breakdown() {
            Ok(2)
        } else {
            Ok(0)
        }
    } else {
        let config = single_run_config(&cli)?;
        let outcome = run_experiment(&config)?;
        println!("{}: {}", outcome.name, outcome_line(&outcome));
        Ok(if outcome.breakdown { 2 } else { 0 })
    }
}

fn single_run_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    // clap enforces presence of --kernel/--dim unless --suite is given.
    let kernel_id = cli.kernel.as_deref().expect("clap enforces --kernel");
    let dim = cli.dim.expect("clap enforces --dim");
    let kernel = config::kernel_spec(kernel_id, cli.shape, dim)?;
    let name = config::derived_name(&kernel, None);
    let mut config = ExperimentConfig::new(kernel, cli.out.join(&name))?;
    config.name = name;
    if let Some(per_axis) = cli.per_axis {
        config.per_axis = per_axis;
    }
    config.stop = pgreedy::StopCriteria::new(cli.tol, cli.max_n)?;
    config.record_fill = cli.record_fill;
    config.fit_window = cli
        .fit_window
        .as_deref()
        .map(config::parse_fit_window)
        .transpose()?;
    config.emit_plots = cli.plots;
    config.memory_cap_bytes = cli.memory_cap;
    config.validate()?;
    Ok(config)
}

fn outcome_line(o: &ExperimentOutcome) -> String {
    let fits = o
        .fits
        .iter()
        .map(|f| format!("{} c={:.4} p={:.4} r2={:.4}", f.model, f.c, f.p_or_c3, f.r_squared))
        .collect::<Vec<_>>()
        .join("; ");
    format!(
        "{} points, stopped on {}, {:.2}s{}{}",
        o.trace.rows.len(),
        o.trace.termination.as_str(),
        o.duration.as_secs_f64(),
        if fits.is_empty() { "" } else { " | " },
        fits
    )
}
