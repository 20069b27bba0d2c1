//! Acceptance gate for the benchmark suite.
//!
//! Ten criteria: oracle equivalence of the incremental power updates,
//! structural invariants, reproduction of the reference Gaussian decay
//! constants, the algebraic-rate and fill-decay bands for the Wendland
//! series, the pointwise error bound, Newton-basis orthonormality,
//! byte-level determinism of the full suite, and rate-fitter round-trips.
//! Each test prints one PASS/FAIL line with the measured numbers.
//!
//! All tolerances are pinned as constants below.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pgreedy::greedy::Termination;
use pgreedy::rates::{fit_algebraic, fit_exponential, FitWindow, RateModel};
use pgreedy::{
    power_function_direct, run_pgreedy, GreedyTrace, Interpolant, KernelFamily, KernelSpec,
    PointSet, RunOptions, SmoothnessClass, StopCriteria,
};
use pgreedy::greedy::TraceRow;
use pgreedy_cli::reference;
use pgreedy_cli::runner::{fitted_fill_row, fitted_power_constant, run_experiment, ExperimentOutcome};
use pgreedy_cli::suite::{entry_config, parse_suite};

// Criterion 1: incremental power values against the dense linear-algebra
// oracle, on random instances.
const ORACLE_INSTANCES: usize = 20;
const ORACLE_MAX_SELECTIONS: usize = 30;
const ORACLE_TOL: f64 = 1e-8;
/// Stop once the squared power drops below this. The dense route
/// factorizes the selected-centers Gram, whose Cholesky pivots in
/// selection order are exactly the squared power values, so this floor
/// keeps the oracle itself well-posed in f64 (pivots stay ~4 orders of
/// magnitude above machine noise). Smooth-kernel instances stop early;
/// the slowly decaying kernels still reach the full selection budget.
const ORACLE_STOP_SQ: f64 = 1e-12;
/// Below this squared power, both routes are computing cancellation noise
/// of the order sqrt(machine eps); square roots there amplify that noise
/// above `ORACLE_TOL`, so the pointwise sqrt comparison applies above the
/// floor and the squared values are compared everywhere.
const ORACLE_NOISE_FLOOR_SQ: f64 = 1e-13;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(10);

// Criterion 2: structural invariants on every suite run.
const SELECTED_RESIDUAL_MAX: f64 = 1e-10;

// Criterion 3: Gaussian d=1 exponential rate.
const GAUSS_D1_R2_MIN: f64 = 0.98;
const GAUSS_D1_C3_RANGE: (f64, f64) = (0.85, 1.60);
const GAUSS_D1_TIME_LIMIT: Duration = Duration::from_secs(5);

// Criterion 4: Gaussian d=2,3 exponential rates.
const GAUSS_C3_REL_BAND: f64 = 0.35;
const GAUSS_R2_MIN: f64 = 0.97;
const GAUSS_RUN_TIME_LIMIT: Duration = Duration::from_secs(120);

// Criterion 5: Wendland algebraic rates, exponent measured against the
// kernel's achieved native Sobolev order s: within 0.3 of -s/d and at
// least 0.25 faster than the proven -s/d + 1/2.
const WENDLAND_EXPONENT_BAND: f64 = 0.3;
const WENDLAND_MARGIN_OVER_PROVEN: f64 = 0.25;
const WENDLAND_R2_MIN: f64 = 0.97;
const WENDLAND_RUN_TIME_LIMIT: Duration = Duration::from_secs(180);

// Criterion 6: fill-distance decay exponent band around -1/d.
const FILL_EXPONENT_BAND: f64 = 0.15;

// Criterion 7: pointwise error bound.
const ERROR_BOUND_PAIRS: usize = 50;
const ERROR_BOUND_SLACK: f64 = 1e-10;
/// Same dense-oracle conditioning floor as in criterion 1.
const ERROR_BOUND_STOP_SQ: f64 = 1e-10;

// Criterion 8: Newton-basis native-space Gram matrix.
const GRAM_MAX_SIZE: usize = 20;
const GRAM_IDENTITY_TOL: f64 = 1e-6;
/// Forming the Gram explicitly costs a factor of the Gram's condition
/// number in precision; stopping at this squared power keeps that below
/// ~1e8, so a true identity shows up as one to well within the 1e-6 gate
/// while fast-decaying instances stop at fewer than the full 20 columns.
const GRAM_STOP_SQ: f64 = 1e-7;

// Criterion 10: fitter round-trips on exact synthetic data.
const ROUNDTRIP_TOL: f64 = 1e-10;

fn report(criterion: &str, pass: bool, details: &str) {
    println!("{criterion}: {} — {details}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {details}");
}

// ======================================================================
// Shared suite fixture: the nine benchmark runs, executed once.
// ======================================================================

struct SuiteFixture {
    _dir: tempfile::TempDir,
    outcomes: Vec<ExperimentOutcome>,
}

fn suite_file() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../suites/benchmark.toml")
}

fn run_full_suite(out_root: &Path) -> Vec<ExperimentOutcome> {
    let text = std::fs::read_to_string(suite_file()).expect("suite file readable");
    parse_suite(&text)
        .expect("suite file parses")
        .iter()
        .map(|entry| {
            let config = entry_config(entry, out_root, false, 1 << 30).expect("entry config");
            run_experiment(&config).expect("suite run succeeds")
        })
        .collect()
}

fn fixture() -> &'static SuiteFixture {
    static FIXTURE: OnceLock<SuiteFixture> = OnceLock::new();
    FIXTURE.get_or_init(|| {
        let dir = tempfile::tempdir().expect("tempdir");
        let outcomes = run_full_suite(dir.path());
        SuiteFixture { _dir: dir, outcomes }
    })
}

fn outcome(name: &str) -> &'static ExperimentOutcome {
    fixture()
        .outcomes
        .iter()
        .find(|o| o.name == name)
        .unwrap_or_else(|| panic!("suite run {name} missing"))
}

const WENDLAND_RUNS: [&str; 6] = [
    "wendland-k0-d1-beta2",
    "wendland-k0-d2-beta2",
    "wendland-k0-d3-beta2",
    "wendland-k1-d1-beta3",
    "wendland-k1-d2-beta3",
    "wendland-k1-d3-beta3",
];

// ======================================================================
// Random-instance helpers
// ======================================================================

fn random_points(rng: &mut ChaCha8Rng, dim: usize, count: usize) -> PointSet {
    let mut points = PointSet::new(dim);
    let mut buf = vec![0.0; dim];
    for _ in 0..count {
        for c in buf.iter_mut() {
            *c = rng.gen_range(-1.0..1.0);
        }
        points.push(&buf).expect("push random point");
    }
    points
}

fn instance_kernel(index: usize, dim: usize, shape: f64) -> KernelSpec {
    let family = match index % 4 {
        0 => KernelFamily::Gaussian,
        1 => KernelFamily::Wendland { k: 0 },
        2 => KernelFamily::Wendland { k: 1 },
        _ => KernelFamily::Wendland { k: 2 },
    };
    KernelSpec::new(family, shape, dim).expect("valid kernel")
}

// ======================================================================
// Criteria
// ======================================================================

#[test]
fn criterion_01_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x01);
    let mut worst_sq = 0.0f64;
    let mut worst_sqrt = 0.0f64;

    for i in 0..ORACLE_INSTANCES {
        let dim = 1 + i % 3;
        let shape = rng.gen_range(0.6..1.6);
        let spec = instance_kernel(i, dim, shape);
        let count = rng.gen_range(50..=200);
        let candidates = random_points(&mut rng, dim, count);
        let stop = StopCriteria::new(ORACLE_STOP_SQ, ORACLE_MAX_SELECTIONS).unwrap();
        let run = run_pgreedy(&spec, &candidates, &stop, &RunOptions::default()).unwrap();
        let centers = run.state.selected_points(&candidates);

        for (j, x) in candidates.iter().enumerate() {
            let incremental_sq = run.state.power_sq()[j];
            let direct = power_function_direct(&spec, &centers, x).unwrap();
            worst_sq = worst_sq.max((incremental_sq - direct * direct).abs());
            if incremental_sq.max(direct * direct) >= ORACLE_NOISE_FLOOR_SQ {
                worst_sqrt = worst_sqrt.max((incremental_sq.sqrt() - direct).abs());
            }
        }
    }

    let elapsed = started.elapsed();
    let pass = worst_sq <= ORACLE_TOL && worst_sqrt <= ORACLE_TOL && elapsed <= ORACLE_TIME_LIMIT;
    report(
        "criterion 01 (oracle equivalence)",
        pass,
        &format!(
            "{ORACLE_INSTANCES} instances: max |P_inc^2 - P_direct^2| = {worst_sq:.3e}, \
             max |P_inc - P_direct| above noise floor = {worst_sqrt:.3e} (tol {ORACLE_TOL:.0e}), \
             {:.2}s (limit {:?})",
            elapsed.as_secs_f64(),
            ORACLE_TIME_LIMIT
        ),
    );
}

#[test]
fn criterion_02_monotonicity_and_vanishing() {
    let mut failures = Vec::new();
    for o in &fixture().outcomes {
        let monotone = o
            .trace
            .rows
            .windows(2)
            .all(|w| w[1].max_power <= w[0].max_power);
        if !monotone {
            failures.push(format!("{}: max_power not non-increasing", o.name));
        }
        if o.final_power_min < 0.0 {
            failures.push(format!("{}: negative power {:.3e}", o.name, o.final_power_min));
        }
        if o.selected_power_residual > SELECTED_RESIDUAL_MAX {
            failures.push(format!(
                "{}: residual {:.3e} at a selected index",
                o.name, o.selected_power_residual
            ));
        }
    }
    report(
        "criterion 02 (monotonicity and vanishing)",
        failures.is_empty(),
        &if failures.is_empty() {
            format!(
                "all {} runs: max_power non-increasing, power >= 0, selected residual <= {SELECTED_RESIDUAL_MAX:.0e}",
                fixture().outcomes.len()
            )
        } else {
            failures.join("; ")
        },
    );
}

#[test]
fn criterion_03_gaussian_d1_rate() {
    let o = outcome("gaussian-d1");
    let fit = fitted_power_constant(&o.fits).expect("power fit present");
    let (lo, hi) = GAUSS_D1_C3_RANGE;
    let c3 = fit.p_or_c3;
    let pass = fit.r_squared >= GAUSS_D1_R2_MIN
        && c3 >= lo
        && c3 <= hi
        && o.duration <= GAUSS_D1_TIME_LIMIT;
    report(
        "criterion 03 (gaussian d=1 exponential rate)",
        pass,
        &format!(
            "c3 = {c3:.4} (band [{lo}, {hi}]), r^2 = {:.4} (min {GAUSS_D1_R2_MIN}), \
             {} iterations in {:.2}s (limit {:?})",
            fit.r_squared,
            o.trace.rows.len(),
            o.duration.as_secs_f64(),
            GAUSS_D1_TIME_LIMIT
        ),
    );
}

#[test]
fn criterion_04_gaussian_higher_dims() {
    let mut details = Vec::new();
    let mut pass = true;
    for name in ["gaussian-d2", "gaussian-d3"] {
        let o = outcome(name);
        let fit = fitted_power_constant(&o.fits).expect("power fit present");
        let reference = reference::gaussian_reference(fit.dim).unwrap().c3_hat;
        let rel = (fit.p_or_c3 - reference).abs() / reference;
        let ok = rel <= GAUSS_C3_REL_BAND
            && fit.r_squared >= GAUSS_R2_MIN
            && o.duration <= GAUSS_RUN_TIME_LIMIT;
        pass &= ok;
        details.push(format!(
            "{name}: c3 = {:.4} vs {reference} ({:+.1}%), r^2 = {:.4}, {:.1}s",
            fit.p_or_c3,
            100.0 * (fit.p_or_c3 - reference) / reference,
            fit.r_squared,
            o.duration.as_secs_f64()
        ));
    }
    report(
        "criterion 04 (gaussian d=2,3 exponential rates)",
        pass,
        &format!(
            "{} (band ±{:.0}%, r^2 min {GAUSS_R2_MIN}, limit {:?}/run)",
            details.join("; "),
            100.0 * GAUSS_C3_REL_BAND,
            GAUSS_RUN_TIME_LIMIT
        ),
    );
}

#[test]
fn criterion_05_wendland_algebraic_rates() {
    let mut details = Vec::new();
    let mut pass = true;
    for name in WENDLAND_RUNS {
        let o = outcome(name);
        let fit = fitted_power_constant(&o.fits).expect("power fit present");
        let SmoothnessClass::Finite(order) = o.trace.kernel.smoothness() else {
            panic!("{name}: expected finite smoothness");
        };
        let d = o.trace.kernel.dim() as f64;
        let target = -order / d;
        let p = fit.p_or_c3;
        let ok = p <= target + WENDLAND_MARGIN_OVER_PROVEN
            && (p - target).abs() <= WENDLAND_EXPONENT_BAND
            && fit.r_squared >= WENDLAND_R2_MIN
            && o.duration <= WENDLAND_RUN_TIME_LIMIT;
        pass &= ok;
        details.push(format!(
            "{name}: p = {p:.3} vs {target:.3} (|Δ| = {:.3}, band {WENDLAND_EXPONENT_BAND}), r^2 = {:.3}{}",
            (p - target).abs(),
            fit.r_squared,
            if ok { "" } else { " [out]" }
        ));
    }
    report(
        "criterion 05 (wendland algebraic rates)",
        pass,
        &details.join("; "),
    );
}

#[test]
fn criterion_06_fill_distance_decay() {
    let mut details = Vec::new();
    let mut pass = true;
    for name in WENDLAND_RUNS {
        let o = outcome(name);
        let fit = fitted_fill_row(&o.fits).expect("fill fit present");
        let target = -1.0 / o.trace.kernel.dim() as f64;
        let ok = (fit.p_or_c3 - target).abs() <= FILL_EXPONENT_BAND;
        pass &= ok;
        details.push(format!(
            "{name}: p = {:.3} vs {target:.3}{}",
            fit.p_or_c3,
            if ok { "" } else { " [out]" }
        ));
    }
    report(
        "criterion 06 (fill-distance decay)",
        pass,
        &format!("band ±{FILL_EXPONENT_BAND}: {}", details.join("; ")),
    );
}

#[test]
fn criterion_07_error_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x07);
    let mut checked = 0;
    let mut worst_margin = f64::NEG_INFINITY;
    let mut failures = 0;

    while checked < ERROR_BOUND_PAIRS {
        let dim = 1 + checked % 3;
        let spec = instance_kernel(checked, dim, rng.gen_range(0.7..1.4));
        let count = rng.gen_range(40..=80);
        let candidates = random_points(&mut rng, dim, count);
        let stop = StopCriteria::new(ERROR_BOUND_STOP_SQ, 12).unwrap();
        let run = run_pgreedy(&spec, &candidates, &stop, &RunOptions::default()).unwrap();
        let centers = run.state.selected_points(&candidates);
        let triangle = run.state.newton_at_selected();

        for _ in 0..5 {
            let y = candidates.point(rng.gen_range(0..candidates.len()));
            let x = candidates.point(rng.gen_range(0..candidates.len()));
            // Interpolate f = K(., y) through the greedy centers via the
            // Newton route; bound the error with the dense-route power.
            let data: Vec<f64> = centers
                .iter()
                .map(|c| spec.eval(c, y).unwrap())
                .collect();
            let interpolant = Interpolant::new(&spec, &centers, triangle, &data).unwrap();
            let lhs = (spec.eval(x, y).unwrap() - interpolant.evaluate(x).unwrap()).abs();
            let power = power_function_direct(&spec, &centers, x).unwrap();
            let rhs = power * spec.eval(y, y).unwrap().sqrt() + ERROR_BOUND_SLACK;
            worst_margin = worst_margin.max(lhs - rhs);
            if lhs > rhs {
                failures += 1;
            }
            checked += 1;
            if checked == ERROR_BOUND_PAIRS {
                break;
            }
        }
    }

    report(
        "criterion 07 (pointwise error bound)",
        failures == 0,
        &format!(
            "{ERROR_BOUND_PAIRS} pairs: |K(x,y) - s_y(x)| <= P(x)·sqrt(K(y,y)) + {ERROR_BOUND_SLACK:.0e}; \
             worst lhs-rhs = {worst_margin:.3e}, {failures} violations"
        ),
    );
}

#[test]
fn criterion_08_newton_orthonormality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x08);
    let mut worst = 0.0f64;
    let mut sizes = Vec::new();
    for i in 0..12 {
        let dim = 1 + i % 3;
        let spec = instance_kernel(i, dim, rng.gen_range(0.7..1.4));
        let candidates = random_points(&mut rng, dim, 150);
        let stop = StopCriteria::new(GRAM_STOP_SQ, GRAM_MAX_SIZE).unwrap();
        let run = run_pgreedy(&spec, &candidates, &stop, &RunOptions::default()).unwrap();
        let centers = run.state.selected_points(&candidates);
        let triangle = run.state.newton_at_selected();
        let n = triangle.size();
        assert!(n >= 5, "instance too small to be informative");
        sizes.push(n);

        // Newton basis functions are v_k = sum_j B[j][k] K(., x_j) with
        // B = L^-T; their native-space Gram is B^T A B.
        let b: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                triangle.solve_lower_transpose(&e).unwrap()
            })
            .collect();
        let a: Vec<Vec<f64>> = centers
            .iter()
            .map(|p| centers.iter().map(|q| spec.eval(p, q).unwrap()).collect())
            .collect();
        for i in 0..n {
            // (A b_i)
            let ab: Vec<f64> = (0..n)
                .map(|r| (0..n).map(|s| a[r][s] * b[i][s]).sum())
                .collect();
            for k in 0..n {
                let g: f64 = (0..n).map(|r| b[k][r] * ab[r]).sum();
                let target = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
    }
    report(
        "criterion 08 (newton basis orthonormality)",
        worst <= GRAM_IDENTITY_TOL,
        &format!(
            "12 instances, d = 1..3, n in {:?}..={:?}: max |B^T A B - I| = {worst:.3e} (tol {GRAM_IDENTITY_TOL:.0e})",
            sizes.iter().min().unwrap(),
            sizes.iter().max().unwrap()
        ),
    );
}

#[test]
fn criterion_09_suite_determinism() {
    let first = fixture();
    let dir = tempfile::tempdir().unwrap();
    let second = run_full_suite(dir.path());
    let mut identical = true;
    for (a, b) in first.outcomes.iter().zip(&second) {
        let bytes_a = std::fs::read(first._dir.path().join(&a.name).join("trace.csv")).unwrap();
        let bytes_b = std::fs::read(dir.path().join(&b.name).join("trace.csv")).unwrap();
        identical &= bytes_a == bytes_b;
    }
    report(
        "criterion 09 (suite determinism)",
        identical && first.outcomes.len() == second.len(),
        &format!(
            "{} runs re-executed: trace CSVs byte-identical = {identical}",
            second.len()
        ),
    );
}

#[test]
fn criterion_10_fitter_round_trip() {
    fn synthetic(values: Vec<f64>, dim: usize) -> GreedyTrace {
        let rows = values
            .iter()
            .enumerate()
            .map(|(i, &v)| TraceRow {
                n: i + 1,
                selected_index: i,
                point: vec![0.0; dim],
                max_power: v,
                fill_distance: None,
            })
            .collect::<Vec<_>>();
        GreedyTrace {
            termination: Termination::MaxSelections,
            kernel: KernelSpec::new(KernelFamily::Gaussian, 1.0, dim).unwrap(),
            stop: StopCriteria::new(1e-15, values.len()).unwrap(),
            candidate_count: values.len(),
            record_fill: false,
            rows,
        }
    }

    let window = FitWindow::new(1, 50).unwrap();
    let ns: Vec<f64> = (1..=50).map(|n| n as f64).collect();
    let mut worst = 0.0f64;

    for r in reference::GAUSSIAN_REFERENCE {
        let d = r.dim as f64;
        let trace = synthetic(
            ns.iter().map(|n| r.c2_hat * (-r.c3_hat * n.powf(1.0 / d)).exp()).collect(),
            r.dim,
        );
        let fit = fit_exponential(&trace, r.dim, &window).unwrap();
        let RateModel::Exponential { c2, c3, .. } = fit.model else {
            panic!("expected exponential model");
        };
        worst = worst.max((c2 - r.c2_hat).abs()).max((c3 - r.c3_hat).abs());
    }

    for r in reference::WENDLAND_REFERENCE {
        let d = r.dim as f64;
        for (c, p) in [
            (r.bound_c1_hat, -r.beta / d + 0.5),
            (r.improved_c, -r.beta / d),
        ] {
            let trace = synthetic(ns.iter().map(|n| c * n.powf(p)).collect(), r.dim);
            let fit = fit_algebraic(&trace, &window).unwrap();
            let RateModel::Algebraic { c: fc, p: fp } = fit.model else {
                panic!("expected algebraic model");
            };
            worst = worst.max((fc - c).abs()).max((fp - p).abs());
        }
    }

    report(
        "criterion 10 (rate-fitter round-trip)",
        worst <= ROUNDTRIP_TOL,
        &format!(
            "15 synthetic exact-model traces from the reference tables: \
             max parameter error = {worst:.3e} (tol {ROUNDTRIP_TOL:.0e})"
        ),
    );
}
