//! Kernel interpolation: a dense direct route used for cross-validation, and
//! a Newton-basis route built from a greedy decomposition.
//!
//! The two routes are kept deliberately independent. The direct route
//! assembles the full kernel matrix and solves it with a dense Cholesky
//! factorization; the Newton route reuses only the triangular
//! change-of-basis table produced by the greedy run. Tests compare the two
//! against each other.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::greedy::NewtonTriangle;
use crate::kernel::KernelSpec;

/// Radicands this far below zero are treated as roundoff and clamped; beyond
/// it the kernel system is reported as ill-conditioned.
const RADICAND_CLAMP: f64 = -1e-10;

// ======================================================================
// Dense direct route (oracle)
// ======================================================================

/// Solves the full kernel system `A c = f` over the given centers with a
/// dense Cholesky factorization, returning the coefficients of the
/// interpolant in the kernel-translate basis.
///
/// The centers must be pairwise distinct and `f_values` must have one entry
/// per center. A failed factorization reports an ill-conditioned system.
pub fn direct_solve(spec: &KernelSpec, centers: &PointSet, f_values: &[f64]) -> Result<Vec<f64>> {
    if centers.is_empty() {
        return Err(Error::EmptySelection);
    }
    if f_values.len() != centers.len() {
        return Err(Error::DimensionMismatch {
            expected: centers.len(),
            got: f_values.len(),
        });
    }
    let a = spec.kernel_matrix(centers)?;
    let chol = cholesky(a)?;
    let sol = chol.solve(&DVector::from_column_slice(f_values));
    Ok(sol.as_slice().to_vec())
}

/// Evaluates the power function at `x` directly from the full kernel
/// system: `P(x)^2 = K(x,x) - k_x^T A^{-1} k_x`.
///
/// With no centers the power function is `sqrt(K(x, x))`. Small negative
/// radicands (down to -1e-10) are clamped to zero; anything more negative is
/// reported as an ill-conditioned system.
pub fn power_function_direct(spec: &KernelSpec, centers: &PointSet, x: &[f64]) -> Result<f64> {
    let diag = spec.eval(x, x)?;
    if centers.is_empty() {
        return Ok(diag.sqrt());
    }
    let a = spec.kernel_matrix(centers)?;
    let k_x = DVector::from_vec(spec.kernel_column(x, centers)?);
    let chol = cholesky(a)?;
    let sol = chol.solve(&k_x);
    sqrt_clamped(diag - k_x.dot(&sol))
}

/// Native-space norm of the residual `K(., x) - Pi K(., x)` where `Pi` is
/// the orthogonal projection onto the span of the kernel translates at the
/// centers.
///
/// Assembled independently of [`power_function_direct`] from the expansion
/// `|K(.,x)|^2 - 2 (K(.,x), Pi) + |Pi|^2`; the two agree in exact
/// arithmetic, which the tests exploit.
pub fn residual_native_norm(spec: &KernelSpec, centers: &PointSet, x: &[f64]) -> Result<f64> {
    let diag = spec.eval(x, x)?;
    if centers.is_empty() {
        return Ok(diag.sqrt());
    }
    let k_x = spec.kernel_column(x, centers)?;
    let alpha = direct_solve(spec, centers, &k_x)?;
    let a = spec.kernel_matrix(centers)?;
    let alpha_v = DVector::from_column_slice(&alpha);
    let cross: f64 = alpha.iter().zip(&k_x).map(|(c, k)| c * k).sum();
    let proj_sq = alpha_v.dot(&(&a * &alpha_v));
    sqrt_clamped(diag - 2.0 * cross + proj_sq)
}

// ======================================================================
// Newton-basis route
// ======================================================================

/// Kernel interpolant expressed in the Newton basis of a greedy
/// decomposition.
///
/// Construction solves one triangular system (forward substitution against
/// the change-of-basis table); evaluation recurs through the same table and
/// never touches the full kernel matrix. The coefficients in the
/// kernel-translate basis are recovered on demand with one transposed
/// triangular solve.
#[derive(Debug, Clone)]
pub struct Interpolant {
    spec: KernelSpec,
    centers: PointSet,
    triangle: NewtonTriangle,
    newton_coeffs: Vec<f64>,
}

impl Interpolant {
    /// Builds the interpolant of the data `f_at_centers` given at the
    /// selected centers, using the triangular table from the greedy run
    /// that selected them.
    ///
    /// `centers` must be the selected points in selection order and
    /// `triangle` the matching table; sizes are validated, as is strict
    /// positivity of the pivots.
    pub fn new(
        spec: &KernelSpec,
        centers: &PointSet,
        triangle: &NewtonTriangle,
        f_at_centers: &[f64],
    ) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::EmptySelection);
        }
        if centers.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: centers.dim(),
            });
        }
        if triangle.size() != centers.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                got: triangle.size(),
            });
        }
        if f_at_centers.len() != centers.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                got: f_at_centers.len(),
            });
        }
        for i in 0..triangle.size() {
            if !(triangle.diag(i) > 0.0) {
                return Err(Error::IllConditioned(format!(
                    "non-positive pivot {} at row {i}",
                    triangle.diag(i)
                )));
            }
        }
        let newton_coeffs = triangle.solve_lower(f_at_centers)?;
        Ok(Self {
            spec: *spec,
            centers: centers.clone(),
            triangle: triangle.clone(),
            newton_coeffs,
        })
    }

    /// The interpolation centers, in selection order.
    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    /// Coefficients in the Newton basis.
    pub fn newton_coefficients(&self) -> &[f64] {
        &self.newton_coeffs
    }

    /// Values of all Newton basis functions at `x`, computed by the
    /// recursion that defines them:
    /// `v_k(x) = (K(x, x_k) - sum_{j<k} v_j(x_k) v_j(x)) / v_k(x_k)`.
    pub fn basis(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.centers.len();
        let mut values = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.spec.eval(x, self.centers.point(k))?;
            for (j, v) in values.iter().enumerate().take(k) {
                acc -= self.triangle.value(k, j) * v;
            }
            values.push(acc / self.triangle.diag(k));
        }
        Ok(values)
    }

    /// Evaluates the interpolant at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let basis = self.basis(x)?;
        Ok(basis
            .iter()
            .zip(&self.newton_coeffs)
            .map(|(v, c)| v * c)
            .sum())
    }

    /// Coefficients of the same interpolant in the kernel-translate basis
    /// `s(x) = sum_j alpha_j K(x, x_j)`, obtained from the Newton
    /// coefficients by one transposed triangular solve.
    pub fn translate_coefficients(&self) -> Result<Vec<f64>> {
        self.triangle.solve_lower_transpose(&self.newton_coeffs)
    }
}

fn cholesky(a: DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let n = a.nrows();
    a.cholesky().ok_or_else(|| {
        Error::IllConditioned(format!(
            "Cholesky factorization failed for a {n} x {n} kernel matrix"
        ))
    })
}

fn sqrt_clamped(radicand: f64) -> Result<f64> {
    if radicand < RADICAND_CLAMP {
        return Err(Error::IllConditioned(format!(
            "squared power {radicand:e} is negative beyond roundoff"
        )));
    }
    Ok(radicand.max(0.0).sqrt())
}

// ======================================================================
// Tests
// ======================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn gaussian(dim: usize) -> KernelSpec {
        KernelSpec::new(KernelFamily::Gaussian, 1.0, dim).unwrap()
    }

    fn wendland(k: u8, dim: usize) -> KernelSpec {
        KernelSpec::new(KernelFamily::Wendland { k }, 1.0, dim).unwrap()
    }

    /// Random points in [-1, 1]^dim with a minimum pairwise separation, so
    /// the dense systems stay numerically well posed.
    fn random_separated(rng: &mut ChaCha8Rng, dim: usize, n: usize, gap: f64) -> PointSet {
        let mut ps = PointSet::new(dim);
        let mut point = vec![0.0; dim];
        let mut attempts = 0;
        while ps.len() < n && attempts < 100_000 {
            attempts += 1;
            for c in point.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
            if ps
                .iter()
                .all(|q| crate::kernel::sq_dist(&point, q) >= gap * gap)
            {
                ps.push(&point).unwrap();
            }
        }
        assert_eq!(ps.len(), n, "could not place {n} separated points");
        ps
    }

    #[test]
    fn direct_solve_single_center() {
        let spec = gaussian(1);
        let centers = PointSet::from_flat(1, vec![0.25]).unwrap();
        // K(x1, x1) = 1, so the coefficient equals the data value.
        let c = direct_solve(&spec, &centers, &[3.5]).unwrap();
        assert_eq!(c, vec![3.5]);
    }

    #[test]
    fn direct_solve_recovers_unit_vector() {
        // Solving against the j-th kernel-matrix column must return e_j.
        let spec = gaussian(1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let centers = random_separated(&mut rng, 1, 8, 0.1);
        let a = spec.kernel_matrix(&centers).unwrap();
        let j = 3;
        let col: Vec<f64> = (0..centers.len()).map(|i| a[(i, j)]).collect();
        let c = direct_solve(&spec, &centers, &col).unwrap();
        for (i, ci) in c.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!(
                (ci - expected).abs() < 1e-10,
                "coefficient {i} = {ci}, expected {expected}"
            );
        }
    }

    #[test]
    fn direct_solve_residual_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in [gaussian(2), wendland(1, 2)] {
            let centers = random_separated(&mut rng, 2, 10, 0.2);
            let f: Vec<f64> = (0..10).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let c = direct_solve(&spec, &centers, &f).unwrap();
            let a = spec.kernel_matrix(&centers).unwrap();
            let resid = &a * DVector::from_column_slice(&c) - DVector::from_column_slice(&f);
            let scale = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(
                resid.amax() <= 1e-10 * scale.max(1.0),
                "residual {} too large",
                resid.amax()
            );
        }
    }

    #[test]
    fn direct_solve_validates_inputs() {
        let spec = gaussian(1);
        let centers = PointSet::from_flat(1, vec![0.0, 0.5]).unwrap();
        assert!(direct_solve(&spec, &PointSet::new(1), &[]).is_err());
        assert!(direct_solve(&spec, &centers, &[1.0]).is_err());
        let dup = PointSet::from_flat(1, vec![0.1, 0.1]).unwrap();
        assert_eq!(
            direct_solve(&spec, &dup, &[1.0, 1.0]),
            Err(Error::DuplicatePoints(0, 1))
        );
    }

    #[test]
    fn power_direct_with_no_centers_is_diagonal_sqrt() {
        let spec = gaussian(2);
        let p = power_function_direct(&spec, &PointSet::new(2), &[0.3, 0.4]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn power_direct_vanishes_at_centers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for spec in [gaussian(1), wendland(0, 1), wendland(2, 1)] {
            let centers = random_separated(&mut rng, 1, 6, 0.15);
            for i in 0..centers.len() {
                let p = power_function_direct(&spec, &centers, centers.point(i)).unwrap();
                // The radicand at a center is pure cancellation noise of
                // order eps, so the square root cannot resolve below about
                // sqrt(n * eps) ~ 1e-8 even for a perfectly conditioned
                // system; 1e-7 is the honest double-precision bound.
                assert!(p <= 1e-7, "power {p} at center {i} for {:?}", spec.family());
            }
        }
    }

    #[test]
    fn power_direct_outside_compact_support_is_one() {
        // All centers are farther than the support radius from x, so the
        // kernel column vanishes and the power equals sqrt(K(x, x)) = 1.
        let spec = wendland(1, 1);
        let centers = PointSet::from_flat(1, vec![-1.0, -0.8]).unwrap();
        let p = power_function_direct(&spec, &centers, &[0.9]).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn power_direct_is_bounded_by_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let spec = gaussian(2);
        let centers = random_separated(&mut rng, 2, 12, 0.2);
        for _ in 0..50 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let p = power_function_direct(&spec, &centers, &x).unwrap();
            assert!((0.0..=1.0 + 1e-12).contains(&p));
        }
    }

    #[test]
    fn residual_norm_matches_power_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for spec in [gaussian(2), wendland(1, 2)] {
            let centers = random_separated(&mut rng, 2, 9, 0.2);
            for _ in 0..10 {
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let a = power_function_direct(&spec, &centers, &x).unwrap();
                let b = residual_native_norm(&spec, &centers, &x).unwrap();
                assert!(
                    (a - b).abs() <= 1e-8,
                    "two power formulas disagree: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn residual_norm_with_no_centers() {
        let spec = gaussian(1);
        assert_eq!(
            residual_native_norm(&spec, &PointSet::new(1), &[0.2]).unwrap(),
            1.0
        );
    }

    /// Standard interpolation error bound: for f = K(., y),
    /// |f(x) - (Pi f)(x)| <= P(x) * sqrt(K(y, y)).
    #[test]
    fn error_bound_holds_for_kernel_translates() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for spec in [gaussian(1), wendland(1, 1)] {
            let centers = random_separated(&mut rng, 1, 7, 0.12);
            for _ in 0..25 {
                let x = [rng.gen_range(-1.0..1.0)];
                let y = [rng.gen_range(-1.0..1.0)];
                let f: Vec<f64> = centers
                    .iter()
                    .map(|p| spec.eval(p, &y).unwrap())
                    .collect();
                let alpha = direct_solve(&spec, &centers, &f).unwrap();
                let interp: f64 = centers
                    .iter()
                    .zip(&alpha)
                    .map(|(p, c)| c * spec.eval(&x, p).unwrap())
                    .sum();
                let lhs = (spec.eval(&x, &y).unwrap() - interp).abs();
                let rhs = power_function_direct(&spec, &centers, &x).unwrap()
                    * spec.eval(&y, &y).unwrap().sqrt();
                assert!(
                    lhs <= rhs + 1e-10,
                    "bound violated: |residual| = {lhs} > {rhs}"
                );
            }
        }
    }

    /// The worst-case projection residual over a dictionary of translates
    /// equals the maximum of the power function over the same points.
    #[test]
    fn dictionary_sup_equals_power_sup() {
        let spec = gaussian(1);
        let centers = PointSet::from_flat(1, vec![-0.7, 0.1, 0.6]).unwrap();
        let grid = crate::geometry::discretize_ball(1, 41).unwrap();
        let mut max_resid = 0.0f64;
        let mut max_power = 0.0f64;
        for x in grid.iter() {
            max_resid = max_resid.max(residual_native_norm(&spec, &centers, x).unwrap());
            max_power = max_power.max(power_function_direct(&spec, &centers, x).unwrap());
        }
        assert!(
            (max_resid - max_power).abs() <= 1e-8,
            "sup mismatch: {max_resid} vs {max_power}"
        );
    }

    // ------------------------------------------------------------------
    // Newton route
    // ------------------------------------------------------------------

    use crate::greedy::{run_pgreedy, RunOptions, StopCriteria};

    /// Runs greedy selection on a 1-d grid and returns the pieces the
    /// Newton interpolant needs: centers in selection order and the
    /// triangular table.
    fn greedy_basis(spec: &KernelSpec, per_axis: usize, n: usize) -> (PointSet, NewtonTriangle) {
        let grid = crate::geometry::discretize_ball(spec.dim(), per_axis).unwrap();
        let stop = StopCriteria::new(1e-14, n).unwrap();
        let run = run_pgreedy(spec, &grid, &stop, &RunOptions::default()).unwrap();
        let centers = run.state.selected_points(&grid);
        (centers, run.state.newton_at_selected().clone())
    }

    fn test_function(x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, &c)| (1.5 * c + i as f64).sin() + 0.25 * c * c)
            .sum()
    }

    #[test]
    fn interpolant_with_single_center_reproduces_value() {
        let spec = gaussian(1);
        let (centers, triangle) = greedy_basis(&spec, 11, 1);
        let interp = Interpolant::new(&spec, &centers, &triangle, &[2.75]).unwrap();
        let at_center = interp.evaluate(centers.point(0)).unwrap();
        assert!((at_center - 2.75).abs() <= 1e-12);
    }

    #[test]
    fn interpolant_reproduces_data_at_centers() {
        for spec in [gaussian(1), wendland(2, 1)] {
            let (centers, triangle) = greedy_basis(&spec, 41, 9);
            let f: Vec<f64> = centers.iter().map(test_function).collect();
            let interp = Interpolant::new(&spec, &centers, &triangle, &f).unwrap();
            for (i, x) in centers.iter().enumerate() {
                let s = interp.evaluate(x).unwrap();
                assert!(
                    (s - f[i]).abs() <= 1e-10,
                    "value at center {i}: {s} vs {}",
                    f[i]
                );
            }
        }
    }

    #[test]
    fn translate_coefficients_match_dense_solve() {
        let spec = gaussian(1);
        let (centers, triangle) = greedy_basis(&spec, 41, 10);
        let f: Vec<f64> = centers.iter().map(test_function).collect();
        let interp = Interpolant::new(&spec, &centers, &triangle, &f).unwrap();
        let alpha = interp.translate_coefficients().unwrap();
        let direct = direct_solve(&spec, &centers, &f).unwrap();
        // Coefficient-level agreement between the triangular and the dense
        // route is limited by the kernel matrix conditioning, which grows
        // as the pivots decay; measure against the coefficient scale.
        let scale = direct.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (i, (a, d)) in alpha.iter().zip(&direct).enumerate() {
            assert!(
                (a - d).abs() <= 1e-7 * scale,
                "coefficient {i}: {a} vs {d} (scale {scale})"
            );
        }
    }

    #[test]
    fn newton_and_translate_evaluations_agree() {
        let spec = wendland(1, 1);
        let (centers, triangle) = greedy_basis(&spec, 41, 8);
        let f: Vec<f64> = centers.iter().map(test_function).collect();
        let interp = Interpolant::new(&spec, &centers, &triangle, &f).unwrap();
        let alpha = interp.translate_coefficients().unwrap();
        let grid = crate::geometry::discretize_ball(1, 101).unwrap();
        for x in grid.iter() {
            let newton = interp.evaluate(x).unwrap();
            let translate: f64 = centers
                .iter()
                .zip(&alpha)
                .map(|(p, a)| a * spec.eval(x, p).unwrap())
                .sum();
            assert!(
                (newton - translate).abs() <= 1e-9,
                "evaluations disagree at {x:?}: {newton} vs {translate}"
            );
        }
    }

    #[test]
    fn basis_at_centers_reproduces_triangle() {
        let spec = gaussian(1);
        let (centers, triangle) = greedy_basis(&spec, 41, 7);
        let f = vec![1.0; centers.len()];
        let interp = Interpolant::new(&spec, &centers, &triangle, &f).unwrap();
        for i in 0..centers.len() {
            let basis = interp.basis(centers.point(i)).unwrap();
            for (k, &b) in basis.iter().enumerate() {
                if k <= i {
                    assert!(
                        (b - triangle.value(i, k)).abs() <= 1e-10,
                        "basis {k} at center {i}"
                    );
                } else {
                    // Later basis functions vanish at earlier centers.
                    assert!(b.abs() <= 1e-7, "basis {k} at center {i} = {b}");
                }
            }
        }
    }

    /// The Newton basis is orthonormal in the native space: with
    /// `B = L^{-T}` the translate coefficients of the basis functions,
    /// `B^T A B` must be the identity.
    #[test]
    fn newton_basis_gram_is_identity() {
        let spec = gaussian(2);
        let grid = crate::geometry::discretize_ball(2, 21).unwrap();
        let stop = StopCriteria::new(1e-14, 12).unwrap();
        let run = run_pgreedy(&spec, &grid, &stop, &RunOptions::default()).unwrap();
        let centers = run.state.selected_points(&grid);
        let tri = run.state.newton_at_selected();
        let n = tri.size();

        let a = spec.kernel_matrix(&centers).unwrap();
        let mut b = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let col = tri.solve_lower_transpose(&e).unwrap();
            b.set_column(k, &DVector::from_vec(col));
        }
        let gram = b.transpose() * a * b;
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (gram[(i, j)] - expected).abs() <= 1e-6,
                    "gram[{i},{j}] = {}",
                    gram[(i, j)]
                );
            }
        }
    }

    #[test]
    fn interpolant_validates_inputs() {
        let spec = gaussian(1);
        let (centers, triangle) = greedy_basis(&spec, 21, 4);
        let f = vec![1.0; 4];
        assert!(Interpolant::new(&spec, &centers, &triangle, &f[..3]).is_err());
        assert!(Interpolant::new(&spec, &PointSet::new(1), &triangle, &[]).is_err());
        let spec2 = gaussian(2);
        assert!(Interpolant::new(&spec2, &centers, &triangle, &f).is_err());
    }
}
