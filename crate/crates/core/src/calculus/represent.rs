//! The three-integral boundary representation of `f(A)` and the
//! operator bound derived from it.

use num_complex::Complex64;

use super::{kernel_m, kernel_mu, AnnulusContext, CalculusError, QuadratureConfig, TAU};
use crate::linalg::{self, LinalgError, Matrix};
use crate::ratfun::{RatFunError, RationalFunction};

fn check_poles_outside(f: &RationalFunction, big_r: f64) -> Result<(), CalculusError> {
    match f.pole_in_annulus(big_r) {
        Some(pole) => Err(CalculusError::RatFun(RatFunError::PoleInRegion {
            pole,
            inner: 1.0 / big_r,
            outer: big_r,
        })),
        None => Ok(()),
    }
}

/// Adaptive periodic-trapezoid integration of a matrix-valued node
/// function: node counts double (reusing previous nodes) until two
/// successive values agree within `tol` in spectral norm.
fn periodic_trapezoid<E>(
    dim: usize,
    q: &QuadratureConfig,
    mut node: impl FnMut(f64) -> Result<Matrix, E>,
) -> Result<Matrix, CalculusError>
where
    CalculusError: From<E>,
{
    let mut n = q.nodes;
    let mut sum = Matrix::zeros(dim);
    for j in 0..n {
        sum = sum.add(&node(TAU * j as f64 / n as f64)?);
    }
    let mut value = sum.scale(Complex64::new(TAU / n as f64, 0.0));

    loop {
        let n2 = 2 * n;
        for j in (1..n2).step_by(2) {
            sum = sum.add(&node(TAU * j as f64 / n2 as f64)?);
        }
        let value2 = sum.scale(Complex64::new(TAU / n2 as f64, 0.0));
        let delta = linalg::spectral_norm(&value2.sub(&value))?;
        if delta <= q.tol {
            return Ok(value2);
        }
        if n2 >= q.max_nodes {
            return Err(CalculusError::QuadratureFailure {
                nodes: n2,
                last_delta: delta,
                tol: q.tol,
            });
        }
        n = n2;
        value = value2;
    }
}

fn m_inverse_at(ctx: &AnnulusContext, theta: f64) -> Result<Matrix, CalculusError> {
    match linalg::inverse(&kernel_m(ctx, theta)) {
        Ok(inv) => Ok(inv),
        Err(LinalgError::Singular { .. }) => Err(CalculusError::ResolventSingular { theta }),
        Err(e) => Err(e.into()),
    }
}

/// Evaluate `f(A)` through the boundary representation
/// `f(A) = int f(R e^{i t}) mu(t, A) dt + int f(r e^{i t}) mu(-t, A^{-1}) dt
///        - int f(e^{i t}) M(t, A*)^{-1} dt`.
///
/// The three integrands are summed per node and integrated together;
/// nodes double until the combined value settles within `q.tol`.
pub fn represent(
    ctx: &AnnulusContext,
    f: &RationalFunction,
    q: &QuadratureConfig,
) -> Result<Matrix, CalculusError> {
    check_poles_outside(f, ctx.big_r())?;
    let big_r = ctx.big_r();
    let r = ctx.r();
    periodic_trapezoid(ctx.dim(), q, |theta| -> Result<Matrix, CalculusError> {
        let f_outer = f.eval_unchecked(Complex64::from_polar(big_r, theta));
        let f_inner = f.eval_unchecked(Complex64::from_polar(r, theta));
        let f_unit = f.eval_unchecked(Complex64::from_polar(1.0, theta));
        let term1 = kernel_mu(ctx, theta, ctx.matrix())?.scale(f_outer);
        let term2 = kernel_mu(ctx, -theta, ctx.matrix_inv())?.scale(f_inner);
        let term3 = m_inverse_at(ctx, theta)?.scale(-f_unit);
        Ok(term1.add(&term2).add(&term3))
    })
}

/// Residuals `|| int mu(t, A) dt - I ||` and `|| int mu(-t, A^{-1}) dt - I ||`
/// of the partition of unity carried by the first two kernels.
pub fn partition_of_unity_residuals(
    ctx: &AnnulusContext,
    q: &QuadratureConfig,
) -> Result<(f64, f64), CalculusError> {
    let id = Matrix::identity(ctx.dim());
    let p1 = periodic_trapezoid(ctx.dim(), q, |theta| kernel_mu(ctx, theta, ctx.matrix()))?;
    let p2 = periodic_trapezoid(ctx.dim(), q, |theta| kernel_mu(ctx, -theta, ctx.matrix_inv()))?;
    Ok((
        linalg::spectral_norm(&p1.sub(&id))?,
        linalg::spectral_norm(&p2.sub(&id))?,
    ))
}

/// The calculus bound `K = 2 + || int (Re M(theta, A*))^{-1} d theta ||`.
///
/// `Re M` is inverted per node through its Hermitian eigendecomposition;
/// a non-positive eigenvalue reports the violated admissibility.
pub fn k_formula(ctx: &AnnulusContext, q: &QuadratureConfig) -> Result<f64, CalculusError> {
    let integral = periodic_trapezoid(ctx.dim(), q, |theta| -> Result<Matrix, CalculusError> {
        let re_m = kernel_m(ctx, theta).hermitian_part();
        let eig = linalg::hermitian_eigen(&re_m)?;
        let min_eig = eig.values[0];
        if min_eig <= 0.0 {
            return Err(CalculusError::NotPositive { theta, min_eig });
        }
        Ok(eig.apply(|lam| 1.0 / lam))
    })?;
    Ok(2.0 + linalg::spectral_norm(&integral)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds;
    use crate::estimator::random_admissible;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q_test() -> QuadratureConfig {
        QuadratureConfig::new(64, 1e-11, 16384).unwrap()
    }

    #[test]
    fn constant_function_reproduces_identity() {
        let a = random_admissible(3, 1.8, 42);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        let one = RationalFunction::constant(c(1.0, 0.0));
        let out = represent(&ctx, &one, &q_test()).unwrap();
        assert!(out.sub(&Matrix::identity(3)).max_abs() < 1e-10);
    }

    #[test]
    fn identity_function_reproduces_a() {
        let a = random_admissible(3, 1.8, 43);
        let ctx = AnnulusContext::with_default_margin(a.clone(), 2.0).unwrap();
        let z = RationalFunction::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let out = represent(&ctx, &z, &q_test()).unwrap();
        assert!(out.sub(&a).max_abs() < 1e-10);
    }

    #[test]
    fn reciprocal_reproduces_inverse() {
        let a = random_admissible(3, 1.8, 44);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        let zinv = RationalFunction::laurent(-1, vec![c(1.0, 0.0)]).unwrap();
        let out = represent(&ctx, &zinv, &q_test()).unwrap();
        assert!(out.sub(ctx.matrix_inv()).max_abs() < 1e-10);
    }

    #[test]
    fn random_laurent_matches_direct_calculus() {
        let mut rng = crate::rng::SplitMix64::new(777);
        for trial in 0..6 {
            let a = random_admissible(3, 1.7, 100 + trial);
            let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
            let coeffs: Vec<Complex64> = (0..7)
                .map(|_| c(rng.next_gaussian() * 0.5, rng.next_gaussian() * 0.5))
                .collect();
            let f = RationalFunction::laurent(-3, coeffs).unwrap();
            let direct = f.eval_matrix(ctx.matrix()).unwrap();
            let via_formula = represent(&ctx, &f, &q_test()).unwrap();
            let err = via_formula.sub(&direct).frobenius_norm();
            assert!(err <= 1e-9 * direct.frobenius_norm().max(1.0), "trial {trial}: {err:e}");
        }
    }

    #[test]
    fn rational_with_outside_pole_matches() {
        let a = random_admissible(4, 1.6, 4242);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        // f(z) = (z^2 + 1)/(z - 3), pole outside the annulus.
        let f = RationalFunction::new(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(-3.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let direct = f.eval_matrix(ctx.matrix()).unwrap();
        let via_formula = represent(&ctx, &f, &q_test()).unwrap();
        assert!(via_formula.sub(&direct).frobenius_norm() < 1e-9 * direct.frobenius_norm());
    }

    #[test]
    fn pole_inside_region_rejected() {
        let a = random_admissible(2, 1.5, 5);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        let f = RationalFunction::new(vec![c(1.0, 0.0)], vec![c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            represent(&ctx, &f, &q_test()),
            Err(CalculusError::RatFun(RatFunError::PoleInRegion { .. }))
        ));
    }

    #[test]
    fn partition_of_unity_residuals_small() {
        for seed in [7, 8, 9] {
            let a = random_admissible(3, 1.9, seed);
            let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
            let (r1, r2) = partition_of_unity_residuals(&ctx, &q_test()).unwrap();
            assert!(r1 <= 1e-10, "{r1:e}");
            assert!(r2 <= 1e-10, "{r2:e}");
        }
    }

    #[test]
    fn quadrature_failure_reports_delta() {
        // Convergence is governed by the eigenvalue distance to the
        // boundary circles; an eigenvalue at R(1 - 1e-4) cannot settle to
        // 1e-14 within a 128-node cap.
        let a = Matrix::diag(&[c(2.0 * (1.0 - 1e-4), 0.0), c(1.0, 0.0)]);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        let q = QuadratureConfig::new(64, 1e-14, 128).unwrap();
        let f = RationalFunction::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        match represent(&ctx, &f, &q) {
            Err(CalculusError::QuadratureFailure { nodes, last_delta, .. }) => {
                assert_eq!(nodes, 128);
                assert!(last_delta > 0.0);
            }
            other => panic!("expected quadrature failure, got {other:?}"),
        }
    }

    #[test]
    fn k_formula_identity_is_three() {
        // For A = I at R = 2 the integral of (Re M)^{-1} is exactly I.
        let ctx = AnnulusContext::with_default_margin(Matrix::identity(3), 2.0).unwrap();
        let k = k_formula(&ctx, &q_test()).unwrap();
        assert!((k - 3.0).abs() < 1e-10, "{k}");
    }

    #[test]
    fn k_formula_phase_invariant() {
        let ctx1 = AnnulusContext::with_default_margin(Matrix::identity(2), 2.0).unwrap();
        let phase = Matrix::identity(2).scale(Complex64::from_polar(1.0, 1.234));
        let ctx2 = AnnulusContext::with_default_margin(phase, 2.0).unwrap();
        let k1 = k_formula(&ctx1, &q_test()).unwrap();
        let k2 = k_formula(&ctx2, &q_test()).unwrap();
        assert!((k1 - k2).abs() < 1e-10);
    }

    #[test]
    fn k_formula_below_closed_envelope() {
        for trial in 0..10 {
            let n = 2 + (trial % 3);
            let a = random_admissible(n, 1.8, 900 + trial as u64);
            let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
            let k = k_formula(&ctx, &q_test()).unwrap();
            let envelope = 2.0 + bounds::j_closed(2.0).unwrap();
            assert!(k <= envelope + 1e-8, "trial {trial}: {k} vs {envelope}");
        }
    }

    #[test]
    fn bound_realization_on_random_functions() {
        // ||f(A)|| <= k_formula * ||f||_X up to sampling slack.
        let mut rng = crate::rng::SplitMix64::new(31337);
        let a = random_admissible(3, 1.8, 5150);
        let ctx = AnnulusContext::with_default_margin(a, 2.0).unwrap();
        let k = k_formula(&ctx, &q_test()).unwrap();
        for _ in 0..10 {
            let coeffs: Vec<Complex64> =
                (0..9).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect();
            let f = RationalFunction::laurent(-4, coeffs).unwrap();
            let norm_fa = linalg::spectral_norm(&f.eval_matrix(ctx.matrix()).unwrap()).unwrap();
            let sup = f.sup_norm_annulus(2.0, 4096).unwrap();
            assert!(norm_fa <= k * sup * (1.0 + 1e-6), "{norm_fa} vs {}", k * sup);
        }
    }
}
