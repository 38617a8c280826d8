//! Matrix inversion and the polar decomposition.

use num_complex::Complex64;

use super::eigen::{hermitian_eigen, singular_values};
use super::{LinalgError, Matrix, SINGULARITY_THRESHOLD};

/// Polar factors of an invertible matrix: `a = unitary * positive`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub unitary: Matrix,
    pub positive: Matrix,
}

fn exact_singularity_check(a: &Matrix) -> Result<(), LinalgError> {
    let sv = singular_values(a)?;
    let smax = *sv.last().expect("nonempty");
    let smin = *sv.first().expect("nonempty");
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < SINGULARITY_THRESHOLD {
        return Err(LinalgError::Singular { ratio, threshold: SINGULARITY_THRESHOLD });
    }
    Ok(())
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
///
/// A matrix counts as singular when its smallest singular value falls
/// below `1e-13` times the largest. The exact singular-value test only
/// runs when the pivot product cannot already certify the margin.
pub fn inverse(a: &Matrix) -> Result<Matrix, LinalgError> {
    a.check_finite()?;
    let n = a.dim();
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Err(LinalgError::Singular { ratio: 0.0, threshold: SINGULARITY_THRESHOLD });
    }

    let mut w = a.clone();
    let mut inv = Matrix::identity(n);
    let mut log_abs_det = 0.0f64;
    let mut pivot_failed = false;

    'elim: for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = w[(pivot_row, col)].norm();
        for row in col + 1..n {
            let mag = w[(row, col)].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag < fro * 1e-300 || pivot_mag == 0.0 {
            pivot_failed = true;
            break 'elim;
        }
        if pivot_row != col {
            for j in 0..n {
                let (x, y) = (w[(col, j)], w[(pivot_row, j)]);
                w[(col, j)] = y;
                w[(pivot_row, j)] = x;
                let (x, y) = (inv[(col, j)], inv[(pivot_row, j)]);
                inv[(col, j)] = y;
                inv[(pivot_row, j)] = x;
            }
        }
        log_abs_det += pivot_mag.ln();
        let pinv = Complex64::new(1.0, 0.0) / w[(col, col)];
        for j in 0..n {
            w[(col, j)] *= pinv;
            inv[(col, j)] *= pinv;
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = w[(row, col)];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                let wc = w[(col, j)];
                let ic = inv[(col, j)];
                w[(row, j)] -= factor * wc;
                inv[(row, j)] -= factor * ic;
            }
        }
    }

    if pivot_failed {
        exact_singularity_check(a)?;
        // A zero pivot with an acceptable singular-value margin cannot
        // happen under partial pivoting.
        return Err(LinalgError::Singular { ratio: 0.0, threshold: SINGULARITY_THRESHOLD });
    }

    // sigma_min >= |det| / sigma_max^{n-1} and sigma_max <= ||a||_F, so
    // |det| >= threshold * ||a||_F^n certifies the margin without an
    // eigenvalue computation.
    let certified = log_abs_det >= SINGULARITY_THRESHOLD.ln() + n as f64 * fro.ln();
    if !certified {
        exact_singularity_check(a)?;
    }
    Ok(inv)
}

/// Orthonormalize the columns of a matrix (modified Gram-Schmidt).
/// The input columns must be linearly independent.
pub fn orthonormalize_columns(g: &Matrix) -> Matrix {
    let n = g.dim();
    let mut q = g.clone();
    for j in 0..n {
        for k in 0..j {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in 0..n {
                dot += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..n {
                let qik = q[(i, k)];
                q[(i, j)] -= dot * qik;
            }
        }
        let norm: f64 = (0..n).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Polar decomposition `a = U G` with `U` unitary and `G` Hermitian
/// positive definite, via the Hermitian square root of `a* a`.
pub fn polar_decompose(a: &Matrix) -> Result<PolarFactors, LinalgError> {
    a.check_finite()?;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(LinalgError::Singular { ratio: 0.0, threshold: SINGULARITY_THRESHOLD });
    }
    let b = a.scale(Complex64::new(1.0 / scale, 0.0));
    let h = b.adjoint().mul(&b);
    let eig = hermitian_eigen(&h)?;
    let lam_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let smax = lam_max.sqrt();
    let smin = eig.values.first().copied().unwrap_or(0.0).max(0.0).sqrt();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if ratio < SINGULARITY_THRESHOLD {
        return Err(LinalgError::Singular { ratio, threshold: SINGULARITY_THRESHOLD });
    }
    let sfac = Complex64::new(scale, 0.0);
    let g = eig.apply(|l| l.max(0.0).sqrt()).scale(sfac);
    let g_inv = eig.apply(|l| 1.0 / l.max(f64::MIN_POSITIVE).sqrt()).scale(1.0 / sfac);
    let u = a.mul(&g_inv);
    Ok(PolarFactors { unitary: u, positive: g })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use crate::linalg::tests::{c, random_matrix};
    use crate::rng::SplitMix64;

    /// Orthonormalized random Gaussian matrix.
    pub(crate) fn random_unitary(n: usize, seed: u64, _rng: &mut SplitMix64) -> Matrix {
        let mut rng = SplitMix64::new(seed);
        let g = Matrix::from_fn(n, |_, _| c(rng.next_gaussian(), rng.next_gaussian()));
        orthonormalize_columns(&g)
    }

    #[test]
    fn inverse_identity_and_diag() {
        let i = Matrix::identity(3);
        assert!(inverse(&i).unwrap().sub(&i).max_abs() < 1e-15);
        let d = Matrix::diag(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let di = inverse(&d).unwrap();
        assert!((di[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((di[(1, 1)].re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn inverse_unit_shear() {
        // [[1, t], [0, 1]]^{-1} = [[1, -t], [0, 1]]
        let t = 1.5;
        let a = Matrix::from_real_rows(&[vec![1.0, t], vec![0.0, 1.0]]);
        let ai = inverse(&a).unwrap();
        let expect = Matrix::from_real_rows(&[vec![1.0, -t], vec![0.0, 1.0]]);
        assert!(ai.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn inverse_residual_random() {
        for seed in 0..20 {
            let a = random_matrix(6, 40 + seed);
            let ai = inverse(&a).unwrap();
            let resid = a.mul(&ai).sub(&Matrix::identity(6)).frobenius_norm();
            let scale = spectral_norm(&a).unwrap() * spectral_norm(&ai).unwrap();
            assert!(resid <= 1e-12 * scale.max(1.0), "seed {seed}: resid {resid:e}");
        }
    }

    #[test]
    fn inverse_rejects_singular() {
        let a = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(inverse(&a), Err(LinalgError::Singular { .. })));
        let z = Matrix::zeros(3);
        assert!(matches!(inverse(&z), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn inverse_near_singular_threshold() {
        // Condition 1e-12 is above the 1e-13 cutoff, 1e-14 is below.
        let ok = Matrix::diag(&[c(1.0, 0.0), c(1e-12, 0.0)]);
        assert!(inverse(&ok).is_ok());
        let bad = Matrix::diag(&[c(1.0, 0.0), c(1e-14, 0.0)]);
        assert!(matches!(inverse(&bad), Err(LinalgError::Singular { .. })));
    }

    #[test]
    fn polar_of_unitary_is_unitary_and_identity() {
        let mut rng = SplitMix64::new(3);
        let q = random_unitary(4, 11, &mut rng);
        let pf = polar_decompose(&q).unwrap();
        assert!(pf.positive.sub(&Matrix::identity(4)).max_abs() < 1e-12);
        assert!(pf.unitary.sub(&q).max_abs() < 1e-12);
    }

    #[test]
    fn polar_of_positive_diagonal() {
        let d = Matrix::diag(&[c(2.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)]);
        let pf = polar_decompose(&d).unwrap();
        assert!(pf.unitary.sub(&Matrix::identity(3)).max_abs() < 1e-12);
        assert!(pf.positive.sub(&d).max_abs() < 1e-12);
    }

    #[test]
    fn polar_shear_example() {
        // For [[1, 1.5], [0, 1]]: a*a has eigenvalues {4, 1/4} (char poly
        // x^2 - 4.25x + 1), so ||G|| = 2 and ||G^{-1}|| = 2.
        let a = Matrix::from_real_rows(&[vec![1.0, 1.5], vec![0.0, 1.0]]);
        let pf = polar_decompose(&a).unwrap();
        let tr = 4.25f64;
        let det = 1.0f64;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let expect_norm_g = ((tr + disc) / 2.0f64).sqrt();
        let expect_norm_ginv = 1.0 / ((tr - disc) / 2.0f64).sqrt();
        assert!((spectral_norm(&pf.positive).unwrap() - expect_norm_g).abs() < 1e-10);
        assert!((spectral_norm(&inverse(&pf.positive).unwrap()).unwrap() - expect_norm_ginv).abs() < 1e-10);
        assert!((expect_norm_g - 2.0).abs() < 1e-12);
        assert!((expect_norm_ginv - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polar_reconstruction_and_norm_transfer() {
        for seed in 0..15 {
            let a = random_matrix(5, 1000 + seed);
            let pf = polar_decompose(&a).unwrap();
            let na = spectral_norm(&a).unwrap();
            // U G reconstructs a.
            let resid = pf.unitary.mul(&pf.positive).sub(&a).frobenius_norm();
            assert!(resid <= 1e-10 * na.max(1.0), "seed {seed} resid {resid:e}");
            // U unitary.
            let utu = pf.unitary.adjoint().mul(&pf.unitary);
            assert!(utu.sub(&Matrix::identity(5)).max_abs() < 1e-10);
            // ||a|| = ||G|| and ||a^{-1}|| = ||G^{-1}||.
            let ng = spectral_norm(&pf.positive).unwrap();
            assert!((na - ng).abs() <= 1e-10 * na.max(1.0));
            let nai = spectral_norm(&inverse(&a).unwrap()).unwrap();
            let ngi = spectral_norm(&inverse(&pf.positive).unwrap()).unwrap();
            assert!((nai - ngi).abs() <= 1e-10 * nai.max(1.0));
        }
    }

    #[test]
    fn polar_rejects_singular() {
        let a = Matrix::from_real_rows(&[vec![1.0, 0.0], vec![3.0, 0.0]]);
        assert!(matches!(polar_decompose(&a), Err(LinalgError::Singular { .. })));
    }
}
