//! Cyclic Jacobi eigensolver for complex Hermitian matrices, and the
//! norm computations built on it.

use num_complex::Complex64;

use super::{LinalgError, Matrix};

/// Off-diagonal reduction target relative to the input Frobenius norm.
const JACOBI_TOL: f64 = 1e-14;
const MAX_SWEEPS: usize = 60;

/// Eigendecomposition `a = V diag(values) V*` of a Hermitian matrix.
///
/// Eigenvalues are sorted ascending; `vectors` holds the corresponding
/// eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl HermitianEigen {
    /// Reassemble `V f(Λ) V*` for a real function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let v = &self.vectors;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, &lam) in self.values.iter().enumerate() {
                    acc += v[(i, k)] * f(lam) * v[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

fn offdiag_norm(w: &Matrix) -> f64 {
    let n = w.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += w[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Sweeps run until the off-diagonal Frobenius norm drops below
/// `1e-14 * ||a||_F`. The input is taken to be Hermitian; only the
/// Hermitian part of each entry pair is consumed.
pub fn hermitian_eigen(a: &Matrix) -> Result<HermitianEigen, LinalgError> {
    a.check_finite()?;
    let n = a.dim();
    let mut w = a.hermitian_part();
    let mut v = Matrix::identity(n);
    let scale = w.frobenius_norm();
    if scale == 0.0 || n == 1 {
        let values = (0..n).map(|i| w[(i, i)].re).collect();
        return Ok(HermitianEigen { values, vectors: v });
    }
    let target = JACOBI_TOL * scale;

    let mut sweeps = 0;
    while offdiag_norm(&w) > target {
        if sweeps >= MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { sweeps, offdiag: offdiag_norm(&w) });
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = w[(p, q)];
                let b = apq.norm();
                if b < f64::MIN_POSITIVE {
                    continue;
                }
                let phase = apq / b;
                let app = w[(p, p)].re;
                let aqq = w[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin = t * cos;
                // Unitary: columns p,q mix with
                //   U[p][p] = c, U[p][q] = s*phase, U[q][p] = -s*conj(phase), U[q][q] = c.
                let sp = sin * phase;
                let spc = sin * phase.conj();
                // Rows p,q of W <- U* W.
                for j in 0..n {
                    let wp = w[(p, j)];
                    let wq = w[(q, j)];
                    w[(p, j)] = wp * cos - wq * sp;
                    w[(q, j)] = wp * spc + wq * cos;
                }
                // Columns p,q of W <- W U, and of the accumulated V.
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * cos - wq * spc;
                    w[(i, q)] = wp * sp + wq * cos;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * cos - vq * spc;
                    v[(i, q)] = vp * sp + vq * cos;
                }
                // Restore exact Hermitian structure on the rotated pair.
                w[(p, q)] = Complex64::new(0.0, 0.0);
                w[(q, p)] = Complex64::new(0.0, 0.0);
                w[(p, p)] = Complex64::new(w[(p, p)].re, 0.0);
                w[(q, q)] = Complex64::new(w[(q, q)].re, 0.0);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.partial_cmp(&w[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| w[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Largest singular value, computed from the eigenvalues of `a* a`.
pub fn spectral_norm(a: &Matrix) -> Result<f64, LinalgError> {
    a.check_finite()?;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let b = a.scale(Complex64::new(1.0 / scale, 0.0));
    let h = b.adjoint().mul(&b);
    let eig = hermitian_eigen(&h)?;
    let lam_max = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    Ok(scale * lam_max.sqrt())
}

/// All singular values, ascending.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>, LinalgError> {
    a.check_finite()?;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(vec![0.0; a.dim()]);
    }
    let b = a.scale(Complex64::new(1.0 / scale, 0.0));
    let h = b.adjoint().mul(&b);
    let eig = hermitian_eigen(&h)?;
    Ok(eig.values.iter().map(|&l| scale * l.max(0.0).sqrt()).collect())
}

/// Largest eigenvalue of the Hermitian part `(a + a*)/2`.
pub fn hermitian_part_max_eig(a: &Matrix) -> Result<f64, LinalgError> {
    a.check_finite()?;
    let eig = hermitian_eigen(&a.hermitian_part())?;
    Ok(*eig.values.last().expect("nonempty spectrum"))
}
