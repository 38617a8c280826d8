//! Empirical K estimation on the balanced annulus: witness operators,
//! random admissible operators, realized ratios `||f(A)|| / ||f||_X`,
//! ratio maximization over Laurent functions, and the extremal
//! derivative problem behind the lower bound.

mod extremal;
mod search;

pub use extremal::{extremal_derivative, ExtremalResult};
pub use search::maximize_ratio;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{self, LinalgError, Matrix};
use crate::ratfun::{MatrixRationalFunction, RatFunError, RationalFunction};
use crate::rng::{mix64, SplitMix64};

/// Boundary samples used while searching.
pub(crate) const SEARCH_SAMPLES: usize = 4096;
/// Boundary samples used to certify a reported ratio.
pub(crate) const CERTIFY_SAMPLES: usize = 65536;
/// Relative sup-norm sampling slack required before a ratio is reported.
const SUP_SLACK_LIMIT: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("domain: {0}")]
    Domain(String),
    #[error(
        "operator not admissible for R = {big_r}: ||A|| = {norm_a:.6e}, ||A^-1|| = {norm_a_inv:.6e}"
    )]
    Inadmissible { big_r: f64, norm_a: f64, norm_a_inv: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
}

/// Diagnostics attached to a realized ratio.
#[derive(Debug, Clone)]
pub struct RatioDiagnostics {
    /// Boundary samples per circle used for the certified sup norm.
    pub sup_samples: usize,
    /// Relative change of the sup norm under the last sample doubling.
    pub sup_rel_slack: f64,
    /// Relative residual of the matrix evaluation route.
    pub eval_residual: f64,
}

/// A realized constant `||f(A)|| / ||f||_X` with the achieving function.
#[derive(Debug, Clone)]
pub struct RatioResult {
    pub big_r: f64,
    pub ratio: f64,
    pub f: RationalFunction,
    pub converged: bool,
    pub seed: u64,
    pub diagnostics: RatioDiagnostics,
}

impl RatioResult {
    /// `{"R":..., "ratio":..., "f":{...}, "converged":..., "seed":...}`.
    pub fn to_json(&self) -> String {
        let f_json: serde_json::Value =
            serde_json::from_str(&self.f.to_json()).expect("rational function JSON is valid");
        let value = serde_json::json!({
            "R": self.big_r,
            "ratio": self.ratio,
            "f": f_json,
            "converged": self.converged,
            "seed": self.seed,
            "diagnostics": {
                "sup_samples": self.diagnostics.sup_samples,
                "sup_rel_slack": self.diagnostics.sup_rel_slack,
                "eval_residual": self.diagnostics.eval_residual,
            },
        });
        serde_json::to_string(&value).expect("ratio serialization")
    }
}

/// The 2x2 triangular witness `[[1, R - 1/R], [0, 1]]`, which attains
/// `||A|| = ||A^{-1}|| = R`.
pub fn jordan_witness(big_r: f64) -> Result<Matrix, EstimatorError> {
    if !(big_r.is_finite() && big_r > 1.0) {
        return Err(EstimatorError::Domain(format!("R = {big_r} must exceed 1")));
    }
    let t0 = big_r - 1.0 / big_r;
    let a = Matrix::from_real_rows(&[vec![1.0, t0], vec![0.0, 1.0]]);
    let norm = linalg::spectral_norm(&a)?;
    let norm_inv = linalg::spectral_norm(&linalg::inverse(&a)?)?;
    assert!(
        (norm - big_r).abs() <= 1e-12 * big_r && (norm_inv - big_r).abs() <= 1e-12 * big_r,
        "witness norms {norm}, {norm_inv} should equal {big_r}"
    );
    Ok(a)
}

/// Random operator admissible for the balanced annulus: `A = U G` with
/// `U` a seeded random unitary and `G` Hermitian with eigenvalues
/// uniform in `[(1/R)(1 + 1e-3), R(1 - 1e-3)]`. Deterministic per
/// `(n, R, seed)`.
pub fn random_admissible(n: usize, big_r: f64, seed: u64) -> Matrix {
    assert!(n >= 1, "dimension must be positive");
    assert!(big_r > 1.0, "R must exceed 1");
    const DELTA: f64 = 1e-3;
    let stream = mix64(seed ^ mix64(n as u64) ^ mix64(big_r.to_bits()));
    let mut rng = SplitMix64::new(stream);
    let gauss =
        Matrix::from_fn(n, |_, _| Complex64::new(rng.next_gaussian(), rng.next_gaussian()));
    let u = linalg::orthonormalize_columns(&gauss);
    let gauss2 =
        Matrix::from_fn(n, |_, _| Complex64::new(rng.next_gaussian(), rng.next_gaussian()));
    let v = linalg::orthonormalize_columns(&gauss2);
    let lo = (1.0 / big_r) * (1.0 + DELTA);
    let hi = big_r * (1.0 - DELTA);
    let eigs: Vec<f64> = (0..n).map(|_| rng.uniform(lo, hi)).collect();
    let mut g = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &lam) in eigs.iter().enumerate() {
                acc += v[(i, k)] * lam * v[(j, k)].conj();
            }
            g[(i, j)] = acc;
        }
    }
    u.mul(&g)
}

pub(crate) fn check_admissible(a: &Matrix, big_r: f64) -> Result<(), EstimatorError> {
    if !(big_r.is_finite() && big_r > 1.0) {
        return Err(EstimatorError::Domain(format!("R = {big_r} must exceed 1")));
    }
    let norm_a = linalg::spectral_norm(a)?;
    let norm_a_inv = match linalg::inverse(a) {
        Ok(inv) => linalg::spectral_norm(&inv)?,
        Err(LinalgError::Singular { .. }) => f64::INFINITY,
        Err(e) => return Err(e.into()),
    };
    let limit = big_r * (1.0 + 1e-12);
    if norm_a > limit || norm_a_inv > limit {
        return Err(EstimatorError::Inadmissible { big_r, norm_a, norm_a_inv });
    }
    Ok(())
}

/// Certified sup norm: doubles the per-circle sample count until the
/// relative change drops below `1e-6`, returning the final value, the
/// sample count, and the last relative slack. A ratio is only reported
/// when the slack stabilizes.
fn certified_sup(
    f: &RationalFunction,
    big_r: f64,
    start: usize,
) -> Result<(f64, usize, f64), EstimatorError> {
    let mut samples = start.max(64);
    let mut value = f.sup_norm_annulus(big_r, samples)?;
    loop {
        let next = f.sup_norm_annulus(big_r, samples * 2)?;
        let slack = if next > 0.0 { (next - value) / next } else { 0.0 };
        samples *= 2;
        value = next;
        if slack < SUP_SLACK_LIMIT {
            return Ok((value, samples, slack));
        }
        if samples >= 2 * CERTIFY_SAMPLES {
            return Err(EstimatorError::Domain(format!(
                "boundary sup norm did not stabilize below {SUP_SLACK_LIMIT:.0e} relative \
                 slack at {samples} samples (last slack {slack:.3e})"
            )));
        }
    }
}

fn ratio_core(
    a: &Matrix,
    big_r: f64,
    f: &RationalFunction,
    start_samples: usize,
    seed: u64,
) -> Result<RatioResult, EstimatorError> {
    check_admissible(a, big_r)?;
    if f.is_zero() {
        return Err(EstimatorError::Domain("ratio of the zero function is undefined".into()));
    }
    let fa = f.eval_matrix(a)?;
    let norm_fa = linalg::spectral_norm(&fa)?;
    let (sup, sup_samples, sup_rel_slack) = certified_sup(f, big_r, start_samples)?;
    let eval_residual = eval_route_residual(f, a, &fa)?;
    Ok(RatioResult {
        big_r,
        ratio: norm_fa / sup,
        f: f.clone(),
        converged: true,
        seed,
        diagnostics: RatioDiagnostics { sup_samples, sup_rel_slack, eval_residual },
    })
}

/// Relative residual `||q(A) f(A) - p(A)|| / max(1, ||p(A)||)` of the
/// rational matrix evaluation.
fn eval_route_residual(
    f: &RationalFunction,
    a: &Matrix,
    fa: &Matrix,
) -> Result<f64, EstimatorError> {
    let mut qa = Matrix::zeros(a.dim());
    for &c in f.denominator().iter().rev() {
        qa = qa.mul(a).add_scaled_identity(c);
    }
    let mut pa = Matrix::zeros(a.dim());
    for &c in f.numerator().iter().rev() {
        pa = pa.mul(a).add_scaled_identity(c);
    }
    let resid = qa.mul(fa).sub(&pa).frobenius_norm();
    Ok(resid / pa.frobenius_norm().max(1.0))
}

/// Realized constant `||f(A)|| / ||f||_X` for one function.
pub fn ratio(a: &Matrix, big_r: f64, f: &RationalFunction) -> Result<RatioResult, EstimatorError> {
    ratio_core(a, big_r, f, SEARCH_SAMPLES, 0)
}

/// Ratio re-certified with the final sample budget (used for reported
/// search results).
pub(crate) fn certify_ratio(
    a: &Matrix,
    big_r: f64,
    f: &RationalFunction,
    seed: u64,
) -> Result<RatioResult, EstimatorError> {
    ratio_core(a, big_r, f, CERTIFY_SAMPLES / 2, seed)
}

/// Completely bounded probe: spectral norm of the block matrix
/// `(F_ij(A))` over the matrix sup norm of `F` on the boundary.
pub fn complete_ratio(
    a: &Matrix,
    big_r: f64,
    big_f: &MatrixRationalFunction,
) -> Result<f64, EstimatorError> {
    check_admissible(a, big_r)?;
    for entry in big_f.entries() {
        if let Some(pole) = entry.pole_in_annulus(big_r) {
            return Err(EstimatorError::RatFun(RatFunError::PoleInRegion {
                pole,
                inner: 1.0 / big_r,
                outer: big_r,
            }));
        }
    }
    let d = big_f.dim();
    let n = a.dim();
    let mut blocks = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            blocks.push(big_f.entry(i, j).eval_matrix(a)?);
        }
    }
    let block = Matrix::from_fn(d * n, |row, col| {
        let (bi, ii) = (row / n, row % n);
        let (bj, jj) = (col / n, col % n);
        blocks[bi * d + bj][(ii, jj)]
    });
    let num = linalg::spectral_norm(&block)?;

    let mut samples = SEARCH_SAMPLES;
    let mut sup = big_f.sup_norm_annulus(big_r, samples)?;
    loop {
        let next = big_f.sup_norm_annulus(big_r, samples * 2)?;
        let slack = if next > 0.0 { (next - sup) / next } else { 0.0 };
        samples *= 2;
        sup = next;
        if slack < SUP_SLACK_LIMIT || samples >= CERTIFY_SAMPLES {
            break;
        }
    }
    if sup == 0.0 {
        return Err(EstimatorError::Domain("zero matrix function".into()));
    }
    Ok(num / sup)
}
