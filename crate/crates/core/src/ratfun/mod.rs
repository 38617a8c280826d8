//! Rational and Laurent functions: scalar and matrix evaluation,
//! derivatives, and sup norms on annulus boundaries.

mod roots;
mod supnorm;

pub use supnorm::MatrixRationalFunction;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError, Matrix};
use roots::polynomial_roots;

/// Absolute distance to a pole below which evaluation is refused.
const POLE_DISTANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RatFunError {
    #[error("invalid rational function: {0}")]
    Invalid(String),
    #[error("evaluation at or near a pole ({pole}, distance {dist:.3e})")]
    PoleEvaluation { pole: Complex64, dist: f64 },
    #[error("a pole of the function meets the matrix spectrum: {0}")]
    PoleMeetsSpectrum(String),
    #[error("pole {pole} lies inside the closed annulus [{inner:.6e}, {outer:.6e}]")]
    PoleInRegion { pole: Complex64, inner: f64, outer: f64 },
    #[error("boundary sampling needs at least 64 samples, got {0}")]
    TooFewSamples(usize),
    #[error("domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("rational function JSON: {0}")]
    Json(String),
}

/// Quotient of complex polynomials, with explicit Laurent support.
///
/// Coefficients are ascending in degree. When `laurent_low` is set the
/// function is `sum c_k z^k` for `k = laurent_low ..`, encoded with
/// denominator `z^{-laurent_low}`, which keeps the pole structure at
/// the origin exact.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Vec<Complex64>,
    den: Vec<Complex64>,
    laurent_low: Option<i64>,
    poles: Vec<Complex64>,
}

fn trim(mut coeffs: Vec<Complex64>) -> Vec<Complex64> {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
        coeffs.pop();
    }
    coeffs
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_matrix(coeffs: &[Complex64], a: &Matrix) -> Matrix {
    let n = a.dim();
    let mut acc = Matrix::zeros(n);
    for &c in coeffs.iter().rev() {
        acc = acc.mul(a).add_scaled_identity(c);
    }
    acc
}

fn derivative_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    if coeffs.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect()
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn check_all_finite(coeffs: &[Complex64]) -> Result<(), RatFunError> {
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(RatFunError::Invalid("non-finite coefficient".into()));
    }
    Ok(())
}

impl RationalFunction {
    /// General quotient `p/q` from ascending coefficient lists.
    pub fn new(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self, RatFunError> {
        check_all_finite(&num)?;
        check_all_finite(&den)?;
        let num = trim(num);
        let den = trim(den);
        if den.iter().all(|c| c.norm() == 0.0) {
            return Err(RatFunError::Invalid("denominator is identically zero".into()));
        }
        let poles = polynomial_roots(&den);
        Ok(Self { num, den, laurent_low: None, poles })
    }

    /// Polynomial with ascending coefficients.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self, RatFunError> {
        Self::new(coeffs, vec![Complex64::new(1.0, 0.0)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c]).expect("constant is a valid polynomial")
    }

    /// Laurent function `sum_{k=low..} coeffs[k-low] z^k`.
    pub fn laurent(low: i64, coeffs: Vec<Complex64>) -> Result<Self, RatFunError> {
        check_all_finite(&coeffs)?;
        if coeffs.is_empty() {
            return Err(RatFunError::Invalid("empty Laurent coefficient list".into()));
        }
        if low >= 0 {
            let mut num = vec![Complex64::new(0.0, 0.0); low as usize];
            num.extend(coeffs);
            let mut f = Self::polynomial(num)?;
            f.laurent_low = Some(low);
            return Ok(f);
        }
        let num = trim(coeffs);
        let m = (-low) as usize;
        let mut den = vec![Complex64::new(0.0, 0.0); m + 1];
        den[m] = Complex64::new(1.0, 0.0);
        let poles = vec![Complex64::new(0.0, 0.0); m];
        Ok(Self { num, den, laurent_low: Some(low), poles })
    }

    /// `1/(pole_shift - z)`, the lens reduction map as a rational function.
    pub fn inverse_shift(pole_shift: Complex64) -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)], vec![pole_shift, Complex64::new(-1.0, 0.0)])
            .expect("linear denominator is valid")
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.num
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.den
    }

    pub fn laurent_low(&self) -> Option<i64> {
        self.laurent_low
    }

    /// Pole locations (denominator roots, with multiplicity).
    pub fn poles(&self) -> &[Complex64] {
        &self.poles
    }

    /// A pole lying inside the closed annulus `{1/R <= |z| <= R}`
    /// (with a small relative guard band), if any.
    pub fn pole_in_annulus(&self, big_r: f64) -> Option<Complex64> {
        let inner = (1.0 / big_r) * (1.0 - 1e-9);
        let outer = big_r * (1.0 + 1e-9);
        self.poles.iter().copied().find(|p| {
            let m = p.norm();
            m >= inner && m <= outer
        })
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.norm() == 0.0)
    }

    /// Scale all coefficients by a constant.
    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for x in out.num.iter_mut() {
            *x *= c;
        }
        out
    }

    /// Product of two rational functions (no cancellation performed).
    pub fn mul(&self, other: &Self) -> Result<Self, RatFunError> {
        match (self.laurent_low, other.laurent_low) {
            (Some(l1), Some(l2)) => {
                // Laurent times Laurent stays Laurent.
                let coeffs = convolve(&self.laurent_coeffs(), &other.laurent_coeffs());
                Self::laurent(l1.min(0) + l2.min(0), coeffs)
            }
            _ => Self::new(convolve(&self.num, &other.num), convolve(&self.den, &other.den)),
        }
    }

    /// Ascending coefficients starting at index `min(laurent_low, 0)`.
    fn laurent_coeffs(&self) -> Vec<Complex64> {
        self.num.clone()
    }

    fn nearest_pole(&self, z: Complex64) -> Option<(Complex64, f64)> {
        self.poles
            .iter()
            .map(|&p| (p, (z - p).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
    }

    fn check_not_near_pole(&self, z: Complex64) -> Result<(), RatFunError> {
        if let Some((pole, dist)) = self.nearest_pole(z) {
            if dist <= POLE_DISTANCE {
                return Err(RatFunError::PoleEvaluation { pole, dist });
            }
        }
        Ok(())
    }

    /// Evaluate without the pole-distance guard.
    pub(crate) fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self.laurent_low {
            Some(low) if low < 0 => horner(&self.num, z) * z.powi(low as i32),
            _ => horner(&self.num, z) / horner(&self.den, z),
        }
    }

    /// Value at a scalar; refuses points within `1e-12` of a pole.
    pub fn eval_scalar(&self, z: Complex64) -> Result<Complex64, RatFunError> {
        self.check_not_near_pole(z)?;
        Ok(self.eval_unchecked(z))
    }

    /// Derivative at a scalar, by exact coefficient differentiation and
    /// the quotient rule.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64, RatFunError> {
        self.check_not_near_pole(z)?;
        match self.laurent_low {
            Some(low) if low < 0 => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &c) in self.num.iter().enumerate() {
                    let k = low + j as i64;
                    if k != 0 {
                        acc += c * k as f64 * z.powi((k - 1) as i32);
                    }
                }
                Ok(acc)
            }
            _ => {
                let p = horner(&self.num, z);
                let q = horner(&self.den, z);
                let dp = horner(&derivative_coeffs(&self.num), z);
                let dq = horner(&derivative_coeffs(&self.den), z);
                Ok((dp * q - p * dq) / (q * q))
            }
        }
    }

    /// Matrix evaluation `p(a) q(a)^{-1}` (Horner in the matrix argument).
    pub fn eval_matrix(&self, a: &Matrix) -> Result<Matrix, RatFunError> {
        a.check_finite()?;
        match self.laurent_low {
            Some(low) if low < 0 => {
                let pa = horner_matrix(&self.num, a);
                let a_inv_pow = a.powi(low).map_err(|e| match e {
                    LinalgError::Singular { .. } => RatFunError::PoleMeetsSpectrum(
                        "matrix is singular but the function has a pole at 0".into(),
                    ),
                    other => RatFunError::Linalg(other),
                })?;
                Ok(pa.mul(&a_inv_pow))
            }
            _ => {
                let pa = horner_matrix(&self.num, a);
                let qa = horner_matrix(&self.den, a);
                let qinv = linalg::inverse(&qa).map_err(|e| match e {
                    LinalgError::Singular { .. } => RatFunError::PoleMeetsSpectrum(
                        "denominator evaluated at the matrix is numerically singular".into(),
                    ),
                    other => RatFunError::Linalg(other),
                })?;
                Ok(pa.mul(&qinv))
            }
        }
    }

    /// Supremum of `|f|` on the boundary of `{1/R <= |z| <= R}` by
    /// sampling plus golden-section refinement.
    pub fn sup_norm_annulus(&self, big_r: f64, samples: usize) -> Result<f64, RatFunError> {
        supnorm::sup_norm_scalar(self, big_r, samples)
    }

    pub fn from_json(text: &str) -> Result<Self, RatFunError> {
        let parsed: RatFunJson =
            serde_json::from_str(text).map_err(|e| RatFunError::Json(e.to_string()))?;
        Self::from_parts(parsed)
    }

    fn from_parts(parts: RatFunJson) -> Result<Self, RatFunError> {
        let num: Vec<Complex64> =
            parts.num.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let den: Vec<Complex64> =
            parts.den.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        match parts.laurent_low {
            None => Self::new(num, den),
            Some(low) => {
                // The stored numerator begins at index min(low, 0); for a
                // nonnegative low it already carries the zero prefix.
                let f = if low >= 0 {
                    let padding = low as usize;
                    if num.len() < padding || num[..padding].iter().any(|c| c.norm() != 0.0) {
                        return Err(RatFunError::Json(format!(
                            "numerator must start with {padding} zero coefficients for \
                             laurent_low = {low}"
                        )));
                    }
                    Self::laurent(low, num[padding..].to_vec())?
                } else {
                    Self::laurent(low, num)?
                };
                // The encoded denominator must match z^{-min(low, 0)}.
                let den = trim(den);
                if den != f.den {
                    return Err(RatFunError::Json(format!(
                        "denominator does not encode z^{} for laurent_low = {low}",
                        (-low).max(0)
                    )));
                }
                Ok(f)
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_parts()).expect("rational function serialization")
    }

    pub(crate) fn to_parts(&self) -> RatFunJson {
        RatFunJson {
            num: self.num.iter().map(|c| [c.re, c.im]).collect(),
            den: self.den.iter().map(|c| [c.re, c.im]).collect(),
            laurent_low: self.laurent_low,
        }
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RatFunJson {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
    laurent_low: Option<i64>,
}
