//! Boundary sup norms on the balanced annulus `{1/R <= |z| <= R}`:
//! uniform sampling of both boundary circles with one golden-section
//! refinement pass around the best sample of each circle.

use num_complex::Complex64;

use super::{RatFunError, RationalFunction};
use crate::linalg::{self, Matrix};

const TAU: f64 = 2.0 * std::f64::consts::PI;
/// Inverse golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

fn validate_annulus(big_r: f64, samples: usize) -> Result<(), RatFunError> {
    if !(big_r.is_finite() && big_r > 1.0) {
        return Err(RatFunError::Domain(format!("annulus parameter R = {big_r} must exceed 1")));
    }
    if samples < 64 {
        return Err(RatFunError::TooFewSamples(samples));
    }
    Ok(())
}

fn pole_error(pole: Complex64, big_r: f64) -> RatFunError {
    RatFunError::PoleInRegion { pole, inner: 1.0 / big_r, outer: big_r }
}

/// Maximum of `g` over one circle: sampled grid plus golden-section
/// refinement around the best sample.
fn circle_max(g: &dyn Fn(f64) -> f64, samples: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut best_theta = 0.0;
    for j in 0..samples {
        let theta = TAU * j as f64 / samples as f64;
        let v = g(theta);
        if v > best {
            best = v;
            best_theta = theta;
        }
    }
    let half = TAU / samples as f64;
    best.max(golden_max(g, best_theta - half, best_theta + half))
}

fn golden_max(g: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    let mut best = f1.max(f2);
    for _ in 0..60 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1);
        }
        best = best.max(f1.max(f2));
    }
    best
}

pub(crate) fn sup_norm_scalar(
    f: &RationalFunction,
    big_r: f64,
    samples: usize,
) -> Result<f64, RatFunError> {
    validate_annulus(big_r, samples)?;
    if let Some(pole) = f.pole_in_annulus(big_r) {
        return Err(pole_error(pole, big_r));
    }
    let mut best = f64::NEG_INFINITY;
    for rho in [big_r, 1.0 / big_r] {
        let g = move |theta: f64| f.eval_unchecked(Complex64::from_polar(rho, theta)).norm();
        best = best.max(circle_max(&g, samples));
    }
    Ok(best)
}

/// Square grid of rational functions, evaluated entrywise.
#[derive(Debug, Clone)]
pub struct MatrixRationalFunction {
    dim: usize,
    entries: Vec<RationalFunction>,
}

impl MatrixRationalFunction {
    pub fn new(rows: Vec<Vec<RationalFunction>>) -> Result<Self, RatFunError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(RatFunError::Invalid("entries must form a square grid".into()));
        }
        Ok(Self { dim, entries: rows.into_iter().flatten().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[RationalFunction] {
        &self.entries
    }

    /// All entry poles (with multiplicity).
    pub fn poles(&self) -> Vec<Complex64> {
        self.entries.iter().flat_map(|f| f.poles().iter().copied()).collect()
    }

    /// Pointwise value as a numeric matrix (no pole guard).
    pub(crate) fn eval_value(&self, z: Complex64) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self.entry(i, j).eval_unchecked(z))
    }

    /// Sup of the spectral norm of the pointwise values over both
    /// boundary circles.
    pub fn sup_norm_annulus(&self, big_r: f64, samples: usize) -> Result<f64, RatFunError> {
        validate_annulus(big_r, samples)?;
        for entry in &self.entries {
            if let Some(pole) = entry.pole_in_annulus(big_r) {
                return Err(pole_error(pole, big_r));
            }
        }
        let mut best = f64::NEG_INFINITY;
        for rho in [big_r, 1.0 / big_r] {
            let g = move |theta: f64| {
                let value = self.eval_value(Complex64::from_polar(rho, theta));
                linalg::spectral_norm(&value).unwrap_or(f64::INFINITY)
            };
            best = best.max(circle_max(&g, samples));
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sup_norm_powers() {
        // |z| is maximal on the outer circle, |1/z| on the inner one.
        let z = RationalFunction::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((z.sup_norm_annulus(2.0, 512).unwrap() - 2.0).abs() < 1e-12);
        let zinv = RationalFunction::laurent(-1, vec![c(1.0, 0.0)]).unwrap();
        assert!((zinv.sup_norm_annulus(2.0, 512).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_z_plus_inverse() {
        // max over the boundary of |z + 1/z| at R = 2 is 2.5, attained at
        // theta = 0 on the outer circle (dense-scan oracle value).
        let f = RationalFunction::laurent(-1, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let v = f.sup_norm_annulus(2.0, 4096).unwrap();
        assert!((v - 2.5).abs() < 1e-10, "{v}");
    }

    #[test]
    fn dense_scan_oracle_on_random_laurent() {
        let mut rng = crate::rng::SplitMix64::new(8);
        for _ in 0..5 {
            let coeffs: Vec<Complex64> =
                (0..7).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect();
            let f = RationalFunction::laurent(-3, coeffs).unwrap();
            let fast = f.sup_norm_annulus(2.0, 1024).unwrap();
            let mut dense = 0.0f64;
            for rho in [2.0, 0.5] {
                for j in 0..200_000 {
                    let th = TAU * j as f64 / 200_000.0;
                    dense = dense.max(f.eval_unchecked(Complex64::from_polar(rho, th)).norm());
                }
            }
            assert!((fast - dense).abs() <= 1e-8 * dense.max(1.0), "fast {fast} dense {dense}");
        }
    }

    #[test]
    fn monotone_in_samples() {
        let mut rng = crate::rng::SplitMix64::new(400);
        for _ in 0..10 {
            let coeffs: Vec<Complex64> =
                (0..9).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect();
            let f = RationalFunction::laurent(-4, coeffs).unwrap();
            let v1 = f.sup_norm_annulus(1.5, 128).unwrap();
            let v2 = f.sup_norm_annulus(1.5, 256).unwrap();
            let v3 = f.sup_norm_annulus(1.5, 512).unwrap();
            // Nondecreasing up to last-bits rounding of the refinement.
            let ulp = 64.0 * f64::EPSILON;
            assert!(v2 >= v1 * (1.0 - ulp) && v3 >= v2 * (1.0 - ulp), "{v1} {v2} {v3}");
        }
    }

    #[test]
    fn submultiplicative_on_boundary() {
        let mut rng = crate::rng::SplitMix64::new(401);
        for _ in 0..10 {
            let f = RationalFunction::laurent(
                -2,
                (0..5).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect(),
            )
            .unwrap();
            let g = RationalFunction::laurent(
                -1,
                (0..4).map(|_| c(rng.next_gaussian(), rng.next_gaussian())).collect(),
            )
            .unwrap();
            let fg = f.mul(&g).unwrap();
            let nf = f.sup_norm_annulus(2.0, 1024).unwrap();
            let ng = g.sup_norm_annulus(2.0, 1024).unwrap();
            let nfg = fg.sup_norm_annulus(2.0, 1024).unwrap();
            assert!(nfg <= nf * ng * (1.0 + 1e-9), "{nfg} vs {}", nf * ng);
        }
    }

    #[test]
    fn pole_in_region_rejected() {
        let f = RationalFunction::new(vec![c(1.0, 0.0)], vec![c(-1.2, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(
            f.sup_norm_annulus(2.0, 256),
            Err(RatFunError::PoleInRegion { .. })
        ));
        // Pole outside is fine.
        let g = RationalFunction::new(vec![c(1.0, 0.0)], vec![c(-3.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(g.sup_norm_annulus(2.0, 256).is_ok());
    }

    #[test]
    fn domain_validation() {
        let f = RationalFunction::polynomial(vec![c(1.0, 0.0)]).unwrap();
        assert!(matches!(f.sup_norm_annulus(0.9, 256), Err(RatFunError::Domain(_))));
        assert!(matches!(f.sup_norm_annulus(2.0, 32), Err(RatFunError::TooFewSamples(32))));
    }

    #[test]
    fn matrix_sup_norm_diagonal_equals_scalar() {
        let f = RationalFunction::laurent(-1, vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let zero = RationalFunction::constant(c(0.0, 0.0));
        let big = MatrixRationalFunction::new(vec![
            vec![f.clone(), zero.clone()],
            vec![zero, f.clone()],
        ])
        .unwrap();
        let scalar = f.sup_norm_annulus(2.0, 512).unwrap();
        let matrix = big.sup_norm_annulus(2.0, 512).unwrap();
        assert!((scalar - matrix).abs() <= 1e-9 * scalar);
    }
}
