//! Ratio maximization over Laurent functions by multi-start
//! coordinate search with incremental objective updates.

use num_complex::Complex64;

use super::extremal::extremal_derivative;
use super::{certify_ratio, check_admissible, EstimatorError, RatioResult, SEARCH_SAMPLES};
use crate::linalg::{self, Matrix};
use crate::ratfun::RationalFunction;
use crate::rng::{derive_seed, SplitMix64};

/// Random-start trials after the warm and constant starts.
const RANDOM_TRIALS: usize = 6;
const STEP_FLOOR: f64 = 1e-7;

/// Incremental evaluation state: boundary values and `f(A)` are kept
/// current under single-coefficient moves.
struct SearchState {
    /// `powers[k + degree][j] = boundary_point_j^k`.
    powers: Vec<Vec<Complex64>>,
    /// `a_powers[k + degree] = A^k`.
    a_powers: Vec<Matrix>,
    coeffs: Vec<Complex64>,
    vals: Vec<Complex64>,
    fa: Matrix,
    evals_used: usize,
}

fn spectral_norm_fast(m: &Matrix) -> f64 {
    if m.dim() == 2 {
        // Largest singular value from the 2x2 characteristic data of m* m.
        let frob2 = m.frobenius_norm().powi(2);
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        let disc = (frob2 * frob2 - 4.0 * det.norm_sqr()).max(0.0);
        return (0.5 * (frob2 + disc.sqrt())).sqrt();
    }
    linalg::spectral_norm(m).unwrap_or(f64::INFINITY)
}

impl SearchState {
    fn new(a: &Matrix, big_r: f64, degree: usize) -> Result<Self, EstimatorError> {
        let d = degree as i64;
        let per_circle = SEARCH_SAMPLES / 2;
        let mut points = Vec::with_capacity(2 * per_circle);
        for rho in [big_r, 1.0 / big_r] {
            for j in 0..per_circle {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / per_circle as f64;
                points.push(Complex64::from_polar(rho, theta));
            }
        }
        let mut powers = Vec::with_capacity(2 * degree + 1);
        let mut a_powers = Vec::with_capacity(2 * degree + 1);
        for k in -d..=d {
            powers.push(points.iter().map(|&z| z.powi(k as i32)).collect());
            a_powers.push(a.powi(k)?);
        }
        let m = points.len();
        Ok(Self {
            powers,
            a_powers,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * degree + 1],
            vals: vec![Complex64::new(0.0, 0.0); m],
            fa: Matrix::zeros(a.dim()),
            evals_used: 0,
        })
    }

    fn load(&mut self, coeffs: &[Complex64]) {
        self.coeffs.copy_from_slice(coeffs);
        for v in self.vals.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        self.fa = Matrix::zeros(self.fa.dim());
        for (idx, &ck) in coeffs.iter().enumerate() {
            if ck.norm_sqr() == 0.0 {
                continue;
            }
            for (v, &p) in self.vals.iter_mut().zip(&self.powers[idx]) {
                *v += ck * p;
            }
            self.fa = self.fa.add(&self.a_powers[idx].scale(ck));
        }
    }

    fn objective(&mut self) -> f64 {
        self.evals_used += 1;
        let sup = self.vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if sup <= 1e-300 {
            return 0.0;
        }
        spectral_norm_fast(&self.fa) / sup
    }

    /// Objective after adding `delta` to coefficient `idx`, leaving the
    /// state restored on return.
    fn probe(&mut self, idx: usize, delta: Complex64) -> f64 {
        self.shift(idx, delta);
        let value = self.objective();
        self.shift(idx, -delta);
        value
    }

    fn shift(&mut self, idx: usize, delta: Complex64) {
        self.coeffs[idx] += delta;
        for (v, &p) in self.vals.iter_mut().zip(&self.powers[idx]) {
            *v += delta * p;
        }
        self.fa = self.fa.add(&self.a_powers[idx].scale(delta));
    }

    /// Rescale so the boundary sup is 1 (the objective is scale free).
    fn renormalize(&mut self) {
        let sup = self.vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        if sup > 1e-300 && sup.is_finite() {
            let inv = Complex64::new(1.0 / sup, 0.0);
            for c in self.coeffs.iter_mut() {
                *c *= inv;
            }
            for v in self.vals.iter_mut() {
                *v *= inv;
            }
            self.fa = self.fa.scale(inv);
        }
    }
}

fn warm_start_coeffs(big_r: f64, degree: usize) -> Vec<Complex64> {
    match extremal_derivative(big_r, degree, 2048) {
        Ok(ext) => {
            let d = degree as i64;
            let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
            for (idx, c) in coeffs.iter_mut().enumerate() {
                let k = idx as i64 - d;
                // Laurent coefficient of index k of the extremal function.
                let num = ext.f.numerator();
                let low = ext.f.laurent_low().unwrap_or(0);
                let pos = k - low;
                if pos >= 0 && (pos as usize) < num.len() {
                    *c = num[pos as usize];
                }
            }
            coeffs
        }
        Err(_) => {
            let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
            coeffs[degree] = Complex64::new(1.0, 0.0);
            coeffs
        }
    }
}

fn random_start_coeffs(big_r: f64, degree: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(seed);
    let d = degree as i64;
    (-d..=d)
        .map(|k| {
            let scale = big_r.powi(-(k.abs() as i32));
            Complex64::new(rng.next_gaussian() * scale, rng.next_gaussian() * scale)
        })
        .collect()
}

/// Best ratio found over Laurent functions with indices in
/// `[-degree, degree]`.
///
/// Trial starts (the extremal-derivative warm start, a constant, then
/// seeded random coefficients) are polished by coordinate-wise moves on
/// the real and imaginary parts with a shrinking step, consuming at
/// most `budget` objective evaluations in a fixed deterministic
/// schedule. The best function is re-certified with the full boundary
/// sample budget before being reported.
pub fn maximize_ratio(
    a: &Matrix,
    big_r: f64,
    degree: usize,
    budget: usize,
    seed: u64,
) -> Result<RatioResult, EstimatorError> {
    if degree < 1 {
        return Err(EstimatorError::Domain("degree must be at least 1".into()));
    }
    if budget == 0 {
        return Err(EstimatorError::Domain("budget must be positive".into()));
    }
    check_admissible(a, big_r)?;

    let mut state = SearchState::new(a, big_r, degree)?;
    let ncoeff = 2 * degree + 1;

    let mut starts: Vec<Vec<Complex64>> = Vec::with_capacity(2 + RANDOM_TRIALS);
    starts.push(warm_start_coeffs(big_r, degree));
    let mut constant = vec![Complex64::new(0.0, 0.0); ncoeff];
    constant[degree] = Complex64::new(1.0, 0.0);
    starts.push(constant);
    for trial in 0..RANDOM_TRIALS {
        starts.push(random_start_coeffs(big_r, degree, derive_seed(seed, trial as u64)));
    }

    let mut best_coeffs = starts[0].clone();
    let mut best_value = f64::NEG_INFINITY;
    let mut completed_all = true;

    'trials: for start in &starts {
        state.load(start);
        state.renormalize();
        let mut current = state.objective();
        if current > best_value {
            best_value = current;
            best_coeffs = state.coeffs.clone();
        }
        let mut step = 0.3f64;
        while step > STEP_FLOOR {
            if state.evals_used >= budget {
                completed_all = false;
                break 'trials;
            }
            let mut improved = false;
            for idx in 0..ncoeff {
                let scale = step * state.coeffs[idx].norm().max(0.05);
                let moves = [
                    Complex64::new(scale, 0.0),
                    Complex64::new(-scale, 0.0),
                    Complex64::new(0.0, scale),
                    Complex64::new(0.0, -scale),
                ];
                let mut best_move = None;
                let mut best_probe = current;
                for &delta in &moves {
                    if state.evals_used >= budget {
                        if let Some(delta) = best_move {
                            state.shift(idx, delta);
                        }
                        completed_all = false;
                        break 'trials;
                    }
                    let value = state.probe(idx, delta);
                    if value > best_probe {
                        best_probe = value;
                        best_move = Some(delta);
                    }
                }
                if let Some(delta) = best_move {
                    state.shift(idx, delta);
                    current = best_probe;
                    improved = true;
                    if current > best_value {
                        best_value = current;
                        best_coeffs = state.coeffs.clone();
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
            state.renormalize();
            current = state.objective();
        }
    }

    let f = RationalFunction::laurent(-(degree as i64), best_coeffs)?;
    let mut result = certify_ratio(a, big_r, &f, seed)?;
    result.converged = completed_all;
    Ok(result)
}
