//! Polynomial root finding by Durand-Kerner iteration.

use num_complex::Complex64;

/// Roots of a polynomial with ascending coefficients. Trailing zero
/// coefficients are trimmed; zero roots are factored out exactly.
pub(crate) fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut cs: Vec<Complex64> = coeffs.to_vec();
    while cs.last().is_some_and(|c| c.norm() == 0.0) {
        cs.pop();
    }
    if cs.len() <= 1 {
        return vec![];
    }

    // Factor out z^m for exact zero roots.
    let mut zeros = 0usize;
    while zeros < cs.len() - 1 && cs[zeros].norm() == 0.0 {
        zeros += 1;
    }
    let reduced = &cs[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    roots.extend(durand_kerner(reduced));
    roots
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn durand_kerner(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return vec![];
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();
    if deg == 1 {
        return vec![-monic[0]];
    }

    // Cauchy bound for the root radius; start on a slightly rotated circle.
    let bound = 1.0 + monic.iter().take(deg).map(|c| c.norm()).fold(0.0, f64::max);
    let radius = bound.clamp(0.5, 1e6);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|i| {
            Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * i as f64 / deg as f64 + 0.4)
        })
        .collect();

    let scale: f64 = monic.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for _ in 0..500 {
        let mut delta_max = 0.0f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() < 1e-290 {
                denom = Complex64::new(1e-290, 0.0);
            }
            let step = horner(&monic, z[i]) / denom;
            z[i] -= step;
            delta_max = delta_max.max(step.norm());
        }
        if delta_max <= 1e-14 * scale.max(z.iter().map(|w| w.norm()).fold(0.0, f64::max)) {
            break;
        }
    }
    z
}
