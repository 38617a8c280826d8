//! Closed-form constants and curves for the annulus K-spectral bounds:
//! the Shields bound, the two-term upper bound with its limit 2 + 2/sqrt(3),
//! the simple lower bound 2/(1 + R^{-2}), the Caratheodory-metric product,
//! and the sharper lower curve gamma(R).

use thiserror::Error;

/// Iteration cap for the infinite-product truncation.
const PRODUCT_FACTOR_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("domain: {0}")]
    Domain(String),
    #[error("precision: {0}")]
    Precision(String),
    #[error("R value at index {index}: {source}")]
    Element { index: usize, source: Box<BoundsError> },
}

fn require_r_gt_1(big_r: f64) -> Result<(), BoundsError> {
    if !(big_r.is_finite() && big_r > 1.0) {
        return Err(BoundsError::Domain(format!("R = {big_r} must be finite and exceed 1")));
    }
    Ok(())
}

/// Shields' constant `2 + sqrt((R + r)/(R - r))` for the annulus
/// `{r <= |z| <= R}`.
pub fn shields(r: f64, big_r: f64) -> Result<f64, BoundsError> {
    if !(r.is_finite() && big_r.is_finite() && r > 0.0 && r < big_r) {
        return Err(BoundsError::Domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    Ok(2.0 + ((big_r + r) / (big_r - r)).sqrt())
}

/// The phi-independent value of the boundary integral J:
/// `sqrt((R^2 + 2R + 1)/(R^2 + R + 1))`, computed in the rearranged
/// form `sqrt(1 + R/(R^2 + R + 1))` to avoid cancellation for large R.
pub fn j_closed(big_r: f64) -> Result<f64, BoundsError> {
    require_r_gt_1(big_r)?;
    Ok((1.0 + big_r / (big_r * (big_r + 1.0) + 1.0)).sqrt())
}

/// Upper bound for the balanced annulus:
/// `2 + min(sqrt((R^2+2R+1)/(R^2+R+1)), sqrt((R^2+1)/(R^2-1)))`.
pub fn thm1_upper(big_r: f64) -> Result<f64, BoundsError> {
    require_r_gt_1(big_r)?;
    let first = j_closed(big_r)?;
    let second = ((big_r * big_r + 1.0) / (big_r * big_r - 1.0)).sqrt();
    Ok(2.0 + first.min(second))
}

/// Limit value `2 + 2/sqrt(3)` of the upper bound as R tends to 1.
pub fn upper_limit() -> f64 {
    2.0 + 2.0 / 3.0f64.sqrt()
}

/// Simple lower bound `2/(1 + R^{-2})`.
pub fn lower_simple(big_r: f64) -> Result<f64, BoundsError> {
    require_r_gt_1(big_r)?;
    Ok(2.0 / (1.0 + 1.0 / (big_r * big_r)))
}

/// Infinitesimal Caratheodory-metric value at 1 for the balanced
/// annulus: `(2/R) prod_{n>=1} ((1 - R^{-8n})/(1 - R^{4-8n}))^2`.
///
/// The product is truncated once the analytic tail bound (geometric in
/// `R^{-8}`, which degenerates to the `1/(4n^2)` rate near R = 1) drops
/// below `tail_tol` in log scale.
pub fn caratheodory_product(big_r: f64, tail_tol: f64) -> Result<f64, BoundsError> {
    require_r_gt_1(big_r)?;
    if !(tail_tol > 0.0 && tail_tol.is_finite()) {
        return Err(BoundsError::Domain(format!("tail_tol = {tail_tol} must be positive")));
    }
    let q = big_r.powi(-8);
    let r4 = big_r.powi(4);
    let mut log_prod = 0.0f64;
    let mut x = q; // R^{-8n}
    for _ in 1..=PRODUCT_FACTOR_CAP {
        let y = r4 * x; // R^{4-8n} < 1 for every n >= 1
        log_prod += 2.0 * ((-x).ln_1p() - (-y).ln_1p());
        let x_next = x * q;
        let y_next = r4 * x_next;
        // Tail bound: sum_{m>n} 2 (y_m - x_m)/(1 - y_m)
        //           <= 2 (R^4 - 1) x_{n+1} / ((1 - y_{n+1})(1 - q)).
        let tail = 2.0 * (r4 - 1.0) * x_next / ((1.0 - y_next) * (1.0 - q));
        if tail <= tail_tol {
            return Ok((2.0 / big_r) * log_prod.exp());
        }
        x = x_next;
    }
    Err(BoundsError::Precision(format!(
        "product tail bound not below {tail_tol:.3e} after {PRODUCT_FACTOR_CAP} factors \
         (R = {big_r} too close to 1)"
    )))
}

/// Sharper lower bound `gamma(R) = 2 (1 - R^{-2}) prod(...)^2`, equal to
/// `(R - 1/R)` times the Caratheodory product.
pub fn gamma_lower(big_r: f64, tail_tol: f64) -> Result<f64, BoundsError> {
    let prod = caratheodory_product(big_r, tail_tol)?;
    Ok((big_r - 1.0 / big_r) * prod)
}

/// One row of the bounds table.
#[derive(Debug, Clone)]
pub struct BoundsRow {
    pub r: f64,
    pub lower_simple: f64,
    pub gamma: f64,
    pub upper_new: f64,
    pub upper_shields: f64,
    pub upper_min: f64,
}

/// Evaluate all five bound curves on a list of R values.
pub fn curve_table(r_values: &[f64], tail_tol: f64) -> Result<Vec<BoundsRow>, BoundsError> {
    let mut rows = Vec::with_capacity(r_values.len());
    for (index, &big_r) in r_values.iter().enumerate() {
        let row = (|| -> Result<BoundsRow, BoundsError> {
            let lower = lower_simple(big_r)?;
            let gamma = gamma_lower(big_r, tail_tol)?;
            let upper_new = thm1_upper(big_r)?;
            let upper_shields = shields(1.0 / big_r, big_r)?;
            Ok(BoundsRow {
                r: big_r,
                lower_simple: lower,
                gamma,
                upper_new,
                upper_shields,
                upper_min: upper_new.min(upper_shields),
            })
        })()
        .map_err(|source| BoundsError::Element { index, source: Box::new(source) })?;
        rows.push(row);
    }
    Ok(rows)
}

/// Format with 12 significant digits (stable CSV output).
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// CSV emission: fixed header, one row per R, 12 significant digits.
pub fn curve_table_csv(rows: &[BoundsRow]) -> String {
    let mut out = String::from("R,lower_simple,gamma,upper_new,upper_shields,upper_min\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sig12(row.r),
            fmt_sig12(row.lower_simple),
            fmt_sig12(row.gamma),
            fmt_sig12(row.upper_new),
            fmt_sig12(row.upper_shields),
            fmt_sig12(row.upper_min),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    // Reference values below are frozen from 40-digit evaluations and
    // carry more digits than f64 resolves.
    #![allow(clippy::excessive_precision)]

    use super::*;

    #[test]
    fn shields_examples() {
        // 2 + sqrt(5/3) at (1/2, 2).
        let v = shields(0.5, 2.0).unwrap();
        assert!((v - 3.290994448735805628).abs() < 1e-12, "{v}");
        // r -> 0 tends to 3.
        assert!((shields(1e-12, 2.0).unwrap() - 3.0).abs() < 1e-9);
        // r = 1/R matches the second min-term closed form.
        for big_r in [1.2, 2.0, 7.5] {
            let lhs = shields(1.0 / big_r, big_r).unwrap();
            let rhs = 2.0 + ((big_r * big_r + 1.0) / (big_r * big_r - 1.0)).sqrt();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        assert!(shields(2.0, 1.0).is_err());
    }

    #[test]
    fn thm1_upper_examples() {
        let v = thm1_upper(2.0).unwrap();
        assert!((v - 3.133893419027681681).abs() < 1e-12, "{v}");
        // R -> 1+ tends to 2 + 2/sqrt(3); R -> infinity tends to 3.
        assert!((thm1_upper(1.0 + 1e-9).unwrap() - upper_limit()).abs() < 1e-6);
        assert!((thm1_upper(1e9).unwrap() - 3.0).abs() < 1e-8);
        // Always below the limit value.
        for k in 0..200 {
            let big_r = 1.0001 * 1.06f64.powi(k);
            let u = thm1_upper(big_r).unwrap();
            assert!(u <= upper_limit() + 1e-15, "R={big_r}: {u}");
            assert!(u < 3.2);
        }
        assert!(thm1_upper(1.0).is_err());
    }

    #[test]
    fn lower_simple_examples() {
        assert!((lower_simple(2.0).unwrap() - 1.6).abs() < 1e-15);
        assert!((lower_simple(1.0 + 1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!((lower_simple(1e9).unwrap() - 2.0).abs() < 1e-15);
        assert!(lower_simple(0.5).is_err());
    }

    #[test]
    fn caratheodory_product_examples() {
        // Extended-precision value at R = 2.
        let v = caratheodory_product(2.0, 1e-14).unwrap();
        assert!((v - 1.129425235123680428).abs() < 1e-12, "{v}");
        // All factors tend to 1 for large R: value ~ 2/R.
        let w = caratheodory_product(1e6, 1e-14).unwrap();
        assert!((w - 2e-6).abs() < 1e-16, "{w}");
        // Too tight a tolerance too close to 1 exhausts the cap.
        assert!(matches!(
            caratheodory_product(1.0 + 1e-7, 1e-12),
            Err(BoundsError::Precision(_))
        ));
    }

    #[test]
    fn gamma_examples() {
        let v = gamma_lower(2.0, 1e-14).unwrap();
        assert!((v - 1.694137852685520642).abs() < 1e-12, "{v}");
        // gamma(1.5) and gamma(3), frozen from a 40-digit evaluation.
        assert!((gamma_lower(1.5, 1e-14).unwrap() - 1.614158396037630119).abs() < 1e-12);
        assert!((gamma_lower(3.0, 1e-14).unwrap() - 1.821951259803856633).abs() < 1e-12);
        // Near 1 the limit is pi/2.
        let near = gamma_lower(1.001, 1e-6).unwrap();
        assert!((near - std::f64::consts::FRAC_PI_2).abs() < 1e-2, "{near}");
        // Large R: gamma tends to 2 from below the upper bounds.
        assert!((gamma_lower(1e6, 1e-14).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn bound_ordering() {
        for &big_r in &[1.01, 1.1, 1.5, 2.0, 3.0, 10.0, 100.0] {
            let lo = lower_simple(big_r).unwrap();
            let gamma = gamma_lower(big_r, 1e-12).unwrap();
            let up = thm1_upper(big_r).unwrap();
            assert!(lo < gamma, "R={big_r}: {lo} !< {gamma}");
            assert!(gamma < up, "R={big_r}: {gamma} !< {up}");
        }
    }

    #[test]
    fn j_closed_decreasing_with_supremum() {
        let sup = 2.0 / 3.0f64.sqrt();
        let mut prev = f64::INFINITY;
        for k in 0..400 {
            let big_r = 1.0 + 1e-4 + 0.05 * k as f64;
            let v = j_closed(big_r).unwrap();
            assert!(v < prev, "not decreasing at R = {big_r}");
            assert!(v <= sup + 1e-15);
            prev = v;
        }
        assert!((j_closed(1.0 + 1e-9).unwrap() - sup).abs() < 1e-8);
        assert!((j_closed(2.0).unwrap() - 1.133893419027681681).abs() < 1e-12);
    }

    #[test]
    fn curve_table_r2_and_errors() {
        let rows = curve_table(&[2.0], 1e-12).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!((row.lower_simple - 1.6).abs() < 1e-12);
        assert!((row.gamma - 1.694137852685520642).abs() < 1e-9);
        assert!((row.upper_new - 3.133893419027681681).abs() < 1e-12);
        assert!((row.upper_shields - 3.290994448735805628).abs() < 1e-12);
        assert!((row.upper_min - row.upper_new).abs() == 0.0);

        assert!(curve_table(&[], 1e-12).unwrap().is_empty());

        match curve_table(&[2.0, 0.5], 1e-12) {
            Err(BoundsError::Element { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected element error, got {other:?}"),
        }
    }

    #[test]
    fn monotone_columns_on_grid() {
        // Geometric grid on (1, 10]: lower_simple increases, upper_new
        // decreases.
        let grid: Vec<f64> =
            (0..50).map(|k| 1.01 * (10.0f64 / 1.01).powf(k as f64 / 49.0)).collect();
        let rows = curve_table(&grid, 1e-10).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].lower_simple > w[0].lower_simple);
            assert!(w[1].upper_new < w[0].upper_new);
        }
    }

    #[test]
    fn csv_shape() {
        let rows = curve_table(&[2.0, 3.0], 1e-10).unwrap();
        let csv = curve_table_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "R,lower_simple,gamma,upper_new,upper_shields,upper_min");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 6);
        assert!(first[0].starts_with("2.0000000000"));
        // 12 significant digits in scientific notation.
        assert!(first[1].contains('e'));
    }
}
