//! Normalization of a ring-shaped intersection onto the balanced
//! annulus `{1/R <= |z| <= R}`.

use num_complex::Complex64;

use super::classify::{classify, CaseLabel};
use super::{apply_map, GeometryError, MoebiusMap, SphereDisk, LINE_EPS};

/// Moebius coefficient product `S1 * conj(S2)` of the two boundary
/// inversions; its fixed points are the common symmetric points.
fn inversion_composition(d1: &SphereDisk, d2: &SphereDisk) -> [Complex64; 4] {
    let s1 = d1.inversion_coeffs();
    let s2: Vec<Complex64> = d2.inversion_coeffs().iter().map(|z| z.conj()).collect();
    [
        s1[0] * s2[0] + s1[1] * s2[2],
        s1[0] * s2[1] + s1[1] * s2[3],
        s1[2] * s2[0] + s1[3] * s2[2],
        s1[2] * s2[1] + s1[3] * s2[3],
    ]
}

/// Common symmetric points of the two boundary circlines: the second
/// component is `None` when the point is infinity (concentric case).
fn common_symmetric_points(
    d1: &SphereDisk,
    d2: &SphereDisk,
) -> Result<(Complex64, Option<Complex64>), GeometryError> {
    let [m11, m12, m21, m22] = inversion_composition(d1, d2);
    let scale = m11.norm().max(m12.norm()).max(m21.norm()).max(m22.norm());
    if scale == 0.0 {
        return Err(GeometryError::Degenerate("zero inversion composition".into()));
    }

    if m21.norm() <= 1e-14 * scale {
        // Affine composition: one symmetric point at infinity.
        let den = m22 - m11;
        if den.norm() <= 1e-14 * scale {
            return Err(GeometryError::Degenerate(
                "inversion composition is a translation; boundaries are tangent".into(),
            ));
        }
        return Ok((m12 / den, None));
    }

    // m21 z^2 + (m22 - m11) z - m12 = 0.
    let beta = m11 - m22;
    let disc = beta * beta + 4.0 * m21 * m12;
    let root = disc.sqrt();
    let t = if (beta + root).norm() >= (beta - root).norm() { beta + root } else { beta - root };
    if t.norm() <= 1e-14 * scale {
        return Err(GeometryError::Degenerate(
            "coincident symmetric points; boundaries are tangent".into(),
        ));
    }
    let z1 = t / (2.0 * m21);
    let z2 = if m12.norm() == 0.0 { -m12 / m21 } else { -m12 / (m21 * z1) };
    Ok((z1, Some(z2)))
}

fn centered_radius(d: &SphereDisk) -> Result<(f64, f64), GeometryError> {
    if d.coeff_a().abs() <= LINE_EPS {
        return Err(GeometryError::Degenerate(
            "normalized image is not a circle centered at the origin".into(),
        ));
    }
    let disc = d.coeff_b().norm_sqr() - d.coeff_a() * d.coeff_c();
    Ok((d.coeff_a(), disc.sqrt() / d.coeff_a().abs()))
}

/// Core ring normalization, assuming the pair is already known to be a
/// ring. Sends the common symmetric points of the two boundaries to 0
/// and infinity, then scales to balance the radii.
pub(crate) fn ring_normalize(
    d1: &SphereDisk,
    d2: &SphereDisk,
) -> Result<(MoebiusMap, f64), GeometryError> {
    let (p, q) = common_symmetric_points(d1, d2)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut t0 = match q {
        Some(q) => MoebiusMap::new(one, -p, one, -q)?,
        None => MoebiusMap::new(one, -p, zero, one)?,
    };

    let mut img1 = apply_map(&t0, d1);
    if img1.coeff_a() < 0.0 {
        t0 = MoebiusMap::inversion().compose(&t0);
        img1 = apply_map(&t0, d1);
    }
    let img2 = apply_map(&t0, d2);

    let (a1, rho1) = centered_radius(&img1)?;
    let (a2, rho2) = centered_radius(&img2)?;
    if a1 <= 0.0 || a2 >= 0.0 || rho2 >= rho1 {
        return Err(GeometryError::Degenerate(format!(
            "normalized images are not a bounded/exterior pair with rho2 < rho1 \
             (a1 = {a1:.3e}, a2 = {a2:.3e}, rho1 = {rho1:.6e}, rho2 = {rho2:.6e})"
        )));
    }

    let s = 1.0 / (rho1 * rho2).sqrt();
    let map = MoebiusMap::scaling(Complex64::new(s, 0.0))?.compose(&t0);
    let big_r = (rho1 / rho2).sqrt();
    Ok((map, big_r))
}

/// Map a ring-shaped pair onto `{|z| <= R}` and `{|z| >= 1/R}`.
///
/// The first disk maps onto the bounded disk of radius `R > 1`, the
/// second onto the exterior of the disk of radius `1/R`. Inputs that do
/// not classify as a ring raise [`GeometryError::WrongCase`].
pub fn normalize_annulus(
    d1: &SphereDisk,
    d2: &SphereDisk,
) -> Result<(MoebiusMap, f64), GeometryError> {
    let cls = classify(d1, d2, 1e-9)?;
    if cls.case_label != CaseLabel::Ring {
        return Err(GeometryError::WrongCase {
            expected: CaseLabel::Ring,
            found: cls.case_label,
        });
    }
    match (cls.canonical_map, cls.canonical_r) {
        (Some(map), Some(r)) => Ok((map, r)),
        _ => ring_normalize(d1, d2),
    }
}
