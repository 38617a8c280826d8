//! Disks of the Riemann sphere in Hermitian coefficient form, Moebius
//! maps, the intersection classification, annulus normalization, and
//! von Neumann spectral-set certification.
//!
//! A disk is the region `{z : a|z|^2 + 2 Re(conj(b) z) + c <= 0}`. The
//! point at infinity belongs to the region iff `a < 0` and lies on the
//! boundary iff `a = 0`, so bounded disks have `a > 0`, exteriors of
//! disks have `a < 0`, and closed half-planes have `a = 0`.

mod annulus;
mod certify;
mod classify;

pub use annulus::normalize_annulus;
pub use certify::{certify_spectral, Certification, CertifyKind};
pub use classify::{boundary_count_sphere, classify, BoundaryCount, CaseLabel, Classification};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::LinalgError;

/// Coefficient magnitude below which the boundary is treated as a
/// straight line (the triple is normalized to unit max magnitude).
pub(crate) const LINE_EPS: f64 = 1e-13;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("domain: {0}")]
    Domain(String),
    #[error("invalid disk: {0}")]
    InvalidDisk(String),
    #[error("invalid Moebius map: {0}")]
    InvalidMap(String),
    #[error(
        "ambiguous classification between {first:?} and {second:?} \
         (discriminant {discriminant:.3e} within tolerance band {tol:.3e})"
    )]
    Ambiguous { first: CaseLabel, second: CaseLabel, discriminant: f64, tol: f64 },
    #[error("wrong case: expected {expected:?}, found {found:?}")]
    WrongCase { expected: CaseLabel, found: CaseLabel },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("disk JSON: {0}")]
    Json(String),
}

/// Point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl SpherePoint {
    pub fn close_to(&self, other: &SpherePoint, tol: f64) -> bool {
        match (self, other) {
            (SpherePoint::Finite(a), SpherePoint::Finite(b)) => (a - b).norm() <= tol,
            (SpherePoint::Infinity, SpherePoint::Infinity) => true,
            _ => false,
        }
    }
}

/// Closed disk of the Riemann sphere in Hermitian coefficient form.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereDisk {
    coeff_a: f64,
    coeff_b: Complex64,
    coeff_c: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DiskJson {
    Disk { center: [f64; 2], radius: f64 },
    Codisk { center: [f64; 2], radius: f64 },
    Halfplane { angle: f64, offset: f64 },
}

impl SphereDisk {
    /// Build from raw Hermitian coefficients; normalizes to unit max
    /// magnitude and requires a genuine disk (`|b|^2 - a c > 0`).
    pub fn from_coeffs(a: f64, b: Complex64, c: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.re.is_finite() && b.im.is_finite() && c.is_finite()) {
            return Err(GeometryError::InvalidDisk("non-finite coefficient".into()));
        }
        let m = a.abs().max(b.norm()).max(c.abs());
        if m == 0.0 {
            return Err(GeometryError::InvalidDisk("all coefficients vanish".into()));
        }
        let (a, b, c) = (a / m, b / m, c / m);
        let disc = b.norm_sqr() - a * c;
        if disc <= 0.0 {
            return Err(GeometryError::InvalidDisk(format!(
                "discriminant |b|^2 - a c = {disc:.3e} is not positive (empty interior)"
            )));
        }
        Ok(Self { coeff_a: a, coeff_b: b, coeff_c: c })
    }

    /// Bounded disk `{|z - center| <= radius}`.
    pub fn disk(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidDisk(format!("radius {radius} must be positive")));
        }
        Self::from_coeffs(1.0, -center, center.norm_sqr() - radius * radius)
    }

    /// Exterior disk `{|z - center| >= radius}` (contains infinity).
    pub fn codisk(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidDisk(format!("radius {radius} must be positive")));
        }
        Self::from_coeffs(-1.0, center, radius * radius - center.norm_sqr())
    }

    /// Half-plane `{z : Re(e^{-i angle} z) <= offset}`.
    pub fn halfplane(angle: f64, offset: f64) -> Result<Self, GeometryError> {
        if !(angle.is_finite() && offset.is_finite()) {
            return Err(GeometryError::InvalidDisk("non-finite half-plane parameter".into()));
        }
        let b = Complex64::from_polar(0.5, angle);
        Self::from_coeffs(0.0, b, -offset)
    }

    pub fn coeff_a(&self) -> f64 {
        self.coeff_a
    }
    pub fn coeff_b(&self) -> Complex64 {
        self.coeff_b
    }
    pub fn coeff_c(&self) -> f64 {
        self.coeff_c
    }

    /// Value of the defining quadratic form at a finite point.
    pub fn form(&self, z: Complex64) -> f64 {
        self.coeff_a * z.norm_sqr() + 2.0 * (self.coeff_b.conj() * z).re + self.coeff_c
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.form(z) <= 0.0
    }

    pub fn contains_infinity(&self) -> bool {
        self.coeff_a <= 0.0
    }

    pub fn is_halfplane(&self) -> bool {
        self.coeff_a.abs() <= LINE_EPS
    }

    pub fn is_bounded_disk(&self) -> bool {
        self.coeff_a > LINE_EPS
    }

    /// Center and radius of the boundary circle (`None` for a line).
    pub fn circle(&self) -> Option<(Complex64, f64)> {
        if self.is_halfplane() {
            return None;
        }
        let center = -self.coeff_b / self.coeff_a;
        let disc = self.coeff_b.norm_sqr() - self.coeff_a * self.coeff_c;
        Some((center, disc.sqrt() / self.coeff_a.abs()))
    }

    /// A point on the boundary circline.
    pub(crate) fn boundary_sample(&self) -> Complex64 {
        match self.circle() {
            Some((center, radius)) => center + radius,
            None => {
                // Foot of the perpendicular from the origin to the line.
                -self.coeff_c * self.coeff_b / (2.0 * self.coeff_b.norm_sqr())
            }
        }
    }

    /// Anti-Moebius coefficient matrix of the inversion across the
    /// boundary circline, acting as `z -> (S11 conj(z) + S12)/(S21 conj(z) + S22)`.
    pub(crate) fn inversion_coeffs(&self) -> [Complex64; 4] {
        [
            -self.coeff_b,
            Complex64::new(-self.coeff_c, 0.0),
            Complex64::new(self.coeff_a, 0.0),
            self.coeff_b.conj(),
        ]
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let parsed: DiskJson =
            serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        match parsed {
            DiskJson::Disk { center, radius } => {
                Self::disk(Complex64::new(center[0], center[1]), radius)
            }
            DiskJson::Codisk { center, radius } => {
                Self::codisk(Complex64::new(center[0], center[1]), radius)
            }
            DiskJson::Halfplane { angle, offset } => Self::halfplane(angle, offset),
        }
    }

    pub fn to_json(&self) -> String {
        let json = if self.is_halfplane() {
            let angle = self.coeff_b.arg();
            let offset = -self.coeff_c / (2.0 * self.coeff_b.norm());
            DiskJson::Halfplane { angle, offset }
        } else {
            let (center, radius) = self.circle().expect("not a half-plane");
            if self.coeff_a > 0.0 {
                DiskJson::Disk { center: [center.re, center.im], radius }
            } else {
                DiskJson::Codisk { center: [center.re, center.im], radius }
            }
        };
        serde_json::to_string(&json).expect("disk serialization")
    }
}

/// Invertible linear fractional transformation
/// `z -> (m11 z + m12)/(m21 z + m22)`, normalized to `|det| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusMap {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl MoebiusMap {
    pub fn new(
        m11: Complex64,
        m12: Complex64,
        m21: Complex64,
        m22: Complex64,
    ) -> Result<Self, GeometryError> {
        for z in [m11, m12, m21, m22] {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(GeometryError::InvalidMap("non-finite coefficient".into()));
            }
        }
        let det = m11 * m22 - m12 * m21;
        let scale = m11.norm().max(m12.norm()).max(m21.norm()).max(m22.norm());
        if scale == 0.0 || det.norm() < 1e-12 * scale * scale {
            return Err(GeometryError::InvalidMap(format!(
                "determinant {:.3e} too small relative to coefficients",
                det.norm()
            )));
        }
        let s = det.norm().sqrt();
        Ok(Self { m11: m11 / s, m12: m12 / s, m21: m21 / s, m22: m22 / s })
    }

    pub fn identity() -> Self {
        Self {
            m11: Complex64::new(1.0, 0.0),
            m12: Complex64::new(0.0, 0.0),
            m21: Complex64::new(0.0, 0.0),
            m22: Complex64::new(1.0, 0.0),
        }
    }

    /// `z -> s z` for s != 0.
    pub fn scaling(s: Complex64) -> Result<Self, GeometryError> {
        Self::new(s, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
    }

    /// `z -> 1/z`.
    pub fn inversion() -> Self {
        Self {
            m11: Complex64::new(0.0, 0.0),
            m12: Complex64::new(1.0, 0.0),
            m21: Complex64::new(1.0, 0.0),
            m22: Complex64::new(0.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn inverse(&self) -> Self {
        // Adjugate; |det| stays 1.
        Self { m11: self.m22, m12: -self.m12, m21: -self.m21, m22: self.m11 }
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            m11: self.m11 * inner.m11 + self.m12 * inner.m21,
            m12: self.m11 * inner.m12 + self.m12 * inner.m22,
            m21: self.m21 * inner.m11 + self.m22 * inner.m21,
            m22: self.m21 * inner.m12 + self.m22 * inner.m22,
        }
    }

    pub fn apply(&self, z: Complex64) -> SpherePoint {
        let den = self.m21 * z + self.m22;
        let num = self.m11 * z + self.m12;
        if den.norm() <= 1e-300 * num.norm().max(1.0) {
            SpherePoint::Infinity
        } else {
            SpherePoint::Finite(num / den)
        }
    }

    pub fn apply_sphere(&self, p: SpherePoint) -> SpherePoint {
        match p {
            SpherePoint::Finite(z) => self.apply(z),
            SpherePoint::Infinity => {
                if self.m21.norm() <= 1e-300 {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.m11 / self.m21)
                }
            }
        }
    }
}

/// Image of a disk under a Moebius map.
///
/// The Hermitian coefficient matrix transforms by congruence with the
/// adjugate of the map's coefficient matrix, which preserves the sign
/// of the form and hence the region.
pub fn apply_map(map: &MoebiusMap, disk: &SphereDisk) -> SphereDisk {
    let n11 = map.m22;
    let n12 = -map.m12;
    let n21 = -map.m21;
    let n22 = map.m11;

    let a = disk.coeff_a;
    let b = disk.coeff_b;
    let c = disk.coeff_c;

    // C' = N* C N with C = [[a, b], [conj(b), c]].
    let a_new = a * n11.norm_sqr() + 2.0 * (b * n11.conj() * n21).re + c * n21.norm_sqr();
    let c_new = a * n12.norm_sqr() + 2.0 * (b * n12.conj() * n22).re + c * n22.norm_sqr();
    let b_new = n11.conj() * (a * n12 + b * n22) + n21.conj() * (b.conj() * n12 + c * n22);

    SphereDisk::from_coeffs(a_new, b_new, c_new)
        .expect("congruence by an invertible map preserves the disk discriminant")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_membership() {
        let d = SphereDisk::disk(c(0.0, 0.0), 2.0).unwrap();
        assert!(d.contains(c(1.0, 0.5)));
        assert!(!d.contains(c(3.0, 0.0)));
        assert!(!d.contains_infinity());

        let e = SphereDisk::codisk(c(0.0, 0.0), 0.5).unwrap();
        assert!(e.contains(c(1.0, 0.0)));
        assert!(!e.contains(c(0.1, 0.0)));
        assert!(e.contains_infinity());

        let h = SphereDisk::halfplane(0.0, 1.0).unwrap();
        assert!(h.contains(c(0.5, 7.0)));
        assert!(!h.contains(c(1.5, 0.0)));
        assert!(h.is_halfplane());
    }

    #[test]
    fn halfplane_orientation() {
        // {Im z <= 0} is angle pi/2: Re(e^{-i pi/2} z) = Im z.
        let h = SphereDisk::halfplane(std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!(h.contains(c(3.0, -0.1)));
        assert!(!h.contains(c(3.0, 0.1)));
    }

    #[test]
    fn degenerate_disks_rejected() {
        assert!(SphereDisk::disk(c(0.0, 0.0), 0.0).is_err());
        assert!(SphereDisk::disk(c(0.0, 0.0), -1.0).is_err());
        assert!(SphereDisk::from_coeffs(1.0, c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn inversion_swaps_disk_and_codisk() {
        let d = SphereDisk::disk(c(0.0, 0.0), 2.0).unwrap();
        let img = apply_map(&MoebiusMap::inversion(), &d);
        let expect = SphereDisk::codisk(c(0.0, 0.0), 0.5).unwrap();
        assert!((img.coeff_a - expect.coeff_a).abs() < 1e-14);
        assert!((img.coeff_b - expect.coeff_b).norm() < 1e-14);
        assert!((img.coeff_c - expect.coeff_c).abs() < 1e-14);
    }

    #[test]
    fn identity_map_fixes_disks() {
        let d = SphereDisk::disk(c(1.0, -2.0), 3.0).unwrap();
        let img = apply_map(&MoebiusMap::identity(), &d);
        assert!((img.coeff_a - d.coeff_a).abs() < 1e-15);
        assert!((img.coeff_b - d.coeff_b).norm() < 1e-15);
        assert!((img.coeff_c - d.coeff_c).abs() < 1e-15);
    }

    #[test]
    fn cayley_like_image_is_halfplane() {
        // z -> 1/(1-z) sends {|z| <= 1} to {Re z >= 1/2}.
        let d = SphereDisk::disk(c(0.0, 0.0), 1.0).unwrap();
        let m = MoebiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        let img = apply_map(&m, &d);
        assert!(img.is_halfplane());
        // Boundary points 1 -> infinity, -1 -> 1/2, i -> (1+i)/2; the image
        // region contains Re z >= 1/2.
        assert!(img.contains(c(0.75, 3.0)));
        assert!(!img.contains(c(0.25, 0.0)));
        assert!(img.form(c(0.5, -4.0)).abs() < 1e-12);
    }

    #[test]
    fn map_roundtrip_restores_disk() {
        let d = SphereDisk::disk(c(0.3, 0.7), 1.7).unwrap();
        let m = MoebiusMap::new(c(1.0, 2.0), c(0.5, -0.3), c(0.2, 0.1), c(1.0, -1.0)).unwrap();
        let back = apply_map(&m.inverse(), &apply_map(&m, &d));
        assert!((back.coeff_a - d.coeff_a).abs() < 1e-10);
        assert!((back.coeff_b - d.coeff_b).norm() < 1e-10);
        assert!((back.coeff_c - d.coeff_c).abs() < 1e-10);
    }

    #[test]
    fn singular_map_rejected() {
        assert!(MoebiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn disk_json_roundtrip() {
        for text in [
            r#"{"kind":"disk","center":[1.0,-2.0],"radius":3.0}"#,
            r#"{"kind":"codisk","center":[0.0,0.0],"radius":0.5}"#,
            r#"{"kind":"halfplane","angle":0.0,"offset":1.0}"#,
        ] {
            let d = SphereDisk::from_json(text).unwrap();
            let d2 = SphereDisk::from_json(&d.to_json()).unwrap();
            assert!((d.coeff_a - d2.coeff_a).abs() < 1e-12);
            assert!((d.coeff_b - d2.coeff_b).norm() < 1e-12);
            assert!((d.coeff_c - d2.coeff_c).abs() < 1e-12);
        }
        assert!(SphereDisk::from_json("{\"kind\":\"disk\"}").is_err());
    }
}
