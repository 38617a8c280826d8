//! Von Neumann certification: is a disk of the sphere a spectral set
//! for a given matrix?

use super::{GeometryError, SphereDisk};
use crate::linalg::{self, LinalgError, Matrix};

/// Acceptance slack applied to the criterion threshold.
const CERT_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyKind {
    Disk,
    ExteriorDisk,
    HalfPlane,
}

/// Outcome of a von Neumann criterion check.
#[derive(Debug, Clone)]
pub struct Certification {
    pub holds: bool,
    pub kind: CertifyKind,
    /// Measured quantity: `||A - alpha I||`, `||(A - alpha I)^{-1}||`,
    /// or the largest eigenvalue of the rotated Hermitian part.
    pub measured: f64,
    pub threshold: f64,
    /// Set when the exterior-disk criterion meets a singular shift
    /// (`alpha` in the spectrum); `holds` is then false.
    pub singular_shift: bool,
}

/// Check the von Neumann criterion for one disk of the sphere:
/// bounded disk `|z - alpha| <= r` holds iff `||A - alpha I|| <= r`;
/// exterior `|z - alpha| >= r` holds iff `||(A - alpha I)^{-1}|| <= 1/r`;
/// half-plane `{Re(e^{-iw} z) <= d}` holds iff the largest eigenvalue
/// of the Hermitian part of `e^{-iw} A` is at most `d`.
pub fn certify_spectral(disk: &SphereDisk, a: &Matrix) -> Result<Certification, GeometryError> {
    if disk.is_halfplane() {
        let b = disk.coeff_b();
        let rot = b.conj() / b.norm();
        let offset = -disk.coeff_c() / (2.0 * b.norm());
        let measured = linalg::hermitian_part_max_eig(&a.scale(rot))?;
        let threshold = offset;
        return Ok(Certification {
            holds: measured <= threshold + CERT_SLACK * threshold.abs().max(1.0),
            kind: CertifyKind::HalfPlane,
            measured,
            threshold,
            singular_shift: false,
        });
    }

    let (center, radius) = disk.circle().expect("not a half-plane");
    let shifted = a.add_scaled_identity(-center);
    if disk.coeff_a() > 0.0 {
        let measured = linalg::spectral_norm(&shifted)?;
        return Ok(Certification {
            holds: measured <= radius + CERT_SLACK * radius.max(1.0),
            kind: CertifyKind::Disk,
            measured,
            threshold: radius,
            singular_shift: false,
        });
    }

    match linalg::inverse(&shifted) {
        Ok(inv) => {
            let measured = linalg::spectral_norm(&inv)?;
            let threshold = 1.0 / radius;
            Ok(Certification {
                holds: measured <= threshold + CERT_SLACK * threshold.max(1.0),
                kind: CertifyKind::ExteriorDisk,
                measured,
                threshold,
                singular_shift: false,
            })
        }
        Err(LinalgError::Singular { .. }) => Ok(Certification {
            holds: false,
            kind: CertifyKind::ExteriorDisk,
            measured: f64::INFINITY,
            threshold: 1.0 / radius,
            singular_shift: true,
        }),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal_inside_disk() {
        let d = SphereDisk::disk(c(0.0, 0.0), 2.0).unwrap();
        let a = Matrix::diag(&[c(1.0, 0.0), c(1.5, 0.0)]);
        let cert = certify_spectral(&d, &a).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.kind, CertifyKind::Disk);
        assert!((cert.measured - 1.5).abs() < 1e-12);
    }

    #[test]
    fn jordan_witness_exterior() {
        // ||A^{-1}|| = 2 <= 1/r for r = 1/2.
        let d = SphereDisk::codisk(c(0.0, 0.0), 0.5).unwrap();
        let a = Matrix::from_real_rows(&[vec![1.0, 1.5], vec![0.0, 1.0]]);
        let cert = certify_spectral(&d, &a).unwrap();
        assert!(cert.holds);
        assert_eq!(cert.kind, CertifyKind::ExteriorDisk);
        assert!((cert.measured - 2.0).abs() < 1e-11);
    }

    #[test]
    fn halfplane_violated_by_positive_hermitian_part() {
        // hermitian_part_max_eig([[-1,3],[0,-1]]) = 0.5 > 0.
        let d = SphereDisk::halfplane(0.0, 0.0).unwrap();
        let a = Matrix::from_real_rows(&[vec![-1.0, 3.0], vec![0.0, -1.0]]);
        let cert = certify_spectral(&d, &a).unwrap();
        assert!(!cert.holds);
        assert_eq!(cert.kind, CertifyKind::HalfPlane);
        assert!((cert.measured - 0.5).abs() < 1e-12);
    }

    #[test]
    fn singular_shift_reports_flag() {
        let d = SphereDisk::codisk(c(1.0, 0.0), 1.0).unwrap();
        let a = Matrix::identity(2);
        let cert = certify_spectral(&d, &a).unwrap();
        assert!(!cert.holds);
        assert!(cert.singular_shift);
    }

    #[test]
    fn unitary_conjugation_invariance() {
        let d = SphereDisk::disk(c(0.3, 0.1), 1.8).unwrap();
        let mut rng = crate::rng::SplitMix64::new(5);
        let a = Matrix::from_fn(3, |_, _| c(rng.next_gaussian() * 0.5, rng.next_gaussian() * 0.5));
        let base = certify_spectral(&d, &a).unwrap();
        for _ in 0..10 {
            let g = Matrix::from_fn(3, |_, _| c(rng.next_gaussian(), rng.next_gaussian()));
            let q = crate::linalg::orthonormalize_columns(&g);
            let conj = q.mul(&a).mul(&q.adjoint());
            let cert = certify_spectral(&d, &conj).unwrap();
            assert_eq!(cert.holds, base.holds);
            assert!((cert.measured - base.measured).abs() <= 1e-10 * base.measured.max(1.0));
        }
    }
}
