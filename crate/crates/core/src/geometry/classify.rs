//! Intersection classification for two disks of the Riemann sphere.

use num_complex::Complex64;

use super::annulus::ring_normalize;
use super::{GeometryError, MoebiusMap, SphereDisk, SpherePoint};

/// Width of the indeterminate band around the tangency threshold, as a
/// multiple of the caller tolerance.
const AMBIGUITY_BAND: f64 = 4.0;

/// Intersection case of two sphere disks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    /// Two externally tangent bounded disks; the intersection is one point.
    Singleton,
    /// Complementary disks; the intersection is their common boundary.
    Circline,
    /// Two half-planes with crossing or facing boundary lines.
    SectorOrStrip,
    /// Boundaries cross in two points.
    Lens,
    /// Disjoint boundaries, each inside the other region.
    Ring,
    /// Boundaries tangent in one point (any configuration other than
    /// two externally tangent bounded disks).
    Tangent,
    /// One region strictly inside the other.
    Nested,
    Identical,
    Empty,
}

/// Classification outcome with witnesses and canonical data.
#[derive(Debug, Clone)]
pub struct Classification {
    pub case_label: CaseLabel,
    pub boundary_points: Vec<SpherePoint>,
    pub canonical_map: Option<MoebiusMap>,
    pub canonical_r: Option<f64>,
}

/// Number of common points of two boundary circlines on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCount {
    Zero,
    One,
    Two,
    Infinite,
}

enum CirclineMeet {
    Coincident,
    Zero,
    One(Complex64),
    Two(Complex64, Complex64),
    Ambiguous { foot: Complex64, discriminant: f64, tol: f64 },
}

fn sort_pair(p: Complex64, q: Complex64) -> (Complex64, Complex64) {
    if (p.re, p.im) <= (q.re, q.im) {
        (p, q)
    } else {
        (q, p)
    }
}

/// Meet of the two boundary circlines in the finite plane, with a
/// tolerance-banded tangency decision.
fn finite_circline_meet(d1: &SphereDisk, d2: &SphereDisk, tol: f64) -> CirclineMeet {
    // Coincident boundaries first: the normalized triples then agree up
    // to overall sign.
    let dplus = (d1.coeff_a() - d2.coeff_a())
        .abs()
        .max((d1.coeff_b() - d2.coeff_b()).norm())
        .max((d1.coeff_c() - d2.coeff_c()).abs());
    let dminus = (d1.coeff_a() + d2.coeff_a())
        .abs()
        .max((d1.coeff_b() + d2.coeff_b()).norm())
        .max((d1.coeff_c() + d2.coeff_c()).abs());
    if dplus.min(dminus) <= tol {
        return CirclineMeet::Coincident;
    }

    let line1 = d1.is_halfplane();
    let line2 = d2.is_halfplane();

    if line1 && line2 {
        let b1 = d1.coeff_b();
        let b2 = d2.coeff_b();
        let cross = (b1.conj() * b2).im;
        if cross.abs() <= tol * b1.norm() * b2.norm() {
            return CirclineMeet::Zero;
        }
        // Solve 2 Re(conj(b_i) z) + c_i = 0 as a 2x2 real system.
        let (a11, a12, rhs1) = (2.0 * b1.re, 2.0 * b1.im, -d1.coeff_c());
        let (a21, a22, rhs2) = (2.0 * b2.re, 2.0 * b2.im, -d2.coeff_c());
        let det = a11 * a22 - a12 * a21;
        let x = (rhs1 * a22 - rhs2 * a12) / det;
        let y = (a11 * rhs2 - a21 * rhs1) / det;
        return CirclineMeet::One(Complex64::new(x, y));
    }

    // Reduce to a line-circle meet: against the boundary of the disk
    // with the larger |a| (a genuine circle), intersect either the other
    // line or the radical line of the two circles.
    let (circ, other_line, other_is_line) = if line1 {
        (d2, (d1.coeff_b(), d1.coeff_c()), true)
    } else if line2 {
        (d1, (d2.coeff_b(), d2.coeff_c()), true)
    } else if d1.coeff_a().abs() >= d2.coeff_a().abs() {
        let b = d1.coeff_a() * d2.coeff_b() - d2.coeff_a() * d1.coeff_b();
        let c = d1.coeff_a() * d2.coeff_c() - d2.coeff_a() * d1.coeff_c();
        (d1, (b, c), false)
    } else {
        let b = d2.coeff_a() * d1.coeff_b() - d1.coeff_a() * d2.coeff_b();
        let c = d2.coeff_a() * d1.coeff_c() - d1.coeff_a() * d2.coeff_c();
        (d2, (b, c), false)
    };

    let (lb, lc) = other_line;
    let (center, radius) = circ.circle().expect("picked the circle side");
    if !other_is_line && lb.norm() <= tol {
        // Concentric circles with distinct radii.
        return CirclineMeet::Zero;
    }

    // Distance from the circle center to the line {2 Re(conj(lb) z) + lc = 0}.
    let dist = (2.0 * (lb.conj() * center).re + lc).abs() / (2.0 * lb.norm());
    let disc = radius * radius - dist * dist;
    let scale = (radius * radius).max(dist * dist);

    let foot = center - (2.0 * (lb.conj() * center).re + lc) / (2.0 * lb.norm_sqr()) * lb;
    if disc.abs() <= tol * scale {
        return CirclineMeet::One(foot);
    }
    if disc.abs() <= AMBIGUITY_BAND * tol * scale {
        return CirclineMeet::Ambiguous { foot, discriminant: disc, tol: tol * scale };
    }
    if disc < 0.0 {
        return CirclineMeet::Zero;
    }
    let dir = Complex64::new(0.0, 1.0) * lb / lb.norm();
    let h = disc.sqrt();
    let (p, q) = sort_pair(foot + h * dir, foot - h * dir);
    CirclineMeet::Two(p, q)
}

/// Common points of the two boundary circlines counted on the sphere
/// (infinity lies on every line and on no circle).
pub fn boundary_count_sphere(
    d1: &SphereDisk,
    d2: &SphereDisk,
    tol: f64,
) -> Result<BoundaryCount, GeometryError> {
    let both_lines = d1.is_halfplane() && d2.is_halfplane();
    Ok(match finite_circline_meet(d1, d2, tol) {
        CirclineMeet::Coincident => BoundaryCount::Infinite,
        CirclineMeet::Zero => {
            if both_lines {
                BoundaryCount::One
            } else {
                BoundaryCount::Zero
            }
        }
        CirclineMeet::One(_) => {
            if both_lines {
                BoundaryCount::Two
            } else {
                BoundaryCount::One
            }
        }
        CirclineMeet::Two(_, _) => BoundaryCount::Two,
        CirclineMeet::Ambiguous { foot, discriminant, tol } => {
            let first = classify_tangent(d1, d2, foot).case_label;
            let second =
                if discriminant > 0.0 { CaseLabel::Lens } else { disjoint_label(d1, d2) };
            return Err(GeometryError::Ambiguous { first, second, discriminant, tol });
        }
    })
}

fn classify_coincident(d1: &SphereDisk, d2: &SphereDisk) -> Classification {
    // Same-sign triples describe the same region, opposite signs the two
    // complementary regions sharing the boundary.
    let dplus = (d1.coeff_a() - d2.coeff_a())
        .abs()
        .max((d1.coeff_b() - d2.coeff_b()).norm())
        .max((d1.coeff_c() - d2.coeff_c()).abs());
    let dminus = (d1.coeff_a() + d2.coeff_a())
        .abs()
        .max((d1.coeff_b() + d2.coeff_b()).norm())
        .max((d1.coeff_c() + d2.coeff_c()).abs());
    let label = if dplus <= dminus { CaseLabel::Identical } else { CaseLabel::Circline };
    Classification {
        case_label: label,
        boundary_points: vec![],
        canonical_map: None,
        canonical_r: None,
    }
}

fn classify_two_halfplanes(
    d1: &SphereDisk,
    d2: &SphereDisk,
    tol: f64,
    meet: CirclineMeet,
) -> Result<Classification, GeometryError> {
    match meet {
        CirclineMeet::One(p) => {
            // Crossing boundary lines: the intersection is a convex sector
            // with vertex p; the lines also meet at infinity.
            Ok(Classification {
                case_label: CaseLabel::SectorOrStrip,
                boundary_points: vec![SpherePoint::Finite(p), SpherePoint::Infinity],
                canonical_map: None,
                canonical_r: None,
            })
        }
        CirclineMeet::Zero => {
            let b1 = d1.coeff_b();
            let b2 = d2.coeff_b();
            let dot = (b1.conj() * b2).re;
            if dot > 0.0 {
                // Same-facing parallel half-planes: one contains the other.
                return Ok(Classification {
                    case_label: CaseLabel::Nested,
                    boundary_points: vec![],
                    canonical_map: None,
                    canonical_r: None,
                });
            }
            // Facing half-planes: {Re(u z) <= off1} and {Re(u z) >= off2}
            // along the common normal u = b1/|b1|.
            let off1 = -d1.coeff_c() / (2.0 * b1.norm());
            let off2 = d2.coeff_c() / (2.0 * b2.norm());
            let gap = off1 - off2;
            let scale = 1.0f64.max(off1.abs()).max(off2.abs());
            if gap.abs() <= tol * scale {
                return Ok(Classification {
                    case_label: CaseLabel::Circline,
                    boundary_points: vec![],
                    canonical_map: None,
                    canonical_r: None,
                });
            }
            if gap.abs() <= AMBIGUITY_BAND * tol * scale {
                let second = if gap > 0.0 { CaseLabel::SectorOrStrip } else { CaseLabel::Empty };
                return Err(GeometryError::Ambiguous {
                    first: CaseLabel::Circline,
                    second,
                    discriminant: gap,
                    tol: tol * scale,
                });
            }
            if gap > 0.0 {
                // A genuine strip; the boundary lines are tangent at infinity.
                Ok(Classification {
                    case_label: CaseLabel::SectorOrStrip,
                    boundary_points: vec![SpherePoint::Infinity],
                    canonical_map: None,
                    canonical_r: None,
                })
            } else {
                Ok(Classification {
                    case_label: CaseLabel::Empty,
                    boundary_points: vec![],
                    canonical_map: None,
                    canonical_r: None,
                })
            }
        }
        _ => unreachable!("two lines meet in at most one finite point"),
    }
}

fn classify_tangent(d1: &SphereDisk, d2: &SphereDisk, p: Complex64) -> Classification {
    // Two externally tangent bounded disks meet in exactly the tangency
    // point; that configuration is the Singleton case. Every other
    // tangency (a half-plane or exterior involved, or internal tangency
    // of bounded disks) is reported as Tangent.
    let external_bounded = d1.is_bounded_disk() && d2.is_bounded_disk() && {
        let (c1, _) = d1.circle().expect("bounded disk");
        let (c2, _) = d2.circle().expect("bounded disk");
        d1.form(c2) > 0.0 && d2.form(c1) > 0.0
    };
    let label = if external_bounded { CaseLabel::Singleton } else { CaseLabel::Tangent };
    Classification {
        case_label: label,
        boundary_points: vec![SpherePoint::Finite(p)],
        canonical_map: None,
        canonical_r: None,
    }
}

/// Label for a pair whose boundaries have no common point on the
/// sphere. Each boundary then lies entirely inside or entirely outside
/// the other region, so one sample point per boundary decides.
fn disjoint_label(d1: &SphereDisk, d2: &SphereDisk) -> CaseLabel {
    let s1_in_2 = d2.form(d1.boundary_sample()) < 0.0;
    let s2_in_1 = d1.form(d2.boundary_sample()) < 0.0;
    match (s1_in_2, s2_in_1) {
        (true, true) => CaseLabel::Ring,
        (true, false) | (false, true) => CaseLabel::Nested,
        (false, false) => CaseLabel::Empty,
    }
}

fn classify_disjoint_boundaries(
    d1: &SphereDisk,
    d2: &SphereDisk,
) -> Result<Classification, GeometryError> {
    let label = disjoint_label(d1, d2);
    if label == CaseLabel::Ring {
        let (map, r) = ring_normalize(d1, d2)?;
        return Ok(Classification {
            case_label: CaseLabel::Ring,
            boundary_points: vec![],
            canonical_map: Some(map),
            canonical_r: Some(r),
        });
    }
    Ok(Classification {
        case_label: label,
        boundary_points: vec![],
        canonical_map: None,
        canonical_r: None,
    })
}

/// Classify the intersection of two sphere disks.
///
/// `tol` controls the tangency and coincidence decisions; a
/// discriminant falling in the band just outside the tangency
/// threshold raises [`GeometryError::Ambiguous`] with both candidate
/// labels.
pub fn classify(
    d1: &SphereDisk,
    d2: &SphereDisk,
    tol: f64,
) -> Result<Classification, GeometryError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(GeometryError::Domain(format!("tolerance {tol} must be positive")));
    }

    let meet = finite_circline_meet(d1, d2, tol);
    if let CirclineMeet::Coincident = meet {
        return Ok(classify_coincident(d1, d2));
    }
    if let CirclineMeet::Ambiguous { foot, discriminant, tol } = meet {
        let first = classify_tangent(d1, d2, foot).case_label;
        let second = if discriminant > 0.0 { CaseLabel::Lens } else { disjoint_label(d1, d2) };
        return Err(GeometryError::Ambiguous { first, second, discriminant, tol });
    }

    if d1.is_halfplane() && d2.is_halfplane() {
        return classify_two_halfplanes(d1, d2, tol, meet);
    }

    match meet {
        CirclineMeet::Two(p, q) => {
            // Lens vertices are finite: at most one boundary is a line and
            // infinity lies only on lines.
            let lambda1 = p;
            let map = MoebiusMap::new(
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                lambda1,
            )?;
            Ok(Classification {
                case_label: CaseLabel::Lens,
                boundary_points: vec![SpherePoint::Finite(p), SpherePoint::Finite(q)],
                canonical_map: Some(map),
                canonical_r: None,
            })
        }
        CirclineMeet::One(p) => Ok(classify_tangent(d1, d2, p)),
        CirclineMeet::Zero => classify_disjoint_boundaries(d1, d2),
        CirclineMeet::Coincident | CirclineMeet::Ambiguous { .. } => unreachable!("handled above"),
    }
}
