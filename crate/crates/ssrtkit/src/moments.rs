//! Geometric raw and central moments up to order 2, the centroid, and the
//! moment-based orientation of the principal inertia axis, including the
//! degenerate diagonal and isotropic cases.

use crate::raster::NormalizedImage;

/// Raw and central moments of a unit-mass image in centered coordinates,
/// so `m00 == 1` and the centroid is just `(m10, m01)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSet {
    pub m00: f64,
    pub m10: f64,
    pub m01: f64,
    pub m11: f64,
    pub m20: f64,
    pub m02: f64,
    pub mu11: f64,
    pub mu20: f64,
    pub mu02: f64,
    pub centroid: (f64, f64),
}

/// Discrete moment sums over pixel centers.
pub fn compute_moments(img: &NormalizedImage) -> MomentSet {
    let (ox, oy) = img.center_offset();
    let width = img.width();
    let (mut m00, mut m10, mut m01, mut m11, mut m20, mut m02) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (idx, &w) in img.pixels().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let x = (idx % width) as f64 - ox;
        let y = (idx / width) as f64 - oy;
        m00 += w;
        m10 += x * w;
        m01 += y * w;
        m11 += x * y * w;
        m20 += x * x * w;
        m02 += y * y * w;
    }
    MomentSet {
        m00,
        m10,
        m01,
        m11,
        m20,
        m02,
        mu11: m11 - m01 * m10,
        mu20: m20 - m10 * m10,
        mu02: m02 - m01 * m01,
        centroid: (m10, m01),
    }
}

/// Tolerance below which the orientation denominator / numerator are
/// treated as exactly zero.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    Regular,
    DiagonalPos,
    DiagonalNeg,
    Isotropic,
}

impl Degeneracy {
    pub fn as_str(self) -> &'static str {
        match self {
            Degeneracy::Regular => "regular",
            Degeneracy::DiagonalPos => "diagonal_pos",
            Degeneracy::DiagonalNeg => "diagonal_neg",
            Degeneracy::Isotropic => "isotropic",
        }
    }
}

/// Minimum-inertia axis angle, reported modulo pi in `(-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation {
    pub phi: f64,
    pub degenerate: Degeneracy,
}

/// Orientation from `tan(2 phi) = 2 (m11 - m01 m10) / (m20 - m02 + m01^2 - m10^2)`,
/// resolved with the half-atan2 convention. A vanishing denominator gives
/// `+pi/4` or `-pi/4` by the sign of the numerator; if both vanish the
/// object is isotropic and no axis is singled out.
pub fn orientation_phi(m: &MomentSet) -> Orientation {
    let numer = m.m11 - m.m01 * m.m10;
    let denom = m.m20 - m.m02 + m.m01 * m.m01 - m.m10 * m.m10;
    if denom.abs() > DEGENERACY_TOL {
        Orientation {
            phi: 0.5 * (2.0 * numer).atan2(denom),
            degenerate: Degeneracy::Regular,
        }
    } else if numer > DEGENERACY_TOL {
        Orientation {
            phi: std::f64::consts::FRAC_PI_4,
            degenerate: Degeneracy::DiagonalPos,
        }
    } else if numer < -DEGENERACY_TOL {
        Orientation {
            phi: -std::f64::consts::FRAC_PI_4,
            degenerate: Degeneracy::DiagonalNeg,
        }
    } else {
        Orientation {
            phi: 0.0,
            degenerate: Degeneracy::Isotropic,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{normalize, GrayImage};
    use crate::shapes;
    use std::f64::consts::PI;

    #[test]
    fn point_mass_moments() {
        let img = GrayImage::from_fn(7, 7, |x, y| if x == 1.0 && y == 2.0 { 1.0 } else { 0.0 })
            .unwrap();
        let m = compute_moments(&normalize(&img).unwrap());
        assert_eq!(m.m00, 1.0);
        assert_eq!(m.m10, 1.0);
        assert_eq!(m.m01, 2.0);
        assert_eq!(m.centroid, (1.0, 2.0));
        assert!(m.mu11.abs() < 1e-12 && m.mu20.abs() < 1e-12 && m.mu02.abs() < 1e-12);
    }

    #[test]
    fn uniform_symmetric_image_is_centered() {
        let img = GrayImage::new(9, 9, vec![1.0; 81]).unwrap();
        let m = compute_moments(&normalize(&img).unwrap());
        assert!(m.m10.abs() < 1e-12 && m.m01.abs() < 1e-12);
        assert!(m.centroid.0.abs() < 1e-12 && m.centroid.1.abs() < 1e-12);
    }

    #[test]
    fn centered_rectangle_matches_brute_force() {
        // 41 x 11 axis-aligned rectangle in a 61 x 61 frame
        let img = shapes::rotated_rect(61, 61, 0.0, 0.0, 41.0, 11.0, 0.0);
        let n = normalize(&img).unwrap();
        let m = compute_moments(&n);

        // independent oracle: central moments summed directly about the
        // brute-force centroid
        let (ox, oy) = n.center_offset();
        let total: f64 = n.pixels().iter().sum();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for (idx, &w) in n.pixels().iter().enumerate() {
            cx += ((idx % 61) as f64 - ox) * w;
            cy += ((idx / 61) as f64 - oy) * w;
        }
        cx /= total;
        cy /= total;
        let (mut mu11, mut mu20, mut mu02) = (0.0, 0.0, 0.0);
        for (idx, &w) in n.pixels().iter().enumerate() {
            let dx = (idx % 61) as f64 - ox - cx;
            let dy = (idx / 61) as f64 - oy - cy;
            mu11 += dx * dy * w;
            mu20 += dx * dx * w;
            mu02 += dy * dy * w;
        }
        assert!((m.m00 - 1.0).abs() < 1e-9);
        assert!((m.mu11 - mu11).abs() < 1e-9);
        assert!((m.mu20 - mu20).abs() < 1e-9);
        assert!((m.mu02 - mu02).abs() < 1e-9);
        assert!(m.mu11.abs() < 1e-9);
        assert!(m.mu20 > m.mu02);
        // Cauchy-Schwarz for the induced covariance
        assert!(m.mu11 * m.mu11 <= m.mu20 * m.mu02 + 1e-12);
    }

    #[test]
    fn horizontal_rectangle_has_zero_phi() {
        let img = shapes::rotated_rect(61, 61, 0.0, 0.0, 41.0, 11.0, 0.0);
        let o = orientation_phi(&compute_moments(&normalize(&img).unwrap()));
        assert_eq!(o.degenerate, Degeneracy::Regular);
        assert!(o.phi.abs() < 1e-12);
    }

    #[test]
    fn centered_square_is_isotropic() {
        let img = shapes::rotated_rect(41, 41, 0.0, 0.0, 20.0, 20.0, 0.0);
        let o = orientation_phi(&compute_moments(&normalize(&img).unwrap()));
        assert_eq!(o.degenerate, Degeneracy::Isotropic);
        assert_eq!(o.phi, 0.0);
    }

    #[test]
    fn rectangle_at_thirty_degrees() {
        let img = shapes::rotated_rect(81, 81, 0.0, 0.0, 45.0, 15.0, PI / 6.0);
        let o = orientation_phi(&compute_moments(&normalize(&img).unwrap()));
        let deg = o.phi.to_degrees();
        assert!((deg - 30.0).abs() < 0.5, "phi = {deg} deg");
    }

    #[test]
    fn central_and_raw_routes_agree() {
        let img = shapes::rotated_rect(81, 81, 4.0, -3.0, 45.0, 15.0, 0.9);
        let m = compute_moments(&normalize(&img).unwrap());
        let from_raw = orientation_phi(&m).phi;
        let from_central = 0.5 * (2.0 * m.mu11).atan2(m.mu20 - m.mu02);
        assert!((from_raw - from_central).abs() < 1e-12);
    }

    #[test]
    fn rotation_covariance() {
        for k in 1..18 {
            let alpha = k as f64 * 10.0f64.to_radians();
            let img = shapes::rotated_rect(97, 97, 0.0, 0.0, 51.0, 17.0, alpha);
            let o = orientation_phi(&compute_moments(&normalize(&img).unwrap()));
            let mut diff = (o.phi - alpha).rem_euclid(PI);
            diff = diff.min(PI - diff);
            assert!(diff.to_degrees() < 1.0, "alpha {k}0 deg: off by {diff}");
        }
    }

    #[test]
    fn translation_invariance() {
        let base = shapes::rotated_rect(97, 97, 0.0, 0.0, 41.0, 13.0, 0.6);
        let moved = shapes::rotated_rect(97, 97, 9.0, -6.0, 41.0, 13.0, 0.6);
        let mb = compute_moments(&normalize(&base).unwrap());
        let mm = compute_moments(&normalize(&moved).unwrap());
        assert!((mb.mu11 - mm.mu11).abs() < 1e-6);
        assert!((mb.mu20 - mm.mu20).abs() < 1e-6);
        assert!((mb.mu02 - mm.mu02).abs() < 1e-6);
        let pb = orientation_phi(&mb).phi;
        let pm = orientation_phi(&mm).phi;
        assert!((pb - pm).abs() < 1e-6);
    }

    #[test]
    fn exact_diagonal_cases() {
        // two point masses on the main diagonal: denominator exactly 0,
        // numerator positive
        let pos = GrayImage::from_fn(11, 11, |x, y| {
            if (x == 3.0 && y == 3.0) || (x == -3.0 && y == -3.0) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let o = orientation_phi(&compute_moments(&normalize(&pos).unwrap()));
        assert_eq!(o.degenerate, Degeneracy::DiagonalPos);
        assert_eq!(o.phi, std::f64::consts::FRAC_PI_4);

        let neg = GrayImage::from_fn(11, 11, |x, y| {
            if (x == 3.0 && y == -3.0) || (x == -3.0 && y == 3.0) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let o = orientation_phi(&compute_moments(&normalize(&neg).unwrap()));
        assert_eq!(o.degenerate, Degeneracy::DiagonalNeg);
        assert_eq!(o.phi, -std::f64::consts::FRAC_PI_4);
    }
}
