//! Principal-axis estimation from the SSRT maximum: scale selection, argmax
//! extraction with sub-grid refinement, conversion to an image-space line,
//! comparison against the moment-based axis, and a finite-difference check
//! of the maximum conditions.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::moments::{self, Degeneracy};
use crate::raster::{normalize, GrayImage, NormalizedImage};
use crate::transforms::{
    gaussian_kernel_1d, radon, ssrt_from_radon, ssrt_point, Sinogram, SinogramGrid, SinogramKind,
};

/// How the SSRT scale is chosen from the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    /// Exact diameter of the binary foreground point set.
    BinaryObject,
    /// Full image diagonal, for grayscale content.
    Grayscale,
}

/// Scale parameter for axis estimation: the greatest distance between two
/// foreground pixels in binary mode, or the image diagonal in grayscale
/// mode.
pub fn select_sigma(img: &GrayImage, mode: SigmaMode) -> Result<f64> {
    match mode {
        SigmaMode::Grayscale => {
            let w = img.width() as f64;
            let h = img.height() as f64;
            Ok((w * w + h * h).sqrt())
        }
        SigmaMode::BinaryObject => {
            img.ensure_binary()?;
            let points: Vec<(i64, i64)> = img
                .pixels()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == 1.0)
                .map(|(idx, _)| {
                    (
                        (idx % img.width()) as i64,
                        (idx / img.width()) as i64,
                    )
                })
                .collect();
            if points.len() < 2 {
                return Err(Error::DegenerateForeground);
            }
            Ok(point_set_diameter(&points))
        }
    }
}

/// Exact diameter of an integer point set via convex hull plus rotating
/// calipers (brute force for tiny sets).
pub fn point_set_diameter(points: &[(i64, i64)]) -> f64 {
    let hull = convex_hull(points);
    let d2 = if hull.len() <= 3 {
        max_pairwise_dist2(&hull)
    } else {
        calipers_dist2(&hull)
    };
    (d2 as f64).sqrt()
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist2(a: (i64, i64), b: (i64, i64)) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Monotone chain; strictly convex output (collinear points dropped).
fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // an all-collinear input leaves just the two extreme points
    lower
}

fn max_pairwise_dist2(points: &[(i64, i64)]) -> i64 {
    let mut best = 0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.max(dist2(points[i], points[j]));
        }
    }
    best
}

fn calipers_dist2(hull: &[(i64, i64)]) -> i64 {
    let n = hull.len();
    let mut best = 0;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        // advance the antipodal point while the triangle area keeps growing
        while cross(hull[i], hull[ni], hull[(j + 1) % n]) > cross(hull[i], hull[ni], hull[j]) {
            j = (j + 1) % n;
        }
        best = best.max(dist2(hull[i], hull[j])).max(dist2(hull[ni], hull[j]));
    }
    best
}

/// A line in sinogram coordinates plus its image-space reading: slope angle
/// `phi_star = theta_hat - pi/2` (mod pi) and a point on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisEstimate {
    pub theta_hat: f64,
    pub rho_hat: f64,
    pub phi_star: f64,
    pub anchor: (f64, f64),
    pub source: AxisSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisSource {
    Ssrt,
    Moments,
}

impl AxisSource {
    pub fn as_str(self) -> &'static str {
        match self {
            AxisSource::Ssrt => "ssrt",
            AxisSource::Moments => "moments",
        }
    }
}

/// Wraps an axis angle into `(-pi/2, pi/2]`.
pub fn wrap_phi(phi: f64) -> f64 {
    let w = (phi + FRAC_PI_2).rem_euclid(PI) - FRAC_PI_2;
    if w <= -FRAC_PI_2 {
        w + PI
    } else {
        w
    }
}

/// Wraps a line angle into `[0, pi)`; the flag reports whether pi was
/// removed, in which case rho must be negated to keep the same line.
pub fn wrap_theta(theta: f64) -> (f64, bool) {
    let w = theta.rem_euclid(2.0 * PI);
    if w >= PI {
        (w - PI, true)
    } else {
        (w, false)
    }
}

/// Grid-node argmax of an SSRT sinogram refined by 3-point parabolic
/// interpolation independently in rho and theta. Ties break to the
/// smallest theta index, then the smallest rho index. The theta axis is
/// periodic with a rho reflection, so refinement works at the 0 / pi seam
/// too.
pub fn ssrt_argmax(sino: &Sinogram) -> Result<(f64, f64)> {
    if sino.kind() != SinogramKind::Ssrt {
        return Err(Error::WrongSinogramKind {
            expected: "ssrt".into(),
            got: sino.kind().as_str().into(),
        });
    }
    let grid = sino.grid();
    let n_theta = grid.n_theta();
    let n_rho = grid.n_rho();
    let mut best = f64::NEG_INFINITY;
    let mut best_it = 0;
    let mut best_ir = 0;
    for it in 0..n_theta {
        for ir in 0..n_rho {
            let v = sino.value(ir, it);
            if v > best {
                best = v;
                best_it = it;
                best_ir = ir;
            }
        }
    }
    if best <= 0.0 {
        return Err(Error::AllZeroSinogram);
    }

    // neighbor in theta with wrap: theta - step at it = 0 is the column at
    // n_theta - 1 with rho mirrored, and symmetrically at the other end
    let theta_neighbor = |it: i64, ir: usize| -> f64 {
        if it < 0 {
            sino.value(n_rho - 1 - ir, n_theta - 1)
        } else if it as usize >= n_theta {
            sino.value(n_rho - 1 - ir, 0)
        } else {
            sino.value(ir, it as usize)
        }
    };

    let refine = |left: f64, mid: f64, right: f64| -> f64 {
        let denom = left - 2.0 * mid + right;
        if denom >= -1e-300 {
            return 0.0;
        }
        let delta = 0.5 * (left - right) / denom;
        delta.clamp(-0.5, 0.5)
    };

    let d_rho = if best_ir > 0 && best_ir + 1 < n_rho {
        refine(
            sino.value(best_ir - 1, best_it),
            best,
            sino.value(best_ir + 1, best_it),
        )
    } else {
        0.0
    };
    let d_theta = refine(
        theta_neighbor(best_it as i64 - 1, best_ir),
        best,
        theta_neighbor(best_it as i64 + 1, best_ir),
    );

    let theta_hat = grid.theta_values()[best_it] + d_theta * grid.theta_step();
    let rho_hat = grid.rho_values()[best_ir] + d_rho * grid.rho_step();
    let (theta_hat, flipped) = wrap_theta(theta_hat);
    Ok((theta_hat, if flipped { -rho_hat } else { rho_hat }))
}

/// Line through the SSRT maximum, anchored at the foot of the
/// perpendicular from the origin.
pub fn axis_from_maximum(theta_hat: f64, rho_hat: f64) -> AxisEstimate {
    AxisEstimate {
        theta_hat,
        rho_hat,
        phi_star: wrap_phi(theta_hat - FRAC_PI_2),
        anchor: (rho_hat * theta_hat.cos(), rho_hat * theta_hat.sin()),
        source: AxisSource::Ssrt,
    }
}

/// Minimum-inertia line through the centroid, from second-order moments.
/// Fails for isotropic objects, which have no unique axis.
pub fn moments_axis(img: &NormalizedImage) -> Result<AxisEstimate> {
    let m = moments::compute_moments(img);
    let o = moments::orientation_phi(&m);
    if o.degenerate == Degeneracy::Isotropic {
        return Err(Error::IsotropicOrientation);
    }
    let (theta_hat, _) = wrap_theta(o.phi + FRAC_PI_2);
    let (xc, yc) = m.centroid;
    let rho_hat = xc * theta_hat.cos() + yc * theta_hat.sin();
    Ok(AxisEstimate {
        theta_hat,
        rho_hat,
        phi_star: o.phi,
        anchor: m.centroid,
        source: AxisSource::Moments,
    })
}

/// Axis-to-axis separation: angular distance modulo pi, and the
/// perpendicular distance from `centroid` to line `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisDiff {
    pub angle_diff: f64,
    pub centroid_distance: f64,
}

pub fn compare_axes(a: &AxisEstimate, b: &AxisEstimate, centroid: (f64, f64)) -> AxisDiff {
    let d = (a.theta_hat - b.theta_hat).rem_euclid(PI);
    let angle_diff = d.min(PI - d);
    let centroid_distance =
        (centroid.0 * a.theta_hat.cos() + centroid.1 * a.theta_hat.sin() - a.rho_hat).abs();
    AxisDiff {
        angle_diff,
        centroid_distance,
    }
}

/// Second-derivative estimates of the SSRT surface at a critical point.
///
/// Entries are central finite differences of the direct transform, scaled
/// by `2 sigma^2` so that a unit-mass object concentrated near the critical
/// line yields `h22 = -2 / (sqrt(2 pi) sigma)`. The two mixed entries come
/// from the two difference orders and agree up to rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianCheck {
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
    pub det: f64,
}

pub fn hessian_check(
    img: &NormalizedImage,
    sigma: f64,
    theta_hat: f64,
    rho_hat: f64,
    theta_step: f64,
    rho_step: f64,
) -> Result<HessianCheck> {
    if sigma <= 0.0 || theta_step <= 0.0 || rho_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "hessian steps",
            reason: "sigma, theta_step and rho_step must be positive".into(),
        });
    }
    if rho_hat.abs() + rho_step > img.half_diagonal() + 0.5 {
        return Err(Error::StencilOutOfRange {
            theta: theta_hat,
            rho: rho_hat,
        });
    }
    let s = |dt: f64, dr: f64| ssrt_point(img, sigma, theta_hat + dt, rho_hat + dr);
    let c = s(0.0, 0.0);
    let tp = s(theta_step, 0.0);
    let tm = s(-theta_step, 0.0);
    let rp = s(0.0, rho_step);
    let rm = s(0.0, -rho_step);
    let pp = s(theta_step, rho_step);
    let pm = s(theta_step, -rho_step);
    let mp = s(-theta_step, rho_step);
    let mm = s(-theta_step, -rho_step);

    let scale = 2.0 * sigma * sigma;
    let h11 = scale * (tp - 2.0 * c + tm) / (theta_step * theta_step);
    let h22 = scale * (rp - 2.0 * c + rm) / (rho_step * rho_step);
    let cross_step = 4.0 * theta_step * rho_step;
    // same four samples, grouped per difference order
    let h12 = scale * ((pp - pm) - (mp - mm)) / cross_step;
    let h21 = scale * ((pp - mp) - (pm - mm)) / cross_step;
    Ok(HessianCheck {
        h11,
        h12,
        h21,
        h22,
        det: h11 * h22 - h12 * h21,
    })
}

/// True when the set of grid nodes within `rel_tol` of the global maximum
/// forms a single connected component. Adjacency is 4-neighbor, with the
/// theta seam wrapping onto the rho-mirrored column.
pub fn single_maximum_region_connected(sino: &Sinogram, rel_tol: f64) -> Result<bool> {
    let grid = sino.grid();
    let n_theta = grid.n_theta();
    let n_rho = grid.n_rho();
    let max = sino.max_value();
    if max <= 0.0 {
        return Err(Error::AllZeroSinogram);
    }
    let cutoff = max * (1.0 - rel_tol);
    let in_region = |ir: usize, it: usize| sino.value(ir, it) >= cutoff;

    let mut visited = vec![false; n_rho * n_theta];
    let mut components = 0;
    let mut stack = Vec::new();
    for it0 in 0..n_theta {
        for ir0 in 0..n_rho {
            if !in_region(ir0, it0) || visited[ir0 * n_theta + it0] {
                continue;
            }
            components += 1;
            if components > 1 {
                return Ok(false);
            }
            stack.push((ir0, it0));
            visited[ir0 * n_theta + it0] = true;
            while let Some((ir, it)) = stack.pop() {
                let mut neighbors: Vec<(usize, usize)> = Vec::with_capacity(4);
                if ir > 0 {
                    neighbors.push((ir - 1, it));
                }
                if ir + 1 < n_rho {
                    neighbors.push((ir + 1, it));
                }
                if it > 0 {
                    neighbors.push((ir, it - 1));
                } else {
                    neighbors.push((n_rho - 1 - ir, n_theta - 1));
                }
                if it + 1 < n_theta {
                    neighbors.push((ir, it + 1));
                } else {
                    neighbors.push((n_rho - 1 - ir, 0));
                }
                for (jr, jt) in neighbors {
                    let idx = jr * n_theta + jt;
                    if !visited[idx] && in_region(jr, jt) {
                        visited[idx] = true;
                        stack.push((jr, jt));
                    }
                }
            }
        }
    }
    Ok(components == 1)
}

/// Full axis pipeline output: the SSRT axis, the moment axis when defined,
/// and the gap between them.
#[derive(Debug, Clone)]
pub struct AxisReport {
    pub ssrt_axis: AxisEstimate,
    pub moments_axis: Option<AxisEstimate>,
    pub diff: Option<AxisDiff>,
    pub moments: moments::MomentSet,
    pub orientation: moments::Orientation,
    pub sigma: f64,
}

/// Runs the whole axis pipeline: scale selection (binary diameter when the
/// image is exactly binary, image diagonal otherwise, unless overridden),
/// Radon transform, Gaussian smoothing, argmax, and the moment axis for
/// comparison.
pub fn estimate_axes(
    img: &GrayImage,
    theta_step: f64,
    rho_step: f64,
    sigma_override: Option<f64>,
) -> Result<AxisReport> {
    let sigma = match sigma_override {
        Some(s) if s > 0.0 => s,
        Some(s) => {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: format!("{s} must be positive"),
            })
        }
        None => {
            if img.is_binary() {
                select_sigma(img, SigmaMode::BinaryObject)?
            } else {
                select_sigma(img, SigmaMode::Grayscale)?
            }
        }
    };
    let normalized = normalize(img)?;
    let grid = SinogramGrid::for_image(img.width(), img.height(), theta_step, rho_step, 2.0)?;
    let radon_sino = radon(&normalized, &grid)?;
    let kernel = gaussian_kernel_1d(sigma, rho_step)?;
    let ssrt = ssrt_from_radon(&radon_sino, &kernel)?;
    let (theta_hat, rho_hat) = ssrt_argmax(&ssrt)?;
    let ssrt_axis = axis_from_maximum(theta_hat, rho_hat);

    let m = moments::compute_moments(&normalized);
    let orientation = moments::orientation_phi(&m);
    let maxis = moments_axis(&normalized).ok();
    let diff = maxis
        .as_ref()
        .map(|ma| compare_axes(&ssrt_axis, ma, m.centroid));
    Ok(AxisReport {
        ssrt_axis,
        moments_axis: maxis,
        diff,
        moments: m,
        orientation,
        sigma,
    })
}
