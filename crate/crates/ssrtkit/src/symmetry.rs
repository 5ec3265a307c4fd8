//! Central-symmetry classification of binary objects from SSRT projections:
//! three equispaced projections anchored at the inertia axis angle are
//! centroid-aligned, reflected about rho = 0 and compared through the D
//! measure; the object is called symmetric when all three stay below a
//! threshold.

use std::f64::consts::{FRAC_PI_3, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inertia::{select_sigma, ssrt_argmax, wrap_theta, SigmaMode};
use crate::moments::compute_moments;
use crate::raster::{normalize, GrayImage};
use crate::transforms::{
    gaussian_kernel_1d, projection, radon, ssrt_from_radon, ssrt_point, Projection, SinogramGrid,
};

/// Thresholds and scales of the symmetry check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryParams {
    /// Acceptance threshold on the D measure.
    pub epsilon: f64,
    /// Offset added to the inertia-axis angle, radians.
    pub delta_theta: f64,
    /// SSRT scale for the projection smoothing (distinct from the axis
    /// scale).
    pub sigma_sym: f64,
    /// Percentage of the largest pointwise differences averaged by D.
    pub m_percent: f64,
}

impl Default for SymmetryParams {
    fn default() -> Self {
        Self {
            epsilon: 0.03,
            delta_theta: 5.0f64.to_radians(),
            sigma_sym: 1.0,
            m_percent: 10.0,
        }
    }
}

impl SymmetryParams {
    /// Defaults for impulse-noise-corrupted inputs: the projection scale is
    /// raised to 10 to smooth the noise out.
    pub fn noisy() -> Self {
        Self {
            sigma_sym: 10.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("{} must be positive", self.epsilon),
            });
        }
        if self.sigma_sym <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma_sym",
                reason: format!("{} must be positive", self.sigma_sym),
            });
        }
        if !(self.m_percent > 0.0 && self.m_percent <= 100.0) {
            return Err(Error::InvalidParameter {
                name: "m_percent",
                reason: format!("{} not in (0, 100]", self.m_percent),
            });
        }
        Ok(())
    }
}

/// Grid resolution and evaluation strategy for the check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryOptions {
    pub params: SymmetryParams,
    pub theta_step: f64,
    pub rho_step: f64,
    /// Evaluate the three projections at their exact angles through the
    /// direct transform instead of snapping to the precomputed sinogram.
    pub exact_angles: bool,
    /// Stop at the first projection whose D exceeds epsilon.
    pub short_circuit: bool,
    /// Keep the aligned projection / reflection pairs in the report.
    pub keep_projections: bool,
}

impl Default for SymmetryOptions {
    fn default() -> Self {
        Self {
            params: SymmetryParams::default(),
            theta_step: PI / 180.0,
            rho_step: 1.0,
            exact_angles: false,
            short_circuit: true,
            keep_projections: false,
        }
    }
}

/// One evaluated projection: its (wrapped) angle, the circular shift that
/// was applied, and the resulting D value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleCheck {
    /// Projection angle, radians, wrapped to `[0, pi)`.
    pub theta: f64,
    /// D measure of the aligned projection against its reflection.
    pub d: f64,
    /// Circular rho-shift actually applied, pixels (already rounded to a
    /// whole number of bins).
    pub shift: f64,
}

/// Aligned projection and its reflection, kept for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPair {
    pub theta: f64,
    pub aligned: Projection,
    pub reflected: Projection,
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    /// The verdict: true iff all three D values exist and are within
    /// epsilon.
    pub sym: bool,
    /// Inertia-axis angle found by the SSRT argmax, radians.
    pub theta_hat: f64,
    /// Per-angle results; fewer than three entries only when an earlier
    /// one already exceeded epsilon.
    pub checks: Vec<AngleCheck>,
    pub params: SymmetryParams,
    /// Present when requested through the options.
    pub projections: Vec<ProjectionPair>,
}

/// Index-reversed copy; the symmetric rho grid makes this the reflection
/// about rho = 0.
pub fn reflect_projection(p: &Projection) -> Projection {
    Projection {
        rho_values: p.rho_values.clone(),
        rho_step: p.rho_step,
        values: p.values.iter().rev().cloned().collect(),
    }
}

/// Circular shift by `round(rho_shift / rho_step)` bins; positive shifts
/// move content towards positive rho.
pub fn shift_projection(p: &Projection, rho_shift: f64) -> Projection {
    let n = p.values.len() as i64;
    let k = (rho_shift / p.rho_step).round() as i64;
    let values = (0..n)
        .map(|i| p.values[(i - k).rem_euclid(n) as usize])
        .collect();
    Projection {
        rho_values: p.rho_values.clone(),
        rho_step: p.rho_step,
        values,
    }
}

/// D measure: the mean of the `m_percent`% largest entries of
/// `|p - p_ref|`, divided by the maximum of `p`.
pub fn difference_measure_d(p: &Projection, p_ref: &Projection, m_percent: f64) -> Result<f64> {
    if p.values.len() != p_ref.values.len() {
        return Err(Error::DimensionMismatch(
            p.values.len(),
            1,
            p_ref.values.len(),
            1,
        ));
    }
    if !(m_percent > 0.0 && m_percent <= 100.0) {
        return Err(Error::InvalidParameter {
            name: "m_percent",
            reason: format!("{m_percent} not in (0, 100]"),
        });
    }
    let peak = p.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak <= 0.0 {
        return Err(Error::AllZeroProjection);
    }
    let mut diffs: Vec<f64> = p
        .values
        .iter()
        .zip(&p_ref.values)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let count = ((m_percent / 100.0) * diffs.len() as f64).ceil() as usize;
    let count = count.clamp(1, diffs.len());
    diffs.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    let mean = diffs[..count].iter().sum::<f64>() / count as f64;
    Ok(mean / peak)
}

/// Classifies a binary object as centrally symmetric or not.
///
/// Pipeline: axis scale from the foreground diameter, SSRT argmax for
/// `theta_hat`, a second SSRT at `sigma_sym`, then for each angle
/// `theta_hat + delta_theta + k pi/3` the projection is circularly shifted
/// by the negated centroid offset, reflected, and scored with D. Angles
/// falling past pi reuse the wrapped column with an extra reflection.
pub fn check_central_symmetry(img: &GrayImage, opts: &SymmetryOptions) -> Result<SymmetryReport> {
    opts.params.validate()?;
    let params = opts.params;
    let sigma_axis = select_sigma(img, SigmaMode::BinaryObject)?;
    let normalized = normalize(img)?;

    // headroom for the largest possible centroid shift plus the kernel tail,
    // so the circular shift never wraps mass around
    let margin = normalized.half_diagonal() + 4.0 * params.sigma_sym;
    let grid = SinogramGrid::for_image(
        img.width(),
        img.height(),
        opts.theta_step,
        opts.rho_step,
        margin,
    )?;
    let radon_sino = radon(&normalized, &grid)?;
    let ssrt_axis = ssrt_from_radon(&radon_sino, &gaussian_kernel_1d(sigma_axis, opts.rho_step)?)?;
    let (theta_hat, _) = ssrt_argmax(&ssrt_axis)?;
    let ssrt_sym = ssrt_from_radon(&radon_sino, &gaussian_kernel_1d(params.sigma_sym, opts.rho_step)?)?;

    let m = compute_moments(&normalized);
    let (xc, yc) = m.centroid;

    let mut checks = Vec::new();
    let mut pairs = Vec::new();
    let mut sym = true;
    for k in 0..3 {
        let theta_raw = theta_hat + params.delta_theta + k as f64 * FRAC_PI_3;
        let (proj, theta_eff) = if opts.exact_angles {
            let values: Vec<f64> = grid
                .rho_values()
                .iter()
                .map(|&rho| ssrt_point(&normalized, params.sigma_sym, theta_raw, rho))
                .collect();
            (
                Projection {
                    rho_values: grid.rho_values().to_vec(),
                    rho_step: grid.rho_step(),
                    values,
                },
                theta_raw,
            )
        } else {
            let (theta_wrapped, mut flip) = wrap_theta(theta_raw);
            let mut it = (theta_wrapped / grid.theta_step()).round() as usize;
            if it >= grid.n_theta() {
                // snapped across the seam: column 0 is the same line with
                // rho negated
                it = 0;
                flip = !flip;
            }
            let col = projection(&ssrt_sym, it)?;
            let col = if flip { reflect_projection(&col) } else { col };
            (
                col,
                grid.theta_values()[it] + if flip { PI } else { 0.0 },
            )
        };

        let shift = -(xc * theta_eff.cos() + yc * theta_eff.sin());
        let aligned = shift_projection(&proj, shift);
        let applied_shift = (shift / grid.rho_step()).round() * grid.rho_step();
        let reflected = reflect_projection(&aligned);
        let d = difference_measure_d(&aligned, &reflected, params.m_percent)?;
        checks.push(AngleCheck {
            theta: wrap_theta(theta_eff).0,
            d,
            shift: applied_shift,
        });
        if opts.keep_projections {
            pairs.push(ProjectionPair {
                theta: wrap_theta(theta_eff).0,
                aligned,
                reflected,
            });
        }
        if d > params.epsilon {
            sym = false;
            if opts.short_circuit {
                break;
            }
        }
    }

    Ok(SymmetryReport {
        sym,
        theta_hat,
        checks,
        params,
        projections: pairs,
    })
}
