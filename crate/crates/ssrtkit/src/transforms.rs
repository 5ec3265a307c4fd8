//! Discrete Radon transform, 1-D Gaussian kernels, and the scale-space
//! Radon transform (SSRT) computed two independent ways: fast, as the Radon
//! sinogram convolved along rho with a Gaussian, and slow, as a direct
//! Gaussian-weighted sum over pixels. The slow path is the reference oracle
//! for the fast one.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::raster::NormalizedImage;

/// Sampling lattice of a sinogram: angles over `[0, pi)` and offsets over a
/// symmetric `[-rho_max, rho_max]` with an odd bin count so one bin sits
/// exactly at `rho = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinogramGrid {
    theta_values: Vec<f64>,
    rho_values: Vec<f64>,
    theta_step: f64,
    rho_step: f64,
}

impl SinogramGrid {
    pub fn new(theta_step: f64, rho_step: f64, rho_max: f64) -> Result<Self> {
        if !(theta_step > 0.0 && theta_step < PI) {
            return Err(Error::InvalidParameter {
                name: "theta_step",
                reason: format!("{theta_step} not in (0, pi)"),
            });
        }
        if rho_step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "rho_step",
                reason: format!("{rho_step} must be positive"),
            });
        }
        if rho_max <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "rho_max",
                reason: format!("{rho_max} must be positive"),
            });
        }
        let n_theta = (PI / theta_step - 1e-9).ceil().max(1.0) as usize;
        let theta_values = (0..n_theta).map(|k| k as f64 * theta_step).collect();
        let half = (rho_max / rho_step - 1e-9).ceil().max(1.0) as i64;
        let rho_values = (-half..=half).map(|k| k as f64 * rho_step).collect();
        Ok(Self {
            theta_values,
            rho_values,
            theta_step,
            rho_step,
        })
    }

    /// Grid sized for an image: `rho_max` covers half the diagonal plus
    /// `rho_margin` extra pixels of headroom.
    pub fn for_image(
        width: usize,
        height: usize,
        theta_step: f64,
        rho_step: f64,
        rho_margin: f64,
    ) -> Result<Self> {
        let ox = (width as f64 - 1.0) / 2.0;
        let oy = (height as f64 - 1.0) / 2.0;
        let half_diag = (ox * ox + oy * oy).sqrt().max(rho_step);
        Self::new(theta_step, rho_step, half_diag + rho_margin.max(0.0))
    }

    pub fn theta_values(&self) -> &[f64] {
        &self.theta_values
    }

    pub fn rho_values(&self) -> &[f64] {
        &self.rho_values
    }

    pub fn theta_step(&self) -> f64 {
        self.theta_step
    }

    pub fn rho_step(&self) -> f64 {
        self.rho_step
    }

    pub fn n_theta(&self) -> usize {
        self.theta_values.len()
    }

    pub fn n_rho(&self) -> usize {
        self.rho_values.len()
    }

    pub fn rho_max(&self) -> f64 {
        *self.rho_values.last().unwrap()
    }

    /// Index of the grid angle closest to `theta` (already wrapped to
    /// `[0, pi)`); the gap wraps around to index 0.
    pub fn nearest_theta_index(&self, theta: f64) -> usize {
        let k = (theta / self.theta_step).round() as usize;
        if k >= self.n_theta() {
            0
        } else {
            k
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinogramKind {
    Radon,
    Ssrt,
}

impl SinogramKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SinogramKind::Radon => "radon",
            SinogramKind::Ssrt => "ssrt",
        }
    }
}

/// Transform values sampled on a [`SinogramGrid`], stored row-major by rho:
/// `values[rho_index * n_theta + theta_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    grid: SinogramGrid,
    values: Vec<f64>,
    kind: SinogramKind,
    sigma: Option<f64>,
}

impl Sinogram {
    pub fn grid(&self) -> &SinogramGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> SinogramKind {
        self.kind
    }

    /// Scale parameter; present only for `kind == Ssrt`.
    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn value(&self, rho_index: usize, theta_index: usize) -> f64 {
        self.values[rho_index * self.grid.n_theta() + theta_index]
    }

    pub fn column(&self, theta_index: usize) -> Vec<f64> {
        let n_theta = self.grid.n_theta();
        (0..self.grid.n_rho())
            .map(|ir| self.values[ir * n_theta + theta_index])
            .collect()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// CSV export: a `theta_deg` header row, a `rho` header row, then the
    /// value matrix row-major by rho.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("theta_deg");
        for t in &self.grid.theta_values {
            out.push(',');
            out.push_str(&format!("{}", t * 180.0 / PI));
        }
        out.push('\n');
        out.push_str("rho");
        for r in &self.grid.rho_values {
            out.push(',');
            out.push_str(&format!("{r}"));
        }
        out.push('\n');
        let n_theta = self.grid.n_theta();
        for ir in 0..self.grid.n_rho() {
            let row = &self.values[ir * n_theta..(ir + 1) * n_theta];
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Compact binary dump: magic `SSRT1`, kind, optional sigma, grid, then
    /// little-endian f64 values row-major by rho.
    pub fn to_binary_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(b"SSRT1");
        out.push(match self.kind {
            SinogramKind::Radon => 0,
            SinogramKind::Ssrt => 1,
        });
        out.push(self.sigma.is_some() as u8);
        out.extend_from_slice(&self.sigma.unwrap_or(0.0).to_le_bytes());
        out.extend_from_slice(&(self.grid.n_rho() as u32).to_le_bytes());
        out.extend_from_slice(&(self.grid.n_theta() as u32).to_le_bytes());
        out.extend_from_slice(&self.grid.theta_step.to_le_bytes());
        out.extend_from_slice(&self.grid.rho_step.to_le_bytes());
        for v in self
            .grid
            .rho_values
            .iter()
            .chain(&self.grid.theta_values)
            .chain(&self.values)
        {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_binary_bytes(bytes: &[u8]) -> Result<Sinogram> {
        let bad = |m: &str| Error::CorruptDump(m.to_string());
        if bytes.len() < 31 || &bytes[0..5] != b"SSRT1" {
            return Err(bad("missing SSRT1 magic"));
        }
        let kind = match bytes[5] {
            0 => SinogramKind::Radon,
            1 => SinogramKind::Ssrt,
            k => return Err(bad(&format!("unknown kind tag {k}"))),
        };
        let has_sigma = bytes[6] != 0;
        let f64_at = |off: usize| -> f64 {
            f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap())
        };
        let sigma_raw = f64_at(7);
        let n_rho = u32::from_le_bytes(bytes[15..19].try_into().unwrap()) as usize;
        let n_theta = u32::from_le_bytes(bytes[19..23].try_into().unwrap()) as usize;
        let theta_step = f64_at(23);
        let rho_step = f64_at(31);
        let need = 39 + 8 * (n_rho + n_theta + n_rho * n_theta);
        if bytes.len() != need {
            return Err(bad(&format!("expected {need} bytes, got {}", bytes.len())));
        }
        let mut off = 39;
        let mut take = |n: usize| -> Vec<f64> {
            let vals = (0..n).map(|i| f64_at(off + 8 * i)).collect();
            off += 8 * n;
            vals
        };
        let rho_values = take(n_rho);
        let theta_values = take(n_theta);
        let values = take(n_rho * n_theta);
        Ok(Sinogram {
            grid: SinogramGrid {
                theta_values,
                rho_values,
                theta_step,
                rho_step,
            },
            values,
            kind,
            sigma: has_sigma.then_some(sigma_raw),
        })
    }
}

/// One theta-column of a sinogram together with its rho axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub rho_values: Vec<f64>,
    pub rho_step: f64,
    pub values: Vec<f64>,
}

/// Copies the column at `theta_index` out of a sinogram.
pub fn projection(sino: &Sinogram, theta_index: usize) -> Result<Projection> {
    if theta_index >= sino.grid.n_theta() {
        return Err(Error::IndexOutOfRange {
            index: theta_index,
            len: sino.grid.n_theta(),
        });
    }
    Ok(Projection {
        rho_values: sino.grid.rho_values.clone(),
        rho_step: sino.grid.rho_step,
        values: sino.column(theta_index),
    })
}

/// Sampled 1-D Gaussian `(sqrt(2 pi) sigma)^-1 exp(-u^2 / 2 sigma^2)` at
/// rho-grid spacing, truncated at 4 sigma. The amplitude is part of the
/// transform definition, so the samples are deliberately not renormalized
/// to sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel1D {
    sigma: f64,
    rho_step: f64,
    support_radius: f64,
    samples: Vec<f64>,
}

impl GaussianKernel1D {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn rho_step(&self) -> f64 {
        self.rho_step
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
}

pub fn gaussian_kernel_1d(sigma: f64, rho_step: f64) -> Result<GaussianKernel1D> {
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("{sigma} must be positive"),
        });
    }
    if rho_step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "rho_step",
            reason: format!("{rho_step} must be positive"),
        });
    }
    let half = (4.0 * sigma / rho_step).ceil() as i64;
    let amplitude = 1.0 / ((2.0 * PI).sqrt() * sigma);
    let samples = (-half..=half)
        .map(|k| {
            let u = k as f64 * rho_step;
            amplitude * (-u * u / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    Ok(GaussianKernel1D {
        sigma,
        rho_step,
        support_radius: half as f64 * rho_step,
        samples,
    })
}

/// Discrete Radon transform of a normalized image: each pixel's mass is
/// scattered at `rho = x cos(theta) + y sin(theta)` per angle, split by
/// linear interpolation between the two nearest rho bins. Every column of
/// the result carries the full unit mass.
pub fn radon(img: &NormalizedImage, grid: &SinogramGrid) -> Result<Sinogram> {
    let n_theta = grid.n_theta();
    let n_rho = grid.n_rho();
    let rho_min = grid.rho_values[0];
    let inv_step = 1.0 / grid.rho_step;
    let trig: Vec<(f64, f64)> = grid.theta_values.iter().map(|t| t.sin_cos()).collect();
    let (ox, oy) = img.center_offset();
    let width = img.width();

    let mut values = vec![0.0; n_rho * n_theta];
    for (idx, &mass) in img.pixels().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let x = (idx % width) as f64 - ox;
        let y = (idx / width) as f64 - oy;
        for (it, &(sin_t, cos_t)) in trig.iter().enumerate() {
            let rho = x * cos_t + y * sin_t;
            let pos = (rho - rho_min) * inv_step;
            let i0 = pos.floor();
            let frac = pos - i0;
            let i0 = i0 as i64;
            if i0 < 0 || i0 as usize >= n_rho || (frac > 0.0 && i0 as usize + 1 >= n_rho) {
                return Err(Error::GridTooSmall {
                    rho,
                    rho_max: grid.rho_max(),
                });
            }
            let base = i0 as usize * n_theta + it;
            values[base] += mass * (1.0 - frac);
            if frac > 0.0 {
                values[base + n_theta] += mass * frac;
            }
        }
    }
    Ok(Sinogram {
        grid: grid.clone(),
        values,
        kind: SinogramKind::Radon,
        sigma: None,
    })
}

/// SSRT as the Radon sinogram convolved column-by-column along rho with a
/// 1-D Gaussian kernel (zero-padded boundaries).
pub fn ssrt_from_radon(radon_sino: &Sinogram, kernel: &GaussianKernel1D) -> Result<Sinogram> {
    if radon_sino.kind != SinogramKind::Radon {
        return Err(Error::WrongSinogramKind {
            expected: "radon".into(),
            got: radon_sino.kind.as_str().into(),
        });
    }
    let grid_step = radon_sino.grid.rho_step;
    if (kernel.rho_step - grid_step).abs() > 1e-12 * grid_step.max(1.0) {
        return Err(Error::SpacingMismatch {
            kernel_step: kernel.rho_step,
            grid_step,
        });
    }
    let n_theta = radon_sino.grid.n_theta();
    let n_rho = radon_sino.grid.n_rho();
    let half = kernel.samples.len() / 2;
    // columns are independent; each is convolved on its own
    let columns: Vec<Vec<f64>> = (0..n_theta)
        .into_par_iter()
        .map(|it| {
            let col: Vec<f64> = (0..n_rho)
                .map(|ir| radon_sino.values[ir * n_theta + it])
                .collect();
            (0..n_rho)
                .map(|ir| {
                    let mut acc = 0.0;
                    for (k, &g) in kernel.samples.iter().enumerate() {
                        let j = ir as i64 + half as i64 - k as i64;
                        if j >= 0 && (j as usize) < n_rho {
                            acc += g * col[j as usize];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; n_rho * n_theta];
    for (it, col) in columns.iter().enumerate() {
        for (ir, &v) in col.iter().enumerate() {
            values[ir * n_theta + it] = v;
        }
    }
    Ok(Sinogram {
        grid: radon_sino.grid.clone(),
        values,
        kind: SinogramKind::Ssrt,
        sigma: Some(kernel.sigma),
    })
}

/// SSRT value at one `(theta, rho)` point, summed directly over pixels.
pub fn ssrt_point(img: &NormalizedImage, sigma: f64, theta: f64, rho: f64) -> f64 {
    let (sin_t, cos_t) = theta.sin_cos();
    let (ox, oy) = img.center_offset();
    let width = img.width();
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let mut acc = 0.0;
    for (idx, &mass) in img.pixels().iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let x = (idx % width) as f64 - ox;
        let y = (idx / width) as f64 - oy;
        let z = x * cos_t + y * sin_t - rho;
        acc += mass * (-z * z * inv_two_sigma_sq).exp();
    }
    acc / ((2.0 * PI).sqrt() * sigma)
}

/// Direct-sum SSRT over a whole grid. Slow (pixels x nodes), intended as
/// the reference the convolution path is checked against.
pub fn ssrt_direct(img: &NormalizedImage, sigma: f64, grid: &SinogramGrid) -> Result<Sinogram> {
    if sigma <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "sigma",
            reason: format!("{sigma} must be positive"),
        });
    }
    let n_theta = grid.n_theta();
    let n_rho = grid.n_rho();
    let (ox, oy) = img.center_offset();
    let width = img.width();
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    let amplitude = 1.0 / ((2.0 * PI).sqrt() * sigma);

    let masses: Vec<(f64, f64, f64)> = img
        .pixels()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m != 0.0)
        .map(|(idx, &m)| ((idx % width) as f64 - ox, (idx / width) as f64 - oy, m))
        .collect();

    let columns: Vec<Vec<f64>> = grid
        .theta_values
        .par_iter()
        .map(|theta| {
            let (sin_t, cos_t) = theta.sin_cos();
            let mut col = vec![0.0; n_rho];
            for &(x, y, mass) in &masses {
                let t = x * cos_t + y * sin_t;
                for (ir, &rho) in grid.rho_values.iter().enumerate() {
                    let z = t - rho;
                    col[ir] += mass * (-z * z * inv_two_sigma_sq).exp();
                }
            }
            col
        })
        .collect();
    let mut values = vec![0.0; n_rho * n_theta];
    for (it, col) in columns.iter().enumerate() {
        for (ir, &c) in col.iter().enumerate() {
            values[ir * n_theta + it] = c * amplitude;
        }
    }
    Ok(Sinogram {
        grid: grid.clone(),
        values,
        kind: SinogramKind::Ssrt,
        sigma: Some(sigma),
    })
}

/// Upper bound on the truncation error of `1 - z^2/(2 sigma^2)` as an
/// approximation of `exp(-z^2/(2 sigma^2))`: half the square of the first
/// omitted term, `(1/2) (z^2 / (2 sigma^2))^2`.
pub fn maclaurin_remainder_bound(z: f64, sigma: f64) -> f64 {
    let q = z * z / (2.0 * sigma * sigma);
    0.5 * q * q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{normalize, GrayImage};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn default_grid(w: usize, h: usize) -> SinogramGrid {
        SinogramGrid::for_image(w, h, PI / 180.0, 1.0, 2.0).unwrap()
    }

    fn random_normalized(w: usize, h: usize, seed: u64) -> crate::raster::NormalizedImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let px: Vec<f64> = (0..w * h).map(|_| rng.gen::<f64>()).collect();
        normalize(&GrayImage::new(w, h, px).unwrap()).unwrap()
    }

    #[test]
    fn grid_is_symmetric_with_center_bin() {
        let g = default_grid(32, 32);
        let n = g.n_rho();
        assert_eq!(n % 2, 1);
        assert_eq!(g.rho_values()[n / 2], 0.0);
        for k in 0..n {
            assert_eq!(g.rho_values()[k], -g.rho_values()[n - 1 - k]);
        }
        assert!(g.rho_max() >= 0.5 * (31f64.powi(2) * 2.0).sqrt());
        assert!(g.theta_values().iter().all(|&t| (0.0..PI).contains(&t)));
        assert_eq!(g.n_theta(), 180);
    }

    #[test]
    fn radon_center_pixel_hits_rho_zero_everywhere() {
        let img = GrayImage::from_fn(11, 11, |x, y| if x == 0.0 && y == 0.0 { 1.0 } else { 0.0 })
            .unwrap();
        let n = normalize(&img).unwrap();
        let g = default_grid(11, 11);
        let s = radon(&n, &g).unwrap();
        let zero_bin = g.n_rho() / 2;
        for it in 0..g.n_theta() {
            assert_eq!(s.value(zero_bin, it), 1.0, "theta index {it}");
        }
    }

    #[test]
    fn radon_single_pixel_lands_on_the_line() {
        let img = GrayImage::from_fn(15, 15, |x, y| if x == 3.0 && y == -2.0 { 1.0 } else { 0.0 })
            .unwrap();
        let n = normalize(&img).unwrap();
        let g = default_grid(15, 15);
        let s = radon(&n, &g).unwrap();
        for (it, &theta) in g.theta_values().iter().enumerate() {
            let col = s.column(it);
            let nonzero: Vec<usize> = (0..col.len()).filter(|&i| col[i] > 0.0).collect();
            assert!(nonzero.len() <= 2, "theta {theta}: {} bins", nonzero.len());
            let mean: f64 = nonzero.iter().map(|&i| g.rho_values()[i] * col[i]).sum();
            let expect = 3.0 * theta.cos() + (-2.0) * theta.sin();
            assert!((mean - expect).abs() < 1e-9, "theta {theta}");
        }
    }

    #[test]
    fn radon_columns_conserve_mass() {
        let n = random_normalized(32, 32, 5);
        let g = default_grid(32, 32);
        let s = radon(&n, &g).unwrap();
        for it in 0..g.n_theta() {
            let total: f64 = s.column(it).iter().sum();
            assert!((total - 1.0).abs() < 1e-6, "theta index {it}: {total}");
        }
    }

    #[test]
    fn radon_rejects_small_grid() {
        let n = random_normalized(16, 16, 6);
        let g = SinogramGrid::new(PI / 180.0, 1.0, 3.0).unwrap();
        assert!(matches!(radon(&n, &g), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn kernel_center_sample_and_symmetry() {
        let k = gaussian_kernel_1d(1.0, 1.0).unwrap();
        let mid = k.samples().len() / 2;
        assert!((k.samples()[mid] - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
        for i in 0..k.samples().len() {
            assert_eq!(k.samples()[i], k.samples()[k.samples().len() - 1 - i]);
        }
        assert!(k.support_radius() >= 4.0 * k.sigma());
    }

    #[test]
    fn kernel_riemann_sum_is_one() {
        for sigma in [1.0, 2.5, 7.0] {
            let k = gaussian_kernel_1d(sigma, 1.0).unwrap();
            let sum: f64 = k.samples().iter().sum::<f64>() * k.rho_step();
            assert!((sum - 1.0).abs() < 1e-4, "sigma {sigma}: {sum}");
        }
    }

    #[test]
    fn kernel_rejects_bad_params() {
        assert!(gaussian_kernel_1d(0.0, 1.0).is_err());
        assert!(gaussian_kernel_1d(1.0, -1.0).is_err());
    }

    #[test]
    fn ssrt_small_sigma_degenerates_to_radon() {
        // With sigma = 0.1 * rho_step the sampled kernel is a single spike
        // of mass g(0); dividing it out, the convolution is the identity.
        let n = random_normalized(16, 16, 8);
        let g = default_grid(16, 16);
        let r = radon(&n, &g).unwrap();
        let k = gaussian_kernel_1d(0.1, 1.0).unwrap();
        let kernel_mass: f64 = k.samples().iter().sum();
        let s = ssrt_from_radon(&r, &k).unwrap();
        let peak = r.max_value();
        for i in 0..r.values().len() {
            let rescaled = s.values()[i] / kernel_mass;
            assert!(
                (rescaled - r.values()[i]).abs() <= 0.05 * peak,
                "bin {i}: {rescaled} vs {}",
                r.values()[i]
            );
        }
    }

    #[test]
    fn ssrt_center_pixel_reproduces_kernel() {
        let img = GrayImage::from_fn(11, 11, |x, y| if x == 0.0 && y == 0.0 { 1.0 } else { 0.0 })
            .unwrap();
        let n = normalize(&img).unwrap();
        let g = default_grid(11, 11);
        let r = radon(&n, &g).unwrap();
        let k = gaussian_kernel_1d(2.0, 1.0).unwrap();
        let s = ssrt_from_radon(&r, &k).unwrap();
        let zero_bin = g.n_rho() / 2;
        let half = k.samples().len() / 2;
        for it in 0..g.n_theta() {
            let col = s.column(it);
            for (ir, &v) in col.iter().enumerate() {
                let offset = ir as i64 - zero_bin as i64;
                let expect = if offset.unsigned_abs() as usize <= half {
                    k.samples()[(offset + half as i64) as usize]
                } else {
                    0.0
                };
                assert!((v - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ssrt_kind_and_spacing_are_checked() {
        let n = random_normalized(8, 8, 3);
        let g = default_grid(8, 8);
        let r = radon(&n, &g).unwrap();
        let k_bad = gaussian_kernel_1d(2.0, 0.5).unwrap();
        assert!(matches!(
            ssrt_from_radon(&r, &k_bad),
            Err(Error::SpacingMismatch { .. })
        ));
        let k = gaussian_kernel_1d(2.0, 1.0).unwrap();
        let s = ssrt_from_radon(&r, &k).unwrap();
        assert!(matches!(
            ssrt_from_radon(&s, &k),
            Err(Error::WrongSinogramKind { .. })
        ));
    }

    #[test]
    fn ssrt_direct_single_pixel_matches_formula() {
        let img = GrayImage::from_fn(15, 15, |x, y| if x == 4.0 && y == 1.0 { 1.0 } else { 0.0 })
            .unwrap();
        let n = normalize(&img).unwrap();
        let g = default_grid(15, 15);
        let sigma = 3.0;
        let s = ssrt_direct(&n, sigma, &g).unwrap();
        let amp = 1.0 / ((2.0 * PI).sqrt() * sigma);
        for (it, &theta) in g.theta_values().iter().enumerate() {
            for (ir, &rho) in g.rho_values().iter().enumerate() {
                let z = 4.0 * theta.cos() + 1.0 * theta.sin() - rho;
                let expect = amp * (-z * z / (2.0 * sigma * sigma)).exp();
                assert!((s.value(ir, it) - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ssrt_direct_symmetric_pair_gives_even_columns() {
        let img = GrayImage::from_fn(17, 17, |x, y| {
            if y == 0.0 && (x == 5.0 || x == -5.0) {
                0.5
            } else {
                0.0
            }
        })
        .unwrap();
        let n = normalize(&img).unwrap();
        let g = default_grid(17, 17);
        let s = ssrt_direct(&n, 2.0, &g).unwrap();
        let n_rho = g.n_rho();
        for it in 0..g.n_theta() {
            let col = s.column(it);
            for ir in 0..n_rho {
                assert_eq!(col[ir], col[n_rho - 1 - ir]);
            }
        }
    }

    #[test]
    fn conv_and_direct_paths_agree() {
        for (seed, sigma) in [(11u64, 2.0), (12, 5.0), (13, 10.0)] {
            let n = random_normalized(32, 32, seed);
            let g = default_grid(32, 32);
            let r = radon(&n, &g).unwrap();
            let k = gaussian_kernel_1d(sigma, 1.0).unwrap();
            let fast = ssrt_from_radon(&r, &k).unwrap();
            let slow = ssrt_direct(&n, sigma, &g).unwrap();
            let peak = slow.max_value();
            let worst = fast
                .values()
                .iter()
                .zip(slow.values())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(
                worst / peak <= 1e-2,
                "sigma {sigma}: rel Linf {}",
                worst / peak
            );
        }
    }

    #[test]
    fn projection_copies_column() {
        let n = random_normalized(16, 16, 2);
        let g = default_grid(16, 16);
        let r = radon(&n, &g).unwrap();
        let k = gaussian_kernel_1d(2.0, 1.0).unwrap();
        let s = ssrt_from_radon(&r, &k).unwrap();
        let p = projection(&s, 45).unwrap();
        assert_eq!(p.values.len(), g.n_rho());
        assert_eq!(p.values, s.column(45));
        assert!(projection(&s, g.n_theta()).is_err());

        // ssrt column == radon column convolved with the kernel
        let rp = projection(&r, 45).unwrap();
        let half = k.samples().len() / 2;
        for i in 0..rp.values.len() {
            let mut acc = 0.0;
            for (kk, &gv) in k.samples().iter().enumerate() {
                let j = i as i64 + half as i64 - kk as i64;
                if j >= 0 && (j as usize) < rp.values.len() {
                    acc += gv * rp.values[j as usize];
                }
            }
            assert!((acc - p.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_of_disk_is_rotation_invariant() {
        // the raster breaks exact invariance at O(1/r); sigma = 12 smooths
        // the jaggies below the tolerance
        let img = crate::shapes::disk(61, 61, 18.0);
        let n = normalize(&img).unwrap();
        let g = default_grid(61, 61);
        let r = radon(&n, &g).unwrap();
        let k = gaussian_kernel_1d(12.0, 1.0).unwrap();
        let s = ssrt_from_radon(&r, &k).unwrap();
        let reference = projection(&s, 0).unwrap();
        let peak = reference.values.iter().cloned().fold(0.0, f64::max);
        for it in 1..g.n_theta() {
            let p = projection(&s, it).unwrap();
            for (a, b) in p.values.iter().zip(&reference.values) {
                assert!((a - b).abs() <= 1e-3 * peak, "theta index {it}");
            }
        }
    }

    #[test]
    fn remainder_bound_spot_value() {
        let b = maclaurin_remainder_bound(0.25, 20.0);
        assert!((b - 3.0517578125e-9).abs() < 1e-18);
        assert_eq!(maclaurin_remainder_bound(0.0, 5.0), 0.0);
    }

    #[test]
    fn remainder_bound_dominates_truncation_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let z = rng.gen_range(-1.0..1.0);
            let sigma = rng.gen_range(1.0f64..30.0).max(1.0 + 1e-9);
            let q = z * z / (2.0 * sigma * sigma);
            let err = ((-q).exp() - (1.0 - q)).abs();
            // 1e-15 covers the rounding of exp() near 1 when the true
            // truncation error is below machine precision
            assert!(err <= maclaurin_remainder_bound(z, sigma) + 1e-15);
        }
    }

    #[test]
    fn binary_round_trip() {
        let n = random_normalized(12, 9, 14);
        let g = default_grid(12, 9);
        let r = radon(&n, &g).unwrap();
        let k = gaussian_kernel_1d(3.0, 1.0).unwrap();
        let s = ssrt_from_radon(&r, &k).unwrap();
        for sino in [r, s] {
            let bytes = sino.to_binary_bytes();
            let back = Sinogram::from_binary_bytes(&bytes).unwrap();
            assert_eq!(back, sino);
        }
        assert!(Sinogram::from_binary_bytes(b"nope").is_err());
    }

    #[test]
    fn csv_layout() {
        let n = random_normalized(5, 5, 15);
        let g = SinogramGrid::new(PI / 2.0, 1.0, 4.0).unwrap();
        let r = radon(&n, &g).unwrap();
        let csv = r.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2 + g.n_rho());
        assert!(lines[0].starts_with("theta_deg,0,90"));
        assert!(lines[1].starts_with("rho,-4,-3"));
        assert_eq!(lines[2].split(',').count(), g.n_theta());
    }
}
