//! Grayscale raster container and pixel-level operations: 8-bit PNG/PGM
//! input and output, unit-mass normalization, binarization, impulse noise,
//! rotation by pi about the centroid and the E_m overlap measure.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Row-major grayscale raster with intensities in `[0, 1]`.
///
/// All transform math runs in centered coordinates: array index `(col, row)`
/// maps to `(x, y) = (col - (width-1)/2, row - (height-1)/2)`, with y
/// increasing downwards. [`GrayImage::center_offset`] exposes the offset.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if pixels.len() != width * height {
            return Err(Error::PixelCount {
                got: pixels.len(),
                width,
                height,
                expected: width * height,
            });
        }
        if let Some(&value) = pixels.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::PixelOutOfRange { value });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Builds an image by evaluating `f` at every pixel center, in centered
    /// coordinates.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        let (ox, oy) = ((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0);
        let mut pixels = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                pixels.push(f(col as f64 - ox, row as f64 - oy));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    /// Offset subtracted from `(col, row)` to obtain centered `(x, y)`.
    pub fn center_offset(&self) -> (f64, f64) {
        (
            (self.width as f64 - 1.0) / 2.0,
            (self.height as f64 - 1.0) / 2.0,
        )
    }

    /// Half of the image diagonal; every pixel center projects within this
    /// distance from the origin at any angle.
    pub fn half_diagonal(&self) -> f64 {
        let (ox, oy) = self.center_offset();
        (ox * ox + oy * oy).sqrt()
    }

    pub fn total_intensity(&self) -> f64 {
        self.pixels.iter().sum()
    }

    /// True when every pixel is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.pixels.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Number of pixels equal to exactly 1.
    pub fn foreground_area(&self) -> usize {
        self.pixels.iter().filter(|&&v| v == 1.0).count()
    }

    pub(crate) fn ensure_binary(&self) -> Result<()> {
        match self
            .pixels
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 0.0 && v != 1.0)
        {
            Some((index, &value)) => Err(Error::NotBinary { index, value }),
            None => Ok(()),
        }
    }

    /// Thresholds to an exact `{0, 1}` image; pixels `>= threshold` become 1.
    pub fn binarize(&self, threshold: f64) -> GrayImage {
        let pixels = self
            .pixels
            .iter()
            .map(|&v| if v >= threshold { 1.0 } else { 0.0 })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }

    /// Salt-and-pepper corruption: each pixel site is hit with probability
    /// `density` and then forced to 0 or 1 with equal odds. Bit-identical
    /// across runs for the same seed.
    pub fn add_impulse_noise(&self, density: f64, seed: u64) -> Result<GrayImage> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::InvalidParameter {
                name: "density",
                reason: format!("{density} not in [0, 1]"),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pixels = self.pixels.clone();
        for px in pixels.iter_mut() {
            if rng.gen::<f64>() < density {
                *px = if rng.gen::<bool>() { 1.0 } else { 0.0 };
            }
        }
        Ok(GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        })
    }

    /// Rotates the image by pi about `centroid` (centered coordinates) with
    /// nearest-neighbor sampling; samples falling outside the input are 0.
    ///
    /// Nearest-neighbor keeps binary inputs binary, and the index map is an
    /// exact involution, so applying the operation twice restores every
    /// pixel whose source stayed in frame.
    pub fn rotate_pi_about_centroid(&self, centroid: (f64, f64)) -> Result<GrayImage> {
        let (ox, oy) = self.center_offset();
        let (xc, yc) = centroid;
        if xc + ox < -0.5
            || xc + ox > self.width as f64 - 0.5
            || yc + oy < -0.5
            || yc + oy > self.height as f64 - 0.5
        {
            return Err(Error::CentroidOutOfBounds { x: xc, y: yc });
        }
        // round(t) = floor(t + 0.5): one consistent direction for .5 ties
        // keeps round(s - round(s - p)) == p.
        let sx = 2.0 * xc;
        let sy = 2.0 * yc;
        let mut pixels = vec![0.0; self.width * self.height];
        for row in 0..self.height {
            let y = row as f64 - oy;
            let src_row = (sy - y + oy + 0.5).floor();
            for col in 0..self.width {
                let x = col as f64 - ox;
                let src_col = (sx - x + ox + 0.5).floor();
                if src_row >= 0.0
                    && src_row < self.height as f64
                    && src_col >= 0.0
                    && src_col < self.width as f64
                {
                    pixels[row * self.width + col] =
                        self.pixels[src_row as usize * self.width + src_col as usize];
                }
            }
        }
        Ok(GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        })
    }
}

/// Image rescaled so its pixels sum to 1, keeping the original sum around
/// as `total_mass`.
#[derive(Debug, Clone)]
pub struct NormalizedImage {
    image: GrayImage,
    total_mass: f64,
}

impl NormalizedImage {
    pub fn image(&self) -> &GrayImage {
        &self.image
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn width(&self) -> usize {
        self.image.width
    }

    pub fn height(&self) -> usize {
        self.image.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.image.pixels
    }

    pub fn center_offset(&self) -> (f64, f64) {
        self.image.center_offset()
    }

    pub fn half_diagonal(&self) -> f64 {
        self.image.half_diagonal()
    }
}

/// Divides every pixel by the image total so the result has unit mass.
pub fn normalize(img: &GrayImage) -> Result<NormalizedImage> {
    let total = img.total_intensity();
    if total <= 0.0 {
        return Err(Error::EmptyObject);
    }
    let pixels = img.pixels.iter().map(|&v| v / total).collect();
    Ok(NormalizedImage {
        image: GrayImage {
            width: img.width,
            height: img.height,
            pixels,
        },
        total_mass: total,
    })
}

/// Overlap mismatch between a binary object and (typically) its rotated
/// copy: `E_m = area(|f - f_rot|) / area(f)`, and the verdict `E_m < t`.
pub fn em_measure(f: &GrayImage, f_rot: &GrayImage, t: f64) -> Result<(f64, bool)> {
    if f.width != f_rot.width || f.height != f_rot.height {
        return Err(Error::DimensionMismatch(
            f.width, f.height, f_rot.width, f_rot.height,
        ));
    }
    f.ensure_binary()?;
    f_rot.ensure_binary()?;
    let area = f.foreground_area();
    if area == 0 {
        return Err(Error::EmptyObject);
    }
    let diff = f
        .pixels
        .iter()
        .zip(&f_rot.pixels)
        .filter(|(a, b)| a != b)
        .count();
    let e_m = diff as f64 / area as f64;
    Ok((e_m, e_m < t))
}

/// Writes `bytes` through a temp file in the same directory plus a rename,
/// so concurrent writers never interleave partial output.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let wrap = |source| Error::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp_path = std::path::PathBuf::from(tmp);
    fs::write(&tmp_path, bytes).map_err(wrap)?;
    fs::rename(&tmp_path, path).map_err(wrap)
}

/// Loads an 8-bit grayscale PNG or PGM (binary P5 or ASCII P2), mapping
/// stored values linearly onto `[0, 1]`.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
        return parse_pgm(&bytes, path);
    }
    let dynimg = image::load_from_memory(&bytes).map_err(|e| Error::ImageFormat {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    match dynimg {
        image::DynamicImage::ImageLuma8(gray) => {
            let (w, h) = (gray.width() as usize, gray.height() as usize);
            let pixels = gray.into_raw().iter().map(|&v| v as f64 / 255.0).collect();
            GrayImage::new(w, h, pixels)
        }
        other => Err(Error::ImageFormat {
            path: path.to_path_buf(),
            reason: format!("expected 8-bit grayscale, got {other:?}"),
        }),
    }
}

/// Sample encoding for PGM output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// Binary `P5`.
    Raw,
    /// ASCII `P2`.
    Ascii,
}

/// Saves as 8-bit PNG or PGM, chosen by the file extension (`.png`, `.pgm`).
/// PGM defaults to binary P5; use [`save_pgm`] for ASCII output.
pub fn save_image(img: &GrayImage, path: &Path) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "png" => save_png(img, path),
        "pgm" => save_pgm(img, path, PgmEncoding::Raw),
        _ => Err(Error::ImageFormat {
            path: path.to_path_buf(),
            reason: format!("unsupported output extension {ext:?} (png, pgm)"),
        }),
    }
}

fn quantized(img: &GrayImage) -> Vec<u8> {
    img.pixels
        .iter()
        .map(|&v| (v * 255.0 + 0.5).floor() as u8)
        .collect()
}

fn save_png(img: &GrayImage, path: &Path) -> Result<()> {
    let buf = image::GrayImage::from_raw(img.width as u32, img.height as u32, quantized(img))
        .expect("raw buffer matches dimensions");
    let mut bytes = Vec::new();
    buf.write_to(&mut Cursor::new(&mut bytes), image::ImageFormat::Png)
        .map_err(|e| Error::ImageFormat {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    atomic_write(path, &bytes)
}

pub fn save_pgm(img: &GrayImage, path: &Path, encoding: PgmEncoding) -> Result<()> {
    let samples = quantized(img);
    let mut bytes = Vec::new();
    match encoding {
        PgmEncoding::Raw => {
            bytes.extend_from_slice(format!("P5\n{} {}\n255\n", img.width, img.height).as_bytes());
            bytes.extend_from_slice(&samples);
        }
        PgmEncoding::Ascii => {
            bytes.extend_from_slice(format!("P2\n{} {}\n255\n", img.width, img.height).as_bytes());
            for row in samples.chunks(img.width) {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                bytes.extend_from_slice(line.join(" ").as_bytes());
                bytes.push(b'\n');
            }
        }
    }
    atomic_write(path, &bytes)
}

fn parse_pgm(bytes: &[u8], path: &Path) -> Result<GrayImage> {
    let err = |reason: &str| Error::ImageFormat {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut pos = 0usize;
    let next_token = |pos: &mut usize| -> Option<String> {
        // skip whitespace and '#' comments
        while *pos < bytes.len() {
            let b = bytes[*pos];
            if b == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                *pos += 1;
            } else {
                break;
            }
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        (*pos > start).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };

    let magic = next_token(&mut pos).ok_or_else(|| err("missing magic"))?;
    let width: usize = next_token(&mut pos)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad width"))?;
    let height: usize = next_token(&mut pos)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad height"))?;
    let maxval: u32 = next_token(&mut pos)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad maxval"))?;
    if maxval == 0 || maxval > 255 {
        return Err(err("only 8-bit PGM (maxval 1..=255) is supported"));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| err("dimensions overflow"))?;

    let samples: Vec<u32> = match magic.as_str() {
        "P5" => {
            pos += 1; // single whitespace byte after maxval
            if bytes.len() < pos + count {
                return Err(err("truncated P5 payload"));
            }
            bytes[pos..pos + count].iter().map(|&b| b as u32).collect()
        }
        "P2" => {
            let mut vals = Vec::with_capacity(count);
            while vals.len() < count {
                let tok = next_token(&mut pos).ok_or_else(|| err("truncated P2 payload"))?;
                vals.push(tok.parse::<u32>().map_err(|_| err("bad P2 sample"))?);
            }
            vals
        }
        _ => return Err(err("unsupported PNM magic")),
    };
    if let Some(&s) = samples.iter().find(|&&s| s > maxval) {
        return Err(err(&format!("sample {s} exceeds maxval {maxval}")));
    }
    let pixels = samples
        .into_iter()
        .map(|s| s as f64 / maxval as f64)
        .collect();
    GrayImage::new(width, height, pixels)
}
