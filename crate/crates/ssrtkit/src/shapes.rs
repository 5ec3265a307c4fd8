//! Analytic shape rasterizers used by the dataset generator and the test
//! suites. All coordinates are centered, all outputs are exact `{0, 1}`
//! binary images.

use serde::{Deserialize, Serialize};

use crate::raster::GrayImage;

/// Rectangle with arbitrary center, side lengths and orientation. `angle`
/// is the direction of the `length` side, in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedRect {
    pub cx: f64,
    pub cy: f64,
    pub length: f64,
    pub width: f64,
    pub angle: f64,
}

impl RotatedRect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (sin_a, cos_a) = self.angle.sin_cos();
        let dx = x - self.cx;
        let dy = y - self.cy;
        let u = dx * cos_a + dy * sin_a;
        let v = -dx * sin_a + dy * cos_a;
        u.abs() <= self.length / 2.0 && v.abs() <= self.width / 2.0
    }
}

/// Rasterizes an indicator function over pixel centers.
pub fn rasterize(width: usize, height: usize, inside: impl Fn(f64, f64) -> bool) -> GrayImage {
    GrayImage::from_fn(width, height, |x, y| if inside(x, y) { 1.0 } else { 0.0 })
        .expect("indicator produces valid pixels")
}

pub fn rotated_rect(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    length: f64,
    bar_width: f64,
    angle: f64,
) -> GrayImage {
    let r = RotatedRect {
        cx,
        cy,
        length,
        width: bar_width,
        angle,
    };
    rasterize(width, height, |x, y| r.contains(x, y))
}

/// Union of a list of bars.
pub fn bars_union(width: usize, height: usize, bars: &[RotatedRect]) -> GrayImage {
    rasterize(width, height, |x, y| bars.iter().any(|b| b.contains(x, y)))
}

pub fn ellipse(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    semi_major: f64,
    semi_minor: f64,
    angle: f64,
) -> GrayImage {
    let (sin_a, cos_a) = angle.sin_cos();
    rasterize(width, height, |x, y| {
        let dx = x - cx;
        let dy = y - cy;
        let u = (dx * cos_a + dy * sin_a) / semi_major;
        let v = (-dx * sin_a + dy * cos_a) / semi_minor;
        u * u + v * v <= 1.0
    })
}

pub fn disk(width: usize, height: usize, radius: f64) -> GrayImage {
    rasterize(width, height, |x, y| x * x + y * y <= radius * radius)
}

/// Plus-sign cross centered at `(cx, cy)`: two perpendicular arms of the
/// given full length and width. 4-fold symmetric, hence centrally
/// symmetric.
pub fn plus_cross(
    width: usize,
    height: usize,
    cx: f64,
    cy: f64,
    arm_length: f64,
    arm_width: f64,
) -> GrayImage {
    rasterize(width, height, |x, y| {
        let dx = (x - cx).abs();
        let dy = (y - cy).abs();
        (dx <= arm_length / 2.0 && dy <= arm_width / 2.0)
            || (dy <= arm_length / 2.0 && dx <= arm_width / 2.0)
    })
}

/// Integer-pixel translation: content moves by `(dx, dy)`, vacated pixels
/// become 0 and anything pushed past the border is dropped.
pub fn translated(img: &GrayImage, dx: i64, dy: i64) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut pixels = vec![0.0; w * h];
    for row in 0..h as i64 {
        for col in 0..w as i64 {
            let (sc, sr) = (col - dx, row - dy);
            if sc >= 0 && sc < w as i64 && sr >= 0 && sr < h as i64 {
                pixels[(row as usize) * w + col as usize] = img.get(sc as usize, sr as usize);
            }
        }
    }
    GrayImage::new(w, h, pixels).expect("translated pixels stay valid")
}

/// Equilateral triangle centered at the origin with circumradius `r`,
/// one vertex pointing up. 3-fold symmetric, not centrally symmetric.
pub fn equilateral_triangle(width: usize, height: usize, r: f64) -> GrayImage {
    let verts: Vec<(f64, f64)> = [90.0f64, 210.0, 330.0]
        .iter()
        .map(|deg| {
            let a = deg.to_radians();
            (r * a.cos(), -r * a.sin())
        })
        .collect();
    rasterize(width, height, |x, y| {
        let mut sign = 0i8;
        for i in 0..3 {
            let (x1, y1) = verts[i];
            let (x2, y2) = verts[(i + 1) % 3];
            let cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1);
            let s = if cross > 0.0 {
                1
            } else if cross < 0.0 {
                -1
            } else {
                0
            };
            if s != 0 {
                if sign == 0 {
                    sign = s;
                } else if sign != s {
                    return false;
                }
            }
        }
        true
    })
}
