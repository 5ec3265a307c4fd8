use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported or corrupt image file {path}: {reason}")]
    ImageFormat { path: PathBuf, reason: String },

    #[error("image dimensions must be at least 1x1")]
    ZeroDimension,

    #[error("pixel buffer has {got} values, expected {width}x{height} = {expected}")]
    PixelCount {
        got: usize,
        width: usize,
        height: usize,
        expected: usize,
    },

    #[error("pixel value {value} outside [0, 1]")]
    PixelOutOfRange { value: f64 },

    #[error("empty object")]
    EmptyObject,

    #[error("image is not binary: pixel {value} at index {index}")]
    NotBinary { index: usize, value: f64 },

    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("centroid ({x}, {y}) lies outside the image bounds")]
    CentroidOutOfBounds { x: f64, y: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sinogram grid too small: |rho| = {rho} exceeds rho_max = {rho_max}")]
    GridTooSmall { rho: f64, rho_max: f64 },

    #[error("kernel spacing {kernel_step} does not match grid spacing {grid_step}")]
    SpacingMismatch { kernel_step: f64, grid_step: f64 },

    #[error("expected a {expected} sinogram, got {got}")]
    WrongSinogramKind { expected: String, got: String },

    #[error("index {index} out of range ({len} available)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sinogram is identically zero")]
    AllZeroSinogram,

    #[error("projection is identically zero")]
    AllZeroProjection,

    #[error("orientation is isotropic: no unique inertia axis")]
    IsotropicOrientation,

    #[error("binary object needs at least two foreground pixels")]
    DegenerateForeground,

    #[error("stencil around (theta={theta}, rho={rho}) leaves the valid rho range")]
    StencilOutOfRange { theta: f64, rho: f64 },

    #[error("corrupt sinogram dump: {0}")]
    CorruptDump(String),
}

pub type Result<T> = std::result::Result<T, Error>;
