//! Scale-space Radon transform toolkit.
//!
//! The transform generalizes the Radon transform by matching the image
//! against a Gaussian ridge of scale `sigma` instead of an ideal line; it
//! equals the Radon sinogram convolved along rho with a 1-D Gaussian. With
//! the scale set to the object diameter its global maximum lands on the
//! principal inertia axis, and its projections expose central symmetry:
//! an object equals its own half-turn exactly when every projection is
//! even in rho after centroid alignment.
//!
//! Modules:
//! - [`raster`]: image container, PNG/PGM I/O, normalization, impulse
//!   noise, the rotate-by-pi oracle and the E_m overlap measure.
//! - [`transforms`]: Radon transform, Gaussian kernels, the fast
//!   convolution SSRT and the direct-sum reference path.
//! - [`moments`]: geometric moments, centroid and orientation.
//! - [`inertia`]: scale selection, SSRT argmax, axis extraction and the
//!   maximum-condition checks.
//! - [`symmetry`]: the three-projection central-symmetry classifier.
//! - [`dataset`]: random-bar dataset generation and the evaluation
//!   harness.
//! - [`shapes`]: analytic rasterizers shared by the generator and tests.
//!
//! All geometry lives in image-centered coordinates: array index
//! `(col, row)` maps to `(x, y) = (col - (w-1)/2, row - (h-1)/2)` with y
//! pointing down, and lines are parameterized as
//! `x cos(theta) + y sin(theta) = rho`.

pub mod dataset;
pub mod error;
pub mod inertia;
pub mod moments;
pub mod raster;
pub mod shapes;
pub mod symmetry;
pub mod transforms;

pub use error::{Error, Result};
pub use inertia::{
    axis_from_maximum, compare_axes, estimate_axes, hessian_check, moments_axis, select_sigma,
    ssrt_argmax, AxisDiff, AxisEstimate, AxisReport, AxisSource, SigmaMode,
};
pub use moments::{compute_moments, orientation_phi, Degeneracy, MomentSet, Orientation};
pub use raster::{
    em_measure, load_image, normalize, save_image, GrayImage, NormalizedImage, PgmEncoding,
};
pub use symmetry::{
    check_central_symmetry, difference_measure_d, reflect_projection, shift_projection,
    SymmetryOptions, SymmetryParams, SymmetryReport,
};
pub use transforms::{
    gaussian_kernel_1d, maclaurin_remainder_bound, projection, radon, ssrt_direct,
    ssrt_from_radon, GaussianKernel1D, Projection, Sinogram, SinogramGrid, SinogramKind,
};
