//! Fractal estimators on binary images.
//!
//! Four estimators share a log-log least-squares fit: box counting,
//! dilation volume (Bouligand-Minkowski via the exact distance
//! transform), gliding-box lacunarity, and the multifractal spectrum.
//! All grids are anchored at pixel (0, 0) with ragged trailing cells,
//! logarithms are natural, and every routine is deterministic.

mod boxcount;
mod edt;
mod fit;
mod lacunarity;
mod minkowski;
mod multifractal;

pub use boxcount::{box_count, box_dimension, default_box_deltas, BoxCountCurve};
#[doc(hidden)]
pub use edt::edt_squared_brute;
pub use edt::edt_squared;
pub use fit::{fit_loglog, slope_intercept, LogLogFit};
pub use lacunarity::{default_lacunarity_deltas, lacunarity_curve, lacunarity_fit, LacunarityCurve};
#[doc(hidden)]
pub use minkowski::dilation_volumes_brute;
pub use minkowski::{
    achievable_squared_radii, minkowski_curve, minkowski_dimension, DilationCurve,
    DEFAULT_MAX_RADIUS,
};
pub use multifractal::{
    default_cell_sizes, default_exponents, multifractal_spectrum, MultifractalSpectrum,
};
