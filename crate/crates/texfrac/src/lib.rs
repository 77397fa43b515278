//! Texture recognition from fractal measures of local binary pattern maps.
//!
//! The pipeline: a grayscale texture is encoded as an LBP code map, the
//! map is decomposed into a stack of binary images by superlevel-set
//! thresholding, four fractal estimators (box counting,
//! dilation/Minkowski, gliding-box lacunarity, multifractal spectrum)
//! are evaluated on each slice, and the resulting descriptor vectors are
//! classified with PCA + LDA. A separate module models the behaviour of
//! the box and dilation estimators on random point fields, with Monte
//! Carlo validation.
//!
//! The numeric core is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below pin the `f64` instantiations the pipeline uses.

// negated comparisons are deliberate: NaN must fail validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod eval;
pub mod features;
pub mod fractal;
pub mod lbp;
pub mod mlkit;
pub mod raster;
pub mod scalar;
pub mod statmodel;
pub mod synth;

pub use error::{Error, Result};
pub use raster::{BinaryImage, GrayImage};
pub use scalar::Real;

/// `f64` instantiations used by the shipped pipeline.
pub type Fit = fractal::LogLogFit<f64>;
pub type DilationCurve = fractal::DilationCurve<f64>;
pub type LacunarityCurve = fractal::LacunarityCurve<f64>;
pub type MultifractalSpectrum = fractal::MultifractalSpectrum<f64>;
pub type ModelCurve = statmodel::ModelCurve<f64>;
pub type PcaModel = mlkit::PcaModel<f64>;
pub type LdaModel = mlkit::LdaModel<f64>;
pub type Matrix = mlkit::Matrix<f64>;
