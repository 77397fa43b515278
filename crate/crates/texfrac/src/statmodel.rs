//! Coverage statistics of random point fields.
//!
//! Closed-form expectations for two measures of a field of `Np` random
//! points carrying self-similar dimension `ds`:
//!
//! * `expected_boxes`: nonempty cells of an s-mesh,
//!   `B(s) = (1 - (1 - s^ds)^Np) / s^ds`;
//! * `expected_covered_length`: measure covered by balls of diameter
//!   `s` centered on the points, `1 - (1 - c(ds) (s/2)^ds)^Np` with
//!   `c` the unit-ball volume. The diameter convention makes the 1-D
//!   case reduce to bars of length s, matching the bar-dropping Monte
//!   Carlo oracle exactly.
//!
//! Each expectation has a seeded Monte Carlo counterpart for
//! validation, and `model_sweep_csv` renders alpha/beta trends over a
//! grid of `Np` values.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractal::fit_loglog;
use crate::scalar::Real;

/// Parameters of the random point field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams<T> {
    /// Expected number of points (> 0).
    pub npoints: T,
    /// Self-similar dimension in (0, 2].
    pub dim: T,
    /// Scale samples in (0, 1).
    pub scales: Vec<T>,
}

/// Which measure a model curve tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Boxes,
    Length,
    /// One-dimensional covered length with interval boundaries kept.
    LengthBounded,
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Boxes => "boxes",
            MeasureKind::Length => "length",
            MeasureKind::LengthBounded => "length-bounded",
        }
    }
}

/// A measure curve over scales with its log-log fit coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelCurve<T> {
    pub scales: Vec<T>,
    pub measures: Vec<T>,
    pub alpha: T,
    pub beta: T,
}

/// Expected number of nonempty s-boxes.
pub fn expected_boxes<T: Real>(s: T, npoints: T, ds: T) -> Result<T> {
    if !(s > T::zero() && s <= T::one()) {
        return Err(Error::DomainError(format!("scale {s} outside (0, 1]")));
    }
    check_np_ds(npoints, ds)?;
    let sd = s.powf(ds);
    Ok((T::one() - (T::one() - sd).powf(npoints)) / sd)
}

/// Expected measure covered by balls of diameter `s`.
pub fn expected_covered_length<T: Real>(s: T, npoints: T, ds: T) -> Result<T> {
    if !(s > T::zero()) {
        return Err(Error::DomainError(format!("scale {s} must be positive")));
    }
    check_np_ds(npoints, ds)?;
    let coverage = ball_volume(ds) * (s / T::of(2.0)).powf(ds);
    if coverage > T::one() {
        return Err(Error::DomainError(format!(
            "ball volume term {coverage} exceeds 1 at scale {s}"
        )));
    }
    Ok(T::one() - (T::one() - coverage).powf(npoints))
}

/// 1-D covered length with the interval boundary accounted for: the
/// per-point coverage probability tapers linearly within s/2 of either
/// end, and the expectation integrates in closed form.
pub fn expected_covered_length_bounded<T: Real>(s: T, npoints: T) -> Result<T> {
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::DomainError(format!("scale {s} outside (0, 1)")));
    }
    if !(npoints > T::zero()) {
        return Err(Error::DomainError(format!(
            "point count {npoints} must be positive"
        )));
    }
    let one = T::one();
    let half = s / T::of(2.0);
    let np1 = npoints + one;
    // interior: (1 - s) * (1 - (1-s)^Np); each edge strip of width s/2
    // integrates to s/2 - ((1-s/2)^(Np+1) - (1-s)^(Np+1)) / (Np+1)
    let interior = (one - s) * (one - (one - s).powf(npoints));
    let edge = half - ((one - half).powf(np1) - (one - s).powf(np1)) / np1;
    Ok(interior + edge + edge)
}

fn check_np_ds<T: Real>(npoints: T, ds: T) -> Result<()> {
    if !(npoints > T::zero()) {
        return Err(Error::DomainError(format!(
            "point count {npoints} must be positive"
        )));
    }
    if !(ds > T::zero()) {
        return Err(Error::DomainError(format!(
            "dimension {ds} must be positive"
        )));
    }
    Ok(())
}

/// Volume of the unit ball in dimension `d`: pi^(d/2) / Gamma(d/2 + 1).
/// Integer dimensions take the exact constant so the 1-D and 2-D forms
/// hold without Lanczos round-off.
pub fn ball_volume<T: Real>(d: T) -> T {
    if d == T::one() {
        return T::of(2.0);
    }
    if d == T::of(2.0) {
        return T::of(std::f64::consts::PI);
    }
    let pi = T::of(std::f64::consts::PI);
    let half = d / T::of(2.0);
    pi.powf(half) / gamma(half + T::one())
}

/// Gamma function for positive arguments (Lanczos, g = 7, n = 9).
#[allow(clippy::excessive_precision)]
pub fn gamma<T: Real>(x: T) -> T {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > T::zero());
    let x = x - T::one();
    let mut acc = T::of(0.99999999999980993);
    for (i, &c) in COEFFS.iter().enumerate() {
        acc = acc + T::of(c) / (x + T::of_usize(i + 1));
    }
    let t = x + T::of(7.5);
    let two_pi = T::of(2.0 * std::f64::consts::PI);
    two_pi.sqrt() * t.powf(x + T::of(0.5)) * (-t).exp() * acc
}

/// Fits alpha/beta to the analytic measure curve over the scale grid.
pub fn model_alpha_beta<T: Real>(params: &ModelParams<T>, kind: MeasureKind) -> Result<ModelCurve<T>> {
    if params.scales.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 scales, got {}",
            params.scales.len()
        )));
    }
    if kind == MeasureKind::LengthBounded && params.dim != T::one() {
        return Err(Error::DomainError(format!(
            "the bounded length model is one-dimensional, got dimension {}",
            params.dim
        )));
    }
    let measures: Vec<T> = params
        .scales
        .iter()
        .map(|&s| match kind {
            MeasureKind::Boxes => expected_boxes(s, params.npoints, params.dim),
            MeasureKind::Length => expected_covered_length(s, params.npoints, params.dim),
            MeasureKind::LengthBounded => expected_covered_length_bounded(s, params.npoints),
        })
        .collect::<Result<_>>()?;
    let fit = fit_loglog(&params.scales, &measures)?;
    Ok(ModelCurve {
        scales: params.scales.clone(),
        measures,
        alpha: fit.alpha,
        beta: fit.beta,
    })
}

/// Log-spaced scale grid, inclusive of both endpoints.
pub fn log_spaced_scales<T: Real>(lo: f64, hi: f64, count: usize) -> Vec<T> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| T::of((lo.ln() + step * i as f64).exp()))
        .collect()
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial + 1);
    rng
}

fn mean_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Monte Carlo estimate of the occupied-bin count: floor(np) uniform
/// points in [0, 1], bins of width s. Returns (mean, standard error).
/// One RNG stream per trial, so the result is independent of the
/// thread count.
pub fn montecarlo_boxes(s: f64, np: f64, trials: usize, seed: u64) -> (f64, f64) {
    debug_assert!(trials >= 100, "oracle contract asks for >= 100 trials");
    let n = np.floor() as usize;
    let nbins = (1.0 / s).round() as usize;
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut occupied = vec![false; nbins];
            for _ in 0..n {
                let u: f64 = rng.random();
                occupied[((u / s) as usize).min(nbins - 1)] = true;
            }
            occupied.iter().filter(|&&b| b).count() as f64
        })
        .collect();
    mean_stderr(&samples)
}

/// Monte Carlo estimate of the measure covered by floor(np) bars of
/// length s dropped on the unit circle (periodic, so boundary effects
/// vanish and the expectation equals the closed form exactly).
pub fn montecarlo_length(s: f64, np: f64, trials: usize, seed: u64) -> (f64, f64) {
    debug_assert!(trials >= 100, "oracle contract asks for >= 100 trials");
    let n = np.floor() as usize;
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut centers: Vec<f64> = (0..n).map(|_| rng.random()).collect();
            centers.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let mut uncovered = 0.0;
            for i in 0..centers.len() {
                let gap = if i + 1 < centers.len() {
                    centers[i + 1] - centers[i]
                } else {
                    centers[0] + 1.0 - centers[i]
                };
                uncovered += (gap - s).max(0.0);
            }
            1.0 - uncovered
        })
        .collect();
    mean_stderr(&samples)
}

/// As `montecarlo_length` but on the plain interval with clipped bars;
/// pairs with `expected_covered_length_bounded`.
pub fn montecarlo_length_bounded(s: f64, np: f64, trials: usize, seed: u64) -> (f64, f64) {
    debug_assert!(trials >= 100, "oracle contract asks for >= 100 trials");
    let n = np.floor() as usize;
    let samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial);
            let mut spans: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    let c: f64 = rng.random();
                    ((c - s / 2.0).max(0.0), (c + s / 2.0).min(1.0))
                })
                .collect();
            spans.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let mut covered = 0.0;
            let mut end = 0.0;
            for (lo, hi) in spans {
                if hi > end {
                    covered += hi - end.max(lo);
                    end = hi;
                }
            }
            covered
        })
        .collect();
    mean_stderr(&samples)
}

/// Renders `kind, dS, Np, s, measure, alpha, beta` rows for every
/// combination in the sweep. Each (kind, dS, Np) triple contributes one
/// row per scale, all carrying that curve's fitted alpha/beta.
pub fn model_sweep_csv(
    kinds: &[MeasureKind],
    ds_values: &[f64],
    np_values: &[f64],
    scales: &[f64],
) -> Result<String> {
    let mut out = String::from("kind,dS,Np,s,measure,alpha,beta\n");
    for &kind in kinds {
        for &ds in ds_values {
            for &np in np_values {
                let params = ModelParams {
                    npoints: np,
                    dim: ds,
                    scales: scales.to_vec(),
                };
                let curve = model_alpha_beta(&params, kind)?;
                for (&s, &m) in curve.scales.iter().zip(&curve.measures) {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        kind.name(),
                        fmt(ds),
                        fmt(np),
                        fmt(s),
                        fmt(m),
                        fmt(curve.alpha),
                        fmt(curve.beta),
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Shortest round-trip decimal form of a float.
pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}
