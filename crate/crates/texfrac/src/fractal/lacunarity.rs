//! Gliding-box lacunarity.
//!
//! A delta x delta box slides with stride 1 over every fully-inside
//! position; with k the white count per box, the lacunarity is the
//! moment ratio E[k^2] / E[k]^2 of the box-mass distribution. Partial
//! boxes are excluded. Sums are integer (summed-area table), so the
//! ratio is formed from exact numerator and denominator.

use crate::error::{Error, Result};
use crate::fractal::fit::fit_loglog;
use crate::raster::BinaryImage;
use crate::scalar::Real;

/// Lambda values per gliding-box size.
#[derive(Debug, Clone, PartialEq)]
pub struct LacunarityCurve<T> {
    pub deltas: Vec<usize>,
    pub lambdas: Vec<T>,
}

/// Default gliding-box sizes 2..=14.
pub fn default_lacunarity_deltas() -> Vec<usize> {
    (2..=14).collect()
}

/// Lacunarity at every requested box size.
pub fn lacunarity_curve<T: Real>(img: &BinaryImage, deltas: &[usize]) -> Result<LacunarityCurve<T>> {
    if img.count_white() == 0 {
        return Err(Error::EmptyImage);
    }
    let (w, h) = (img.width(), img.height());
    let max = w.min(h);
    for &d in deltas {
        if d < 1 || d > max {
            return Err(Error::BadDelta { delta: d, max });
        }
    }

    // summed-area table, one row/column of zero padding
    let mut sat = vec![0u64; (w + 1) * (h + 1)];
    for y in 0..h {
        for x in 0..w {
            sat[(y + 1) * (w + 1) + x + 1] = img.get(x, y) as u64
                + sat[y * (w + 1) + x + 1]
                + sat[(y + 1) * (w + 1) + x]
                - sat[y * (w + 1) + x];
        }
    }
    let box_sum = |x0: usize, y0: usize, d: usize| -> u64 {
        sat[(y0 + d) * (w + 1) + x0 + d] + sat[y0 * (w + 1) + x0]
            - sat[y0 * (w + 1) + x0 + d]
            - sat[(y0 + d) * (w + 1) + x0]
    };

    let mut lambdas = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let positions = ((w - d + 1) * (h - d + 1)) as u128;
        let mut sum_k: u128 = 0;
        let mut sum_k2: u128 = 0;
        for y0 in 0..=h - d {
            for x0 in 0..=w - d {
                let k = box_sum(x0, y0, d) as u128;
                sum_k += k;
                sum_k2 += k * k;
            }
        }
        if sum_k == 0 {
            return Err(Error::ZeroMass);
        }
        // Lambda = (E[k^2]) / (E[k])^2 = positions * sum_k2 / sum_k^2
        let numerator = positions * sum_k2;
        let denominator = sum_k * sum_k;
        lambdas.push(T::of(numerator as f64) / T::of(denominator as f64));
    }
    Ok(LacunarityCurve {
        deltas: deltas.to_vec(),
        lambdas,
    })
}

/// Slope and intercept of `ln Lambda` against `ln delta`.
pub fn lacunarity_fit<T: Real>(img: &BinaryImage, deltas: &[usize]) -> Result<(T, T)> {
    let curve = lacunarity_curve::<T>(img, deltas)?;
    let xs: Vec<T> = curve.deltas.iter().map(|&d| T::of_usize(d)).collect();
    let fit = fit_loglog(&xs, &curve.lambdas)?;
    Ok((fit.alpha, fit.beta))
}
