//! Multifractal spectrum from q-weighted box measures.
//!
//! For each cell size L the image is gridded (anchor (0, 0), ragged
//! edges allowed) and cell masses are normalized to probabilities p_i
//! over the cells that contain mass; empty cells stay out of the
//! normalization for every q, which keeps negative exponents finite.
//! With mu_i = p_i^q / sum(p_j^q), the spectrum value f(q) is the
//! least-squares slope of sum(mu_i ln mu_i) against ln L.
//!
//! At q = 0 the inner sum collapses to -ln N(L), which makes f(0)
//! reproduce the box-counting dimension exactly; both paths share
//! `slope_intercept`, so the identity holds to the last bit.

use crate::error::{Error, Result};
use crate::fractal::fit::slope_intercept;
use crate::raster::BinaryImage;
use crate::scalar::Real;

/// Spectrum values per exponent q.
#[derive(Debug, Clone, PartialEq)]
pub struct MultifractalSpectrum<T> {
    pub qs: Vec<T>,
    pub fvals: Vec<T>,
}

/// Default exponent grid -10, -8, ..., 8, 10.
pub fn default_exponents<T: Real>() -> Vec<T> {
    (-5..=5).map(|k| T::of((2 * k) as f64)).collect()
}

/// Default cell sizes used by the descriptor pipeline.
pub fn default_cell_sizes() -> Vec<usize> {
    vec![2, 3, 5, 10, 25, 50, 100, 125, 250]
}

/// Computes the spectrum over the given exponents and cell sizes.
pub fn multifractal_spectrum<T: Real>(
    img: &BinaryImage,
    qs: &[T],
    cell_sizes: &[usize],
) -> Result<MultifractalSpectrum<T>> {
    let total = img.count_white();
    if total == 0 {
        return Err(Error::EmptyImage);
    }
    for &q in qs {
        if !q.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent {q} not finite")));
        }
    }
    for &l in cell_sizes {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("cell size {l} must be >= 2")));
        }
    }

    // per cell size: the log-probabilities of nonempty cells
    let log_xs: Vec<T> = cell_sizes.iter().map(|&l| T::of_usize(l).ln()).collect();
    let total_t = T::of_usize(total);
    let cell_log_probs: Vec<Vec<T>> = cell_sizes
        .iter()
        .map(|&l| {
            cell_masses(img, l)
                .into_iter()
                .map(|m| (T::of(m as f64) / total_t).ln())
                .collect()
        })
        .collect();

    let mut fvals = Vec::with_capacity(qs.len());
    for &q in qs {
        let mut ys = Vec::with_capacity(cell_sizes.len());
        for log_probs in &cell_log_probs {
            // sum of p^q and of p^q ln p, in one deterministic pass
            let mut t0 = T::zero();
            let mut t1 = T::zero();
            for &lp in log_probs {
                let w = (q * lp).exp();
                t0 = t0 + w;
                t1 = t1 + w * lp;
            }
            if !t0.is_finite() || t0 <= T::zero() {
                return Err(Error::NumericalOverflow {
                    q: q.to_f64_lossy(),
                });
            }
            // sum(mu ln mu) = q * t1/t0 - ln t0
            ys.push(q * (t1 / t0) - t0.ln());
        }
        let (slope, _) = slope_intercept(&log_xs, &ys)?;
        fvals.push(slope);
    }
    Ok(MultifractalSpectrum {
        qs: qs.to_vec(),
        fvals,
    })
}

/// White-pixel count of every nonempty cell of the L-mesh.
fn cell_masses(img: &BinaryImage, l: usize) -> Vec<u64> {
    let cells_x = img.width().div_ceil(l);
    let cells_y = img.height().div_ceil(l);
    let mut masses = vec![0u64; cells_x * cells_y];
    for (x, y) in img.white_pixels() {
        masses[(y / l) * cells_x + x / l] += 1;
    }
    masses.retain(|&m| m > 0);
    masses
}
