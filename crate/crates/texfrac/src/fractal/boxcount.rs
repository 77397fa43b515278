//! Box counting over a fixed mesh anchored at the image origin.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fractal::fit::fit_loglog;
use crate::raster::BinaryImage;
use crate::scalar::Real;

/// Nonempty-cell counts per box size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxCountCurve {
    pub deltas: Vec<usize>,
    pub counts: Vec<u64>,
}

/// Default box sizes: powers of two from 2 up to half the smaller side,
/// so at least four boxes always span the image.
pub fn default_box_deltas(width: usize, height: usize) -> Vec<usize> {
    let cap = width.min(height) / 2;
    let mut deltas = Vec::new();
    let mut d = 2usize;
    while d <= cap {
        deltas.push(d);
        d *= 2;
    }
    deltas
}

/// Counts, for each `delta`, the cells of the `delta`-mesh (anchored at
/// (0, 0), ragged trailing cells allowed) containing at least one white
/// pixel.
pub fn box_count(img: &BinaryImage, deltas: &[usize]) -> Result<BoxCountCurve> {
    if img.count_white() == 0 {
        return Err(Error::EmptyImage);
    }
    let max = img.width().min(img.height());
    for &d in deltas {
        if d < 2 || d > max {
            return Err(Error::BadDelta { delta: d, max });
        }
    }
    let counts: Vec<u64> = deltas
        .par_iter()
        .map(|&delta| count_one(img, delta))
        .collect();
    Ok(BoxCountCurve {
        deltas: deltas.to_vec(),
        counts,
    })
}

fn count_one(img: &BinaryImage, delta: usize) -> u64 {
    let cells_x = img.width().div_ceil(delta);
    let cells_y = img.height().div_ceil(delta);
    let mut occupied = vec![false; cells_x * cells_y];
    for (x, y) in img.white_pixels() {
        occupied[(y / delta) * cells_x + x / delta] = true;
    }
    occupied.iter().filter(|&&c| c).count() as u64
}

/// Box-counting dimension: `-alpha` of the fit of `ln N` against
/// `ln delta`, plus the intercept as a second coefficient.
pub fn box_dimension<T: Real>(img: &BinaryImage, deltas: &[usize]) -> Result<(T, T)> {
    let curve = box_count(img, deltas)?;
    let xs: Vec<T> = curve.deltas.iter().map(|&d| T::of_usize(d)).collect();
    let ys: Vec<T> = curve.counts.iter().map(|&c| T::of(c as f64)).collect();
    let fit = fit_loglog(&xs, &ys)?;
    Ok((-fit.alpha, fit.beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn filled_square_counts_and_dimension() {
        let img = BinaryImage::filled(64, 64);
        let curve = box_count(&img, &[2, 4, 8, 16]).unwrap();
        assert_eq!(curve.counts, vec![1024, 256, 64, 16]);
        let (dim, _beta) = box_dimension::<f64>(&img, &[2, 4, 8, 16]).unwrap();
        assert_abs_diff_eq!(dim, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn single_row_dimension_is_one() {
        let img = synth::horizontal_line(64, 64, 10);
        let curve = box_count(&img, &[2, 4, 8, 16]).unwrap();
        assert_eq!(curve.counts, vec![32, 16, 8, 4]);
        let (dim, _) = box_dimension::<f64>(&img, &[2, 4, 8, 16]).unwrap();
        assert_abs_diff_eq!(dim, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sierpinski_carpet_counts_forced_by_construction() {
        let img = synth::sierpinski_carpet(5);
        assert_eq!(img.width(), 243);
        assert_eq!(img.count_white(), 8usize.pow(5));
        let curve = box_count(&img, &[3, 9, 27, 81]).unwrap();
        // each 3^k cell is nonempty iff it survives k construction levels
        assert_eq!(curve.counts, vec![4096, 512, 64, 8]);
        let (dim, _) = box_dimension::<f64>(&img, &[3, 9, 27, 81]).unwrap();
        assert_abs_diff_eq!(dim, 8.0f64.ln() / 3.0f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn empty_image_rejected() {
        let img = BinaryImage::empty(8, 8);
        assert!(matches!(box_count(&img, &[2]), Err(Error::EmptyImage)));
    }

    #[test]
    fn bad_delta_rejected() {
        let img = BinaryImage::filled(8, 8);
        assert!(matches!(
            box_count(&img, &[1]),
            Err(Error::BadDelta { delta: 1, .. })
        ));
        assert!(matches!(
            box_count(&img, &[9]),
            Err(Error::BadDelta { delta: 9, .. })
        ));
    }

    #[test]
    fn works_in_f32() {
        let img = BinaryImage::filled(32, 32);
        let (dim, _) = box_dimension::<f32>(&img, &[2, 4, 8]).unwrap();
        assert!((dim - 2.0).abs() < 1e-5);
    }

    #[test]
    fn default_deltas_cover_half_side() {
        assert_eq!(default_box_deltas(64, 64), vec![2, 4, 8, 16, 32]);
        assert_eq!(default_box_deltas(96, 200), vec![2, 4, 8, 16, 32]);
        assert_eq!(default_box_deltas(7, 7), vec![2]);
    }

    fn arb_binary(max_side: usize) -> impl Strategy<Value = BinaryImage> {
        (4usize..=max_side, 4usize..=max_side).prop_flat_map(|(w, h)| {
            proptest::collection::vec(0u8..=1, w * h)
                .prop_filter("nonempty", |v| v.contains(&1))
                .prop_map(move |data| BinaryImage::new(w, h, data))
        })
    }

    proptest! {
        #[test]
        fn counts_monotone_under_grid_doubling(img in arb_binary(32)) {
            let max = img.width().min(img.height());
            let deltas: Vec<usize> = [2usize, 4, 8, 16].into_iter().filter(|&d| d <= max).collect();
            let curve = box_count(&img, &deltas).unwrap();
            for w in curve.counts.windows(2) {
                // each doubled cell contains at most 4 finer cells
                prop_assert!(w[1] <= w[0]);
                prop_assert!(w[0] <= 4 * w[1]);
            }
            prop_assert!(curve.counts.iter().all(|&c| c >= 1));
        }

        #[test]
        fn translation_by_grid_multiples(img in arb_binary(16), shift in 1usize..3) {
            // embed in a padded canvas and translate by a multiple of delta
            let delta = 4usize;
            let (w, h) = (img.width(), img.height());
            let pad = delta * shift;
            let canvas = |ox: usize, oy: usize| {
                let mut data = vec![0u8; (w + 4 * delta) * (h + 4 * delta)];
                for (x, y) in img.white_pixels() {
                    data[(y + oy) * (w + 4 * delta) + x + ox] = 1;
                }
                BinaryImage::new(w + 4 * delta, h + 4 * delta, data)
            };
            let a = box_count(&canvas(0, 0), &[delta]).unwrap();
            let b = box_count(&canvas(pad, pad), &[delta]).unwrap();
            prop_assert_eq!(a.counts, b.counts);
        }
    }
}
