//! Exact squared Euclidean distance transform.
//!
//! Two-pass algorithm: per-row scans give the squared distance to the
//! nearest white pixel within the row, then a per-column lower-envelope
//! pass (Felzenszwalb-Huttenlocher) minimizes `g(y') + (y - y')^2`.
//! All finite values are integers below 2^53, so the floating-point
//! evaluation is exact and the output matches a brute-force scan bit for
//! bit.

use crate::error::{Error, Result};
use crate::raster::BinaryImage;

const INF: f64 = f64::INFINITY;

/// Per-pixel squared distance (row-major) to the nearest white pixel.
pub fn edt_squared(img: &BinaryImage) -> Result<Vec<u64>> {
    if img.count_white() == 0 {
        return Err(Error::EmptyImage);
    }
    let (w, h) = (img.width(), img.height());

    // pass 1: squared horizontal distance to the nearest white pixel in the row
    let mut g = vec![INF; w * h];
    for y in 0..h {
        let row = &mut g[y * w..(y + 1) * w];
        let mut dist = usize::MAX;
        for (x, slot) in row.iter_mut().enumerate() {
            if img.get(x, y) {
                dist = 0;
            } else if dist != usize::MAX {
                dist += 1;
            }
            if dist != usize::MAX {
                *slot = (dist * dist) as f64;
            }
        }
        dist = usize::MAX;
        for (x, slot) in row.iter_mut().enumerate().rev() {
            if img.get(x, y) {
                dist = 0;
            } else if dist != usize::MAX {
                dist += 1;
            }
            if dist != usize::MAX {
                *slot = slot.min((dist * dist) as f64);
            }
        }
    }

    // pass 2: per column, lower envelope of the parabolas y' -> g[y'] + (y - y')^2
    let mut out = vec![0u64; w * h];
    let mut f = vec![0.0f64; h];
    let mut vertices = vec![0usize; h];
    let mut boundaries = vec![0.0f64; h + 1];
    for x in 0..w {
        for y in 0..h {
            f[y] = g[y * w + x];
        }
        lower_envelope_min(&f, &mut vertices, &mut boundaries, |y, d| {
            out[y * w + x] = d;
        });
    }
    Ok(out)
}

/// Computes `min_j (f[j] + (i - j)^2)` for every `i`, skipping infinite
/// parabolas; at least one finite entry is guaranteed by the caller.
fn lower_envelope_min(
    f: &[f64],
    vertices: &mut [usize],
    boundaries: &mut [f64],
    mut emit: impl FnMut(usize, u64),
) {
    let n = f.len();
    let mut k = 0usize; // index of the rightmost parabola in the envelope
    let mut any = false;
    for q in 0..n {
        if f[q] == INF {
            continue;
        }
        if !any {
            any = true;
            k = 0;
            vertices[0] = q;
            boundaries[0] = -INF;
            boundaries[1] = INF;
            continue;
        }
        // intersection of parabola q with the current rightmost one
        let mut s = intersect(f, vertices[k], q);
        while s <= boundaries[k] {
            k -= 1;
            s = intersect(f, vertices[k], q);
        }
        k += 1;
        vertices[k] = q;
        boundaries[k] = s;
        boundaries[k + 1] = INF;
    }
    debug_assert!(any, "no finite parabola in column");
    let mut j = 0usize;
    for i in 0..n {
        while boundaries[j + 1] < i as f64 {
            j += 1;
        }
        let v = vertices[j];
        let d = i.abs_diff(v);
        emit(i, (d * d) as u64 + f[v] as u64);
    }
}

#[inline]
fn intersect(f: &[f64], p: usize, q: usize) -> f64 {
    // abscissa where parabola q overtakes parabola p (q > p)
    ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2 * (q - p)) as f64
}

/// Brute-force nearest-white-pixel scan; the exactness oracle.
#[doc(hidden)]
pub fn edt_squared_brute(img: &BinaryImage) -> Result<Vec<u64>> {
    if img.count_white() == 0 {
        return Err(Error::EmptyImage);
    }
    let (w, h) = (img.width(), img.height());
    let whites: Vec<(usize, usize)> = img.white_pixels().collect();
    let mut out = vec![0u64; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut best = u64::MAX;
            for &(wx, wy) in &whites {
                let dx = x.abs_diff(wx) as u64;
                let dy = y.abs_diff(wy) as u64;
                best = best.min(dx * dx + dy * dy);
            }
            out[y * w + x] = best;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;
    use proptest::prelude::*;

    #[test]
    fn corner_point_distances() {
        let img = synth::single_point(3, 3, 0, 0);
        let d = edt_squared(&img).unwrap();
        assert_eq!(d, vec![0, 1, 4, 1, 2, 5, 4, 5, 8]);
    }

    #[test]
    fn all_white_is_zero() {
        let img = BinaryImage::filled(9, 4);
        assert!(edt_squared(&img).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn empty_image_rejected() {
        assert!(matches!(
            edt_squared(&BinaryImage::empty(4, 4)),
            Err(Error::EmptyImage)
        ));
    }

    #[test]
    fn matches_brute_force_on_random_16x16() {
        for seed in 0..32 {
            let img = synth::random_binary(16, 16, 0.1, seed);
            assert_eq!(
                edt_squared(&img).unwrap(),
                edt_squared_brute(&img).unwrap(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn sparse_columns_with_infinite_rows() {
        // rows without any white pixel exercise the INF-skipping path
        let img = synth::single_point(5, 7, 2, 3);
        assert_eq!(edt_squared(&img).unwrap(), edt_squared_brute(&img).unwrap());
    }

    proptest! {
        #[test]
        fn exact_on_arbitrary_images(
            w in 1usize..=32,
            h in 1usize..=32,
            density in 0.02f64..0.9,
            seed in any::<u64>(),
        ) {
            let img = synth::random_binary(w, h, density, seed);
            prop_assert_eq!(edt_squared(&img).unwrap(), edt_squared_brute(&img).unwrap());
        }
    }
}
