//! Dilation volume curve and Bouligand-Minkowski dimension.
//!
//! The distance transform makes dilation by a radius-r disk a
//! thresholding: a pixel is covered iff its squared distance to the set
//! is <= r^2. Curve points are taken at every achievable squared lattice
//! distance d = i^2 + j^2, giving a dense radius grid sqrt(d) rather
//! than integer radii only.

use crate::error::{Error, Result};
use crate::fractal::edt::edt_squared;
use crate::fractal::fit::fit_loglog;
use crate::raster::BinaryImage;
use crate::scalar::Real;

/// Default maximum dilation radius.
pub const DEFAULT_MAX_RADIUS: f64 = 9.0;

/// Covered-pixel counts per dilation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationCurve<T> {
    /// Dilation radii, sorted ascending (sqrt of each achievable d).
    pub radii: Vec<T>,
    /// Pixels within each radius of the set (includes the set itself).
    pub volumes: Vec<u64>,
}

/// All integers `0 < d <= max_radius^2` expressible as `i^2 + j^2`.
pub fn achievable_squared_radii(max_radius: f64) -> Vec<u64> {
    let max_d = (max_radius * max_radius).floor() as u64;
    let cap = max_radius.floor() as u64;
    let mut achievable = vec![false; (max_d + 1) as usize];
    for i in 0..=cap {
        for j in i..=cap {
            let d = i * i + j * j;
            if d > 0 && d <= max_d {
                achievable[d as usize] = true;
            }
        }
    }
    (1..=max_d).filter(|&d| achievable[d as usize]).collect()
}

/// Dilation volume V(sqrt(d)) at every achievable squared distance d.
pub fn minkowski_curve<T: Real>(img: &BinaryImage, max_radius: f64) -> Result<DilationCurve<T>> {
    if !(max_radius >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "max_radius {max_radius} must be >= 1"
        )));
    }
    let dist2 = edt_squared(img)?;
    let ds = achievable_squared_radii(max_radius);
    let max_d = *ds.last().expect("max_radius >= 1 yields d = 1") as usize;

    // histogram of squared distances, then cumulative counts
    let mut hist = vec![0u64; max_d + 1];
    for &d in &dist2 {
        if d as usize <= max_d {
            hist[d as usize] += 1;
        }
    }
    let mut cumulative = 0u64;
    let mut volume_at = vec![0u64; max_d + 1];
    for (d, &count) in hist.iter().enumerate() {
        cumulative += count;
        volume_at[d] = cumulative;
    }

    let radii = ds.iter().map(|&d| T::of((d as f64).sqrt())).collect();
    let volumes = ds.iter().map(|&d| volume_at[d as usize]).collect();
    Ok(DilationCurve { radii, volumes })
}

/// Bouligand-Minkowski dimension `2 - alpha` of the fit of `ln V`
/// against `ln radius`, plus the intercept.
pub fn minkowski_dimension<T: Real>(img: &BinaryImage, max_radius: f64) -> Result<(T, T)> {
    if !(max_radius >= 2.0) {
        return Err(Error::InvalidParameter(format!(
            "max_radius {max_radius} must be >= 2 for a dimension fit"
        )));
    }
    let curve = minkowski_curve::<T>(img, max_radius)?;
    let ys: Vec<T> = curve.volumes.iter().map(|&v| T::of(v as f64)).collect();
    let fit = fit_loglog(&curve.radii, &ys)?;
    Ok((T::of(2.0) - fit.alpha, fit.beta))
}

/// Brute-force disk stamping: the dilation oracle. Stamps every offset
/// with `i^2 + j^2 <= max_d` around each white pixel and keeps the
/// minimum squared radius reaching each pixel.
#[doc(hidden)]
pub fn dilation_volumes_brute(img: &BinaryImage, max_radius: f64) -> Result<Vec<(u64, u64)>> {
    if img.count_white() == 0 {
        return Err(Error::EmptyImage);
    }
    let max_d = (max_radius * max_radius).floor() as i64;
    let reach = max_radius.floor() as i64;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut best = vec![u64::MAX; (w * h) as usize];
    for (px, py) in img.white_pixels() {
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let d = dx * dx + dy * dy;
                if d > max_d {
                    continue;
                }
                let (x, y) = (px as i64 + dx, py as i64 + dy);
                if x < 0 || y < 0 || x >= w || y >= h {
                    continue;
                }
                let idx = (y * w + x) as usize;
                best[idx] = best[idx].min(d as u64);
            }
        }
    }
    Ok(achievable_squared_radii(max_radius)
        .into_iter()
        .map(|d| (d, best.iter().filter(|&&b| b <= d).count() as u64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn achievable_distances_skip_non_sums_of_squares() {
        let ds = achievable_squared_radii(3.0);
        // 3, 6, 7 are not sums of two squares
        assert_eq!(ds, vec![1, 2, 4, 5, 8, 9]);
    }

    #[test]
    fn single_point_small_radii() {
        let img = synth::single_point(9, 9, 4, 4);
        let c1 = minkowski_curve::<f64>(&img, 1.0).unwrap();
        assert_eq!(c1.volumes, vec![5]); // center + 4-neighbors
        let c2 = minkowski_curve::<f64>(&img, 2.0).unwrap();
        assert_eq!(c2.volumes, vec![5, 9, 13]); // d = 1, 2, 4
        assert_eq!(c2.radii, vec![1.0, 2.0f64.sqrt(), 2.0]);
    }

    #[test]
    fn all_white_volume_constant_and_dimension_two() {
        let img = BinaryImage::filled(20, 11);
        let curve = minkowski_curve::<f64>(&img, 5.0).unwrap();
        assert!(curve.volumes.iter().all(|&v| v == 220));
        let (dim, _) = minkowski_dimension::<f64>(&img, 5.0).unwrap();
        assert_eq!(dim, 2.0);
    }

    #[test]
    fn volumes_never_decrease() {
        let img = synth::random_binary(24, 24, 0.05, 11);
        let curve = minkowski_curve::<f64>(&img, DEFAULT_MAX_RADIUS).unwrap();
        assert!(curve.volumes.windows(2).all(|w| w[0] <= w[1]));
        assert!(curve.volumes[0] >= img.count_white() as u64);
    }

    #[test]
    fn line_volumes_match_segment_dilation() {
        // a full-width line has no endcaps: V(sqrt(d)) = w * (2 floor(sqrt(d)) + 1)
        let img = synth::horizontal_line(256, 24, 12);
        let curve = minkowski_curve::<f64>(&img, DEFAULT_MAX_RADIUS).unwrap();
        for (&r, &v) in curve.radii.iter().zip(&curve.volumes) {
            let analytic = 256 * (2 * r.floor() as u64 + 1);
            assert_eq!(v, analytic, "radius {r}");
        }
    }

    #[test]
    fn line_dimension_near_one() {
        // discretization inflates the slope at small radii; by radius 16
        // the fitted dimension sits within 0.1 of the ideal 1
        let img = synth::horizontal_line(512, 40, 20);
        let (dim, _) = minkowski_dimension::<f64>(&img, 16.0).unwrap();
        assert!((dim - 1.0).abs() < 0.1, "dim = {dim}");
    }

    #[test]
    fn carpet_dimension_between_line_and_plane() {
        let img = synth::sierpinski_carpet(5);
        let (dim, _) = minkowski_dimension::<f64>(&img, DEFAULT_MAX_RADIUS).unwrap();
        assert!(dim > 1.0 && (1.75..=2.0).contains(&dim), "dim = {dim}");
    }

    #[test]
    fn matches_disk_stamping_oracle() {
        for seed in 0..16 {
            let img = synth::random_binary(32, 32, 0.04, seed);
            let brute = dilation_volumes_brute(&img, DEFAULT_MAX_RADIUS).unwrap();
            let curve = minkowski_curve::<f64>(&img, DEFAULT_MAX_RADIUS).unwrap();
            let volumes: Vec<u64> = brute.iter().map(|&(_, v)| v).collect();
            assert_eq!(curve.volumes, volumes, "seed {seed}");
        }
    }

    #[test]
    fn small_max_radius_rejected() {
        let img = BinaryImage::filled(4, 4);
        assert!(minkowski_curve::<f64>(&img, 0.5).is_err());
        assert!(minkowski_dimension::<f64>(&img, 1.5).is_err());
    }
}
