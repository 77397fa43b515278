//! Local binary pattern coding and threshold decomposition.
//!
//! Each pixel is compared against `P` neighbors sampled on a circle of
//! radius `R`; bit `p` of the code is set when the (bilinearly
//! interpolated) neighbor is >= the center. The code map is then sliced
//! into binary images by superlevel-set thresholding: bit = 1 iff the
//! pixel is valid and its code >= the level. Superlevel sets nest, so
//! the stack is monotone decreasing in the level.

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, GrayImage};

/// LBP sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LbpParams {
    /// Number of circularly sampled neighbors (4..=24).
    pub neighbors: u32,
    /// Sampling radius in pixels (> 0).
    pub radius: f64,
}

impl Default for LbpParams {
    fn default() -> Self {
        LbpParams {
            neighbors: 8,
            radius: 1.0,
        }
    }
}

impl LbpParams {
    pub fn new(neighbors: u32, radius: f64) -> Result<Self> {
        if !(4..=24).contains(&neighbors) {
            return Err(Error::InvalidParameter(format!(
                "neighbor count {neighbors} outside 4..=24"
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius {radius} must be positive"
            )));
        }
        Ok(LbpParams { neighbors, radius })
    }

    /// Largest representable code, `2^P - 1`.
    pub fn max_code(&self) -> u32 {
        (1u32 << self.neighbors) - 1
    }

    /// Width of the border band whose pixels lack a full neighborhood.
    pub fn border(&self) -> usize {
        self.radius.ceil() as usize
    }

    /// Default threshold levels: 31 evenly spaced levels over the code
    /// range, e.g. {8, 16, ..., 248} for P = 8.
    pub fn default_levels(&self) -> Vec<u32> {
        let stride = (1u32 << self.neighbors) / 32;
        (1..=31).map(|k| k * stride).collect()
    }
}

/// Per-pixel LBP codes plus the mask of pixels with a full neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LbpMap {
    width: usize,
    height: usize,
    max_code: u32,
    codes: Vec<u32>,
    valid: Vec<u8>,
}

impl LbpMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Largest code representable under the parameters that built this map.
    pub fn max_code(&self) -> u32 {
        self.max_code
    }

    /// Row-major codes; 0 wherever `valid` is 0.
    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    /// Row-major validity bits.
    pub fn valid(&self) -> &[u8] {
        &self.valid
    }

    #[inline]
    pub fn code(&self, x: usize, y: usize) -> u32 {
        self.codes[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x] != 0
    }
}

// Samples land on lattice points up to libm noise for cardinal angles;
// snap within this tolerance so exact-comparison semantics hold there.
const SNAP: f64 = 1e-6;

// An interpolated sample can equal the center exactly in real arithmetic
// (integer corner patterns cancel through w^2 = 1/2 at the diagonals).
// The smallest nonzero real gap for 8-bit inputs is ~1e-4, while float
// evaluation error stays below ~1e-12, so deciding "sample >= center"
// with this slack reproduces the exact rule including true ties.
const TIE_EPS: f64 = 1e-9;

/// Computes the LBP code map of `img`.
///
/// Neighbor `p` sits at angle `2*pi*p / P` from the +x axis, sweeping
/// through +y (image rows grow downward); off-lattice samples are
/// bilinearly interpolated. Bit `p` is set when the sample is >= the
/// center value, with real-arithmetic ties honored (see `TIE_EPS`).
pub fn lbp_map(img: &GrayImage, params: &LbpParams) -> Result<LbpMap> {
    let border = params.border();
    let min_side = 2 * border + 1;
    let (w, h) = (img.width(), img.height());
    if w < min_side || h < min_side {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min_width: min_side,
            min_height: min_side,
        });
    }

    let offsets = neighbor_offsets(params);
    let mut codes = vec![0u32; w * h];
    let mut valid = vec![0u8; w * h];
    for y in border..h - border {
        for x in border..w - border {
            let center = img.get(x, y) as f64;
            let mut code = 0u32;
            for (p, &(dx, dy)) in offsets.iter().enumerate() {
                let sample = sample_bilinear(img, x as f64 + dx, y as f64 + dy);
                if sample - center > -TIE_EPS {
                    code |= 1 << p;
                }
            }
            codes[y * w + x] = code;
            valid[y * w + x] = 1;
        }
    }
    Ok(LbpMap {
        width: w,
        height: h,
        max_code: params.max_code(),
        codes,
        valid,
    })
}

fn neighbor_offsets(params: &LbpParams) -> Vec<(f64, f64)> {
    let p_count = params.neighbors as usize;
    (0..p_count)
        .map(|p| {
            let angle = 2.0 * std::f64::consts::PI * p as f64 / p_count as f64;
            (snap(params.radius * angle.cos()), snap(params.radius * angle.sin()))
        })
        .collect()
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < SNAP {
        r
    } else {
        v
    }
}

/// Bilinear interpolation arranged so four equal corners reproduce the
/// corner value exactly and a constant intensity shift passes through
/// unchanged (the difference terms cancel it).
fn sample_bilinear(img: &GrayImage, sx: f64, sy: f64) -> f64 {
    let x0 = sx.floor();
    let y0 = sy.floor();
    let u = sx - x0;
    let v = sy - y0;
    let (xi, yi) = (x0 as usize, y0 as usize);
    let g00 = img.get(xi, yi) as f64;
    if u == 0.0 && v == 0.0 {
        return g00;
    }
    let x1 = if u == 0.0 { xi } else { xi + 1 };
    let y1 = if v == 0.0 { yi } else { yi + 1 };
    let g10 = img.get(x1, yi) as f64;
    let g01 = img.get(xi, y1) as f64;
    let g11 = img.get(x1, y1) as f64;
    g00 + u * (g10 - g00) + v * (g01 - g00) + u * v * (g00 + g11 - g10 - g01)
}

/// Slices the code map into one binary image per level (strictly
/// increasing levels). Bit = 1 iff the pixel is valid and its code >=
/// the level; invalid pixels are always 0.
pub fn threshold_stack(map: &LbpMap, levels: &[u32]) -> Result<Vec<BinaryImage>> {
    for pair in levels.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::InvalidParameter(format!(
                "levels must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    for &level in levels {
        if level > map.max_code {
            return Err(Error::LevelOutOfRange {
                level,
                max: map.max_code,
            });
        }
    }
    Ok(levels
        .iter()
        .map(|&level| {
            let bits = map
                .codes
                .iter()
                .zip(&map.valid)
                .map(|(&code, &ok)| u8::from(ok != 0 && code >= level))
                .collect();
            BinaryImage::new(map.width, map.height, bits)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Straight-line re-statement of the code definition, kept separate
    /// from the production sampling loop.
    fn oracle_code(img: &GrayImage, x: usize, y: usize, p_count: u32, radius: f64) -> u32 {
        let mut code = 0u32;
        for p in 0..p_count {
            let angle = 2.0 * std::f64::consts::PI * p as f64 / p_count as f64;
            let mut dx = radius * angle.cos();
            let mut dy = radius * angle.sin();
            if (dx - dx.round()).abs() < 1e-6 {
                dx = dx.round();
            }
            if (dy - dy.round()).abs() < 1e-6 {
                dy = dy.round();
            }
            let sx = x as f64 + dx;
            let sy = y as f64 + dy;
            let (x0, y0) = (sx.floor(), sy.floor());
            let (u, v) = (sx - x0, sy - y0);
            let (xi, yi) = (x0 as usize, y0 as usize);
            let at = |a: usize, b: usize| img.get(a, b) as f64;
            let (x1, y1) = (
                if u == 0.0 { xi } else { xi + 1 },
                if v == 0.0 { yi } else { yi + 1 },
            );
            // plain weighted-sum form of the bilinear interpolant
            let value = (1.0 - u) * (1.0 - v) * at(xi, yi)
                + u * (1.0 - v) * at(x1, yi)
                + (1.0 - u) * v * at(xi, y1)
                + u * v * at(x1, y1);
            if value - img.get(x, y) as f64 > -1e-9 {
                code |= 1 << p;
            }
        }
        code
    }

    #[test]
    fn constant_image_codes_all_ones() {
        let img = GrayImage::filled(8, 6, 128);
        let map = lbp_map(&img, &LbpParams::default()).unwrap();
        for y in 0..6 {
            for x in 0..8 {
                if map.is_valid(x, y) {
                    assert_eq!(map.code(x, y), 255, "at ({x},{y})");
                } else {
                    assert_eq!(map.code(x, y), 0);
                }
            }
        }
    }

    #[test]
    fn border_band_invalid() {
        let img = GrayImage::filled(5, 5, 9);
        let map = lbp_map(&img, &LbpParams::new(8, 1.5).unwrap()).unwrap();
        // ceil(1.5) = 2 -> only the center pixel has a full neighborhood
        let valids: usize = map.valid().iter().map(|&v| v as usize).sum();
        assert_eq!(valids, 1);
        assert!(map.is_valid(2, 2));
    }

    #[test]
    fn p4_lattice_bit_order() {
        // P=4 samples the lattice points E, S, W, N: bit p weights 1,2,4,8.
        #[rustfmt::skip]
        let img = GrayImage::new(3, 3, vec![
            0, 3, 0,
            9, 5, 6,
            0, 1, 0,
        ]);
        let map = lbp_map(&img, &LbpParams::new(4, 1.0).unwrap()).unwrap();
        // E=6>=5 -> 1, S=1<5 -> 0, W=9>=5 -> 4, N=3<5 -> 0
        assert_eq!(map.code(1, 1), 5);
    }

    #[test]
    fn p8_center_code_matches_hand_oracle() {
        // Lattice neighbors E,S,W,N = 6,7,9,8 (all >= 5, bits 0,2,4,6);
        // diagonal samples are interpolated. Expected value frozen from
        // the independent oracle above.
        #[rustfmt::skip]
        let img = GrayImage::new(3, 3, vec![
            3, 8, 0,
            9, 5, 6,
            2, 7, 1,
        ]);
        let expected = oracle_code(&img, 1, 1, 8, 1.0);
        assert_eq!(expected, 117); // 1+4+16+64 from the cardinals, +32 from the NW diagonal
        let map = lbp_map(&img, &LbpParams::new(8, 1.0).unwrap()).unwrap();
        assert_eq!(map.code(1, 1), expected);
    }

    #[test]
    fn too_small_image_rejected() {
        let img = GrayImage::filled(2, 5, 1);
        match lbp_map(&img, &LbpParams::default()) {
            Err(Error::ImageTooSmall { .. }) => {}
            other => panic!("expected ImageTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn threshold_stack_levels() {
        let img = GrayImage::filled(6, 6, 128);
        let map = lbp_map(&img, &LbpParams::default()).unwrap();
        let stack = threshold_stack(&map, &[64, 128, 192]).unwrap();
        assert_eq!(stack.len(), 3);
        // codes are 255 on the valid region, so all three slices equal it
        for s in &stack {
            assert_eq!(s.data(), map.valid());
        }
        // level 0 degenerates to the valid region too
        let zero = threshold_stack(&map, &[0]).unwrap();
        assert_eq!(zero[0].data(), map.valid());
    }

    #[test]
    fn threshold_stack_rejects_bad_levels() {
        let img = GrayImage::filled(4, 4, 7);
        let map = lbp_map(&img, &LbpParams::default()).unwrap();
        assert!(matches!(
            threshold_stack(&map, &[300]),
            Err(Error::LevelOutOfRange { level: 300, max: 255 })
        ));
        assert!(matches!(
            threshold_stack(&map, &[10, 10]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn default_levels_p8() {
        let p = LbpParams::default();
        let levels = p.default_levels();
        assert_eq!(levels.len(), 31);
        assert_eq!(levels[0], 8);
        assert_eq!(levels[30], 248);
    }

    fn arb_image(max_value: u8) -> impl Strategy<Value = GrayImage> {
        (3usize..10, 3usize..10).prop_flat_map(move |(w, h)| {
            proptest::collection::vec(0..=max_value, w * h)
                .prop_map(move |data| GrayImage::new(w, h, data))
        })
    }

    proptest! {
        #[test]
        fn gray_shift_invariance(img in arb_image(200), c in 0u8..55) {
            let shifted = GrayImage::new(
                img.width(),
                img.height(),
                img.data().iter().map(|&v| v + c).collect(),
            );
            let params = LbpParams::default();
            let a = lbp_map(&img, &params).unwrap();
            let b = lbp_map(&shifted, &params).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn p4_codes_within_range(img in arb_image(255)) {
            let map = lbp_map(&img, &LbpParams::new(4, 1.0).unwrap()).unwrap();
            prop_assert!(map.codes().iter().all(|&c| c <= 15));
        }

        #[test]
        fn codes_match_oracle(img in arb_image(255)) {
            let params = LbpParams::default();
            let map = lbp_map(&img, &params).unwrap();
            for y in 1..img.height() - 1 {
                for x in 1..img.width() - 1 {
                    prop_assert_eq!(map.code(x, y), oracle_code(&img, x, y, 8, 1.0));
                }
            }
        }

        #[test]
        fn stack_nesting(img in arb_image(255), l1 in 1u32..120, l2 in 121u32..255) {
            let map = lbp_map(&img, &LbpParams::default()).unwrap();
            let stack = threshold_stack(&map, &[l1, l2]).unwrap();
            for (x, y) in stack[1].white_pixels() {
                prop_assert!(stack[0].get(x, y));
            }
        }
    }
}
