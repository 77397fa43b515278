//! Synthetic rasters with known structure: analytic fixtures for the
//! fractal estimators and texture generators for end-to-end runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{BinaryImage, GrayImage};

/// Seeded generator; `stream` separates independent uses of one seed.
fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Sierpinski carpet after `iterations` subdivision steps:
/// a 3^n x 3^n image where a pixel is white unless some base-3 digit
/// pair of its coordinates is (1, 1).
pub fn sierpinski_carpet(iterations: u32) -> BinaryImage {
    let side = 3usize.pow(iterations);
    let mut data = vec![0u8; side * side];
    for y in 0..side {
        for x in 0..side {
            let (mut a, mut b) = (x, y);
            let mut keep = true;
            while a > 0 || b > 0 {
                if a % 3 == 1 && b % 3 == 1 {
                    keep = false;
                    break;
                }
                a /= 3;
                b /= 3;
            }
            data[y * side + x] = u8::from(keep);
        }
    }
    BinaryImage::new(side, side, data)
}

/// Single white row at `row`.
pub fn horizontal_line(width: usize, height: usize, row: usize) -> BinaryImage {
    let mut data = vec![0u8; width * height];
    data[row * width..(row + 1) * width].fill(1);
    BinaryImage::new(width, height, data)
}

/// One white pixel at `(x, y)`.
pub fn single_point(width: usize, height: usize, x: usize, y: usize) -> BinaryImage {
    let mut data = vec![0u8; width * height];
    data[y * width + x] = 1;
    BinaryImage::new(width, height, data)
}

/// I.i.d. Bernoulli(p) field.
pub fn bernoulli(width: usize, height: usize, p: f64, seed: u64) -> BinaryImage {
    let mut r = rng(seed, 0);
    let data = (0..width * height)
        .map(|_| u8::from(r.random::<f64>() < p))
        .collect();
    BinaryImage::new(width, height, data)
}

/// Checkerboard of `low`/`high` squares with the given period (cell side).
pub fn checkerboard(width: usize, height: usize, period: usize, low: u8, high: u8) -> GrayImage {
    let data = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            if (x / period + y / period).is_multiple_of(2) {
                high
            } else {
                low
            }
        })
        .collect();
    GrayImage::new(width, height, data)
}

/// Horizontal stripes of `low`/`high` bands with the given period.
pub fn horizontal_stripes(width: usize, height: usize, period: usize, low: u8, high: u8) -> GrayImage {
    let data = (0..width * height)
        .map(|i| if (i / width / period).is_multiple_of(2) { high } else { low })
        .collect();
    GrayImage::new(width, height, data)
}

/// Adds centered Gaussian noise (Box-Muller, seeded) and clamps to u8.
pub fn add_gaussian_noise(img: &GrayImage, sigma: f64, seed: u64) -> GrayImage {
    let mut r = rng(seed, 1);
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let u1: f64 = r.random::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = r.random();
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (v as f64 + sigma * z).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    GrayImage::new(img.width(), img.height(), data)
}

/// I.i.d. uniform intensities over 0..=255.
pub fn uniform_noise(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut r = rng(seed, 2);
    let data = (0..width * height).map(|_| r.random::<u8>()).collect();
    GrayImage::new(width, height, data)
}

/// Random binary image with the given white density; never empty
/// (forces one white pixel if the draw came out blank).
pub fn random_binary(width: usize, height: usize, density: f64, seed: u64) -> BinaryImage {
    let mut r = rng(seed, 3);
    let mut data: Vec<u8> = (0..width * height)
        .map(|_| u8::from(r.random::<f64>() < density))
        .collect();
    if data.iter().all(|&b| b == 0) {
        let i = r.random_range(0..data.len());
        data[i] = 1;
    }
    BinaryImage::new(width, height, data)
}
