//! Grayscale and binary raster types plus PGM/PNG ingestion.
//!
//! Supported file formats: PGM `P2`/`P5` with maxval 255, and 8-bit PNG
//! (gray, gray+alpha, RGB, RGBA). Color pixels are reduced by ITU-R 601
//! luminance `0.299 R + 0.587 G + 0.114 B`, rounded half up; the rounding
//! is done in integer arithmetic so results are identical everywhere.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height, "data length must be w*h");
        GrayImage {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage::new(width, height, vec![value; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    /// Binary image with bit = 1 wherever the pixel value is >= `t`.
    pub fn to_binary_geq(&self, t: u8) -> BinaryImage {
        let bits = self.data.iter().map(|&v| u8::from(v >= t)).collect();
        BinaryImage::new(self.width, self.height, bits)
    }
}

/// Binary raster of points of interest (1 = white point), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryImage {
    /// `data` entries must be 0 or 1.
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height, "data length must be w*h");
        debug_assert!(data.iter().all(|&b| b <= 1), "binary data must be 0/1");
        BinaryImage {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize) -> Self {
        BinaryImage::new(width, height, vec![1; width * height])
    }

    pub fn empty(width: usize, height: usize) -> Self {
        BinaryImage::new(width, height, vec![0; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    pub fn count_white(&self) -> usize {
        self.data.iter().filter(|&&b| b != 0).count()
    }

    /// Coordinates of white pixels in row-major order.
    pub fn white_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.data
            .iter()
            .enumerate()
            .filter(|(_, &b)| b != 0)
            .map(move |(i, _)| (i % w, i / w))
    }
}

/// Thresholds an arbitrary integer raster: bit = 1 iff value >= `t`.
pub fn to_binary_geq(width: usize, height: usize, values: &[u32], t: u32) -> BinaryImage {
    assert_eq!(values.len(), width * height);
    let bits = values.iter().map(|&v| u8::from(v >= t)).collect();
    BinaryImage::new(width, height, bits)
}

/// ITU-R 601 luminance of an RGB triple, rounded half up.
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let num = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((num + 500) / 1000) as u8
}

/// Loads a grayscale image from a PGM (P2/P5) or PNG file, keyed on content.
pub fn load_gray(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::from_io(path, e))?;
    match bytes.first() {
        Some(b'P') => parse_pgm(&bytes),
        Some(0x89) => decode_png(&bytes),
        _ => Err(Error::UnsupportedFormat(format!(
            "{}: not a PGM or PNG file",
            path.display()
        ))),
    }
}

/// Writes `img` as a binary (P5) PGM with maxval 255.
pub fn save_pgm(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(img.data.len() + 32);
    write!(out, "P5\n{} {}\n255\n", img.width, img.height).expect("vec write");
    out.extend_from_slice(&img.data);
    fs::write(path, out).map_err(|e| Error::from_io(path, e))
}

/// Serializes `img` as an ASCII (P2) PGM.
pub fn encode_pgm_ascii(img: &GrayImage) -> String {
    let mut s = format!("P2\n{} {}\n255\n", img.width, img.height);
    for row in img.data.chunks(img.width) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let magic = bytes.get(..2).ok_or_else(|| corrupt("file shorter than magic"))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(Error::UnsupportedFormat(format!(
                "PNM magic {:?} (only P2/P5 grayscale supported)",
                String::from_utf8_lossy(magic)
            )))
        }
    };
    let mut pos = 2;
    let width = read_header_int(bytes, &mut pos)?;
    let height = read_header_int(bytes, &mut pos)?;
    let maxval = read_header_int(bytes, &mut pos)?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!(
            "maxval {maxval} (only 8-bit PGM supported)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(corrupt("zero image dimension"));
    }
    let npix = width * height;
    let data = if binary {
        // Exactly one whitespace byte separates the header from the payload.
        pos += 1;
        let payload = bytes
            .get(pos..pos + npix)
            .ok_or_else(|| corrupt("truncated P5 payload"))?;
        payload.to_vec()
    } else {
        let mut data = Vec::with_capacity(npix);
        for _ in 0..npix {
            let v = read_header_int(bytes, &mut pos)?;
            if v > maxval {
                return Err(corrupt(&format!("sample {v} exceeds maxval {maxval}")));
            }
            data.push(v as u8);
        }
        data
    };
    Ok(GrayImage::new(width, height, data))
}

/// Reads one whitespace/comment-delimited unsigned integer from a PNM header.
fn read_header_int(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_digit() => break,
            Some(b) => return Err(corrupt(&format!("unexpected byte 0x{b:02x} in header"))),
            None => return Err(corrupt("unexpected end of file in header")),
        }
    }
    let mut value: usize = 0;
    while let Some(b) = bytes.get(*pos) {
        if !b.is_ascii_digit() {
            break;
        }
        value = value
            .checked_mul(10)
            .and_then(|v| v.checked_add((b - b'0') as usize))
            .ok_or_else(|| corrupt("integer overflow in header"))?;
        *pos += 1;
    }
    Ok(value)
}

fn corrupt(msg: &str) -> Error {
    Error::CorruptHeader(msg.to_string())
}

fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::CorruptHeader(format!("png: {e}")))?;
    let mut buf = vec![
        0u8;
        reader
            .output_buffer_size()
            .ok_or_else(|| corrupt("png: output size overflow"))?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::CorruptHeader(format!("png: {e}")))?;
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "png bit depth {:?} (only 8-bit supported)",
            info.bit_depth
        )));
    }
    let (width, height) = (info.width as usize, info.height as usize);
    let pixels = &buf[..info.buffer_size()];
    let data: Vec<u8> = match info.color_type {
        png::ColorType::Grayscale => pixels.to_vec(),
        png::ColorType::GrayscaleAlpha => pixels.chunks_exact(2).map(|p| p[0]).collect(),
        png::ColorType::Rgb => pixels
            .chunks_exact(3)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect(),
        png::ColorType::Rgba => pixels
            .chunks_exact(4)
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect(),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "png color type {other:?}"
            )))
        }
    };
    Ok(GrayImage::new(width, height, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_temp(name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("texfrac-raster-tests");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        fs::write(&path, bytes).unwrap();
        path
    }

    #[test]
    fn p2_identity_read() {
        let path = write_temp("tiny.pgm", b"P2\n2 2\n255\n0 10\n20 255\n");
        let img = load_gray(&path).unwrap();
        assert_eq!(img.width(), 2);
        assert_eq!(img.height(), 2);
        assert_eq!(img.data(), &[0, 10, 20, 255]);
    }

    #[test]
    fn p2_with_comments() {
        let path = write_temp("comment.pgm", b"P2\n# a comment\n2 1 # trailing\n255\n7 9\n");
        let img = load_gray(&path).unwrap();
        assert_eq!(img.data(), &[7, 9]);
    }

    #[test]
    fn truncated_p5_is_corrupt() {
        let path = write_temp("trunc.pgm", b"P5\n4 4\n255\n\x01\x02\x03");
        match load_gray(&path) {
            Err(Error::CorruptHeader(_)) => {}
            other => panic!("expected CorruptHeader, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_file_not_found() {
        match load_gray("/nonexistent/texfrac/file.pgm") {
            Err(Error::FileNotFound(_)) => {}
            other => panic!("expected FileNotFound, got {other:?}"),
        }
    }

    fn write_png(name: &str, width: u32, height: u32, color: png::ColorType, data: &[u8]) -> std::path::PathBuf {
        let mut bytes = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut bytes, width, height);
            enc.set_color(color);
            enc.set_depth(png::BitDepth::Eight);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        write_temp(name, &bytes)
    }

    #[test]
    fn rgb_png_luminance() {
        let path = write_png(
            "rgb.png",
            2,
            1,
            png::ColorType::Rgb,
            &[255, 255, 255, 255, 0, 0],
        );
        let img = load_gray(&path).unwrap();
        // white -> 255; pure red -> round(0.299 * 255) = round(76.245) = 76
        assert_eq!(img.data(), &[255, 76]);
    }

    #[test]
    fn gray_png_identity() {
        let path = write_png("gray.png", 3, 1, png::ColorType::Grayscale, &[0, 128, 255]);
        let img = load_gray(&path).unwrap();
        assert_eq!(img.data(), &[0, 128, 255]);
    }

    #[test]
    fn luminance_matches_float_rule() {
        // reference: round-half-up of the floating ITU-R 601 formula
        for &(r, g, b) in &[(255u8, 255u8, 255u8), (255, 0, 0), (0, 255, 0), (0, 0, 255), (12, 200, 33)] {
            let f = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
            assert_eq!(luminance(r, g, b), (f + 0.5).floor() as u8, "rgb ({r},{g},{b})");
        }
    }

    #[test]
    fn threshold_geq_examples() {
        let vals = [0u32, 5, 10];
        assert_eq!(to_binary_geq(3, 1, &vals, 0).data(), &[1, 1, 1]);
        assert_eq!(to_binary_geq(3, 1, &vals, 6).data(), &[0, 0, 1]);
        assert_eq!(to_binary_geq(3, 1, &vals, 11).data(), &[0, 0, 0]);

        let img = GrayImage::new(3, 1, vec![0, 5, 10]);
        assert_eq!(img.to_binary_geq(6).data(), &[0, 0, 1]);
    }

    proptest! {
        #[test]
        fn pgm_round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let mut v = seed;
            let data: Vec<u8> = (0..w * h)
                .map(|_| {
                    v = v.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (v >> 33) as u8
                })
                .collect();
            let img = GrayImage::new(w, h, data);

            let p5 = write_temp(&format!("rt-{w}x{h}-{seed}.pgm"), &[]);
            save_pgm(&img, &p5).unwrap();
            prop_assert_eq!(&load_gray(&p5).unwrap(), &img);

            let p2 = write_temp(&format!("rt-ascii-{w}x{h}-{seed}.pgm"), encode_pgm_ascii(&img).as_bytes());
            prop_assert_eq!(&load_gray(&p2).unwrap(), &img);
        }

        #[test]
        fn threshold_monotone(values in proptest::collection::vec(0u32..300, 1..64), t1 in 0u32..300, t2 in 0u32..300) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            let w = values.len();
            let a = to_binary_geq(w, 1, &values, lo);
            let b = to_binary_geq(w, 1, &values, hi);
            // the hi-threshold 1-set is a subset of the lo-threshold 1-set
            for (x, y) in b.white_pixels() {
                prop_assert!(a.get(x, y));
            }
        }
    }
}
