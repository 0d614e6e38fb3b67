//! Grayscale image container, binary PGM (P5) and headerless raw I/O, and
//! deterministic synthetic phantoms used as a test corpus.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sample precision of a [`GrayImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

impl BitDepth {
    pub fn bits(self) -> u8 {
        match self {
            BitDepth::Eight => 8,
            BitDepth::Sixteen => 16,
        }
    }

    pub fn max_value(self) -> u16 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => u16::MAX,
        }
    }

    pub fn from_bits(bits: u8) -> Option<Self> {
        match bits {
            8 => Some(BitDepth::Eight),
            16 => Some(BitDepth::Sixteen),
            _ => None,
        }
    }

    fn bytes_per_sample(self) -> usize {
        match self {
            BitDepth::Eight => 1,
            BitDepth::Sixteen => 2,
        }
    }
}

/// A row-major grid of unsigned samples, every one within `[0, 2^depth - 1]`.
#[derive(Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    depth: BitDepth,
    samples: Vec<u16>,
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("depth", &self.depth)
            .finish_non_exhaustive()
    }
}

impl GrayImage {
    pub fn new(width: usize, height: usize, depth: BitDepth, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::arg(format!("image dimensions must be positive, got {width}x{height}")));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::arg("image dimensions overflow"))?;
        if samples.len() != expected {
            return Err(Error::arg(format!(
                "expected {expected} samples for {width}x{height}, got {}",
                samples.len()
            )));
        }
        let max = depth.max_value();
        if let Some(pos) = samples.iter().position(|&s| s > max) {
            return Err(Error::arg(format!(
                "sample {} at index {pos} exceeds {}-bit range",
                samples[pos],
                depth.bits()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            depth,
            samples,
        })
    }

    /// Builds an image by evaluating `f(row, col)` at every position.
    pub fn from_fn(
        width: usize,
        height: usize,
        depth: BitDepth,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::new(width, height, depth, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u16> {
        self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> u16 {
        self.samples[row * self.width + col]
    }

    pub fn pixel_count(&self) -> usize {
        self.samples.len()
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .filter(|&v| v <= u64::from(u32::MAX))
                .ok_or_else(|| Error::format(start, format!("{what} is too large")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format(start, format!("expected decimal {what}")));
        }
        Ok(value)
    }
}

/// Parses a binary PGM (P5) stream with maxval 255 or 65535.
///
/// Header comments are skipped. Bytes after the first image are ignored.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::format(0, "missing P5 magic"));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(Error::format(2, "expected whitespace after magic")),
    }
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_whitespace_and_comments();
    let maxval_offset = cur.pos;
    let maxval = cur.number("maxval")?;
    let depth = match maxval {
        255 => BitDepth::Eight,
        65535 => BitDepth::Sixteen,
        other => {
            return Err(Error::format(
                maxval_offset,
                format!("unsupported maxval {other} (expected 255 or 65535)"),
            ))
        }
    };
    if width == 0 || height == 0 {
        return Err(Error::format(3, format!("zero image dimension {width}x{height}")));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::format(cur.pos, "expected single whitespace before raster")),
    }
    let data_start = cur.pos;
    let count = (width as usize)
        .checked_mul(height as usize)
        .ok_or_else(|| Error::format(3, "image dimensions overflow"))?;
    let needed = count
        .checked_mul(depth.bytes_per_sample())
        .ok_or_else(|| Error::format(3, "image dimensions overflow"))?;
    let available = bytes.len() - data_start;
    if available < needed {
        return Err(Error::format(
            bytes.len(),
            format!("truncated raster: need {needed} bytes after offset {data_start}, have {available}"),
        ));
    }
    let raster = &bytes[data_start..data_start + needed];
    let samples = decode_samples(raster, depth);
    GrayImage::new(width as usize, height as usize, depth, samples).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::format(data_start, m),
        other => other,
    })
}

/// Serializes an image as binary PGM without comments.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n{}\n", img.width, img.height, img.depth.max_value());
    let mut out = Vec::with_capacity(header.len() + img.samples.len() * img.depth.bytes_per_sample());
    out.extend_from_slice(header.as_bytes());
    encode_samples(&img.samples, img.depth, &mut out);
    out
}

/// Reads headerless samples (16-bit samples big-endian, like PGM).
pub fn read_raw(bytes: &[u8], width: usize, height: usize, depth: BitDepth) -> Result<GrayImage> {
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(depth.bytes_per_sample()))
        .ok_or_else(|| Error::arg("image dimensions overflow"))?;
    if bytes.len() != needed {
        return Err(Error::format(
            bytes.len().min(needed),
            format!("raw stream has {} bytes, expected {needed}", bytes.len()),
        ));
    }
    GrayImage::new(width, height, depth, decode_samples(bytes, depth))
}

pub fn write_raw(img: &GrayImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.samples.len() * img.depth.bytes_per_sample());
    encode_samples(&img.samples, img.depth, &mut out);
    out
}

fn decode_samples(raster: &[u8], depth: BitDepth) -> Vec<u16> {
    match depth {
        BitDepth::Eight => raster.iter().map(|&b| u16::from(b)).collect(),
        BitDepth::Sixteen => raster
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]))
            .collect(),
    }
}

fn encode_samples(samples: &[u16], depth: BitDepth, out: &mut Vec<u8>) {
    match depth {
        BitDepth::Eight => out.extend(samples.iter().map(|&s| s as u8)),
        BitDepth::Sixteen => {
            for &s in samples {
                out.extend_from_slice(&s.to_be_bytes());
            }
        }
    }
}

/// Synthetic test image families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomKind {
    Constant,
    Ramp,
    GaussianBlob,
    SmoothNoise,
}

impl PhantomKind {
    pub const ALL: [PhantomKind; 4] = [
        PhantomKind::Constant,
        PhantomKind::Ramp,
        PhantomKind::GaussianBlob,
        PhantomKind::SmoothNoise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PhantomKind::Constant => "constant",
            PhantomKind::Ramp => "ramp",
            PhantomKind::GaussianBlob => "gaussian_blob",
            PhantomKind::SmoothNoise => "smooth_noise",
        }
    }
}

impl fmt::Display for PhantomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhantomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhantomKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown phantom kind {s:?}")))
    }
}

/// Generates an 8-bit synthetic image. Output depends only on the
/// arguments; all arithmetic is integer or correctly rounded IEEE
/// operations, so results match across platforms.
pub fn make_phantom(kind: PhantomKind, width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    if width < 8 || height < 8 {
        return Err(Error::arg(format!("phantom must be at least 8x8, got {width}x{height}")));
    }
    let depth = BitDepth::Eight;
    match kind {
        PhantomKind::Constant => GrayImage::from_fn(width, height, depth, |_, _| 128),
        PhantomKind::Ramp => GrayImage::from_fn(width, height, depth, |r, c| ((r + c) % 256) as u16),
        PhantomKind::GaussianBlob => gaussian_blob(width, height),
        PhantomKind::SmoothNoise => smooth_noise(width, height, seed),
    }
}

fn gaussian_blob(width: usize, height: usize) -> Result<GrayImage> {
    // exp(-t) approximated by (1 - t/256)^256 via eight squarings; uses only
    // +, -, *, / so the result is bit-reproducible.
    let sigma = width.min(height) as f64 / 4.0;
    let cy = (height as f64 - 1.0) / 2.0;
    let cx = (width as f64 - 1.0) / 2.0;
    GrayImage::from_fn(width, height, BitDepth::Eight, |r, c| {
        let dy = r as f64 - cy;
        let dx = c as f64 - cx;
        let t = (dx * dx + dy * dy) / (2.0 * sigma * sigma);
        let mut g = 1.0 - t / 256.0;
        if g < 0.0 {
            g = 0.0;
        }
        for _ in 0..8 {
            g *= g;
        }
        let v = 16.0 + 224.0 * g;
        (v + 0.5) as u16
    })
}

fn smooth_noise(width: usize, height: usize, seed: u64) -> Result<GrayImage> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<i32> = (0..width * height).map(|_| (rng.next_u32() >> 24) as i32).collect();
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, height as isize - 1) as usize;
        let c = c.clamp(0, width as isize - 1) as usize;
        noise[r * width + c]
    };
    GrayImage::from_fn(width, height, BitDepth::Eight, |r, c| {
        let mut sum = 0;
        for dr in -2..=2 {
            for dc in -2..=2 {
                sum += at(r as isize + dr, c as isize + dc);
            }
        }
        ((sum + 12) / 25).clamp(0, 255) as u16
    })
}
