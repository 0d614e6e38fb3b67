//! Reversible LeGall 5/3 integer lifting wavelet and the multi-level
//! subband pyramid it produces.
//!
//! One 1-D pass splits a signal into a lowpass half of `ceil(n/2)` samples
//! and a highpass half of `floor(n/2)` samples:
//!
//! ```text
//! d[i] = x[2i+1] - floor((x[2i] + x[2i+2]) / 2)
//! s[i] = x[2i]   + floor((d[i-1] + d[i] + 2) / 4)
//! ```
//!
//! with whole-sample symmetric extension at both ends. A 2-D level filters
//! rows, then columns, and recurses on the LL quadrant. All arithmetic wraps
//! on overflow, so the inverse is exact for any coefficient values, not just
//! those produced by [`forward`].

use std::fmt;

use num_traits::{PrimInt, Signed, WrappingAdd, WrappingSub};

use crate::error::{Error, Result};
use crate::imgio::{BitDepth, GrayImage};

pub const MAX_LEVELS: u8 = 8;
pub const DEFAULT_LEVELS: u8 = 3;

/// Integer types the lifting kernels operate on.
pub trait LiftingInt: PrimInt + Signed + WrappingAdd + WrappingSub {}

impl<T: PrimInt + Signed + WrappingAdd + WrappingSub> LiftingInt for T {}

#[inline]
fn two<T: LiftingInt>() -> T {
    T::one() + T::one()
}

/// Forward 5/3 lifting of `x` into `low` (`ceil(n/2)`) and `high` (`floor(n/2)`).
pub fn lift_forward<T: LiftingInt>(x: &[T], low: &mut [T], high: &mut [T]) {
    let n = x.len();
    let nl = n.div_ceil(2);
    let nh = n / 2;
    debug_assert!(low.len() == nl && high.len() == nh);
    if nh == 0 {
        low.copy_from_slice(x);
        return;
    }
    for i in 0..nh {
        let left = x[2 * i];
        let right = if 2 * i + 2 < n { x[2 * i + 2] } else { left };
        high[i] = x[2 * i + 1].wrapping_sub(&(left.wrapping_add(&right) >> 1));
    }
    for i in 0..nl {
        let dl = high[i.saturating_sub(1)];
        let dr = high[i.min(nh - 1)];
        low[i] = x[2 * i].wrapping_add(&(dl.wrapping_add(&dr).wrapping_add(&two()) >> 2));
    }
}

/// Exact inverse of [`lift_forward`].
pub fn lift_inverse<T: LiftingInt>(low: &[T], high: &[T], x: &mut [T]) {
    let n = x.len();
    let nl = n.div_ceil(2);
    let nh = n / 2;
    debug_assert!(low.len() == nl && high.len() == nh);
    if nh == 0 {
        x.copy_from_slice(low);
        return;
    }
    for i in 0..nl {
        let dl = high[i.saturating_sub(1)];
        let dr = high[i.min(nh - 1)];
        x[2 * i] = low[i].wrapping_sub(&(dl.wrapping_add(&dr).wrapping_add(&two()) >> 2));
    }
    for i in 0..nh {
        let left = x[2 * i];
        let right = if 2 * i + 2 < n { x[2 * i + 2] } else { left };
        x[2 * i + 1] = high[i].wrapping_add(&(left.wrapping_add(&right) >> 1));
    }
}

/// Subband orientation. `HL` is horizontally highpass, vertically lowpass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    LL,
    HL,
    LH,
    HH,
}

impl Orientation {
    pub const DETAIL: [Orientation; 3] = [Orientation::HL, Orientation::LH, Orientation::HH];

    /// Next detail orientation in the cycle HL -> LH -> HH -> HL.
    pub fn next_detail(self) -> Orientation {
        match self {
            Orientation::HL => Orientation::LH,
            Orientation::LH => Orientation::HH,
            Orientation::HH => Orientation::HL,
            Orientation::LL => Orientation::LL,
        }
    }

    fn detail_index(self) -> usize {
        match self {
            Orientation::LL => panic!("LL is not a detail orientation"),
            Orientation::HL => 0,
            Orientation::LH => 1,
            Orientation::HH => 2,
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Position and size of one band in a pyramid. Level 1 is the coarsest
/// detail level; the LL band is reported at level 1 as well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BandGeometry {
    pub level: u8,
    pub orientation: Orientation,
    pub rows: usize,
    pub cols: usize,
}

impl BandGeometry {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self) -> String {
        match self.orientation {
            Orientation::LL => "LL".to_string(),
            o => format!("{o}{}", self.level),
        }
    }
}

/// Band geometry of a pyramid, in coding order: LL, then for each level
/// from coarse to fine the HL, LH and HH bands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PyramidLayout {
    levels: u8,
    width: usize,
    height: usize,
    bands: Vec<BandGeometry>,
}

impl PyramidLayout {
    pub fn new(width: usize, height: usize, levels: u8) -> Result<Self> {
        if !(1..=MAX_LEVELS).contains(&levels) {
            return Err(Error::arg(format!("levels must be in 1..={MAX_LEVELS}, got {levels}")));
        }
        let min_side = 1usize << levels;
        if width < min_side || height < min_side {
            return Err(Error::arg(format!(
                "{width}x{height} image too small for {levels} levels (need at least {min_side} per side)"
            )));
        }
        // dims[k] = size of the LL region after k splits
        let mut dims = vec![(height, width)];
        for _ in 0..levels {
            let (h, w) = *dims.last().unwrap();
            dims.push((h.div_ceil(2), w.div_ceil(2)));
        }
        let (ll_h, ll_w) = dims[levels as usize];
        let mut bands = vec![BandGeometry {
            level: 1,
            orientation: Orientation::LL,
            rows: ll_h,
            cols: ll_w,
        }];
        for level in 1..=levels {
            let (h, w) = dims[(levels - level) as usize];
            let (lo_h, lo_w) = (h.div_ceil(2), w.div_ceil(2));
            let (hi_h, hi_w) = (h / 2, w / 2);
            for (orientation, rows, cols) in [
                (Orientation::HL, lo_h, hi_w),
                (Orientation::LH, hi_h, lo_w),
                (Orientation::HH, hi_h, hi_w),
            ] {
                bands.push(BandGeometry {
                    level,
                    orientation,
                    rows,
                    cols,
                });
            }
        }
        Ok(PyramidLayout {
            levels,
            width,
            height,
            bands,
        })
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bands(&self) -> &[BandGeometry] {
        &self.bands
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Coding-order index of a band. `LL` maps to 0 regardless of level.
    pub fn index_of(&self, level: u8, orientation: Orientation) -> Option<usize> {
        match orientation {
            Orientation::LL => Some(0),
            o if (1..=self.levels).contains(&level) => {
                Some(1 + 3 * (level as usize - 1) + o.detail_index())
            }
            _ => None,
        }
    }
}

/// One block of wavelet coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct Subband {
    pub level: u8,
    pub orientation: Orientation,
    pub rows: usize,
    pub cols: usize,
    pub coeffs: Vec<i32>,
}

impl fmt::Debug for Subband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subband({} level {}, {}x{})",
            self.orientation, self.level, self.rows, self.cols
        )
    }
}

impl Subband {
    pub fn new(geometry: BandGeometry, coeffs: Vec<i32>) -> Result<Self> {
        if coeffs.len() != geometry.len() {
            return Err(Error::inconsistent(format!(
                "band {} expects {} coefficients, got {}",
                geometry.label(),
                geometry.len(),
                coeffs.len()
            )));
        }
        Ok(Subband {
            level: geometry.level,
            orientation: geometry.orientation,
            rows: geometry.rows,
            cols: geometry.cols,
            coeffs,
        })
    }

    pub fn zeros(geometry: BandGeometry) -> Self {
        Subband {
            level: geometry.level,
            orientation: geometry.orientation,
            rows: geometry.rows,
            cols: geometry.cols,
            coeffs: vec![0; geometry.len()],
        }
    }

    pub fn geometry(&self) -> BandGeometry {
        BandGeometry {
            level: self.level,
            orientation: self.orientation,
            rows: self.rows,
            cols: self.cols,
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.coeffs[row * self.cols + col]
    }

    /// Value at a signed position, or 0 outside the band.
    #[inline]
    pub fn get_or_zero(&self, row: isize, col: isize) -> i32 {
        if row < 0 || col < 0 || row as usize >= self.rows || col as usize >= self.cols {
            0
        } else {
            self.coeffs[row as usize * self.cols + col as usize]
        }
    }
}

/// Integer wavelet coefficients of one image, bands in coding order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubbandPyramid {
    layout: PyramidLayout,
    depth: BitDepth,
    bands: Vec<Subband>,
}

impl SubbandPyramid {
    /// Assembles a pyramid from bands in coding order, checking them
    /// against the layout implied by the image geometry.
    pub fn from_bands(
        width: usize,
        height: usize,
        levels: u8,
        depth: BitDepth,
        bands: Vec<Subband>,
    ) -> Result<Self> {
        let layout = PyramidLayout::new(width, height, levels).map_err(|e| match e {
            Error::InvalidArgument(m) => Error::inconsistent(m),
            other => other,
        })?;
        if bands.len() != layout.band_count() {
            return Err(Error::inconsistent(format!(
                "pyramid with {levels} levels needs {} bands, got {}",
                layout.band_count(),
                bands.len()
            )));
        }
        for (i, (band, geom)) in bands.iter().zip(layout.bands()).enumerate() {
            if band.geometry() != *geom || band.coeffs.len() != geom.len() {
                return Err(Error::inconsistent(format!(
                    "band {i} is {:?}, expected {} {}x{}",
                    band,
                    geom.label(),
                    geom.rows,
                    geom.cols
                )));
            }
        }
        Ok(SubbandPyramid {
            layout,
            depth,
            bands,
        })
    }

    pub fn layout(&self) -> &PyramidLayout {
        &self.layout
    }

    pub fn levels(&self) -> u8 {
        self.layout.levels
    }

    pub fn width(&self) -> usize {
        self.layout.width
    }

    pub fn height(&self) -> usize {
        self.layout.height
    }

    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn bands(&self) -> &[Subband] {
        &self.bands
    }

    pub fn band(&self, index: usize) -> &Subband {
        &self.bands[index]
    }

    pub fn ll(&self) -> &Subband {
        &self.bands[0]
    }

    pub fn into_bands(self) -> Vec<Subband> {
        self.bands
    }
}

/// 2-D decomposition of a `rows x cols` block in place: rows first, then
/// columns, leaving the quadrants LL | HL / LH | HH.
fn analyze_block(buf: &mut [i32], stride: usize, rows: usize, cols: usize, scratch: &mut Vec<i32>) {
    let (lo_c, lo_r) = (cols.div_ceil(2), rows.div_ceil(2));
    scratch.resize(cols.max(rows) * 2, 0);
    for r in 0..rows {
        let row = &mut buf[r * stride..r * stride + cols];
        let (line, out) = scratch.split_at_mut(cols.max(rows));
        line[..cols].copy_from_slice(row);
        let (low, high) = out[..cols].split_at_mut(lo_c);
        lift_forward(&line[..cols], low, high);
        row.copy_from_slice(&out[..cols]);
    }
    for c in 0..cols {
        let (line, out) = scratch.split_at_mut(cols.max(rows));
        for r in 0..rows {
            line[r] = buf[r * stride + c];
        }
        let (low, high) = out[..rows].split_at_mut(lo_r);
        lift_forward(&line[..rows], low, high);
        for r in 0..rows {
            buf[r * stride + c] = out[r];
        }
    }
}

fn synthesize_block(buf: &mut [i32], stride: usize, rows: usize, cols: usize, scratch: &mut Vec<i32>) {
    let (lo_c, lo_r) = (cols.div_ceil(2), rows.div_ceil(2));
    scratch.resize(cols.max(rows) * 2, 0);
    for c in 0..cols {
        let (line, out) = scratch.split_at_mut(cols.max(rows));
        for r in 0..rows {
            line[r] = buf[r * stride + c];
        }
        let (low, high) = line[..rows].split_at(lo_r);
        lift_inverse(low, high, &mut out[..rows]);
        for r in 0..rows {
            buf[r * stride + c] = out[r];
        }
    }
    for r in 0..rows {
        let row = &mut buf[r * stride..r * stride + cols];
        let (line, out) = scratch.split_at_mut(cols.max(rows));
        line[..cols].copy_from_slice(row);
        let (low, high) = line[..cols].split_at(lo_c);
        lift_inverse(low, high, &mut out[..cols]);
        row.copy_from_slice(&out[..cols]);
    }
}

/// Decomposes `img` into `levels` wavelet levels (`3 * levels + 1` bands).
pub fn forward(img: &GrayImage, levels: u8) -> Result<SubbandPyramid> {
    let layout = PyramidLayout::new(img.width(), img.height(), levels)?;
    let stride = img.width();
    let mut buf: Vec<i32> = img.samples().iter().map(|&s| i32::from(s)).collect();
    let mut scratch = Vec::new();
    let (mut rows, mut cols) = (img.height(), img.width());
    for _ in 0..levels {
        analyze_block(&mut buf, stride, rows, cols, &mut scratch);
        rows = rows.div_ceil(2);
        cols = cols.div_ceil(2);
    }

    let mut bands = Vec::with_capacity(layout.band_count());
    for geom in layout.bands() {
        let (row0, col0) = match geom.orientation {
            Orientation::LL => (0, 0),
            o => {
                let (rows, cols) = level_region(&layout, geom.level);
                let (lo_r, lo_c) = (rows.div_ceil(2), cols.div_ceil(2));
                match o {
                    Orientation::HL => (0, lo_c),
                    Orientation::LH => (lo_r, 0),
                    _ => (lo_r, lo_c),
                }
            }
        };
        let mut coeffs = Vec::with_capacity(geom.len());
        for r in 0..geom.rows {
            let start = (row0 + r) * stride + col0;
            coeffs.extend_from_slice(&buf[start..start + geom.cols]);
        }
        bands.push(Subband::new(*geom, coeffs)?);
    }
    Ok(SubbandPyramid {
        layout,
        depth: img.depth(),
        bands,
    })
}

/// Size of the region split at `level` (level 1 = last split performed).
fn level_region(layout: &PyramidLayout, level: u8) -> (usize, usize) {
    let (mut h, mut w) = (layout.height, layout.width);
    for _ in 0..(layout.levels - level) {
        h = h.div_ceil(2);
        w = w.div_ceil(2);
    }
    (h, w)
}

/// Reconstructs raw integer samples from any pyramid, without range checks.
pub fn synthesize(pyr: &SubbandPyramid) -> Vec<i32> {
    let layout = &pyr.layout;
    let stride = layout.width;
    let mut buf = vec![0i32; layout.width * layout.height];
    let place = |band: &Subband, row0: usize, col0: usize, buf: &mut [i32]| {
        for r in 0..band.rows {
            let start = (row0 + r) * stride + col0;
            buf[start..start + band.cols].copy_from_slice(&band.coeffs[r * band.cols..(r + 1) * band.cols]);
        }
    };
    place(pyr.ll(), 0, 0, &mut buf);
    let mut scratch = Vec::new();
    for level in 1..=layout.levels {
        let (rows, cols) = level_region(layout, level);
        let (lo_r, lo_c) = (rows.div_ceil(2), cols.div_ceil(2));
        for (o, row0, col0) in [
            (Orientation::HL, 0, lo_c),
            (Orientation::LH, lo_r, 0),
            (Orientation::HH, lo_r, lo_c),
        ] {
            let idx = layout.index_of(level, o).unwrap();
            place(&pyr.bands[idx], row0, col0, &mut buf);
        }
        synthesize_block(&mut buf, stride, rows, cols, &mut scratch);
    }
    buf
}

/// Exact inverse of [`forward`]. Fails if a reconstructed sample falls
/// outside the pyramid's bit depth.
pub fn inverse(pyr: &SubbandPyramid) -> Result<GrayImage> {
    let raw = synthesize(pyr);
    let max = i32::from(pyr.depth.max_value());
    let mut samples = Vec::with_capacity(raw.len());
    for (i, v) in raw.into_iter().enumerate() {
        if !(0..=max).contains(&v) {
            return Err(Error::inconsistent(format!(
                "reconstructed sample {v} at index {i} outside {}-bit range",
                pyr.depth.bits()
            )));
        }
        samples.push(v as u16);
    }
    GrayImage::new(pyr.width(), pyr.height(), pyr.depth, samples)
}
