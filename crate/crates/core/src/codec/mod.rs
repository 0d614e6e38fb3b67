//! The full pipeline: wavelet analysis, per-band prediction, LL DPCM and
//! range coding into a [`Container`], and back.

mod analysis;
mod container;
mod report;

pub use analysis::{analyze, Analysis, BandAnalysis};
pub use container::{Container, HEADER_LEN, MAGIC, VERSION};
pub use report::{measure, BandReport, Report};

use crate::entropy::codelength::{adaptive_cost_q32, order0_cost_of_values, ONE_BIT};
use crate::entropy::{ac_decode, ac_encode, SymbolStream};
use crate::error::{Error, Result};
use crate::imgio::GrayImage;
use crate::lifting::{self, Subband, SubbandPyramid, DEFAULT_LEVELS, MAX_LEVELS};
use crate::prediction::{
    decode_band, dpcm_decode, dpcm_encode, extract_context, residuals, select_predictors, ContextMatrix,
    PredictionModel, ResidualPlane, SelectionMode, COEFF_BITS, MASK_BITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecConfig {
    pub levels: u8,
    pub selection: SelectionMode,
    /// When false every detail band uses the zero model.
    pub predict: bool,
}

impl Default for CodecConfig {
    fn default() -> Self {
        CodecConfig {
            levels: DEFAULT_LEVELS,
            selection: SelectionMode::Greedy,
            predict: true,
        }
    }
}

impl CodecConfig {
    pub fn with_levels(self, levels: u8) -> Self {
        CodecConfig { levels, ..self }
    }

    pub fn with_selection(self, selection: SelectionMode) -> Self {
        CodecConfig { selection, ..self }
    }

    pub fn without_prediction(self) -> Self {
        CodecConfig { predict: false, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_LEVELS).contains(&self.levels) {
            return Err(Error::arg(format!("levels must be in 1..={MAX_LEVELS}, got {}", self.levels)));
        }
        Ok(())
    }
}

/// Coding decision for one detail band.
#[derive(Debug, Clone)]
pub(crate) struct BandCoding {
    pub model: PredictionModel,
    pub residuals: Vec<i32>,
    pub stream: SymbolStream,
}

impl BandCoding {
    /// Ideal adaptive code length plus the model record, in Q32 bits.
    fn cost(&self) -> u128 {
        adaptive_cost_q32(&self.stream) + (MASK_BITS + COEFF_BITS * self.model.mask().count() as u128) * ONE_BIT
    }
}

fn coding_for(ctx: &ContextMatrix, model: PredictionModel) -> Option<BandCoding> {
    let residuals = residuals(ctx, &model)
        .into_iter()
        .map(i32::try_from)
        .collect::<Result<Vec<i32>, _>>()
        .ok()?;
    let stream = SymbolStream::from_residuals(&residuals);
    Some(BandCoding { model, residuals, stream })
}

/// Picks the model for a band. The selected model is kept only if its
/// residuals fit the symbol alphabet's range and it does not cost more
/// under the adaptive coder than coding the band unpredicted.
pub(crate) fn code_band(ctx: &ContextMatrix, cfg: &CodecConfig) -> BandCoding {
    let zero = coding_for(ctx, PredictionModel::zero()).expect("band values are 32-bit");
    if !cfg.predict {
        return zero;
    }
    let model = select_predictors(ctx, cfg.selection).model;
    if model.is_zero() {
        return zero;
    }
    match coding_for(ctx, model) {
        Some(pred) if pred.cost() < zero.cost() => pred,
        _ => zero,
    }
}

pub(crate) struct Encoded {
    pub container: Container,
    pub pyramid: SubbandPyramid,
    pub bands: Vec<BandCoding>,
    pub ll: ResidualPlane,
}

pub(crate) fn encode(img: &GrayImage, cfg: &CodecConfig) -> Result<Encoded> {
    cfg.validate()?;
    let pyr = lifting::forward(img, cfg.levels)?;
    let ll = dpcm_encode(pyr.ll())?;
    let ll_values = ll
        .residuals
        .iter()
        .map(|&d| i32::try_from(d))
        .collect::<Result<Vec<i32>, _>>()
        .map_err(|_| Error::inconsistent("LL difference exceeds the 32-bit range"))?;
    let mut bands = Vec::with_capacity(pyr.layout().band_count() - 1);
    for band in 1..pyr.layout().band_count() {
        let ctx = extract_context(&pyr, band)?;
        bands.push(code_band(&ctx, cfg));
    }
    let mut streams = Vec::with_capacity(bands.len() + 1);
    streams.push(SymbolStream::from_residuals(&ll_values));
    streams.extend(bands.iter().map(|b| b.stream.clone()));
    let container = Container {
        depth: img.depth(),
        levels: cfg.levels,
        width: u32::try_from(img.width()).map_err(|_| Error::arg("image width exceeds 32 bits"))?,
        height: u32::try_from(img.height()).map_err(|_| Error::arg("image height exceeds 32 bits"))?,
        models: bands.iter().map(|b| b.model.clone()).collect(),
        payload: ac_encode(&streams),
    };
    Ok(Encoded {
        container,
        pyramid: pyr,
        bands,
        ll,
    })
}

pub fn compress(img: &GrayImage, cfg: &CodecConfig) -> Result<Container> {
    encode(img, cfg).map(|e| e.container)
}

pub fn compress_to_bytes(img: &GrayImage, cfg: &CodecConfig) -> Result<Vec<u8>> {
    compress(img, cfg).map(|c| c.to_bytes())
}

pub fn decompress(c: &Container) -> Result<GrayImage> {
    let layout = c.layout().map_err(|e| Error::format(7, e.to_string()))?;
    if c.models.len() + 1 != layout.band_count() {
        return Err(Error::inconsistent(format!(
            "{} model records for {} detail bands",
            c.models.len(),
            layout.band_count() - 1
        )));
    }
    let sizes: Vec<usize> = layout.bands().iter().map(|g| g.len()).collect();
    let streams = ac_decode(&c.payload, &sizes)?;
    let mut decoded: Vec<Subband> = Vec::with_capacity(sizes.len());
    for (band, (stream, g)) in streams.iter().zip(layout.bands()).enumerate() {
        let values: Vec<i64> = stream.to_residuals(band)?.into_iter().map(i64::from).collect();
        let plane = ResidualPlane::new(band, g.rows, g.cols, values)?;
        let sub = if band == 0 {
            dpcm_decode(&plane, *g)?
        } else {
            decode_band(&layout, &decoded, band, &c.models[band - 1], &plane)?
        };
        decoded.push(sub);
    }
    let pyr = SubbandPyramid::from_bands(c.width(), c.height(), c.levels, c.depth, decoded)?;
    lifting::inverse(&pyr)
}

pub fn decompress_bytes(bytes: &[u8]) -> Result<GrayImage> {
    decompress(&Container::from_bytes(bytes)?)
}

/// Empirical order-0 entropy of a residual sequence in bits per value.
pub fn residual_entropy(values: &[i64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    order0_cost_of_values(values) as f64 / ONE_BIT as f64 / values.len() as f64
}
