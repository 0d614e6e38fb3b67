use std::fmt::Write as _;

use super::{code_band, CodecConfig};
use crate::error::Result;
use crate::imgio::GrayImage;
use crate::lifting;
use crate::prediction::{context_correlations, extract_context, predict, PredictionModel, PredictorRole};
use crate::stats::CorrelationMatrix;

/// Predicted-versus-actual data of one detail band.
#[derive(Debug, Clone)]
pub struct BandAnalysis {
    pub index: usize,
    pub label: String,
    pub cols: usize,
    pub model: PredictionModel,
    /// `None` for bands too small to correlate.
    pub correlations: Option<CorrelationMatrix<f64>>,
    pub actual: Vec<i32>,
    pub predicted: Vec<i64>,
}

impl BandAnalysis {
    /// `band_id,row,col,actual,predicted,residual`, one line per coefficient.
    pub fn predictions_csv(&self) -> String {
        let mut out = String::from("band_id,row,col,actual,predicted,residual\n");
        for (i, (&a, &p)) in self.actual.iter().zip(&self.predicted).enumerate() {
            let (r, c) = (i / self.cols, i % self.cols);
            let _ = writeln!(out, "{},{r},{c},{a},{p},{}", self.label, i64::from(a) - p);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub bands: Vec<BandAnalysis>,
}

impl Analysis {
    /// All bands' correlation matrices in one table keyed by `band_id` and
    /// row label; undefined entries are `NA`.
    pub fn correlations_csv(&self) -> String {
        let mut out = String::from("band_id,label");
        for r in PredictorRole::ALL {
            let _ = write!(out, ",{r}");
        }
        out.push_str(",Dependent\n");
        for b in &self.bands {
            let Some(m) = &b.correlations else { continue };
            for i in 0..m.len() {
                out.push_str(&b.label);
                out.push(',');
                out.push_str(&m.labels()[i]);
                for j in 0..m.len() {
                    match m.get(i, j) {
                        Some(v) => {
                            let _ = write!(out, ",{v:.6}");
                        }
                        None => out.push_str(",NA"),
                    }
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Runs the encoder's model selection and reports, for every detail band,
/// its correlation matrix and each coefficient's prediction.
pub fn analyze(img: &GrayImage, cfg: &CodecConfig) -> Result<Analysis> {
    cfg.validate()?;
    let pyr = lifting::forward(img, cfg.levels)?;
    let mut bands = Vec::new();
    for (index, g) in pyr.layout().bands().iter().enumerate().skip(1) {
        let ctx = extract_context(&pyr, index)?;
        let model = code_band(&ctx, cfg).model;
        let predicted = ctx.rows.iter().map(|row| predict(&model, row)).collect();
        bands.push(BandAnalysis {
            index,
            label: g.label(),
            cols: g.cols,
            correlations: context_correlations(&ctx).ok(),
            model,
            actual: ctx.dependent,
            predicted,
        });
    }
    Ok(Analysis { bands })
}
