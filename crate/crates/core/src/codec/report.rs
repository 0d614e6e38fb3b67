use std::fmt;
use std::time::Instant;

use super::{decompress_bytes, encode, residual_entropy, CodecConfig};
use crate::error::{Error, Result};
use crate::imgio::GrayImage;
use crate::prediction::PredictionModel;

#[derive(Debug, Clone, PartialEq)]
pub struct BandReport {
    pub label: String,
    pub model: PredictionModel,
    /// Order-0 entropy of the coded residuals, bits per coefficient.
    pub residual_entropy: f64,
}

/// Size and speed of one compression run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub width: usize,
    pub height: usize,
    pub container_bytes: usize,
    pub model_record_bytes: usize,
    pub bpp: f64,
    pub encode_ms: f64,
    pub decode_ms: f64,
    /// LL first, then the detail bands in coding order.
    pub per_band: Vec<BandReport>,
}

pub fn bits_per_pixel(bytes: usize, width: usize, height: usize) -> f64 {
    8.0 * bytes as f64 / (width * height) as f64
}

/// Compresses and decompresses `img`, timing both directions and checking
/// the round trip.
pub fn measure(img: &GrayImage, cfg: &CodecConfig) -> Result<Report> {
    let t0 = Instant::now();
    let enc = encode(img, cfg)?;
    let bytes = enc.container.to_bytes();
    let encode_ms = t0.elapsed().as_secs_f64() * 1e3;
    let t1 = Instant::now();
    let back = decompress_bytes(&bytes)?;
    let decode_ms = t1.elapsed().as_secs_f64() * 1e3;
    if &back != img {
        return Err(Error::inconsistent("decoded image differs from the input"));
    }
    let layout = enc.pyramid.layout();
    let mut per_band = vec![BandReport {
        label: "LL".into(),
        model: PredictionModel::zero(),
        residual_entropy: residual_entropy(&enc.ll.residuals),
    }];
    for (i, b) in enc.bands.iter().enumerate() {
        let values: Vec<i64> = b.residuals.iter().map(|&v| i64::from(v)).collect();
        per_band.push(BandReport {
            label: layout.bands()[i + 1].label(),
            model: b.model.clone(),
            residual_entropy: residual_entropy(&values),
        });
    }
    Ok(Report {
        width: img.width(),
        height: img.height(),
        container_bytes: bytes.len(),
        model_record_bytes: enc.container.model_record_bytes(),
        bpp: bits_per_pixel(bytes.len(), img.width(), img.height()),
        encode_ms,
        decode_ms,
        per_band,
    })
}

impl Report {
    pub const CSV_HEADER: &'static str = "image,method-config,bpp,enc_ms,dec_ms";

    pub fn csv_row(&self, image: &str, config: &str) -> String {
        format!("{image},{config},{:.4},{:.3},{:.3}", self.bpp, self.encode_ms, self.decode_ms)
    }

    /// Per-band CSV: `band,mask,model,residual_entropy`.
    pub fn bands_csv(&self) -> String {
        let mut out = String::from("band,mask,model,residual_entropy\n");
        for b in &self.per_band {
            out.push_str(&format!(
                "{},{:#06x},{},{:.4}\n",
                b.label,
                b.model.mask().bits(),
                b.model,
                b.residual_entropy
            ));
        }
        out
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} image, {} bytes", self.width, self.height, self.container_bytes)?;
        writeln!(f, "{:<14}{:>10}", "bits/pixel", format!("{:.4}", self.bpp))?;
        writeln!(f, "{:<14}{:>10}", "encode ms", format!("{:.2}", self.encode_ms))?;
        writeln!(f, "{:<14}{:>10}", "decode ms", format!("{:.2}", self.decode_ms))?;
        writeln!(f, "{:<6}{:>10}  model", "band", "H0 bits")?;
        for b in &self.per_band {
            writeln!(f, "{:<6}{:>10.4}  {}", b.label, b.residual_entropy, b.model)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgio::{make_phantom, PhantomKind};

    #[test]
    fn bpp_arithmetic() {
        assert_eq!(bits_per_pixel(4096, 128, 128), 2.0);
    }

    #[test]
    fn measure_reports_every_band() {
        let img = make_phantom(PhantomKind::GaussianBlob, 64, 64, 0).unwrap();
        let r = measure(&img, &CodecConfig::default()).unwrap();
        assert_eq!(r.per_band.len(), 10);
        assert_eq!(r.bpp, bits_per_pixel(r.container_bytes, 64, 64));
        assert!(r.bands_csv().lines().count() == 11);
        assert!(r.to_string().contains("bits/pixel"));
        assert!(r.csv_row("blob", "greedy").starts_with("blob,greedy,"));
    }
}
