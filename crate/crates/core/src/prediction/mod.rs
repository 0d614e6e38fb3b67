//! Causal predictor contexts, per-band linear models and their selection,
//! and the residual planes they produce.

mod context;
mod model;
mod roles;
mod select;

pub use context::{extract_context, ContextMatrix, ContextRow};
pub use model::{
    fit_coefficients, fit_model, predict, quantize, residuals, Fit, LeastSquares, PredictionModel, FRAC_BITS,
    PIVOT_TOLERANCE,
};
pub use roles::{PredictorRole, RoleMask, ROLE_COUNT};
pub use select::{
    candidate_roles, objective_of, select_predictors, Selection, SelectionMode, COEFF_BITS,
    COLLINEARITY_THRESHOLD, MASK_BITS,
};

use crate::error::{Error, Result};
use crate::lifting::{BandGeometry, Orientation, PyramidLayout, Subband, SubbandPyramid};
use crate::stats::{correlation_matrix, CorrelationMatrix};
use context::ContextSource;

/// Prediction errors of one band in raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualPlane {
    pub band: usize,
    pub rows: usize,
    pub cols: usize,
    pub residuals: Vec<i64>,
}

impl ResidualPlane {
    pub fn new(band: usize, rows: usize, cols: usize, residuals: Vec<i64>) -> Result<Self> {
        if residuals.len() != rows * cols {
            return Err(Error::inconsistent(format!(
                "residual plane of band {band} is {rows}x{cols} but holds {} values",
                residuals.len()
            )));
        }
        Ok(ResidualPlane { band, rows, cols, residuals })
    }

    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }
}

fn require_ll(geometry: BandGeometry) -> Result<()> {
    if geometry.orientation != Orientation::LL {
        return Err(Error::arg(format!("DPCM applies to the LL band only, got {}", geometry.label())));
    }
    Ok(())
}

/// Raster-order successive differences of the LL band; the first value is
/// kept as is.
pub fn dpcm_encode(ll: &Subband) -> Result<ResidualPlane> {
    require_ll(ll.geometry())?;
    let mut prev = 0i64;
    let residuals = ll
        .coeffs
        .iter()
        .map(|&v| {
            let d = i64::from(v) - prev;
            prev = i64::from(v);
            d
        })
        .collect();
    ResidualPlane::new(0, ll.rows, ll.cols, residuals)
}

pub fn dpcm_decode(res: &ResidualPlane, geometry: BandGeometry) -> Result<Subband> {
    require_ll(geometry)?;
    if (res.rows, res.cols) != (geometry.rows, geometry.cols) {
        return Err(Error::inconsistent(format!(
            "LL residuals are {}x{} but the band is {}x{}",
            res.rows, res.cols, geometry.rows, geometry.cols
        )));
    }
    let mut acc = 0i64;
    let mut coeffs = Vec::with_capacity(res.len());
    for (i, &d) in res.residuals.iter().enumerate() {
        acc = acc
            .checked_add(d)
            .filter(|v| i32::try_from(*v).is_ok())
            .ok_or_else(|| Error::inconsistent(format!("LL coefficient {i} leaves the 32-bit range")))?;
        coeffs.push(acc as i32);
    }
    Subband::new(geometry, coeffs)
}

/// Residuals of band `band` of `pyr` under a given model.
pub fn encode_band_with(pyr: &SubbandPyramid, band: usize, model: &PredictionModel) -> Result<ResidualPlane> {
    let ctx = extract_context(pyr, band)?;
    let b = pyr.band(band);
    ResidualPlane::new(band, b.rows, b.cols, residuals(&ctx, model))
}

/// Selects a model for detail band `band` and computes its residuals.
pub fn encode_band(pyr: &SubbandPyramid, band: usize, mode: SelectionMode) -> Result<(PredictionModel, ResidualPlane)> {
    let ctx = extract_context(pyr, band)?;
    let model = select_predictors(&ctx, mode).model;
    let b = pyr.band(band);
    let plane = ResidualPlane::new(band, b.rows, b.cols, residuals(&ctx, &model))?;
    Ok((model, plane))
}

/// Reconstructs detail band `band` in raster order from its residuals.
/// `decoded` holds the already reconstructed bands in coding order; only
/// the first `band` of them are read.
pub fn decode_band(
    layout: &PyramidLayout,
    decoded: &[Subband],
    band: usize,
    model: &PredictionModel,
    residuals: &ResidualPlane,
) -> Result<Subband> {
    decode_band_with_fill(layout, decoded, band, model, residuals, 0)
}

/// [`decode_band`] with the not yet reconstructed positions of the band
/// pre-filled with `fill`. The output does not depend on `fill`.
#[doc(hidden)]
pub fn decode_band_with_fill(
    layout: &PyramidLayout,
    decoded: &[Subband],
    band: usize,
    model: &PredictionModel,
    residuals: &ResidualPlane,
    fill: i32,
) -> Result<Subband> {
    let src = ContextSource::new(layout, &decoded[..band.min(decoded.len())], band)?;
    let (rows, cols) = src.dims();
    if (residuals.rows, residuals.cols) != (rows, cols) || residuals.len() != rows * cols {
        return Err(Error::inconsistent(format!(
            "residual plane is {}x{} but band {band} is {rows}x{cols}",
            residuals.rows, residuals.cols
        )));
    }
    let mut buf = vec![fill; rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let i = r * cols + c;
            let row = src.row(&buf, r, c);
            buf[i] = predict(model, &row)
                .checked_add(residuals.residuals[i])
                .and_then(|v| i32::try_from(v).ok())
                .ok_or_else(|| Error::Corrupt {
                    band,
                    index: i,
                    message: "reconstructed coefficient leaves the 32-bit range".into(),
                })?;
        }
    }
    Subband::new(layout.bands()[band], buf)
}

/// Correlation matrix of the eleven role columns and the dependent.
pub fn context_correlations(ctx: &ContextMatrix) -> Result<CorrelationMatrix<f64>> {
    let mut columns: Vec<(&str, Vec<f64>)> = PredictorRole::ALL
        .iter()
        .map(|&r| (r.name(), ctx.rows.iter().map(|row| f64::from(row[r.index()])).collect()))
        .collect();
    columns.push(("Dependent", ctx.dependent.iter().map(|&v| f64::from(v)).collect()));
    correlation_matrix(&columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imgio::{make_phantom, BitDepth, GrayImage, PhantomKind};
    use crate::lifting::forward;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ll(rows: usize, cols: usize, coeffs: Vec<i32>) -> Subband {
        let g = BandGeometry { level: 1, orientation: Orientation::LL, rows, cols };
        Subband::new(g, coeffs).unwrap()
    }

    #[test]
    fn dpcm_examples() {
        assert_eq!(dpcm_encode(&ll(2, 2, vec![7, 7, 7, 7])).unwrap().residuals, [7, 0, 0, 0]);
        assert_eq!(dpcm_encode(&ll(2, 2, vec![1, 3, 6, 10])).unwrap().residuals, [1, 2, 3, 4]);
    }

    #[test]
    fn dpcm_rejects_detail_band() {
        let g = BandGeometry { level: 1, orientation: Orientation::HL, rows: 2, cols: 2 };
        let b = Subband::zeros(g);
        assert!(matches!(dpcm_encode(&b), Err(Error::InvalidArgument(_))));
        let plane = ResidualPlane::new(0, 2, 2, vec![0; 4]).unwrap();
        assert!(matches!(dpcm_decode(&plane, g), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn dpcm_decode_rejects_overflow() {
        let g = ll(1, 2, vec![0, 0]).geometry();
        let plane = ResidualPlane::new(0, 1, 2, vec![i64::from(i32::MAX), 1]).unwrap();
        assert!(dpcm_decode(&plane, g).is_err());
    }

    proptest! {
        #[test]
        fn dpcm_round_trip(rows in 1usize..12, cols in 1usize..12, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<i32> = (0..rows * cols).map(|_| rng.random()).collect();
            let band = ll(rows, cols, coeffs);
            let res = dpcm_encode(&band).unwrap();
            prop_assert_eq!(dpcm_decode(&res, band.geometry()).unwrap(), band);
        }
    }

    fn sample_pyramid(seed: u64) -> SubbandPyramid {
        let img = make_phantom(PhantomKind::SmoothNoise, 40, 36, seed).unwrap();
        forward(&img, 3).unwrap()
    }

    #[test]
    fn zero_model_residuals_equal_band() {
        let pyr = sample_pyramid(1);
        for band in 1..pyr.layout().band_count() {
            let plane = encode_band_with(&pyr, band, &PredictionModel::zero()).unwrap();
            let want: Vec<i64> = pyr.band(band).coeffs.iter().map(|&v| i64::from(v)).collect();
            assert_eq!(plane.residuals, want);
        }
    }

    #[test]
    fn west_copy_band_has_residuals_only_in_first_column() {
        let layout = PyramidLayout::new(16, 16, 1).unwrap();
        let bands: Vec<Subband> = layout
            .bands()
            .iter()
            .map(|g| {
                let coeffs = (0..g.rows).flat_map(|r| (0..g.cols).map(move |_| (r as i32 + 1) * 5)).collect();
                Subband::new(*g, coeffs).unwrap()
            })
            .collect();
        let pyr = SubbandPyramid::from_bands(16, 16, 1, BitDepth::Eight, bands).unwrap();
        let model = PredictionModel::from_terms(&[(PredictorRole::West, 1.0)]);
        let plane = encode_band_with(&pyr, 1, &model).unwrap();
        for (i, &r) in plane.residuals.iter().enumerate() {
            assert_eq!(r != 0, i % plane.cols == 0, "index {i}");
        }
        let decoded = decode_band(pyr.layout(), pyr.bands(), 1, &model, &plane).unwrap();
        assert_eq!(&decoded, pyr.band(1));
    }

    /// A model that reads every role with a distinct weight, so any
    /// difference in a context value changes the prediction.
    fn dense_model() -> PredictionModel {
        let terms: Vec<_> = PredictorRole::ALL
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, 0.03125 * (i as f64 + 1.0) * if i % 2 == 0 { 1.0 } else { -1.0 }))
            .collect();
        PredictionModel::from_terms(&terms)
    }

    #[test]
    fn decode_inverts_encode_for_selected_and_dense_models() {
        let pyr = sample_pyramid(5);
        for band in 1..pyr.layout().band_count() {
            for model in [encode_band(&pyr, band, SelectionMode::Greedy).unwrap().0, dense_model()] {
                let plane = encode_band_with(&pyr, band, &model).unwrap();
                let got = decode_band(pyr.layout(), pyr.bands(), band, &model, &plane).unwrap();
                assert_eq!(&got, pyr.band(band));
            }
        }
    }

    #[test]
    fn decoding_never_reads_future_values() {
        let pyr = sample_pyramid(6);
        let model = dense_model();
        let n = pyr.layout().band_count();
        for band in 1..n {
            let plane = encode_band_with(&pyr, band, &model).unwrap();
            // later bands replaced by poison; the band itself is pre-filled
            let mut poisoned: Vec<Subband> = pyr.bands().to_vec();
            for b in poisoned.iter_mut().skip(band) {
                b.coeffs.fill(0x0BAD_F00D);
            }
            for fill in [0, i32::MIN / 4, 0x0BAD_F00D] {
                let got = decode_band_with_fill(pyr.layout(), &poisoned, band, &model, &plane, fill).unwrap();
                assert_eq!(&got, pyr.band(band), "band {band} fill {fill}");
            }
        }
    }

    #[test]
    fn missing_prefix_is_a_sequencing_error() {
        let pyr = sample_pyramid(7);
        let plane = encode_band_with(&pyr, 5, &PredictionModel::zero()).unwrap();
        let err = decode_band(pyr.layout(), &pyr.bands()[..3], 5, &PredictionModel::zero(), &plane).unwrap_err();
        assert!(matches!(err, Error::Sequencing { band: 5, .. }));
    }

    #[test]
    fn selection_on_real_band_never_hurts() {
        let img = GrayImage::from_fn(64, 64, BitDepth::Eight, |r, c| ((r * 3 + c * 5) % 200 + (r * c) % 7) as u16).unwrap();
        let pyr = forward(&img, 3).unwrap();
        for band in 1..pyr.layout().band_count() {
            let ctx = extract_context(&pyr, band).unwrap();
            for mode in [SelectionMode::Greedy, SelectionMode::Exhaustive] {
                let s = select_predictors(&ctx, mode);
                assert!(s.objective <= s.empty_objective);
            }
        }
    }

    #[test]
    fn correlation_table_has_twelve_labels() {
        let pyr = sample_pyramid(8);
        let ctx = extract_context(&pyr, pyr.layout().band_count() - 1).unwrap();
        let m = context_correlations(&ctx).unwrap();
        assert_eq!(m.len(), 12);
        assert_eq!(m.labels()[11], "Dependent");
        assert!((m.get(11, 11).unwrap() - 1.0).abs() < 1e-12);
    }
}
