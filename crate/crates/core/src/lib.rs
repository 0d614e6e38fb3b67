//! Lossless grayscale image codec built from an integer 5/3 lifting
//! wavelet, per-subband linear prediction of detail coefficients from
//! causal neighbours, DPCM on the coarse band and adaptive range coding.
//!
//! ```
//! use mwp::{compress_to_bytes, decompress_bytes, make_phantom, CodecConfig, PhantomKind};
//!
//! let img = make_phantom(PhantomKind::GaussianBlob, 64, 64, 0).unwrap();
//! let bytes = compress_to_bytes(&img, &CodecConfig::default()).unwrap();
//! assert_eq!(decompress_bytes(&bytes).unwrap(), img);
//! ```

pub mod codec;
pub mod entropy;
pub mod error;
pub mod imgio;
pub mod lifting;
pub mod linalg;
pub mod prediction;
pub mod stats;

pub use codec::{compress, compress_to_bytes, decompress, decompress_bytes, measure, CodecConfig, Container, Report};
pub use error::{Error, Result};
pub use imgio::{make_phantom, BitDepth, GrayImage, PhantomKind};
pub use prediction::{PredictionModel, PredictorRole, RoleMask, SelectionMode};

pub type SampleVectorF32 = stats::SampleVector<f32>;
pub type SampleVectorF64 = stats::SampleVector<f64>;
pub type CorrelationMatrixF32 = stats::CorrelationMatrix<f32>;
pub type CorrelationMatrixF64 = stats::CorrelationMatrix<f64>;
