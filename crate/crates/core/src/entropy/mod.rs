//! Residual-to-symbol mapping and adaptive arithmetic coding of per-band
//! symbol streams.
//!
//! Residuals are zigzag mapped (`0, -1, 1, -2, ...` to `0, 1, 2, 3, ...`).
//! Mapped values below 512 are coded directly; larger ones are coded as an
//! escape symbol carrying the sign, followed by the 32-bit magnitude sent
//! as raw bits through the coder. Each band is coded with its own fresh
//! [`AdaptiveModel`], all bands sharing one range coder stream. A symbol the
//! model has not seen yet costs two coder steps: the novelty interval, then
//! its rank among the unseen symbols.

pub mod codelength;
mod model;
mod range;

pub use model::{AdaptiveModel, Coding, Lookup, INCREMENT, MAX_TOTAL};
pub use range::{RangeDecoder, RangeEncoder};

use crate::error::Result;
use range::corrupt;

pub const DIRECT_SYMBOLS: usize = 512;
pub const ESC_POS: u16 = 512;
pub const ESC_NEG: u16 = 513;
pub const ALPHABET_SIZE: usize = 514;
pub const ESCAPE_BITS: u32 = 32;

/// A residual after symbol mapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MappedResidual {
    Direct(u16),
    Escape { symbol: u16, magnitude: u32 },
}

impl MappedResidual {
    pub fn symbol(self) -> u16 {
        match self {
            MappedResidual::Direct(s) => s,
            MappedResidual::Escape { symbol, .. } => symbol,
        }
    }
}

#[inline]
pub fn zigzag(r: i32) -> u32 {
    ((r << 1) ^ (r >> 31)) as u32
}

#[inline]
pub fn unzigzag(z: u32) -> i32 {
    ((z >> 1) as i32) ^ -((z & 1) as i32)
}

pub fn map_residual(r: i32) -> MappedResidual {
    let z = zigzag(r);
    if (z as usize) < DIRECT_SYMBOLS {
        MappedResidual::Direct(z as u16)
    } else if r > 0 {
        MappedResidual::Escape {
            symbol: ESC_POS,
            magnitude: r.unsigned_abs(),
        }
    } else {
        MappedResidual::Escape {
            symbol: ESC_NEG,
            magnitude: r.unsigned_abs(),
        }
    }
}

/// Inverse of [`map_residual`]. Rejects escapes whose magnitude would
/// have been coded directly or does not fit an `i32`.
pub fn unmap_residual(m: MappedResidual) -> Result<i32, &'static str> {
    match m {
        MappedResidual::Direct(s) if (s as usize) < DIRECT_SYMBOLS => Ok(unzigzag(u32::from(s))),
        MappedResidual::Direct(_) => Err("escape symbol without payload"),
        MappedResidual::Escape { symbol, magnitude } => {
            let value = match symbol {
                ESC_POS if magnitude <= i32::MAX as u32 => magnitude as i32,
                ESC_NEG if magnitude <= 1 << 31 => (magnitude as i64).wrapping_neg() as i32,
                ESC_POS | ESC_NEG => return Err("escape magnitude out of range"),
                _ => return Err("direct symbol carrying escape payload"),
            };
            if (zigzag(value) as usize) < DIRECT_SYMBOLS {
                return Err("non-canonical escape");
            }
            Ok(value)
        }
    }
}

/// Symbols of one band plus the escape magnitudes, in order of appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolStream {
    pub symbols: Vec<u16>,
    pub escapes: Vec<u32>,
}

impl SymbolStream {
    pub fn from_residuals(residuals: &[i32]) -> Self {
        let mut stream = SymbolStream {
            symbols: Vec::with_capacity(residuals.len()),
            escapes: Vec::new(),
        };
        for &r in residuals {
            stream.push(map_residual(r));
        }
        stream
    }

    pub fn push(&mut self, m: MappedResidual) {
        match m {
            MappedResidual::Direct(s) => self.symbols.push(s),
            MappedResidual::Escape { symbol, magnitude } => {
                self.symbols.push(symbol);
                self.escapes.push(magnitude);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn is_escape(symbol: u16) -> bool {
        symbol == ESC_POS || symbol == ESC_NEG
    }

    /// Unmaps back to residuals. `band` only labels errors.
    pub fn to_residuals(&self, band: usize) -> Result<Vec<i32>> {
        let mut escapes = self.escapes.iter();
        let mut out = Vec::with_capacity(self.symbols.len());
        for (index, &s) in self.symbols.iter().enumerate() {
            let m = if Self::is_escape(s) {
                let magnitude = *escapes
                    .next()
                    .ok_or_else(|| corrupt(band, index, "missing escape payload"))?;
                MappedResidual::Escape { symbol: s, magnitude }
            } else {
                MappedResidual::Direct(s)
            };
            out.push(unmap_residual(m).map_err(|msg| corrupt(band, index, msg))?);
        }
        if escapes.next().is_some() {
            return Err(corrupt(band, self.symbols.len(), "unused escape payloads"));
        }
        Ok(out)
    }
}

fn encode_symbol(enc: &mut RangeEncoder, model: &mut AdaptiveModel, symbol: u16) {
    match model.coding(symbol as usize) {
        Coding::Seen { low, freq } => enc.encode(low, freq, model.total()),
        Coding::Novel { low, freq, rank, unseen } => {
            enc.encode(low, freq, model.total());
            enc.encode(rank, 1, unseen);
        }
    }
    model.update(symbol as usize);
}

/// Codes the streams in order, each with a fresh adaptive model.
pub fn ac_encode(streams: &[SymbolStream]) -> Vec<u8> {
    let mut enc = RangeEncoder::new();
    for stream in streams {
        let mut model = AdaptiveModel::new();
        let mut escapes = stream.escapes.iter();
        for &s in &stream.symbols {
            encode_symbol(&mut enc, &mut model, s);
            if SymbolStream::is_escape(s) {
                let m = *escapes.next().expect("escape payload count matches escape symbols");
                enc.encode_bits(m >> 16, 16);
                enc.encode_bits(m & 0xFFFF, 16);
            }
        }
    }
    enc.finish()
}

/// Streaming symbol decoder over one band at a time; exposed so callers can
/// observe model state symbol by symbol.
pub struct BandDecoder<'a, 'b> {
    dec: &'b mut RangeDecoder<'a>,
    model: AdaptiveModel,
    band: usize,
    index: usize,
}

impl<'a, 'b> BandDecoder<'a, 'b> {
    pub fn new(dec: &'b mut RangeDecoder<'a>, band: usize) -> Self {
        BandDecoder {
            dec,
            model: AdaptiveModel::new(),
            band,
            index: 0,
        }
    }

    pub fn model(&self) -> &AdaptiveModel {
        &self.model
    }

    pub fn next_residual(&mut self) -> Result<MappedResidual> {
        let (band, index) = (self.band, self.index);
        let err = |msg| corrupt(band, index, msg);
        let total = self.model.total();
        let target = self.dec.target(total).map_err(err)?;
        let s = match self.model.lookup(target) {
            Lookup::Seen { symbol, low, freq } => {
                self.dec.consume(low, freq, total).map_err(err)?;
                symbol
            }
            Lookup::Novel { low, freq } => {
                self.dec.consume(low, freq, total).map_err(err)?;
                let unseen = ALPHABET_SIZE as u32 - self.model.distinct();
                let rank = self.dec.target(unseen).map_err(err)?;
                self.dec.consume(rank, 1, unseen).map_err(err)?;
                self.model.unseen_symbol(rank)
            }
        };
        self.model.update(s);
        let s = s as u16;
        self.index += 1;
        if SymbolStream::is_escape(s) {
            let hi = self.dec.decode_bits(16).map_err(err)?;
            let lo = self.dec.decode_bits(16).map_err(err)?;
            Ok(MappedResidual::Escape {
                symbol: s,
                magnitude: (hi << 16) | lo,
            })
        } else {
            Ok(MappedResidual::Direct(s))
        }
    }
}

/// Inverse of [`ac_encode`] given the symbol count of every band. The
/// payload must be consumed exactly.
pub fn ac_decode(bytes: &[u8], band_sizes: &[usize]) -> Result<Vec<SymbolStream>> {
    let mut dec = RangeDecoder::new(bytes).map_err(|m| corrupt(0, 0, m))?;
    let mut streams = Vec::with_capacity(band_sizes.len());
    for (band, &n) in band_sizes.iter().enumerate() {
        let mut bd = BandDecoder::new(&mut dec, band);
        let mut stream = SymbolStream {
            symbols: Vec::with_capacity(n),
            escapes: Vec::new(),
        };
        for _ in 0..n {
            stream.push(bd.next_residual()?);
        }
        streams.push(stream);
    }
    if !dec.is_exhausted() {
        let last = band_sizes.len().saturating_sub(1);
        let index = band_sizes.last().copied().unwrap_or(0);
        return Err(corrupt(last, index, "trailing bytes after final symbol"));
    }
    Ok(streams)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use proptest::prelude::*;

    #[test]
    fn zigzag_examples() {
        assert_eq!(map_residual(0), MappedResidual::Direct(0));
        assert_eq!(map_residual(1), MappedResidual::Direct(2));
        assert_eq!(map_residual(-1), MappedResidual::Direct(1));
        assert_eq!(map_residual(-2), MappedResidual::Direct(3));
        assert_eq!(map_residual(255), MappedResidual::Direct(510));
        assert_eq!(map_residual(-256), MappedResidual::Direct(511));
        assert_eq!(
            map_residual(256),
            MappedResidual::Escape {
                symbol: ESC_POS,
                magnitude: 256
            }
        );
        assert_eq!(
            map_residual(-257),
            MappedResidual::Escape {
                symbol: ESC_NEG,
                magnitude: 257
            }
        );
        let esc = map_residual(300);
        assert_eq!(
            esc,
            MappedResidual::Escape {
                symbol: ESC_POS,
                magnitude: 300
            }
        );
        assert_eq!(unmap_residual(esc), Ok(300));
        for r in [i32::MIN, i32::MAX, -1_000_000, 1_000_000] {
            assert_eq!(unmap_residual(map_residual(r)), Ok(r));
        }
    }

    #[test]
    fn unmap_rejects_noncanonical() {
        let bad = [
            MappedResidual::Escape { symbol: ESC_POS, magnitude: 5 },
            MappedResidual::Escape { symbol: ESC_NEG, magnitude: 256 },
            MappedResidual::Escape { symbol: ESC_POS, magnitude: 1 << 31 },
            MappedResidual::Escape { symbol: ESC_NEG, magnitude: (1 << 31) + 1 },
            MappedResidual::Direct(ESC_POS),
        ];
        for m in bad {
            assert!(unmap_residual(m).is_err(), "{m:?}");
        }
    }

    #[test]
    fn long_run_of_zeros_is_tiny() {
        let stream = SymbolStream::from_residuals(&vec![0; 10_000]);
        let bytes = ac_encode(std::slice::from_ref(&stream));
        assert!(bytes.len() < 300, "{}", bytes.len());
        assert_eq!(ac_decode(&bytes, &[10_000]).unwrap(), vec![stream]);
    }

    #[test]
    fn empty_stream_set() {
        let bytes = ac_encode(&[]);
        assert_eq!(bytes.len(), 4);
        assert!(ac_decode(&bytes, &[]).unwrap().is_empty());
        let bytes = ac_encode(&[SymbolStream::default(), SymbolStream::default()]);
        assert_eq!(ac_decode(&bytes, &[0, 0]).unwrap().len(), 2);
    }

    #[test]
    fn single_symbol_stream() {
        for r in [0, -1, 77, 100_000] {
            let s = SymbolStream::from_residuals(&[r]);
            let bytes = ac_encode(std::slice::from_ref(&s));
            let back = ac_decode(&bytes, &[1]).unwrap();
            assert_eq!(back[0].to_residuals(0).unwrap(), vec![r]);
        }
    }

    #[test]
    fn truncation_is_reported() {
        let residuals: Vec<i32> = (0..3000).map(|i| (i * 37 % 101) - 50).collect();
        let s = SymbolStream::from_residuals(&residuals);
        let bytes = ac_encode(std::slice::from_ref(&s));
        for cut in [0, 3, 4, bytes.len() / 2, bytes.len() - 1] {
            let err = ac_decode(&bytes[..cut], &[3000]).unwrap_err();
            assert!(matches!(err, Error::Corrupt { .. }), "{err:?}");
        }
        let mut longer = bytes.clone();
        longer.push(0);
        assert!(ac_decode(&longer, &[3000]).is_err());
    }

    #[test]
    fn decoder_model_tracks_encoder_model() {
        let symbols: Vec<u16> = (0..5000u32).map(|i| ((i * i) % 23) as u16).collect();
        let stream = SymbolStream { symbols: symbols.clone(), escapes: vec![] };
        let bytes = ac_encode(std::slice::from_ref(&stream));
        let mut dec = RangeDecoder::new(&bytes).unwrap();
        let mut bd = BandDecoder::new(&mut dec, 0);
        let mut enc_model = AdaptiveModel::new();
        for &s in &symbols {
            assert_eq!(bd.next_residual().unwrap(), MappedResidual::Direct(s));
            enc_model.update(s as usize);
            assert_eq!(bd.model(), &enc_model);
        }
    }

    #[test]
    fn golden_bytes() {
        let s = SymbolStream::from_residuals(&[0, 0, 1, -1, 300, 0, -2]);
        let bytes = ac_encode(&[s, SymbolStream::from_residuals(&[5])]);
        assert_eq!(
            bytes,
            [0x00, 0x44, 0x0F, 0x1D, 0x68, 0xAE, 0xC7, 0xCB, 0x2B, 0x7E, 0xE6, 0xAB, 0x27, 0x82, 0x00, 0x00]
        );
    }

    fn stream_set() -> impl Strategy<Value = Vec<Vec<i32>>> {
        let residual = prop_oneof![
            8 => -20i32..20,
            2 => -300i32..300,
            1 => any::<i32>(),
        ];
        prop::collection::vec(prop::collection::vec(residual, 0..300), 0..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn round_trip(set in stream_set()) {
            let streams: Vec<SymbolStream> = set.iter().map(|r| SymbolStream::from_residuals(r)).collect();
            let sizes: Vec<usize> = streams.iter().map(|s| s.len()).collect();
            let bytes = ac_encode(&streams);
            let back = ac_decode(&bytes, &sizes).unwrap();
            for (i, (b, r)) in back.iter().zip(&set).enumerate() {
                prop_assert_eq!(&b.to_residuals(i).unwrap(), r);
            }
        }

        #[test]
        fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..64), n in 0usize..200) {
            let _ = ac_decode(&bytes, &[n, 3]);
        }
    }
}
