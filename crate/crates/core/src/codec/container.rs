//! Byte layout of an encoded image.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "MWP1"
//!      4     1  version (1)
//!      5     1  flags (bit 0: wavelet id, 0 = 5/3; other bits zero)
//!      6     1  bit depth (8 or 16)
//!      7     1  decomposition levels (1..=8)
//!      8     4  width, u32 LE
//!     12     4  height, u32 LE
//!     16     .  one model record per detail band in coding order:
//!               mask u16 LE, then i32 LE Q15.16 per set bit
//!      .     4  payload length, u32 LE
//!      .     .  range-coded payload
//!      .     4  CRC-32 (IEEE) of every preceding byte, u32 LE
//! ```

use crate::error::{Error, Result};
use crate::imgio::BitDepth;
use crate::lifting::PyramidLayout;
use crate::prediction::PredictionModel;

pub const MAGIC: [u8; 4] = *b"MWP1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;
/// Wavelet id stored in flag bit 0.
pub const WAVELET_53: u8 = 0;
/// Upper bound on coefficients per payload byte accepted by the parser.
/// The adaptive model never gives a symbol more than 65535/65536 of the
/// coding total, so every symbol costs at least 1/45426 bit (about 363,000
/// symbols per byte).
const MAX_SYMBOLS_PER_BYTE: usize = 1 << 19;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub(crate) depth: BitDepth,
    pub(crate) levels: u8,
    pub(crate) width: u32,
    pub(crate) height: u32,
    pub(crate) models: Vec<PredictionModel>,
    pub(crate) payload: Vec<u8>,
}

impl Container {
    pub fn depth(&self) -> BitDepth {
        self.depth
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn height(&self) -> usize {
        self.height as usize
    }

    /// Models of the detail bands in coding order.
    pub fn models(&self) -> &[PredictionModel] {
        &self.models
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    pub fn layout(&self) -> Result<PyramidLayout> {
        PyramidLayout::new(self.width(), self.height(), self.levels)
    }

    /// Bytes taken by the model records.
    pub fn model_record_bytes(&self) -> usize {
        self.models.iter().map(PredictionModel::record_len).sum()
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_LEN + self.model_record_bytes() + 4 + self.payload.len() + 4
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(WAVELET_53);
        out.push(self.depth.bits());
        out.push(self.levels);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        for m in &self.models {
            m.write_record(&mut out);
        }
        let len = u32::try_from(self.payload.len()).expect("payload larger than 4 GiB");
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(&self.payload);
        let crc = crc32fast::hash(&out);
        out.extend_from_slice(&crc.to_le_bytes());
        out
    }

    /// Parses and validates a container. Magic, version and checksum are
    /// checked before anything else is interpreted.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.get(..4) != Some(&MAGIC[..]) {
            return Err(Error::format(0, "missing MWP1 magic"));
        }
        match bytes.get(4) {
            None => return Err(Error::format(bytes.len(), "truncated header")),
            Some(&VERSION) => {}
            Some(v) => return Err(Error::format(4, format!("unsupported version {v}"))),
        }
        if bytes.len() < HEADER_LEN + 8 {
            return Err(Error::format(bytes.len(), "truncated container"));
        }
        let body_len = bytes.len() - 4;
        let stored = u32_at(bytes, body_len);
        let computed = crc32fast::hash(&bytes[..body_len]);
        if stored != computed {
            return Err(Error::Checksum { stored, computed });
        }
        let body = &bytes[..body_len];

        let flags = body[5];
        if flags != WAVELET_53 {
            return Err(Error::format(5, format!("unknown flags {flags:#04x}")));
        }
        let depth = BitDepth::from_bits(body[6])
            .ok_or_else(|| Error::format(6, format!("unsupported bit depth {}", body[6])))?;
        let levels = body[7];
        let (width, height) = (u32_at(body, 8), u32_at(body, 12));
        let layout = PyramidLayout::new(width as usize, height as usize, levels).map_err(|e| {
            let message = match e {
                Error::InvalidArgument(m) => m,
                other => other.to_string(),
            };
            Error::format(7, message)
        })?;

        let mut pos = HEADER_LEN;
        let mut models = Vec::with_capacity(layout.band_count() - 1);
        for _ in 1..layout.band_count() {
            let (model, used) = PredictionModel::read_record(&body[pos..]).map_err(|e| match e {
                Error::Format { offset, message } => Error::format(pos + offset.min(body.len() - pos), message),
                other => other,
            })?;
            models.push(model);
            pos += used;
        }
        if body.len() < pos + 4 {
            return Err(Error::format(body.len(), "truncated payload length"));
        }
        let payload_len = u32_at(body, pos) as usize;
        let start = pos + 4;
        if body.len() - start != payload_len {
            return Err(Error::format(
                pos,
                format!("payload length {payload_len} disagrees with the {} bytes present", body.len() - start),
            ));
        }
        let pixels = width as usize * height as usize;
        if pixels / MAX_SYMBOLS_PER_BYTE > payload_len + 16 {
            return Err(Error::format(8, format!("{width}x{height} image cannot fit in a {payload_len}-byte payload")));
        }
        Ok(Container {
            depth,
            levels,
            width,
            height,
            models,
            payload: body[start..].to_vec(),
        })
    }
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("four bytes"))
}
