//! 32-bit range coder with byte-wise renormalization and carry propagation.
//!
//! The encoder keeps a 33-bit `low` (bit 32 is a pending carry) and a 32-bit
//! `range` that is renormalized whenever it drops below 2^24. Output bytes
//! are delayed in a one-byte cache plus a run of pending `0xFF` bytes so a
//! late carry can ripple into them. The very first cache byte is always 0
//! and is not emitted; the flush shifts out four bytes of `low`.

use crate::error::{Error, Result};

const TOP: u32 = 1 << 24;

#[derive(Debug)]
pub struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    pending: u64,
    started: bool,
    out: Vec<u8>,
}

impl Default for RangeEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RangeEncoder {
    pub fn new() -> Self {
        RangeEncoder {
            low: 0,
            range: u32::MAX,
            cache: 0,
            pending: 1,
            started: false,
            out: Vec::new(),
        }
    }

    fn emit(&mut self, byte: u8) {
        if self.started {
            self.out.push(byte);
        } else {
            debug_assert_eq!(byte, 0);
            self.started = true;
        }
    }

    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || (self.low >> 32) != 0 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            while self.pending > 0 {
                self.emit(byte.wrapping_add(carry));
                byte = 0xFF;
                self.pending -= 1;
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.pending += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    #[inline]
    fn normalize(&mut self) {
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    /// Codes the interval `[low, low + freq)` out of `total` (`total <= 2^16`).
    pub fn encode(&mut self, low: u32, freq: u32, total: u32) {
        debug_assert!(freq > 0 && low + freq <= total && total <= 1 << 16);
        let r = self.range / total;
        self.low += u64::from(r) * u64::from(low);
        self.range = r * freq;
        self.normalize();
    }

    /// Codes `bits` (at most 16) raw bits with equal probability.
    pub fn encode_bits(&mut self, value: u32, bits: u32) {
        debug_assert!(bits <= 16 && value < (1 << bits));
        let r = self.range >> bits;
        self.low += u64::from(r) * u64::from(value);
        self.range = r;
        self.normalize();
    }

    pub fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

#[derive(Debug)]
pub struct RangeDecoder<'a> {
    input: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
}

impl<'a> RangeDecoder<'a> {
    pub fn new(input: &'a [u8]) -> Result<Self, &'static str> {
        if input.len() < 4 {
            return Err("stream shorter than coder preamble");
        }
        let code = u32::from_be_bytes([input[0], input[1], input[2], input[3]]);
        Ok(RangeDecoder {
            input,
            pos: 4,
            code,
            range: u32::MAX,
        })
    }

    /// Bytes consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn is_exhausted(&self) -> bool {
        self.pos == self.input.len()
    }

    #[inline]
    fn normalize(&mut self) -> Result<(), &'static str> {
        while self.range < TOP {
            let byte = *self.input.get(self.pos).ok_or("stream exhausted")?;
            self.pos += 1;
            self.code = (self.code << 8) | u32::from(byte);
            self.range <<= 8;
        }
        Ok(())
    }

    /// First half of symbol decoding: the target count in `[0, total)`.
    #[inline]
    pub fn target(&mut self, total: u32) -> Result<u32, &'static str> {
        let r = self.range / total;
        let t = self.code / r;
        if t >= total {
            return Err("code value outside coder range");
        }
        Ok(t)
    }

    /// Second half of symbol decoding, after the caller mapped the target
    /// to the interval `[low, low + freq)`.
    #[inline]
    pub fn consume(&mut self, low: u32, freq: u32, total: u32) -> Result<(), &'static str> {
        let r = self.range / total;
        self.code -= r * low;
        self.range = r * freq;
        self.normalize()
    }

    pub fn decode_bits(&mut self, bits: u32) -> Result<u32, &'static str> {
        let r = self.range >> bits;
        let v = self.code / r;
        if v >> bits != 0 {
            return Err("code value outside coder range");
        }
        self.code -= v * r;
        self.range = r;
        self.normalize()?;
        Ok(v)
    }
}

pub(crate) fn corrupt(band: usize, index: usize, message: &str) -> Error {
    Error::Corrupt {
        band,
        index,
        message: message.to_string(),
    }
}
