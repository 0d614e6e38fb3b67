//! Integer code-length estimates in Q32 fixed point (units of 2^-32 bit).
//!
//! Everything here is integer arithmetic so that encoder decisions based on
//! these numbers are identical on every platform.

use super::model::AdaptiveModel;
use super::{SymbolStream, ESCAPE_BITS};

pub const ONE_BIT: u128 = 1 << 32;

/// `log2(x)` in Q32, truncated. `x` must be nonzero.
pub fn log2_q32(x: u64) -> u64 {
    assert!(x > 0, "log2 of zero");
    let int = 63 - u64::from(x.leading_zeros());
    // mantissa in [1, 2) as Q63
    let mut m: u128 = u128::from(x) << (63 - int);
    let mut frac = 0u64;
    for bit in (0..32).rev() {
        m = (m * m) >> 63;
        if m >= 1 << 64 {
            m >>= 1;
            frac |= 1 << bit;
        }
    }
    (int << 32) | frac
}

/// `sum(c * log2(n / c))` over the given counts, i.e. `n * H0`, in Q32.
pub fn order0_cost_q32(counts: impl IntoIterator<Item = u64>) -> u128 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0;
    }
    let log_n = log2_q32(n);
    counts
        .iter()
        .map(|&c| u128::from(c) * u128::from(log_n - log2_q32(c)))
        .sum()
}

/// `n * H0` of a sequence of values, in Q32.
pub fn order0_cost_of_values(values: &[i64]) -> u128 {
    let Some((&min, &max)) = values.iter().min().zip(values.iter().max()) else {
        return 0;
    };
    let span = max.abs_diff(min);
    if span < 1 << 16 {
        let mut hist = vec![0u64; span as usize + 1];
        for &v in values {
            hist[v.abs_diff(min) as usize] += 1;
        }
        order0_cost_q32(hist)
    } else {
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        let runs = sorted.chunk_by(|a, b| a == b).map(|run| run.len() as u64);
        order0_cost_q32(runs)
    }
}

/// Ideal code length of a stream under a fresh [`AdaptiveModel`], plus
/// the raw escape payload bits, in Q32.
pub fn adaptive_cost_q32(stream: &SymbolStream) -> u128 {
    let mut model = AdaptiveModel::new();
    let mut cost: u128 = stream.escapes.len() as u128 * u128::from(ESCAPE_BITS) * ONE_BIT;
    for &s in &stream.symbols {
        cost += u128::from(model.cost_q32(s as usize));
        model.update(s as usize);
    }
    cost
}

pub fn q32_to_bits(q: u128) -> f64 {
    q as f64 / ONE_BIT as f64
}
