use super::codelength::log2_q32;
use super::ALPHABET_SIZE;

/// Amount added to a symbol's count each time it is coded.
pub const INCREMENT: u32 = 2;
/// Counts are halved (with floor) once the coding total exceeds this.
pub const MAX_TOTAL: u32 = 1 << 16;

/// How one symbol is coded: either a single interval in the table of seen
/// symbols, or the novelty interval followed by the symbol's rank among the
/// symbols not yet seen, coded uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    Seen { low: u32, freq: u32 },
    Novel { low: u32, freq: u32, rank: u32, unseen: u32 },
}

/// Result of looking up a decoder target in the coding table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Seen { symbol: usize, low: u32, freq: u32 },
    Novel { low: u32, freq: u32 },
}

/// Adaptive frequency table shared (by construction, not by reference)
/// between encoder and decoder.
///
/// Only symbols that already occurred in the band hold a count. One extra
/// novelty interval, weighted by the number of distinct symbols seen so far,
/// stands for all the others; a novel symbol is then identified by its rank
/// among the unseen symbols with equal probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdaptiveModel {
    count: Vec<u32>,
    seen_total: u32,
    distinct: u32,
}

impl Default for AdaptiveModel {
    fn default() -> Self {
        Self::new()
    }
}

impl AdaptiveModel {
    pub fn new() -> Self {
        AdaptiveModel {
            count: vec![0; ALPHABET_SIZE],
            seen_total: 0,
            distinct: 0,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.count
    }

    pub fn distinct(&self) -> u32 {
        self.distinct
    }

    fn unseen(&self) -> u32 {
        ALPHABET_SIZE as u32 - self.distinct
    }

    /// Weight of the novelty interval; zero once every symbol has been seen.
    pub fn novelty(&self) -> u32 {
        if self.unseen() == 0 {
            0
        } else {
            self.distinct.max(1)
        }
    }

    /// Total of the coding table, at most [`MAX_TOTAL`].
    pub fn total(&self) -> u32 {
        self.seen_total + self.novelty()
    }

    pub fn coding(&self, symbol: usize) -> Coding {
        let c = self.count[symbol];
        if c > 0 {
            Coding::Seen {
                low: self.count[..symbol].iter().sum(),
                freq: c,
            }
        } else {
            Coding::Novel {
                low: self.seen_total,
                freq: self.novelty(),
                rank: self.count[..symbol].iter().filter(|&&c| c == 0).count() as u32,
                unseen: self.unseen(),
            }
        }
    }

    /// Entry of the coding table containing `target` (`target < total`).
    pub fn lookup(&self, target: u32) -> Lookup {
        if target >= self.seen_total {
            return Lookup::Novel {
                low: self.seen_total,
                freq: self.novelty(),
            };
        }
        let mut low = 0;
        for (symbol, &c) in self.count.iter().enumerate() {
            if target < low + c {
                return Lookup::Seen { symbol, low, freq: c };
            }
            low += c;
        }
        unreachable!("target {target} below seen total {}", self.seen_total)
    }

    /// The unseen symbol with the given rank (`rank < unseen`).
    pub fn unseen_symbol(&self, rank: u32) -> usize {
        self.count
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == 0)
            .nth(rank as usize)
            .map(|(s, _)| s)
            .expect("rank below unseen count")
    }

    /// Ideal code length of `symbol` in the current state, in Q32 bits.
    pub fn cost_q32(&self, symbol: usize) -> u64 {
        let total = log2_q32(u64::from(self.total()));
        match self.coding(symbol) {
            Coding::Seen { freq, .. } => total - log2_q32(u64::from(freq)),
            Coding::Novel { freq, unseen, .. } => total - log2_q32(u64::from(freq)) + log2_q32(u64::from(unseen)),
        }
    }

    pub fn update(&mut self, symbol: usize) {
        if self.count[symbol] == 0 {
            self.distinct += 1;
        }
        self.count[symbol] += INCREMENT;
        self.seen_total += INCREMENT;
        if self.total() > MAX_TOTAL {
            self.seen_total = 0;
            self.distinct = 0;
            for c in &mut self.count {
                *c >>= 1;
                self.seen_total += *c;
                self.distinct += u32::from(*c > 0);
            }
        }
    }
}
