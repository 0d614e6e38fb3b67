use super::context::{ContextMatrix, ContextRow};
use super::roles::{PredictorRole, RoleMask, ROLE_COUNT};
use crate::error::{Error, Result};
use crate::linalg;

/// Number of fractional bits of a model coefficient.
pub const FRAC_BITS: u32 = 16;
const ONE: f64 = (1u32 << FRAC_BITS) as f64;
/// Relative pivot tolerance of the unit-diagonal normal equations.
pub const PIVOT_TOLERANCE: f64 = 1e-9;

/// Linear predictor of one detail band: selected roles and their Q15.16
/// coefficients in role order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PredictionModel {
    mask: RoleMask,
    coeffs: Vec<i32>,
}

impl PredictionModel {
    pub fn new(mask: RoleMask, coeffs: Vec<i32>) -> Result<Self> {
        if coeffs.len() != mask.count() {
            return Err(Error::inconsistent(format!(
                "mask {mask} selects {} roles but {} coefficients were given",
                mask.count(),
                coeffs.len()
            )));
        }
        Ok(PredictionModel { mask, coeffs })
    }

    /// The model that predicts 0 everywhere.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a model from `(role, coefficient)` pairs in any order.
    pub fn from_terms(terms: &[(PredictorRole, f64)]) -> Self {
        let mut sorted = terms.to_vec();
        sorted.sort_by_key(|t| t.0);
        sorted.dedup_by_key(|t| t.0);
        PredictionModel {
            mask: sorted.iter().map(|t| t.0).collect(),
            coeffs: sorted.iter().map(|t| quantize(t.1)).collect(),
        }
    }

    pub fn mask(&self) -> RoleMask {
        self.mask
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn coefficient(&self, role: PredictorRole) -> Option<i32> {
        self.mask.roles().position(|r| r == role).map(|i| self.coeffs[i])
    }

    /// Terms as `(role, coefficient)` with the coefficient as a real number.
    pub fn terms(&self) -> impl Iterator<Item = (PredictorRole, f64)> + '_ {
        self.mask.roles().zip(self.coeffs.iter().map(|&q| f64::from(q) / ONE))
    }

    /// Size of the serialized record: the mask plus one word per role.
    pub fn record_len(&self) -> usize {
        2 + 4 * self.coeffs.len()
    }

    pub fn write_record(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.mask.bits().to_le_bytes());
        for q in &self.coeffs {
            out.extend_from_slice(&q.to_le_bytes());
        }
    }

    /// Parses a record from the front of `bytes`, returning the model and
    /// the number of bytes read. Errors carry offsets relative to `bytes`.
    pub fn read_record(bytes: &[u8]) -> Result<(Self, usize)> {
        let head: [u8; 2] = bytes
            .get(..2)
            .and_then(|b| b.try_into().ok())
            .ok_or_else(|| Error::format(bytes.len(), "truncated model mask"))?;
        let bits = u16::from_le_bytes(head);
        let mask = RoleMask::from_bits(bits)
            .ok_or_else(|| Error::format(0, format!("model mask {bits:#06x} has reserved bits set")))?;
        let mut coeffs = Vec::with_capacity(mask.count());
        for i in 0..mask.count() {
            let at = 2 + 4 * i;
            let word: [u8; 4] = bytes
                .get(at..at + 4)
                .and_then(|b| b.try_into().ok())
                .ok_or_else(|| Error::format(bytes.len(), "truncated model coefficient"))?;
            coeffs.push(i32::from_le_bytes(word));
        }
        Ok((PredictionModel { mask, coeffs }, 2 + 4 * mask.count()))
    }
}

impl std::fmt::Display for PredictionModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (role, a)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{a:.5}*{role}")?;
        }
        Ok(())
    }
}

/// Clamps to `[-32768, 32768)` and rounds to the nearest Q15.16 value,
/// halves away from zero.
pub fn quantize(a: f64) -> i32 {
    if a.is_nan() {
        return 0;
    }
    let q = (a.clamp(-32768.0, 32768.0) * ONE).round();
    q.clamp(f64::from(i32::MIN), f64::from(i32::MAX)) as i32
}

/// Predicted value for one context row: the Q15.16 dot product rounded to
/// the nearest integer, halves away from zero. Integer-only, wrapping on
/// the (unreachable for valid pyramids) 64-bit overflow.
#[inline]
pub fn predict(model: &PredictionModel, row: &ContextRow) -> i64 {
    let mut acc: i64 = 0;
    for (role, &q) in model.mask.roles().zip(&model.coeffs) {
        acc = acc.wrapping_add(i64::from(q).wrapping_mul(i64::from(row[role.index()])));
    }
    round_q16(acc)
}

#[inline]
pub(crate) fn round_q16(acc: i64) -> i64 {
    if acc >= 0 {
        acc.wrapping_add(1 << 15) >> FRAC_BITS
    } else {
        -(acc.wrapping_neg().wrapping_add(1 << 15) >> FRAC_BITS)
    }
}

/// Normal equations of a context over all eleven roles, accumulated exactly.
/// Subsets are solved from the same sums.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    gram: [[i128; ROLE_COUNT]; ROLE_COUNT],
    rhs: [i128; ROLE_COUNT],
}

impl LeastSquares {
    pub fn new(ctx: &ContextMatrix) -> Self {
        let mut gram = [[0i128; ROLE_COUNT]; ROLE_COUNT];
        let mut rhs = [0i128; ROLE_COUNT];
        for (row, &y) in ctx.rows.iter().zip(&ctx.dependent) {
            let x = row.map(i64::from);
            for i in 0..ROLE_COUNT {
                if x[i] == 0 {
                    continue;
                }
                rhs[i] += i128::from(x[i] * i64::from(y));
                for j in i..ROLE_COUNT {
                    gram[i][j] += i128::from(x[i] * x[j]);
                }
            }
        }
        for i in 0..ROLE_COUNT {
            for j in 0..i {
                gram[i][j] = gram[j][i];
            }
        }
        LeastSquares { gram, rhs }
    }

    /// Unquantized least-squares coefficients of the roles in `mask`, in
    /// role order, or `None` when the system is singular.
    ///
    /// The system is scaled to unit diagonal before elimination so the
    /// pivot tolerance is relative.
    pub fn solve(&self, mask: RoleMask) -> Option<Vec<f64>> {
        let idx: Vec<usize> = mask.roles().map(PredictorRole::index).collect();
        let k = idx.len();
        let diag: Vec<f64> = idx.iter().map(|&i| self.gram[i][i] as f64).collect();
        if diag.iter().any(|&d| d <= 0.0) {
            return None;
        }
        let scale: Vec<f64> = diag.iter().map(|d| d.sqrt().recip()).collect();
        let mut a = vec![0.0; k * k];
        let mut b = vec![0.0; k];
        for (p, &i) in idx.iter().enumerate() {
            for (q, &j) in idx.iter().enumerate() {
                a[p * k + q] = self.gram[i][j] as f64 * scale[p] * scale[q];
            }
            b[p] = self.rhs[i] as f64 * scale[p];
        }
        let z = linalg::solve_in_place(&mut a, &mut b, k, PIVOT_TOLERANCE)?;
        Some(z.iter().zip(&scale).map(|(z, s)| z * s).collect())
    }
}

/// Result of fitting a model to a context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fit {
    pub model: PredictionModel,
    /// Set when the normal equations were singular and the zero model was
    /// substituted.
    pub degenerate: bool,
}

/// Least-squares coefficients before quantization; `None` if singular.
pub fn fit_coefficients(ctx: &ContextMatrix, mask: RoleMask) -> Option<Vec<f64>> {
    LeastSquares::new(ctx).solve(mask)
}

/// Fits the roles in `mask` by least squares and quantizes to Q15.16.
pub fn fit_model(ctx: &ContextMatrix, mask: RoleMask) -> Fit {
    fit_with(&LeastSquares::new(ctx), mask)
}

pub(crate) fn fit_with(ls: &LeastSquares, mask: RoleMask) -> Fit {
    if mask.is_empty() {
        return Fit {
            model: PredictionModel::zero(),
            degenerate: false,
        };
    }
    match ls.solve(mask) {
        Some(a) => Fit {
            model: PredictionModel {
                mask,
                coeffs: a.into_iter().map(quantize).collect(),
            },
            degenerate: false,
        },
        None => Fit {
            model: PredictionModel::zero(),
            degenerate: true,
        },
    }
}

/// Prediction residuals `actual - predicted` of every row of a context.
pub fn residuals(ctx: &ContextMatrix, model: &PredictionModel) -> Vec<i64> {
    ctx.rows
        .iter()
        .zip(&ctx.dependent)
        .map(|(row, &y)| i64::from(y) - predict(model, row))
        .collect()
}
