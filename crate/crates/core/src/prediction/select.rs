use std::fmt;
use std::str::FromStr;

use super::context::ContextMatrix;
use super::model::{fit_with, residuals, LeastSquares, PredictionModel};
use super::roles::{PredictorRole, RoleMask};
use crate::entropy::codelength::{order0_cost_of_values, ONE_BIT};
use crate::error::Error;
use crate::stats;

/// Correlation magnitude above which a candidate counts as a duplicate of
/// an already admitted one.
pub const COLLINEARITY_THRESHOLD: f64 = 0.95;
/// Fixed cost of a model record in bits, and the cost per selected role.
pub const MASK_BITS: u128 = 16;
pub const COEFF_BITS: u128 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionMode {
    #[default]
    Greedy,
    Exhaustive,
}

impl FromStr for SelectionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "greedy" => Ok(SelectionMode::Greedy),
            "exhaustive" => Ok(SelectionMode::Exhaustive),
            _ => Err(Error::arg(format!("unknown selection mode {s:?} (expected greedy or exhaustive)"))),
        }
    }
}

impl fmt::Display for SelectionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionMode::Greedy => "greedy",
            SelectionMode::Exhaustive => "exhaustive",
        })
    }
}

/// Outcome of predictor selection for one band. Objectives are in Q32
/// bits (see [`crate::entropy::codelength`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub model: PredictionModel,
    pub objective: u128,
    pub empty_objective: u128,
    /// Roles that survived the correlation and collinearity filters.
    pub candidates: RoleMask,
    /// Some evaluated mask had singular normal equations.
    pub degenerate: bool,
}

/// Roles usable for a context: defined correlation with the dependent, and
/// not within the collinearity threshold of an earlier admitted role.
pub fn candidate_roles(ctx: &ContextMatrix) -> RoleMask {
    let y: Vec<f64> = ctx.dependent.iter().map(|&v| f64::from(v)).collect();
    let mut admitted: Vec<(PredictorRole, Vec<f64>)> = Vec::new();
    for role in PredictorRole::ALL {
        let x: Vec<f64> = ctx.rows.iter().map(|r| f64::from(r[role.index()])).collect();
        if !matches!(stats::correlation(&x, &y), Ok(Some(_))) {
            continue;
        }
        let duplicate = admitted.iter().any(|(_, a)| {
            matches!(stats::correlation(&x, a), Ok(Some(r)) if r.abs() > COLLINEARITY_THRESHOLD)
        });
        if !duplicate {
            admitted.push((role, x));
        }
    }
    admitted.into_iter().map(|(r, _)| r).collect()
}

struct Evaluator<'a> {
    ctx: &'a ContextMatrix,
    ls: LeastSquares,
    degenerate: bool,
}

impl Evaluator<'_> {
    /// `(objective, model)` for a mask; a singular mask is charged as the
    /// zero model it falls back to.
    fn eval(&mut self, mask: RoleMask) -> (u128, PredictionModel) {
        let fit = fit_with(&self.ls, mask);
        self.degenerate |= fit.degenerate;
        (objective_of(self.ctx, &fit.model), fit.model)
    }
}

/// `n * H0(residuals) + 16 + 32 * roles` in Q32 bits.
pub fn objective_of(ctx: &ContextMatrix, model: &PredictionModel) -> u128 {
    let res = residuals(ctx, model);
    order0_cost_of_values(&res) + (MASK_BITS + COEFF_BITS * model.mask().count() as u128) * ONE_BIT
}

/// Ordering key: objective, then fewer roles, then earlier roles.
fn key(objective: u128, mask: RoleMask) -> (u128, usize, Vec<usize>) {
    (objective, mask.count(), mask.roles().map(PredictorRole::index).collect())
}

pub fn select_predictors(ctx: &ContextMatrix, mode: SelectionMode) -> Selection {
    let candidates = candidate_roles(ctx);
    let mut ev = Evaluator {
        ctx,
        ls: LeastSquares::new(ctx),
        degenerate: false,
    };
    let (empty_objective, _) = ev.eval(RoleMask::EMPTY);
    let mut best = (empty_objective, RoleMask::EMPTY, PredictionModel::zero());
    match mode {
        SelectionMode::Greedy => loop {
            let mut step: Option<(u128, RoleMask, PredictionModel)> = None;
            for role in candidates.roles().filter(|r| !best.1.contains(*r)) {
                let mask = best.1.with(role);
                let (obj, model) = ev.eval(mask);
                if step.as_ref().is_none_or(|s| obj < s.0) {
                    step = Some((obj, mask, model));
                }
            }
            match step {
                Some(s) if s.0 < best.0 => best = s,
                _ => break,
            }
        },
        SelectionMode::Exhaustive => {
            let all = candidates.bits();
            let mut sub = all;
            while sub != 0 {
                let mask = RoleMask::from_bits(sub).expect("submask of a valid mask");
                let (obj, model) = ev.eval(mask);
                if key(obj, mask) < key(best.0, best.1) {
                    best = (obj, mask, model);
                }
                sub = (sub - 1) & all;
            }
        }
    }
    Selection {
        model: best.2,
        objective: best.0,
        empty_objective,
        candidates,
        degenerate: ev.degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prediction::context::ContextRow;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use PredictorRole::*;

    fn random_ctx(seed: u64, n: usize, f: impl Fn(&ContextRow, &mut ChaCha8Rng) -> i32) -> ContextMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        let mut dep = Vec::new();
        for _ in 0..n {
            let mut row = [0; 11];
            for v in row.iter_mut().take(6) {
                *v = rng.random_range(-200..200);
            }
            dep.push(f(&row, &mut rng));
            rows.push(row);
        }
        ContextMatrix { band: 1, rows, dependent: dep }
    }

    #[test]
    fn exact_parent_copy_selects_parent() {
        let ctx = random_ctx(1, 400, |r, _| r[Parent.index()]);
        for mode in [SelectionMode::Greedy, SelectionMode::Exhaustive] {
            let s = select_predictors(&ctx, mode);
            assert_eq!(s.model.mask(), RoleMask::EMPTY.with(Parent), "{mode}");
            assert_eq!(s.model.coeffs(), [1 << 16]);
            assert!(s.objective < s.empty_objective);
            assert_eq!(s.objective, (MASK_BITS + COEFF_BITS) * ONE_BIT);
        }
    }

    #[test]
    fn undefined_and_zero_columns_are_not_candidates() {
        let ctx = random_ctx(2, 100, |r, _| r[North.index()]);
        let c = candidate_roles(&ctx);
        assert!(!c.contains(Aunt1) && !c.contains(West));
        assert_eq!(c.count(), 6);
    }

    #[test]
    fn near_duplicate_columns_are_pruned_in_role_order() {
        let mut ctx = random_ctx(3, 300, |r, _| r[Parent.index()] + r[North.index()]);
        for row in &mut ctx.rows {
            row[West.index()] = row[Parent.index()] * 2 + 1;
        }
        let c = candidate_roles(&ctx);
        assert!(c.contains(Parent) && !c.contains(West));
    }

    #[test]
    fn constant_dependent_gives_zero_model() {
        let ctx = random_ctx(4, 64, |_, _| 0);
        for mode in [SelectionMode::Greedy, SelectionMode::Exhaustive] {
            let s = select_predictors(&ctx, mode);
            assert!(s.model.is_zero());
            assert!(s.candidates.is_empty());
            assert_eq!(s.objective, s.empty_objective);
        }
    }

    #[test]
    fn exhaustive_never_worse_than_greedy() {
        for seed in 0..20 {
            let ctx = random_ctx(100 + seed, 250, |r, rng| r[Parent.index()] + r[ParentEast.index()] + rng.random_range(-3..=3));
            let g = select_predictors(&ctx, SelectionMode::Greedy);
            let e = select_predictors(&ctx, SelectionMode::Exhaustive);
            assert!(e.objective <= g.objective, "seed {seed}");
            assert!(g.objective <= g.empty_objective);
            assert_eq!(objective_of(&ctx, &g.model), g.objective);
            assert_eq!(objective_of(&ctx, &e.model), e.objective);
        }
    }

    #[test]
    fn exhaustive_is_the_minimum_over_all_masks() {
        let ctx = random_ctx(9, 120, |r, rng| (r[North.index()] - r[ParentSouth.index()]) / 2 + rng.random_range(-40..=40));
        let e = select_predictors(&ctx, SelectionMode::Exhaustive);
        let ls = LeastSquares::new(&ctx);
        for bits in 0..64u16 {
            let model = fit_with(&ls, RoleMask::from_bits(bits).unwrap()).model;
            assert!(e.objective <= objective_of(&ctx, &model));
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("exhaustive".parse::<SelectionMode>().unwrap(), SelectionMode::Exhaustive);
        assert!("best".parse::<SelectionMode>().is_err());
        assert_eq!(SelectionMode::default().to_string(), "greedy");
    }
}
