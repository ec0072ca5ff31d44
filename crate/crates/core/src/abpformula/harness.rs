//! The formula-size inequality `L ≥ n^{log ℓ(G)}·ρ(A)` checked on explicit
//! formulas, plus the PT-rank form for shifted tensors.
//!
//! A formula is only an upper-bound witness for the minimum formula size, so
//! every check here is one-sided: a violation means the implemented measure
//! is wrong, never that the formula is too small.
//!
//! When the blocks are `1..=d+1`, restricting the two endpoint coordinates
//! to the first index turns any formula for `A♭` into one for
//! `shifted(M)` with `M = unshift(A♭)` and no more leaves. The PT bound is
//! therefore checked for every such formula, not only for exact shifted
//! tensors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fieldlinalg::FieldCtx;
use crate::pathmeasures::{rho_exact, PathGraph, RelValue};
use crate::ptcore::pt_rank_exact_with_budget;
use crate::tensorspace::{shifted_tensor, unflat, unshift, Tensor};

use super::formula::{formula_eval, random_formula, SmFormula};

const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ShiftedCheck {
    pub d: usize,
    pub pt_rank: usize,
    /// `PT(M) / n^{d - log d + 1}`.
    pub bound: f64,
    /// Whether `A♭` is itself `shifted(M)`.
    pub exact_shift: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainTheoremReport {
    pub leaves: usize,
    pub n: usize,
    pub edges: Vec<i64>,
    pub longest: usize,
    pub rho: RelValue,
    /// `n^{log ℓ}·ρ`.
    pub bound: f64,
    /// `n^{1 + log ℓ}·ρ`, reported only.
    pub strong_bound: f64,
    pub shifted: Option<ShiftedCheck>,
}

impl MainTheoremReport {
    pub fn holds(&self) -> bool {
        self.leaves as f64 + SLACK >= self.bound && self.shifted.as_ref().is_none_or(|s| s.holds)
    }

    /// `leaves - n^{log ℓ}·ρ`.
    pub fn margin(&self) -> f64 {
        self.leaves as f64 - self.bound
    }

    pub fn strong_margin(&self) -> f64 {
        self.leaves as f64 - self.strong_bound
    }
}

/// Checks one formula whose blocks are path edges over an alphabet `[n²]`.
pub fn main_theorem_check(f: &SmFormula, budget: u128) -> Result<MainTheoremReport> {
    let nn = f.alphabet();
    let n = (nn as f64).sqrt().round() as usize;
    if n * n != nn {
        return Err(Error::InvalidArgument(format!("alphabet {nn} is not a square")));
    }
    let g = PathGraph::new(f.blocks().iter().copied())?;
    let flat = formula_eval(f)?;
    let a = unflat(&flat, n)?;
    let rho = rho_exact(&a, &g, budget)?.value;
    let longest = g.longest();
    let scale = (n as f64).powf((longest as f64).log2());
    let rho_f = rho.to_f64();
    let leaves = f.leaves();
    let shifted = if f.blocks().len() >= 2 && g == PathGraph::path(f.blocks().len())? {
        Some(shifted_check(&flat, n, leaves, budget)?)
    } else {
        None
    };
    Ok(MainTheoremReport {
        leaves,
        n,
        edges: g.edges(),
        longest,
        rho,
        bound: scale * rho_f,
        strong_bound: scale * n as f64 * rho_f,
        shifted,
    })
}

fn shifted_check(flat: &Tensor, n: usize, leaves: usize, budget: u128) -> Result<ShiftedCheck> {
    let m = unshift(flat)?;
    let d = m.d();
    let exact_shift = shifted_tensor(&m)? == *flat;
    let pt_rank = if d == 1 { m.rank() } else { pt_rank_exact_with_budget(&m, budget)?.0 };
    let exponent = d as f64 - (d as f64).log2() + 1.0;
    let bound = pt_rank as f64 / (n as f64).powf(exponent);
    Ok(ShiftedCheck { d, pt_rank, bound, exact_shift, holds: leaves as f64 + SLACK >= bound })
}

/// Block sets small enough for exact ρ over GF(2) with `n = 2`; each has
/// `ℓ(G) ≤ 2`.
pub const HARNESS_SHAPES: [&[i64]; 5] = [&[1], &[1, 2], &[0, 1], &[1, 3], &[1, 3, 5]];

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessTrial {
    pub seed: u64,
    pub formula: SmFormula,
    pub report: MainTheoremReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarnessReport {
    pub seed: u64,
    pub trials: Vec<HarnessTrial>,
}

impl HarnessReport {
    pub fn violations(&self) -> Vec<&HarnessTrial> {
        self.trials.iter().filter(|t| !t.report.holds()).collect()
    }
}

/// Per-trial seed; trial `k` uses shape `k mod 5`.
pub fn trial_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// `trials` random formulas over GF(2) with `n = 2`, checked in parallel.
pub fn main_theorem_harness(trials: usize, seed: u64, budget: u128) -> Result<HarnessReport> {
    let ctx = FieldCtx::gf(2)?;
    let trials = (0..trials)
        .into_par_iter()
        .map(|k| {
            let s = trial_seed(seed, k);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let formula = random_formula(&mut rng, HARNESS_SHAPES[k % HARNESS_SHAPES.len()], 4, ctx, 4)?;
            let report = main_theorem_check(&formula, budget)?;
            Ok(HarnessTrial { seed: s, formula, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HarnessReport { seed, trials })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abpformula::formula::{imm_formula, SmNode};

    const BUDGET: u128 = 1 << 20;

    #[test]
    fn imm_formula_bound() {
        let ctx = FieldCtx::gf(2).unwrap();
        let f = imm_formula(2, 2, ctx).unwrap();
        let r = main_theorem_check(&f, BUDGET).unwrap();
        assert_eq!(r.leaves, 8);
        let s = r.shifted.as_ref().unwrap();
        assert_eq!((s.d, s.pt_rank), (1, 2));
        assert!((s.bound - 0.5).abs() < 1e-12);
        assert!(r.holds(), "{r:?}");
        assert!(r.margin() >= 0.0);
    }

    #[test]
    fn zero_formula_has_zero_bound() {
        let ctx = FieldCtx::gf(2).unwrap();
        let x = SmNode::times(SmNode::leaf(1, 0, ctx.one()), SmNode::leaf(2, 3, ctx.one()));
        let f = SmFormula::new(4, ctx, SmNode::Plus(vec![x.clone(), x])).unwrap();
        let r = main_theorem_check(&f, BUDGET).unwrap();
        assert_eq!((r.bound, r.rho.rank), (0.0, 0));
        assert_eq!(r.shifted.unwrap().pt_rank, 0);
    }

    #[test]
    fn rejects_non_square_alphabet() {
        let ctx = FieldCtx::gf(2).unwrap();
        let f = SmFormula::new(3, ctx, SmNode::leaf(1, 0, ctx.one())).unwrap();
        assert!(main_theorem_check(&f, BUDGET).is_err());
    }

    #[test]
    fn harness_is_deterministic_and_clean() {
        let a = main_theorem_harness(10, 7, BUDGET).unwrap();
        assert!(a.violations().is_empty());
        assert_eq!(a, main_theorem_harness(10, 7, BUDGET).unwrap());
        assert!(a.trials.iter().all(|t| t.report.longest <= 2));
    }
}
