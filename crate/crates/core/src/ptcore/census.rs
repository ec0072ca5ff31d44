//! Exact PT-rank distributions over small populations.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx};
use crate::tensorspace::HyperMatrix;

use super::exact::{enumeration_size, gf2_small_tables, pt_rank_exact_with_budget};
use super::kappa::Kappa;
use super::minplus::xor_min_plus;
use super::transpose::transpose_source;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CensusMode {
    Exhaustive,
    Sample { count: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Population {
    All,
    FullySymmetric,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Population::All => "all",
            Population::FullySymmetric => "fully-symmetric",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Census {
    pub n: usize,
    pub d: usize,
    pub ctx: FieldCtx,
    pub mode: CensusMode,
    pub population: Population,
    /// `|F|^{free positions}`, saturating.
    pub population_size: u128,
    pub evaluated: u64,
    pub histogram: BTreeMap<usize, u64>,
    /// PT-rank of the identity at this size, when it was in budget.
    pub identity_value: Option<usize>,
}

impl Census {
    pub fn count(&self, value: usize) -> u64 {
        self.histogram.get(&value).copied().unwrap_or(0)
    }

    pub fn count_at_least(&self, value: usize) -> u64 {
        self.histogram.range(value..).map(|(_, c)| c).sum()
    }
}

/// Orbits of entry positions under the group generated by the single-block
/// partial transposes. A matrix is fully symmetric iff it is constant on
/// every orbit.
pub fn symmetric_orbits(n: usize, d: usize) -> Vec<Vec<usize>> {
    let dim = n.pow(d as u32);
    let len = dim * dim;
    let gens: Vec<Vec<usize>> =
        (1..=d).map(|k| transpose_source(n, d, &Kappa::new(d, &[k]).expect("k ∈ [d]"))).collect();
    let mut orbit_of = vec![usize::MAX; len];
    let mut orbits = Vec::new();
    for start in 0..len {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        let mut k = 0;
        while k < members.len() {
            let x = members[k];
            for g in &gens {
                let y = g[x];
                if orbit_of[y] == usize::MAX {
                    orbit_of[y] = id;
                    members.push(y);
                }
            }
            k += 1;
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

fn saturating_pow(p: u64, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(p as u128))
}

/// Materializes a member of the population from base-`p` digits, one digit
/// per entry or per orbit.
fn build(n: usize, d: usize, ctx: FieldCtx, orbits: Option<&[Vec<usize>]>, digits: &[u64]) -> Result<HyperMatrix> {
    let dim = n.pow(d as u32);
    let data = match orbits {
        None => digits.to_vec(),
        Some(orbits) => {
            let mut v = vec![0u64; dim * dim];
            for (o, &x) in orbits.iter().zip(digits) {
                for &pos in o {
                    v[pos] = x;
                }
            }
            v
        }
    };
    HyperMatrix::new(n, d, DenseMatrix::new(dim, dim, ctx, Entries::Fp(data))?)
}

pub fn ptrank_census(
    n: usize,
    d: usize,
    ctx: FieldCtx,
    mode: CensusMode,
    population: Population,
    budget: u128,
) -> Result<Census> {
    let p = ctx.require_finite()?;
    let probe = HyperMatrix::zeros(n, d, ctx)?;
    let per_matrix = enumeration_size(&probe)?;
    if per_matrix > budget {
        return Err(Error::BudgetExceeded { needed: format!("{per_matrix} assignments per matrix"), budget });
    }
    let dim = probe.dim();
    let orbits = match population {
        Population::All => None,
        Population::FullySymmetric => Some(symmetric_orbits(n, d)),
    };
    let free = orbits.as_ref().map_or(dim * dim, |o| o.len());
    let population_size = saturating_pow(p, free);
    let evaluated = match mode {
        CensusMode::Exhaustive => population_size,
        CensusMode::Sample { count, .. } => count as u128,
    };
    let fast = n == 2 && d == 2 && p == 2;
    if !fast && evaluated.saturating_mul(per_matrix.max(1)) > budget {
        return Err(Error::BudgetExceeded {
            needed: format!("{evaluated} matrices × {per_matrix} assignments"),
            budget,
        });
    }
    if evaluated > u64::MAX as u128 {
        return Err(Error::BudgetExceeded { needed: format!("{evaluated} matrices"), budget });
    }
    let evaluated = evaluated as u64;

    let mut digits = vec![0u64; free];
    let mut rng = match mode {
        CensusMode::Sample { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        CensusMode::Exhaustive => None,
    };
    let mut next_digits = |t: u64, digits: &mut [u64]| match rng.as_mut() {
        Some(rng) => digits.iter_mut().for_each(|x| *x = rng.gen_range(0..p)),
        None => {
            let mut r = t;
            for x in digits.iter_mut() {
                *x = r % p;
                r /= p;
            }
        }
    };

    let mut histogram = BTreeMap::new();
    if fast {
        let (plain, t1) = gf2_small_tables();
        let values = xor_min_plus(&plain, &t1)?;
        for t in 0..evaluated {
            next_digits(t, &mut digits);
            let m = build(n, d, ctx, orbits.as_deref(), &digits)?;
            let idx = super::exact::gf2_small_index(&m).expect("GF(2), n = d = 2");
            *histogram.entry(values[idx] as usize).or_insert(0) += 1;
        }
    } else {
        for t in 0..evaluated {
            next_digits(t, &mut digits);
            let m = build(n, d, ctx, orbits.as_deref(), &digits)?;
            let (v, _) = pt_rank_exact_with_budget(&m, budget)?;
            *histogram.entry(v).or_insert(0) += 1;
        }
    }
    let identity_value = pt_rank_exact_with_budget(&HyperMatrix::identity(n, d, ctx)?, budget).ok().map(|x| x.0);
    Ok(Census {
        n,
        d,
        ctx,
        mode,
        population,
        population_size,
        evaluated,
        histogram,
        identity_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptcore::exact::DEFAULT_BUDGET;
    use crate::ptcore::{is_fully_symmetric, pt_rank_exact};

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::gf(p).unwrap()
    }

    #[test]
    fn orbits_match_symmetric_matrices() {
        let orbits = symmetric_orbits(2, 2);
        assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), 16);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            let digits: Vec<u64> = (0..orbits.len()).map(|_| rng.gen_range(0..3)).collect();
            assert!(is_fully_symmetric(&build(2, 2, gf(3), Some(&orbits), &digits).unwrap()));
        }
        // Count symmetric matrices directly over GF(2).
        let direct = (0..1u32 << 16)
            .filter(|x| {
                let digits: Vec<u64> = (0..16).map(|k| ((x >> k) & 1) as u64).collect();
                is_fully_symmetric(&build(2, 2, gf(2), None, &digits).unwrap())
            })
            .count();
        assert_eq!(direct, 1 << orbits.len());
    }

    #[test]
    fn full_gf2_census() {
        let c = ptrank_census(2, 2, gf(2), CensusMode::Exhaustive, Population::All, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.evaluated, 65536);
        assert_eq!(c.histogram.values().sum::<u64>(), 65536);
        assert_eq!(c.count(0), 1);
        assert!(2 * c.count_at_least(2) > 65536);
        assert_eq!(c.identity_value, Some(2));
    }

    #[test]
    fn fast_path_agrees_with_oracle_on_samples() {
        let mode = CensusMode::Sample { count: 30, seed: 5 };
        let fast = ptrank_census(2, 2, gf(2), mode, Population::All, DEFAULT_BUDGET).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hist = BTreeMap::new();
        for _ in 0..30 {
            let digits: Vec<u64> = (0..16).map(|_| rng.gen_range(0..2)).collect();
            let v = pt_rank_exact(&build(2, 2, gf(2), None, &digits).unwrap()).unwrap().0;
            *hist.entry(v).or_insert(0) += 1;
        }
        assert_eq!(fast.histogram, hist);
    }

    #[test]
    fn symmetric_population_size() {
        let c = ptrank_census(2, 2, gf(2), CensusMode::Exhaustive, Population::FullySymmetric, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.population_size, 1 << symmetric_orbits(2, 2).len());
        assert_eq!(c.evaluated as u128, c.population_size);
        assert_eq!(c.count(0), 1);
    }

    #[test]
    fn generic_path_and_budget() {
        let c = ptrank_census(3, 1, gf(2), CensusMode::Exhaustive, Population::All, DEFAULT_BUDGET).unwrap();
        // d = 1: the value is the ordinary rank; 512 matrices over GF(2).
        assert_eq!(c.evaluated, 512);
        assert_eq!(c.count(3), 168);
        assert!(ptrank_census(2, 2, gf(3), CensusMode::Exhaustive, Population::All, DEFAULT_BUDGET).is_err());
    }
}
