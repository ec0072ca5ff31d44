//! Relative rank and the measure ρ.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fieldlinalg::Entries;
use crate::ptcore::split::{SplitProblem, View};
use crate::tensorspace::{FlatteningSpec, Tensor};

use super::graph::{orientations, Orientation, PathGraph};

/// The exact rational `rank / n^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RelValue {
    pub rank: u128,
    pub n: u64,
    pub exp: u32,
}

impl RelValue {
    pub fn new(rank: u128, n: u64, exp: u32) -> Self {
        RelValue { rank, n, exp }
    }

    pub fn zero(n: u64, exp: u32) -> Self {
        RelValue { rank: 0, n, exp }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.rank), BigInt::from(self.n).pow(self.exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.rank as f64 / (self.n as f64).powi(self.exp as i32)
    }

    /// Sum over a common base, aligning exponents.
    pub fn add(&self, other: &RelValue) -> Result<RelValue> {
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!("bases {} and {}", self.n, other.n)));
        }
        let exp = self.exp.max(other.exp);
        let lift = |v: &RelValue| -> Result<u128> {
            (v.n as u128)
                .checked_pow(exp - v.exp)
                .and_then(|f| f.checked_mul(v.rank))
                .ok_or_else(|| Error::OutOfRange("relative value overflow".into()))
        };
        let rank = lift(self)?
            .checked_add(lift(other)?)
            .ok_or_else(|| Error::OutOfRange("relative value overflow".into()))?;
        Ok(RelValue { rank, n: self.n, exp })
    }

    pub fn mul(&self, other: &RelValue) -> Result<RelValue> {
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!("bases {} and {}", self.n, other.n)));
        }
        let rank = self
            .rank
            .checked_mul(other.rank)
            .ok_or_else(|| Error::OutOfRange("relative value overflow".into()))?;
        Ok(RelValue { rank, n: self.n, exp: self.exp + other.exp })
    }

    /// `self · n^k` for a signed `k`, as an exact rational.
    pub fn scaled(&self, k: i64) -> BigRational {
        let f = BigRational::from_integer(BigInt::from(self.n).pow(k.unsigned_abs() as u32));
        if k >= 0 {
            self.to_rational() * f
        } else {
            self.to_rational() / f
        }
    }
}

impl PartialOrd for RelValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RelValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_rational().cmp(&other.to_rational())
    }
}

impl fmt::Display for RelValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}^{}", self.rank, self.n, self.exp)
    }
}

fn check_labels(a: &Tensor, g: &PathGraph) -> Result<()> {
    let mut labels = a.labels().to_vec();
    labels.sort_unstable();
    if labels != g.directed() {
        return Err(Error::InvalidArgument(format!(
            "tensor labels {:?} are not D(G) = {:?}",
            a.labels(),
            g.directed()
        )));
    }
    Ok(())
}

fn check_base(o: &Orientation, want: &[i64], what: &str) -> Result<()> {
    if o.base() != want {
        return Err(Error::InvalidArgument(format!("{what} is over {:?}, expected {want:?}", o.base())));
    }
    Ok(())
}

/// Row and column labels `I_α ⊔ (I_γ ∩ D₁)`, `J_α ⊔ (J_γ ∩ D₁)`.
pub fn relrk_spec(g: &PathGraph, alpha: &Orientation, gamma: &Orientation) -> Result<FlatteningSpec> {
    check_base(alpha, &g.v2(), "α")?;
    check_base(gamma, &g.v1(), "γ")?;
    let d1 = g.d1();
    let pick = |from_alpha: Vec<i64>, from_gamma: Vec<i64>| -> Vec<i64> {
        let mut v: Vec<i64> = from_alpha.into_iter().chain(from_gamma.into_iter().filter(|l| d1.contains(l))).collect();
        v.sort_unstable();
        v
    };
    Ok(FlatteningSpec::new(
        pick(alpha.i_labels(), gamma.i_labels()),
        pick(alpha.j_labels(), gamma.j_labels()),
    ))
}

pub fn relrk(a: &Tensor, g: &PathGraph, alpha: &Orientation, gamma: &Orientation) -> Result<RelValue> {
    check_labels(a, g)?;
    let spec = relrk_spec(g, alpha, gamma)?;
    let rank = a.flatten_mat(&spec)?.rank();
    Ok(RelValue::new(rank as u128, a.n() as u64, g.edge_count() as u32))
}

/// The partition `I_{a,α,b} ⊔ J_{a,α,b}` of `[2d]` for a length-`d` path.
pub fn path_partition(d: usize, a: bool, alpha: &[bool], b: bool) -> Result<FlatteningSpec> {
    if d == 0 || alpha.len() + 1 != d {
        return Err(Error::Dimension(format!("α has {} bits for d = {d}", alpha.len())));
    }
    let top = 2 * d as i64;
    let bit = |x: bool| x as i64;
    let mut i = vec![bit(a)];
    let mut j = vec![1 - bit(a)];
    for (k, &x) in alpha.iter().enumerate() {
        let base = 2 * (k as i64 + 1);
        i.push(base + bit(x));
        j.push(base + 1 - bit(x));
    }
    i.push(top + bit(b));
    j.push(top + 1 - bit(b));
    let keep = |v: Vec<i64>| -> Vec<i64> {
        let mut v: Vec<i64> = v.into_iter().filter(|l| (1..=top).contains(l)).collect();
        v.sort_unstable();
        v
    };
    Ok(FlatteningSpec::new(keep(i), keep(j)))
}

/// `relrk_{a,α,b}(A) = n^{-d} rank(Mat_{I,J}(A))` for `A` over labels `1..=2d`.
pub fn relrk_path(a: &Tensor, alpha_a: bool, alpha: &[bool], b: bool) -> Result<RelValue> {
    if !a.order().is_multiple_of(2) || a.order() == 0 {
        return Err(Error::Dimension(format!("order {} is not 2d", a.order())));
    }
    let d = a.order() / 2;
    let spec = path_partition(d, alpha_a, alpha, b)?;
    let rank = a.flatten_mat(&spec)?.rank();
    Ok(RelValue::new(rank as u128, a.n() as u64, d as u32))
}

/// Result of an exact ρ computation.
#[derive(Clone, Debug, PartialEq)]
pub struct Rho {
    pub value: RelValue,
    /// `min Σ_α rank` for each γ in mask order.
    pub per_gamma: Vec<u128>,
    /// The first γ attaining the maximum.
    pub worst_gamma: u64,
}

/// `|F|^{(2^{|V₂|} - 1)·n^{|D(G)|}}`, saturating.
pub fn rho_enumeration_size(a: &Tensor, g: &PathGraph) -> Result<u128> {
    let p = a.ctx().require_finite()? as u128;
    let parts = 1u128.checked_shl(g.v2().len() as u32).unwrap_or(u128::MAX);
    let digits = (parts - 1).saturating_mul(a.len() as u128);
    let mut total = 1u128;
    let mut k = 0u128;
    while k < digits && total != u128::MAX {
        total = total.saturating_mul(p);
        k += 1;
    }
    Ok(total)
}

/// `max_γ min_{X ⊢ A} Σ_α relrk_{α,γ}(X_α)` by exhaustive search.
pub fn rho_exact(a: &Tensor, g: &PathGraph, budget: u128) -> Result<Rho> {
    check_labels(a, g)?;
    let p = a.ctx().require_finite()?;
    let size = rho_enumeration_size(a, g)?;
    if size > budget {
        return Err(Error::BudgetExceeded { needed: format!("{size} decompositions per γ"), budget });
    }
    let target = match a.entries() {
        Entries::Fp(v) => v.clone(),
        Entries::C(_) => unreachable!("finite field checked"),
    };
    let alphas = orientations(&g.v2())?;
    let gammas = orientations(&g.v1())?;
    let lower = usize::from(!a.is_zero());
    let mut per_gamma = Vec::with_capacity(gammas.len());
    for gamma in &gammas {
        let views = alphas
            .iter()
            .map(|alpha| {
                let (rows, cols, src) = a.flatten_index(&relrk_spec(g, alpha, gamma)?)?;
                Ok(View { rows, cols, src })
            })
            .collect::<Result<Vec<_>>>()?;
        let problem = SplitProblem { p, target: target.clone(), views };
        per_gamma.push(problem.minimize(lower).0 as u128);
    }
    let best = *per_gamma.iter().max().expect("at least one γ");
    let worst_gamma = per_gamma.iter().position(|&v| v == best).expect("max exists") as u64;
    Ok(Rho {
        value: RelValue::new(best, a.n() as u64, g.edge_count() as u32),
        per_gamma,
        worst_gamma,
    })
}

fn check_decomposition(a: &Tensor, g: &PathGraph, parts: &[Tensor]) -> Result<()> {
    let want = 1usize << g.v2().len();
    if parts.len() != want {
        return Err(Error::Dimension(format!("{} parts, expected {want}", parts.len())));
    }
    let mut sum = Tensor::zeros(a.n(), a.labels().to_vec(), *a.ctx())?;
    for x in parts {
        check_labels(x, g)?;
        sum = sum.add(&x.reorder(a.labels())?)?;
    }
    if !sum.approx_eq(a) {
        return Err(Error::InvalidCertificate("decomposition does not sum to A".into()));
    }
    Ok(())
}

/// `max_γ Σ_α relrk_{α,γ}(X_α)` for one fixed decomposition (parts in α mask
/// order); an upper bound on ρ(A).
pub fn rho_from_decomposition(a: &Tensor, g: &PathGraph, parts: &[Tensor]) -> Result<RelValue> {
    rho_from_decompositions(a, g, |_| parts.to_vec())
}

/// Like [`rho_from_decomposition`] with a decomposition chosen per γ.
pub fn rho_from_decompositions(
    a: &Tensor,
    g: &PathGraph,
    mut choose: impl FnMut(&Orientation) -> Vec<Tensor>,
) -> Result<RelValue> {
    check_labels(a, g)?;
    let alphas = orientations(&g.v2())?;
    let mut best = RelValue::zero(a.n() as u64, g.edge_count() as u32);
    for gamma in orientations(&g.v1())? {
        let parts = choose(&gamma);
        check_decomposition(a, g, &parts)?;
        let mut total = RelValue::zero(a.n() as u64, g.edge_count() as u32);
        for (alpha, x) in alphas.iter().zip(&parts) {
            total = total.add(&relrk(x, g, alpha, &gamma)?)?;
        }
        best = best.max(total);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::FieldCtx;

    fn identity_edge(ctx: FieldCtx) -> Tensor {
        Tensor::new(2, vec![1, 2], ctx, Entries::Fp(vec![1, 0, 0, 1])).unwrap()
    }

    #[test]
    fn single_edge_identity() {
        let ctx = FieldCtx::gf(2).unwrap();
        let g = PathGraph::new([1]).unwrap();
        let a = identity_edge(ctx);
        let alpha = Orientation::empty();
        let values: Vec<RelValue> =
            orientations(&g.v1()).unwrap().iter().map(|gm| relrk(&a, &g, &alpha, gm).unwrap()).collect();
        let halves: Vec<(u128, u32)> = values.iter().map(|v| (v.rank, v.exp)).collect();
        assert_eq!(halves, vec![(2, 1), (1, 1), (1, 1), (2, 1)]);
        let rho = rho_exact(&a, &g, 1 << 28).unwrap();
        assert_eq!(rho.value.to_rational(), BigRational::from_integer(1.into()));
        let zero = Tensor::zeros(2, vec![1, 2], ctx).unwrap();
        assert_eq!(rho_exact(&zero, &g, 1 << 28).unwrap().value.rank, 0);
    }

    #[test]
    fn path_definitions_agree() {
        use rand::{Rng, SeedableRng};
        let ctx = FieldCtx::gf(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for d in 1..=3usize {
            let g = PathGraph::path(d).unwrap();
            let data: Vec<u64> = (0..2usize.pow(2 * d as u32)).map(|_| rng.gen_range(0..3)).collect();
            let a = Tensor::new(2, (1..=2 * d as i64).collect(), ctx, Entries::Fp(data)).unwrap();
            for am in 0..1u64 << (d - 1) {
                for gm in 0..4u64 {
                    let alpha_bits: Vec<bool> = (0..d - 1).map(|k| am >> k & 1 == 1).collect();
                    let (ab, bb) = (gm & 1 == 1, gm >> 1 & 1 == 1);
                    let alpha = Orientation::new(&g.v2(), am).unwrap();
                    let gamma = Orientation::new(&g.v1(), gm).unwrap();
                    assert_eq!(
                        relrk_path(&a, ab, &alpha_bits, bb).unwrap(),
                        relrk(&a, &g, &alpha, &gamma).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn rel_values_compare_exactly() {
        let half = RelValue::new(1, 2, 1);
        let quarter_twice = RelValue::new(2, 2, 2);
        assert_eq!(half.cmp(&quarter_twice), Ordering::Equal);
        assert_eq!(half.add(&quarter_twice).unwrap(), RelValue::new(4, 2, 2));
        assert_eq!(half.mul(&half).unwrap(), RelValue::new(1, 2, 2));
        assert!(RelValue::new(3, 3, 1) > half);
    }

    #[test]
    fn decompositions_bound_rho() {
        let ctx = FieldCtx::gf(2).unwrap();
        let g = PathGraph::path(2).unwrap();
        let a = Tensor::from_fn(2, vec![1, 2, 3, 4], ctx, |x| ctx.from_int(((x[0] ^ x[3]) & (x[1] | x[2])) as i64))
            .unwrap();
        let exact = rho_exact(&a, &g, 1 << 28).unwrap().value;
        let zero = Tensor::zeros(2, vec![1, 2, 3, 4], ctx).unwrap();
        let trivial = rho_from_decomposition(&a, &g, &[a.clone(), zero.clone()]).unwrap();
        assert!(trivial >= exact);
        assert!(rho_from_decomposition(&a, &g, &[a.clone(), a.clone()]).is_err());
        assert_eq!(rho_from_decomposition(&zero, &g, &[zero.clone(), zero.clone()]).unwrap().rank, 0);
    }
}
