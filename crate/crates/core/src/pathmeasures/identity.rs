//! Comparing PT-rank with ρ of the padded tensor.
//!
//! `Padded(M)` lives on the path with edges `0..=d`, whose inner vertices
//! `v_1..v_d` carry the labels `(i_k, j_k)` and whose two dangling labels
//! `p` and `q` are supported only at index 0. Any decomposition
//! `Σ X_α = Padded(M)` can be replaced by its projection onto the slice
//! `x_p = x_q = 0`: the projection is a linear map acting on the `p` and `q`
//! coordinates alone, so it factors through every flattening as
//! `P_rows · Mat · P_cols` and cannot raise a rank, whichever side `γ` puts
//! `p` and `q` on. The minimum over decompositions is therefore attained on
//! the slice, and there each relative rank is `rank(Y_α^{⊤κ(α)}) / n^{d+1}`
//! with `κ(α) = {k : bit k-1 of α}`, independent of `γ`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fieldlinalg::Entries;
use crate::ptcore::minplus::{xor_min_plus, xor_min_plus_at};
use crate::ptcore::split::{SmallRank, SplitProblem, View};
use crate::ptcore::{pt_rank_exact_with_budget, PTCertificate};
use crate::tensorspace::{padded_tensor, HyperMatrix, Tensor};

use super::graph::{orientations, Orientation, PathGraph};
use super::measure::{relrk_spec, rho_enumeration_size, rho_exact, rho_from_decomposition, RelValue};

/// How ρ(Padded(M)) was minimized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoRoute {
    /// Exhaustive over all decompositions, no slice restriction.
    Unrestricted,
    /// Four-part XOR min-plus chain over all `2^16` slice parts.
    MinPlusChain,
    /// Exhaustive over slice-supported decompositions.
    SliceSplit,
}

impl RhoRoute {
    pub fn name(&self) -> &'static str {
        match self {
            RhoRoute::Unrestricted => "unrestricted",
            RhoRoute::MinPlusChain => "min-plus-chain",
            RhoRoute::SliceSplit => "slice-split",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoPtReport {
    pub n: usize,
    pub d: usize,
    pub pt_rank: usize,
    pub rho: RelValue,
    pub route: RhoRoute,
    /// ρ bound of the padded PT certificate decomposition.
    pub certificate_bound: RelValue,
    /// ρ bound of the decomposition found by the minimization, when recovered.
    pub search_bound: Option<RelValue>,
}

impl RhoPtReport {
    /// `ρ · n^{d+1}`, exact because the exponent is `d + 1`.
    pub fn scaled_rho(&self) -> u128 {
        self.rho.rank
    }

    pub fn holds(&self) -> bool {
        let v = self.pt_rank as u128;
        self.rho.exp as usize == self.d + 1
            && self.scaled_rho() == v
            && self.certificate_bound.rank == v
            && self.search_bound.is_none_or(|b| b.rank == v)
    }
}

/// Unrestricted enumeration is used up to this many decompositions per γ.
const UNRESTRICTED_LIMIT: u128 = 1 << 20;

fn padded_graph(d: usize) -> Result<PathGraph> {
    PathGraph::path(d + 1)
}

/// `perm[y]` is the row-major offset in `M` of slice entry `y`, where `y`
/// has digits `(i_1, j_1, …, i_d, j_d)`.
fn slice_to_matrix(n: usize, d: usize) -> Vec<usize> {
    let dim = n.pow(d as u32);
    (0..n.pow(2 * d as u32))
        .map(|y| {
            let (mut r, mut c, mut rest) = (0, 0, y);
            let mut place = 1;
            for _ in 0..d {
                c += (rest % n) * place;
                rest /= n;
                r += (rest % n) * place;
                rest /= n;
                place *= n;
            }
            r * dim + c
        })
        .collect()
}

/// The view of a slice vector under `α`, obtained by deleting the rows and
/// columns of the padded flattening that leave the slice.
fn slice_view(padded: &Tensor, g: &PathGraph, alpha: &Orientation) -> Result<View> {
    let n = padded.n();
    let gamma = Orientation::new(&g.v1(), 0)?;
    let (rows, cols, src) = padded.flatten_index(&relrk_spec(g, alpha, &gamma)?)?;
    let slice_end = padded.len() / n;
    let on = |s: usize| s.is_multiple_of(n) && s < slice_end;
    let keep_r: Vec<usize> = (0..rows).filter(|&r| (0..cols).any(|c| on(src[r * cols + c]))).collect();
    let keep_c: Vec<usize> = (0..cols).filter(|&c| (0..rows).any(|r| on(src[r * cols + c]))).collect();
    let mut out = Vec::with_capacity(keep_r.len() * keep_c.len());
    for &r in &keep_r {
        for &c in &keep_c {
            let s = src[r * cols + c];
            if !on(s) {
                return Err(Error::InvalidArgument("slice rows and columns do not factor".into()));
            }
            out.push(s / n);
        }
    }
    Ok(View { rows: keep_r.len(), cols: keep_c.len(), src: out })
}

fn padded_from_slice(m: &HyperMatrix, slice: &[u64]) -> Result<Tensor> {
    let n = m.n();
    let mut data = vec![0u64; slice.len() * n * n];
    for (y, &v) in slice.iter().enumerate() {
        data[y * n] = v;
    }
    Tensor::new(n, (1..=2 * m.d() as i64 + 2).collect(), *m.ctx(), Entries::Fp(data))
}

fn certificate_decomposition(cert: &PTCertificate) -> Result<Vec<Tensor>> {
    let m = cert.target();
    let zero = padded_tensor(&HyperMatrix::zeros(m.n(), m.d(), *m.ctx())?)?;
    let mut parts = vec![zero; 1 << m.d()];
    for (kappa, part) in cert.parts() {
        parts[kappa.mask() as usize] = padded_tensor(part)?;
    }
    Ok(parts)
}

fn residues(m: &HyperMatrix) -> Result<Vec<u64>> {
    match m.body().residues() {
        Some(r) => Ok(r.to_vec()),
        None => Err(Error::InfiniteField(m.ctx().to_string())),
    }
}

struct ChainTables {
    perm: Vec<usize>,
    tables: Vec<Vec<u8>>,
    h1: Vec<u8>,
    h2: Vec<u8>,
}

/// Per-α rank tables over all `2^16` slice parts; they depend only on the
/// shape, so they are built once.
fn chain_tables(padded: &Tensor, g: &PathGraph) -> Result<&'static ChainTables> {
    static TABLES: OnceLock<ChainTables> = OnceLock::new();
    if let Some(t) = TABLES.get() {
        return Ok(t);
    }
    let perm = slice_to_matrix(2, 2);
    let mut ranker = SmallRank::new(2);
    let mut slice = vec![0u64; 16];
    let mut tables = Vec::with_capacity(4);
    for alpha in orientations(&g.v2())? {
        let view = slice_view(padded, g, &alpha)?;
        let table: Vec<u8> = (0..1usize << 16)
            .map(|x| {
                for (y, s) in slice.iter_mut().enumerate() {
                    *s = (x >> perm[y] & 1) as u64;
                }
                ranker.rank(&slice, &view) as u8
            })
            .collect();
        tables.push(table);
    }
    let h1 = xor_min_plus(&tables[0], &tables[1])?;
    let h2 = xor_min_plus(&h1, &tables[2])?;
    Ok(TABLES.get_or_init(|| ChainTables { perm, tables, h1, h2 }))
}

/// Minimum over slice decompositions by the min-plus chain; GF(2), `n = d = 2`.
fn chain_minimum(m: &HyperMatrix, padded: &Tensor, g: &PathGraph) -> Result<(u128, Vec<Vec<u64>>)> {
    let ChainTables { perm, tables, h1, h2 } = chain_tables(padded, g)?;
    let target = residues(m)?.iter().enumerate().fold(0usize, |acc, (k, &v)| acc | ((v & 1) as usize) << k);
    let (value, x2) = xor_min_plus_at(h2, &tables[3], target);
    let (_, x1) = xor_min_plus_at(h1, &tables[2], x2);
    let (_, x0) = xor_min_plus_at(&tables[0], &tables[1], x1);
    let masks = [x0, x1 ^ x0, x2 ^ x1, target ^ x2];
    let parts = masks
        .iter()
        .map(|&x| perm.iter().map(|&k| (x >> k & 1) as u64).collect())
        .collect();
    Ok((value as u128, parts))
}

fn split_minimum(m: &HyperMatrix, padded: &Tensor, g: &PathGraph, budget: u128) -> Result<(u128, Vec<Vec<u64>>)> {
    let p = m.ctx().require_finite()?;
    let perm = slice_to_matrix(m.n(), m.d());
    let body = residues(m)?;
    let target: Vec<u64> = perm.iter().map(|&k| body[k]).collect();
    let views = orientations(&g.v2())?
        .iter()
        .map(|alpha| slice_view(padded, g, alpha))
        .collect::<Result<Vec<_>>>()?;
    let problem = SplitProblem { p, target, views };
    let size = problem.size();
    if size > budget {
        return Err(Error::BudgetExceeded { needed: format!("{size} slice decompositions"), budget });
    }
    let (value, index) = problem.minimize(usize::from(!m.is_zero()));
    Ok((value as u128, problem.parts(index)))
}

/// Computes `PT-rank(M)` and `ρ(Padded(M))` independently and reports both.
pub fn rho_pt_identity_check(m: &HyperMatrix, budget: u128) -> Result<RhoPtReport> {
    let (n, d) = (m.n(), m.d());
    let (pt_rank, cert) = pt_rank_exact_with_budget(m, budget)?;
    let padded = padded_tensor(m)?;
    let g = padded_graph(d)?;
    let exp = (d + 1) as u32;
    let certificate_bound = rho_from_decomposition(&padded, &g, &certificate_decomposition(&cert)?)?;

    let (route, value, parts) = if rho_enumeration_size(&padded, &g)? <= UNRESTRICTED_LIMIT.min(budget) {
        (RhoRoute::Unrestricted, rho_exact(&padded, &g, budget)?.value.rank, None)
    } else if m.ctx().modulus() == Some(2) && n == 2 && d == 2 {
        let (v, parts) = chain_minimum(m, &padded, &g)?;
        (RhoRoute::MinPlusChain, v, Some(parts))
    } else {
        let (v, parts) = split_minimum(m, &padded, &g, budget)?;
        (RhoRoute::SliceSplit, v, Some(parts))
    };
    let search_bound = match parts {
        Some(parts) => {
            let tensors = parts.iter().map(|s| padded_from_slice(m, s)).collect::<Result<Vec<_>>>()?;
            Some(rho_from_decomposition(&padded, &g, &tensors)?)
        }
        None => None,
    };
    Ok(RhoPtReport {
        n,
        d,
        pt_rank,
        rho: RelValue::new(value, n as u64, exp),
        route,
        certificate_bound,
        search_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::{DenseMatrix, FieldCtx};
    use crate::ptcore::DEFAULT_BUDGET;
    use rand::SeedableRng;

    #[test]
    fn all_two_by_two_gf2() {
        let ctx = FieldCtx::gf(2).unwrap();
        for mask in 0..16i64 {
            let vals: Vec<i64> = (0..4).map(|k| mask >> k & 1).collect();
            let m = HyperMatrix::from_ints(2, 1, ctx, &vals).unwrap();
            let r = rho_pt_identity_check(&m, DEFAULT_BUDGET).unwrap();
            assert_eq!(r.route, RhoRoute::Unrestricted);
            assert_eq!(r.pt_rank, m.rank());
            assert!(r.holds(), "{r:?}");
        }
    }

    #[test]
    fn random_gf2_two_blocks() {
        let ctx = FieldCtx::gf(2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..4 {
            let m = HyperMatrix::new(2, 2, DenseMatrix::random(4, 4, ctx, &mut rng).unwrap()).unwrap();
            let r = rho_pt_identity_check(&m, DEFAULT_BUDGET).unwrap();
            assert_eq!(r.route, RhoRoute::MinPlusChain);
            assert!(r.holds(), "{r:?}");
        }
        let zero = HyperMatrix::zeros(2, 2, ctx).unwrap();
        let r = rho_pt_identity_check(&zero, DEFAULT_BUDGET).unwrap();
        assert_eq!((r.pt_rank, r.scaled_rho()), (0, 0));
    }

    #[test]
    fn slice_split_route() {
        let ctx = FieldCtx::gf(3).unwrap();
        let m = HyperMatrix::from_ints(2, 1, ctx, &[1, 2, 2, 1]).unwrap();
        let r = rho_pt_identity_check(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.route, RhoRoute::SliceSplit);
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn slice_permutation_is_a_bijection() {
        let mut perm = slice_to_matrix(3, 2);
        perm.sort_unstable();
        assert_eq!(perm, (0..81).collect::<Vec<_>>());
        // y = (i1, j1) = (1, 0) is row 1, column 0.
        assert_eq!(slice_to_matrix(2, 1)[2], 2);
    }
}
