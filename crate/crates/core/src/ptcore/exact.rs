//! Exhaustive PT-rank oracle.
//!
//! Parts are enumerated in lexicographic κ order with the last part fixed by
//! the sum constraint. An assignment is numbered by reading all free entries
//! as little-endian base-`p` digits (entry 0 of the first part is the lowest
//! digit); the smallest number attaining the minimum is the witness. The
//! index space is split into shards scanned in parallel and reduced on
//! `(value, index)`, so the witness does not depend on scheduling.

use crate::error::{Error, Result};
use crate::fieldlinalg::rank::rank_gf2_rows;
use crate::fieldlinalg::{DenseMatrix, Entries};
use crate::tensorspace::HyperMatrix;

use super::cert::PTCertificate;
use super::kappa::{canonical_kappas, Kappa};
use super::split::{SplitProblem, View};
use super::transpose::{is_pt_basic, transpose_rank, transpose_source};

/// Default cap on enumerated assignments.
pub const DEFAULT_BUDGET: u128 = 1 << 28;

/// `|F|^{(2^{d-1}-1)·n^{2d}}`, saturating at `u128::MAX`.
pub fn enumeration_size(m: &HyperMatrix) -> Result<u128> {
    let p = m.ctx().require_finite()? as u128;
    let free = canonical_kappas(m.d()).len() - 1;
    let digits = free * m.dim() * m.dim();
    let mut total: u128 = 1;
    for _ in 0..digits {
        total = total.saturating_mul(p);
    }
    Ok(total)
}

pub fn pt_rank_exact(m: &HyperMatrix) -> Result<(usize, PTCertificate)> {
    pt_rank_exact_with_budget(m, DEFAULT_BUDGET)
}

pub fn pt_rank_exact_with_budget(m: &HyperMatrix, budget: u128) -> Result<(usize, PTCertificate)> {
    let ctx = *m.ctx();
    let p = ctx.require_finite()?;
    let total = enumeration_size(m)?;
    if total > budget {
        let free = canonical_kappas(m.d()).len() - 1;
        return Err(Error::BudgetExceeded {
            needed: format!("{p}^{}", free * m.dim() * m.dim()),
            budget,
        });
    }
    let kappas = canonical_kappas(m.d());
    if kappas.len() == 1 {
        let cert = PTCertificate::single(m.clone(), kappas[0], "exhaustive: single canonical κ")?;
        return Ok((cert.value(), cert));
    }
    let dim = m.dim();
    let problem = SplitProblem {
        p,
        target: m.body().residues().expect("finite field").to_vec(),
        views: kappas
            .iter()
            .map(|k| View { rows: dim, cols: dim, src: transpose_source(m.n(), m.d(), k) })
            .collect(),
    };
    // A nonzero matrix that is not PT-basic needs at least two parts.
    let lower = if m.is_zero() {
        0
    } else if is_pt_basic(m).0 {
        1
    } else {
        2
    };
    let (value, index) = if lower <= 1 {
        (lower, basic_index(m, &kappas, p))
    } else {
        problem.minimize(lower)
    };
    let parts = kappas
        .iter()
        .zip(problem.parts(index))
        .map(|(k, v)| Ok((*k, HyperMatrix::new(m.n(), m.d(), DenseMatrix::new(dim, dim, ctx, Entries::Fp(v))?)?)))
        .collect::<Result<Vec<_>>>()?;
    let cert = PTCertificate::new(
        m.clone(),
        parts,
        format!("exhaustive: {total} assignments, first minimum at index {index}"),
    )?;
    debug_assert_eq!(cert.value(), value);
    Ok((value, cert))
}

/// The first index of a value-`≤ 1` assignment, found without scanning: all
/// free parts zero when the last κ works, otherwise `M` alone in the first
/// free part whose κ works.
fn basic_index(m: &HyperMatrix, kappas: &[Kappa], p: u64) -> u64 {
    let last = kappas.len() - 1;
    if m.is_zero() || transpose_rank(m, &kappas[last]).unwrap_or(0) == 1 {
        return 0;
    }
    let digits = m.body().residues().expect("finite field");
    let j = kappas[..last]
        .iter()
        .position(|k| transpose_rank(m, k).unwrap_or(0) == 1)
        .expect("M is PT-basic");
    let shift = (j * digits.len()) as u32;
    digits.iter().rev().fold(0u64, |acc, &x| acc * p + x) * p.pow(shift)
}

/// Lookup tables for `n = 2, d = 2` over GF(2): for each 16-bit mask `x`
/// (bit `k` = row-major entry `k`), `rank(x)` and `rank(x^{⊤1})`.
pub fn gf2_small_tables() -> (Vec<u8>, Vec<u8>) {
    let src = transpose_source(2, 2, &Kappa::new(2, &[1]).expect("1 ∈ [2]"));
    let rank_of = |x: u32| {
        let mut rows = [0u64; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            *row = ((x >> (4 * r)) & 0xf) as u64;
        }
        rank_gf2_rows(&mut rows) as u8
    };
    let mut plain = vec![0u8; 1 << 16];
    let mut t1 = vec![0u8; 1 << 16];
    for x in 0..1u32 << 16 {
        plain[x as usize] = rank_of(x);
        let mut y = 0u32;
        for (k, &s) in src.iter().enumerate() {
            y |= ((x >> s) & 1) << k;
        }
        t1[x as usize] = rank_of(y);
    }
    (plain, t1)
}

/// Packs a GF(2) 4×4 body into the 16-bit table index.
pub fn gf2_small_index(m: &HyperMatrix) -> Option<usize> {
    if m.n() != 2 || m.d() != 2 || m.ctx().modulus() != Some(2) {
        return None;
    }
    let v = m.body().residues()?;
    Some(v.iter().enumerate().fold(0, |acc, (k, &x)| acc | ((x as usize & 1) << k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::FieldCtx;
    use crate::ptcore::{all_kappas, is_pt_basic, verify_pt_certificate};
    use crate::ptcore::minplus::xor_min_plus_at;
    use rand::SeedableRng;

    #[test]
    fn identity_over_gf2_is_two() {
        let ctx = FieldCtx::gf(2).unwrap();
        let id = HyperMatrix::identity(2, 2, ctx).unwrap();
        let (v, cert) = pt_rank_exact(&id).unwrap();
        assert_eq!(v, 2);
        assert_eq!(verify_pt_certificate(&cert).unwrap(), 2);
    }

    #[test]
    fn zero_and_rank_one() {
        let ctx = FieldCtx::gf(2).unwrap();
        assert_eq!(pt_rank_exact(&HyperMatrix::zeros(2, 2, ctx).unwrap()).unwrap().0, 0);
        let r1 = HyperMatrix::from_ints(2, 2, ctx, &[1, 1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0, 1, 1, 0, 1]).unwrap();
        assert_eq!(r1.rank(), 1);
        assert_eq!(pt_rank_exact(&r1).unwrap().0, 1);
    }

    #[test]
    fn budget_guard() {
        let ctx = FieldCtx::gf(2).unwrap();
        let m = HyperMatrix::identity(2, 3, ctx).unwrap();
        assert!(matches!(pt_rank_exact(&m), Err(Error::BudgetExceeded { .. })));
        let c = HyperMatrix::identity(2, 2, FieldCtx::complex(1e-9).unwrap()).unwrap();
        assert!(matches!(pt_rank_exact(&c), Err(Error::InfiniteField(_))));
    }

    #[test]
    fn table_route_agrees_with_enumeration() {
        let ctx = FieldCtx::gf(2).unwrap();
        let (plain, t1) = gf2_small_tables();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let m = HyperMatrix::new(2, 2, DenseMatrix::random(4, 4, ctx, &mut rng).unwrap()).unwrap();
            let (v, cert) = pt_rank_exact(&m).unwrap();
            let idx = gf2_small_index(&m).unwrap();
            let (tv, tx) = xor_min_plus_at(&plain, &t1, idx);
            assert_eq!(v, tv as usize);
            // Same enumeration order, so the same witness.
            let n_empty = cert.part(&Kappa::empty(2)).map(|p| gf2_small_index(p).unwrap()).unwrap_or(0);
            assert_eq!(n_empty, tx);
            assert!(v <= m.rank());
            assert_eq!(v == 1, is_pt_basic(&m).0);
        }
    }

    #[test]
    fn basic_shortcut_matches_the_scan() {
        use super::super::transpose::partial_transpose;
        let mut checked = [0; 2];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for p in [2, 3] {
            let ctx = FieldCtx::gf(p).unwrap();
            for trial in 0..16 {
                let u = DenseMatrix::random(4, 1, ctx, &mut rng).unwrap();
                let v = DenseMatrix::random(1, 4, ctx, &mut rng).unwrap();
                let r = HyperMatrix::new(2, 2, u.matmul(&v).unwrap()).unwrap();
                let k = all_kappas(2)[trial % 4];
                let m = partial_transpose(&r, &k).unwrap();
                let kappas = canonical_kappas(2);
                let problem = SplitProblem {
                    p,
                    target: m.body().residues().unwrap().to_vec(),
                    views: kappas.iter().map(|k| View { rows: 4, cols: 4, src: transpose_source(2, 2, k) }).collect(),
                };
                let lower = usize::from(!m.is_zero());
                // The scan costs time proportional to the index; keep GF(3) cheap.
                if p == 3 && basic_index(&m, &kappas, p) > 1 << 22 {
                    continue;
                }
                assert_eq!(problem.minimize(lower), (lower, basic_index(&m, &kappas, p)), "p = {p}, κ = {k:?}");
                checked[p as usize - 2] += 1;
            }
        }
        assert!(checked[0] == 16 && checked[1] >= 4, "{checked:?}");
    }

    #[test]
    fn d_one_is_matrix_rank() {
        let ctx = FieldCtx::gf(3).unwrap();
        let m = HyperMatrix::from_ints(3, 1, ctx, &[1, 2, 0, 2, 1, 0, 0, 0, 1]).unwrap();
        assert_eq!(pt_rank_exact(&m).unwrap().0, m.rank());
    }
}
