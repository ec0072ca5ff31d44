//! Partial transposes and the predicates built on them.

use crate::error::{Error, Result};
use crate::tensorspace::HyperMatrix;

use super::kappa::{all_kappas, canonical_kappas, Kappa};

/// Flat source offsets for `M^{⊤κ}`: entry `k` of the transposed body is
/// entry `src[k]` of the original.
pub fn transpose_source(n: usize, d: usize, kappa: &Kappa) -> Vec<usize> {
    let dim = n.pow(d as u32);
    // proj[r] keeps only the digits of r at positions in κ.
    let mut proj = vec![0usize; dim];
    for (r, slot) in proj.iter_mut().enumerate() {
        let mut rest = r;
        let mut weight = 1;
        for k in (1..=d).rev() {
            if kappa.contains(k) {
                *slot += (rest % n) * weight;
            }
            rest /= n;
            weight *= n;
        }
    }
    let mut src = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        let pr = proj[r];
        for c in 0..dim {
            let pc = proj[c];
            src.push((r - pr + pc) * dim + (c - pc + pr));
        }
    }
    src
}

fn check_kappa(m: &HyperMatrix, kappa: &Kappa) -> Result<()> {
    if kappa.d() != m.d() {
        return Err(Error::OutOfRange(format!("κ = {kappa} is not a subset of [{}]", m.d())));
    }
    Ok(())
}

pub fn partial_transpose(m: &HyperMatrix, kappa: &Kappa) -> Result<HyperMatrix> {
    check_kappa(m, kappa)?;
    if kappa.is_empty() {
        return Ok(m.clone());
    }
    let src = transpose_source(m.n(), m.d(), kappa);
    let dim = m.dim();
    Ok(HyperMatrix::from_body(m.n(), m.d(), m.body().gather(dim, dim, &src)))
}

/// `rank(M^{⊤κ})`.
pub fn transpose_rank(m: &HyperMatrix, kappa: &Kappa) -> Result<usize> {
    Ok(partial_transpose(m, kappa)?.rank())
}

/// `M^{⊤k} = M` for every single block `k`.
pub fn is_fully_symmetric(m: &HyperMatrix) -> bool {
    (1..=m.d()).all(|k| {
        let kappa = Kappa::new(m.d(), &[k]).expect("k in range");
        partial_transpose(m, &kappa).map(|t| t.approx_eq(m)).unwrap_or(false)
    })
}

/// First `κ ⊆ [d-1]` (lexicographic) with `rank(M^{⊤κ}) = 1`.
pub fn is_pt_basic(m: &HyperMatrix) -> (bool, Option<Kappa>) {
    for kappa in canonical_kappas(m.d()) {
        if transpose_rank(m, &kappa).unwrap_or(0) == 1 {
            return (true, Some(kappa));
        }
    }
    (false, None)
}

/// Ranks of all `2^d` partial transposes in lexicographic κ order.
pub fn transpose_rank_scan(m: &HyperMatrix) -> Vec<(Kappa, usize)> {
    all_kappas(m.d())
        .into_iter()
        .map(|k| {
            let r = transpose_rank(m, &k).expect("κ sized to M");
            (k, r)
        })
        .collect()
}

/// `(1/2^d) Σ_κ S^{⊤κ}`, which is fully symmetric. Needs odd characteristic.
pub fn symmetrize(m: &HyperMatrix) -> Result<HyperMatrix> {
    let ctx = *m.ctx();
    ctx.require_odd_characteristic()?;
    let mut acc = HyperMatrix::zeros(m.n(), m.d(), ctx)?;
    for kappa in all_kappas(m.d()) {
        acc = acc.add(&partial_transpose(m, &kappa)?)?;
    }
    let two_d = ctx.pow(ctx.from_int(2), m.d() as u64);
    let inv = ctx.inv(two_d).ok_or(Error::CharacteristicTwo)?;
    Ok(acc.scale(inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::{DenseMatrix, FieldCtx, Scalar};
    use crate::tensorspace::HyperMatrix;

    fn three_squared() -> HyperMatrix {
        let ctx = FieldCtx::gf(2).unwrap();
        HyperMatrix::from_fn(3, 2, ctx, |i, j| Scalar::Fp((j[0] == i[1] && j[1] == i[0]) as u64)).unwrap()
    }

    #[test]
    fn empty_and_full() {
        let m = three_squared();
        let id = partial_transpose(&m, &Kappa::empty(2)).unwrap();
        assert_eq!(id, m);
        let full = partial_transpose(&m, &Kappa::full(2)).unwrap();
        assert_eq!(full, m.transpose());
    }

    #[test]
    fn block_transposes() {
        // With i1 most significant, blocks are indexed by (i1, j1): ⊤2
        // transposes every block in place and ⊤1 transposes the block layout.
        let ctx = FieldCtx::gf(101).unwrap();
        let m = HyperMatrix::new(3, 2, DenseMatrix::from_fn(9, 9, ctx, |r, c| Scalar::Fp((r * 9 + c) as u64))).unwrap();
        let t2 = partial_transpose(&m, &Kappa::new(2, &[2]).unwrap()).unwrap();
        let t1 = partial_transpose(&m, &Kappa::new(2, &[1]).unwrap()).unwrap();
        for bi in 0..3 {
            for bj in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        let x = m.body().get(bi * 3 + a, bj * 3 + b);
                        assert_eq!(t2.body().get(bi * 3 + b, bj * 3 + a), x);
                        assert_eq!(t1.body().get(bj * 3 + a, bi * 3 + b), x);
                    }
                }
            }
        }
    }

    #[test]
    fn three_squared_is_pt_basic() {
        let m = three_squared();
        assert_eq!(m.rank(), 9);
        assert_eq!(is_pt_basic(&m), (true, Some(Kappa::new(2, &[1]).unwrap())));
        assert!(!is_fully_symmetric(&m));
    }

    #[test]
    fn identity_is_fully_symmetric_not_basic() {
        let ctx = FieldCtx::gf(2).unwrap();
        let id = HyperMatrix::identity(2, 2, ctx).unwrap();
        assert!(is_fully_symmetric(&id));
        assert_eq!(is_pt_basic(&id), (false, None));
        assert_eq!(is_pt_basic(&HyperMatrix::zeros(2, 2, ctx).unwrap()), (false, None));
    }
}
