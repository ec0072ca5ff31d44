//! Kronecker action, regrouping of block structure, and the explicit
//! rank-growth expansion for a partial transpose.

use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx};
use crate::tensorspace::HyperMatrix;

use super::cert::PTCertificate;
use super::kappa::Kappa;

/// `PM = (B_1 ⊠ … ⊠ B_d)·M`, transporting a certificate part by part.
pub fn kron_act(
    m: &HyperMatrix,
    bs: &[DenseMatrix],
    cert: Option<&PTCertificate>,
) -> Result<(HyperMatrix, Option<PTCertificate>)> {
    if bs.len() != m.d() {
        return Err(Error::Dimension(format!("{} factors for d = {}", bs.len(), m.d())));
    }
    let mut p = DenseMatrix::identity(1, *m.ctx());
    for b in bs {
        if b.rows() != m.n() || b.cols() != m.n() {
            return Err(Error::Dimension(format!("factor is {}x{}, expected n = {}", b.rows(), b.cols(), m.n())));
        }
        p = p.kron(b)?;
    }
    let act = |x: &HyperMatrix| -> Result<HyperMatrix> { HyperMatrix::new(x.n(), x.d(), p.matmul(x.body())?) };
    let pm = act(m)?;
    let moved = match cert {
        None => None,
        Some(c) => {
            if !c.target().approx_eq(m) {
                return Err(Error::InvalidArgument("certificate target differs from M".into()));
            }
            let parts = c.parts().iter().map(|(k, n)| Ok((*k, act(n)?))).collect::<Result<Vec<_>>>()?;
            let mut out = PTCertificate::new(pm.clone(), parts, c.metadata())?;
            out.append_metadata("kron action");
            Some(out)
        }
    };
    Ok((pm, moved))
}

/// Views `M` over `[n]^{pq}` as a matrix over `q` blocks of size `n^p`.
pub fn regroup(m: &HyperMatrix, p: usize, q: usize) -> Result<HyperMatrix> {
    if p == 0 || p.checked_mul(q) != Some(m.d()) {
        return Err(Error::InvalidArgument(format!("{p}·{q} ≠ d = {}", m.d())));
    }
    m.reshape(m.n().pow(p as u32), q)
}

/// Maps a certificate over `[n^p]^q` to one over `[n]^{pq}` with the same
/// value: coarse block `l` becomes fine blocks `(l-1)p+1 ..= lp`.
pub fn refine_certificate(cert: &PTCertificate, n: usize, p: usize) -> Result<PTCertificate> {
    let coarse = cert.target();
    if p == 0 || n.checked_pow(p as u32) != Some(coarse.n()) {
        return Err(Error::InvalidArgument(format!("{n}^{p} ≠ coarse block size {}", coarse.n())));
    }
    let d = p * coarse.d();
    let fine_kappa = |k: &Kappa| -> Result<Kappa> {
        let members: Vec<usize> = k.members().iter().flat_map(|&l| (l - 1) * p + 1..=l * p).collect();
        Kappa::new(d, &members)
    };
    let parts = cert
        .parts()
        .iter()
        .map(|(k, part)| Ok((fine_kappa(k)?, part.reshape(n, d)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = PTCertificate::new(coarse.reshape(n, d)?, parts, cert.metadata())?;
    out.append_metadata(&format!("refined from [{}]^{}", coarse.n(), coarse.d()));
    Ok(out)
}

/// One outer-product term `u vᵀ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterFactor {
    pub u: Entries,
    pub v: Entries,
}

impl OuterFactor {
    /// Rank factorization of `M` as outer products.
    pub fn of(m: &DenseMatrix) -> Vec<OuterFactor> {
        m.rank_factorization().into_iter().map(|(u, v)| OuterFactor { u, v }).collect()
    }

    pub fn sum(factors: &[OuterFactor], rows: usize, cols: usize, ctx: FieldCtx) -> Result<DenseMatrix> {
        let mut acc = DenseMatrix::zeros(rows, cols, ctx);
        for f in factors {
            if f.u.len() != rows || f.v.len() != cols {
                return Err(Error::Dimension("factor length mismatch".into()));
            }
            acc.add_assign(&DenseMatrix::outer(&f.u, &f.v, ctx))?;
        }
        Ok(acc)
    }
}

/// Expands `M = Σ_t u_t v_tᵀ` into a factorization of `M^{⊤κ}` with at most
/// `r·n^{2·min(|κ|, d-|κ|)}` nonzero terms:
/// `A(i) = [i_κ = a]·u_t(i_{κ̄}, b)`, `B(j) = [j_κ = b]·v_t(j_{κ̄}, a)`.
pub fn transpose_rank_growth(m: &HyperMatrix, kappa: &Kappa, factors: &[OuterFactor]) -> Result<Vec<OuterFactor>> {
    let (n, d, dim, ctx) = (m.n(), m.d(), m.dim(), *m.ctx());
    if kappa.d() != d {
        return Err(Error::OutOfRange(format!("κ = {kappa} is not a subset of [{d}]")));
    }
    let total = OuterFactor::sum(factors, dim, dim, ctx)
        .map_err(|e| Error::InvalidArgument(format!("invalid factorization: {e}")))?;
    if !total.approx_eq(m.body()) {
        return Err(Error::InvalidArgument("factorization does not reassemble to M".into()));
    }
    if kappa.is_empty() {
        return Ok(factors.to_vec());
    }
    if 2 * kappa.len() > d {
        // M^{⊤κ} is the transpose of M^{⊤κ̄}.
        let swapped = transpose_rank_growth(m, &kappa.complement(), factors)?;
        return Ok(swapped.into_iter().map(|f| OuterFactor { u: f.v, v: f.u }).collect());
    }
    // proj[i]: the κ digits of i kept in place, the rest zeroed.
    let proj: Vec<usize> = (0..dim)
        .map(|i| {
            let (mut rest, mut weight, mut out) = (i, 1, 0);
            for k in (1..=d).rev() {
                if kappa.contains(k) {
                    out += (rest % n) * weight;
                }
                rest /= n;
                weight *= n;
            }
            out
        })
        .collect();
    let mut patterns: Vec<usize> = proj.clone();
    patterns.sort_unstable();
    patterns.dedup();
    let mut out = Vec::new();
    for f in factors {
        for &a in &patterns {
            for &b in &patterns {
                let mut u = Entries::zeros(&ctx, dim);
                let mut v = Entries::zeros(&ctx, dim);
                for i in (0..dim).filter(|&i| proj[i] == a) {
                    u.set(i, f.u.get(i - a + b));
                }
                for j in (0..dim).filter(|&j| proj[j] == b) {
                    v.set(j, f.v.get(j - b + a));
                }
                let zero = |e: &Entries| (0..dim).all(|k| ctx.is_zero(e.get(k)));
                if !zero(&u) && !zero(&v) {
                    out.push(OuterFactor { u, v });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptcore::{partial_transpose, pt_rank_exact, verify_pt_certificate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_action_is_trivial() {
        let ctx = FieldCtx::gf(2).unwrap();
        let m = HyperMatrix::identity(2, 2, ctx).unwrap();
        let (_, cert) = pt_rank_exact(&m).unwrap();
        let ids = vec![DenseMatrix::identity(2, ctx); 2];
        let (pm, moved) = kron_act(&m, &ids, Some(&cert)).unwrap();
        assert_eq!(pm, m);
        assert_eq!(moved.unwrap().parts(), cert.parts());
    }

    #[test]
    fn nonsingular_action_preserves_exact_value() {
        let ctx = FieldCtx::gf(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = HyperMatrix::new(2, 1, DenseMatrix::random(2, 2, ctx, &mut rng).unwrap()).unwrap();
        let b = DenseMatrix::random_nonsingular(2, ctx, 1).unwrap();
        let (pm, _) = kron_act(&m, &[b], None).unwrap();
        assert_eq!(pt_rank_exact(&pm).unwrap().0, pt_rank_exact(&m).unwrap().0);
    }

    #[test]
    fn singular_action_does_not_increase_value() {
        let ctx = FieldCtx::gf(2).unwrap();
        let m = HyperMatrix::identity(2, 2, ctx).unwrap();
        let (v, cert) = pt_rank_exact(&m).unwrap();
        let b1 = DenseMatrix::from_ints(2, 2, ctx, &[1, 1, 0, 0]).unwrap();
        let (_, moved) = kron_act(&m, &[b1, DenseMatrix::identity(2, ctx)], Some(&cert)).unwrap();
        assert!(verify_pt_certificate(&moved.unwrap()).unwrap() <= v);
    }

    #[test]
    fn coarse_identity_certificate_refines() {
        let ctx = FieldCtx::gf(3).unwrap();
        let fine = HyperMatrix::identity(2, 4, ctx).unwrap();
        let coarse = regroup(&fine, 2, 2).unwrap();
        assert_eq!((coarse.n(), coarse.d()), (4, 2));
        let cert = PTCertificate::single(coarse, Kappa::new(2, &[1]).unwrap(), "").unwrap();
        let refined = refine_certificate(&cert, 2, 2).unwrap();
        assert_eq!(refined.parts()[0].0, Kappa::new(4, &[1, 2]).unwrap());
        assert_eq!(verify_pt_certificate(&refined).unwrap(), cert.value());
        assert!(regroup(&fine, 3, 1).is_err());
    }

    #[test]
    fn rank_growth_on_three_squared_is_tight() {
        let ctx = FieldCtx::gf(5).unwrap();
        let one = HyperMatrix::from_fn(3, 2, ctx, |i, j| ctx.from_int((i[0] == i[1] && j[0] == j[1]) as i64)).unwrap();
        assert_eq!(one.rank(), 1);
        let k1 = Kappa::new(2, &[1]).unwrap();
        let grown = transpose_rank_growth(&one, &k1, &OuterFactor::of(one.body())).unwrap();
        let target = partial_transpose(&one, &k1).unwrap();
        assert_eq!(grown.len(), 9);
        assert_eq!(target.rank(), 9);
        assert_eq!(OuterFactor::sum(&grown, 9, 9, ctx).unwrap(), *target.body());
    }

    #[test]
    fn rank_growth_reassembles_for_every_kappa() {
        let ctx = FieldCtx::gf(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = DenseMatrix::random(8, 2, ctx, &mut rng).unwrap();
        let b = DenseMatrix::random(2, 8, ctx, &mut rng).unwrap();
        let m = HyperMatrix::new(2, 3, a.matmul(&b).unwrap()).unwrap();
        let factors = OuterFactor::of(m.body());
        for k in crate::ptcore::all_kappas(3) {
            let grown = transpose_rank_growth(&m, &k, &factors).unwrap();
            let s = k.len().min(3 - k.len());
            assert!(grown.len() <= factors.len() * 2usize.pow(2 * s as u32));
            assert_eq!(OuterFactor::sum(&grown, 8, 8, ctx).unwrap(), *partial_transpose(&m, &k).unwrap().body());
        }
        assert!(transpose_rank_growth(&m, &Kappa::empty(3), &factors[..1]).is_err());
    }
}
