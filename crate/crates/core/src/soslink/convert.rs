//! Conversions between PT certificates and SoS certificates.

use crate::error::{Error, Result};
use crate::fieldlinalg::gram_factor;
use crate::ptcore::{
    canonical_kappas, is_fully_symmetric, partial_transpose, refine_certificate, regroup, PTCertificate,
};
use crate::tensorspace::HyperMatrix;

use super::hurwitz::base_identity;
use super::quad::{verify_sos, SoSCertificate};

/// `D = Σ_κ N_κ^{⊤κ}` has `Q_D = Q_M` because `Q` is blind to partial
/// transposes. `D` need not be symmetric, so `D_s = (D + Dᵀ)/2` is
/// Gram-factored instead; `rank(D_s) ≤ 2·value` and the factor has at most
/// `2·rank(D_s)` rows.
pub fn pt_to_sos(cert: &PTCertificate) -> Result<SoSCertificate> {
    let target = cert.target();
    let ctx = *target.ctx();
    ctx.require_odd_characteristic()?;
    let mut d = HyperMatrix::zeros(target.n(), target.d(), ctx)?;
    for (k, part) in cert.parts() {
        d = d.add(&partial_transpose(part, k)?)?;
    }
    let half = ctx.inv(ctx.from_int(2)).expect("odd characteristic");
    let ds = d.add(&d.transpose())?.scale(half);
    let l = gram_factor(ds.body())?;
    let terms = (0..l.rows()).map(|r| l.row(r)).collect();
    let rank = ds.rank();
    SoSCertificate::new(
        target.n(),
        target.d(),
        ctx,
        terms,
        format!(
            "from PT certificate of value {}: rank(D_s) = {rank}, {} terms (bound {})",
            cert.value(),
            l.rows(),
            4 * cert.value()
        ),
    )
}

/// For fully symmetric `M` and `G = LᵀL`, `M = 2^{-(d-1)} Σ_{κ⊆[d-1]} G^{⊤κ}`,
/// so `N_κ = 2^{-(d-1)} G^{⊤κ}` and each `N_κ^{⊤κ}` has rank `rank(G) ≤ s`.
pub fn sos_to_pt(m: &HyperMatrix, sos: &SoSCertificate) -> Result<PTCertificate> {
    let ctx = *m.ctx();
    ctx.require_odd_characteristic()?;
    if !is_fully_symmetric(m) {
        return Err(Error::InvalidArgument("sos_to_pt needs a fully symmetric matrix".into()));
    }
    if !verify_sos(m, sos)? {
        return Err(Error::InvalidCertificate("SoS certificate does not represent Q_M".into()));
    }
    let g = sos.gram()?;
    let scale = ctx.inv(ctx.pow(ctx.from_int(2), (m.d() - 1) as u64)).expect("odd characteristic");
    let parts = canonical_kappas(m.d())
        .into_iter()
        .map(|k| Ok((k, partial_transpose(&g, &k)?.scale(scale))))
        .collect::<Result<Vec<_>>>()?;
    PTCertificate::new(
        m.clone(),
        parts,
        format!("from SoS certificate with {} terms (bound {})", sos.len(), (1usize << (m.d() - 1)) * sos.len()),
    )
}

/// Upper bound for `I_{n^d}`, `d` even: an SoS certificate for the coarse
/// identity over `[n^{d/2}]²` becomes a two-part PT certificate there and is
/// refined back to `[n]^d`.
pub fn pairing_upper_bound(
    n: usize,
    d: usize,
    ctx: crate::fieldlinalg::FieldCtx,
    provider: Option<&SoSCertificate>,
) -> Result<PTCertificate> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("d = {d} must be even and positive")));
    }
    let h = d / 2;
    let fine = HyperMatrix::identity(n, d, ctx)?;
    let coarse = regroup(&fine, h, 2)?;
    let big = coarse.n();
    let built;
    let sos = match provider {
        Some(s) => s,
        None => {
            built = base_identity(big, ctx)
                .map_err(|_| Error::Unsupported(format!("no built-in identity for coarse size {big}")))?;
            &built
        }
    };
    let coarse_cert = sos_to_pt(&coarse, sos)?;
    let mut cert = refine_certificate(&coarse_cert, n, h)?;
    cert.append_metadata(&format!("pairing bound via [{big}]^2"));
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::{DenseMatrix, FieldCtx};
    use crate::ptcore::{verify_pt_certificate, Kappa};
    use crate::soslink::compose_sos;

    fn split_identity_cert(ctx: FieldCtx) -> PTCertificate {
        let a = HyperMatrix::from_ints(2, 2, ctx, &[1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1]).unwrap();
        let b = HyperMatrix::from_ints(2, 2, ctx, &[0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0]).unwrap();
        let k1 = Kappa::new(2, &[1]).unwrap();
        let b_t = partial_transpose(&b, &k1).unwrap();
        PTCertificate::new(HyperMatrix::identity(2, 2, ctx).unwrap(), vec![(Kappa::empty(2), a), (k1, b_t)], "")
            .unwrap()
    }

    #[test]
    fn identity_certificate_to_sos() {
        let ctx = FieldCtx::gf(3).unwrap();
        let cert = split_identity_cert(ctx);
        let sos = pt_to_sos(&cert).unwrap();
        assert!(sos.len() <= 4 * cert.value());
        assert!(verify_sos(cert.target(), &sos).unwrap());
    }

    #[test]
    fn zero_and_rank_one() {
        let ctx = FieldCtx::gf(5).unwrap();
        let z = PTCertificate::new(HyperMatrix::zeros(2, 2, ctx).unwrap(), vec![], "").unwrap();
        assert!(pt_to_sos(&z).unwrap().is_empty());
        let v = DenseMatrix::from_ints(4, 1, ctx, &[1, 2, 0, 3]).unwrap();
        let m = HyperMatrix::new(2, 2, v.matmul(&v.transpose()).unwrap()).unwrap();
        let sos = pt_to_sos(&PTCertificate::single(m.clone(), Kappa::empty(2), "").unwrap()).unwrap();
        assert_eq!(sos.len(), 1);
        assert!(verify_sos(&m, &sos).unwrap());
        assert!(pt_to_sos(&split_identity_cert(FieldCtx::gf(2).unwrap())).is_err());
    }

    #[test]
    fn sos_back_to_pt() {
        let ctx = FieldCtx::gf(3).unwrap();
        for d in [2, 4] {
            let id = HyperMatrix::identity(2, d, ctx).unwrap();
            let sos = compose_sos(2, d, ctx).unwrap();
            let cert = sos_to_pt(&id, &sos).unwrap();
            let v = verify_pt_certificate(&cert).unwrap();
            assert!(v <= (1 << (d - 1)) * 2, "d={d}: {v}");
        }
        let z = HyperMatrix::zeros(2, 2, ctx).unwrap();
        let empty = SoSCertificate::new(2, 2, ctx, vec![], "").unwrap();
        assert_eq!(sos_to_pt(&z, &empty).unwrap().value(), 0);
        let not_sym = HyperMatrix::from_ints(1, 2, ctx, &[1]).unwrap();
        assert!(sos_to_pt(&not_sym, &SoSCertificate::new(1, 2, ctx, vec![], "").unwrap()).is_err());
    }

    #[test]
    fn round_trip_keeps_validity() {
        let ctx = FieldCtx::gf(7).unwrap();
        let cert = split_identity_cert(ctx);
        let sos = pt_to_sos(&cert).unwrap();
        let back = sos_to_pt(cert.target(), &sos).unwrap();
        assert!(verify_pt_certificate(&back).unwrap() <= 2 * sos.len());
    }

    #[test]
    fn pairing_bounds() {
        let ctx = FieldCtx::gf(3).unwrap();
        for (d, bound) in [(2, 4), (4, 8), (6, 16)] {
            let cert = pairing_upper_bound(2, d, ctx, None).unwrap();
            assert!(verify_pt_certificate(&cert).unwrap() <= bound);
        }
        assert!(pairing_upper_bound(3, 2, ctx, None).is_err());
    }
}
