//! The multiquadratic form `Q_M(x) = Σ_{i,j} M[i,j] Π_k x^{(k)}_{i_k} x^{(k)}_{j_k}`
//! and SoS certificates against it.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, Entries, FieldCtx, Scalar};
use crate::ptcore::{all_kappas, partial_transpose};
use crate::tensorspace::tensor::digits;
use crate::tensorspace::HyperMatrix;

/// A list of `d`-multilinear forms `g_i`, each stored as its coefficient
/// tensor over `[n]^d` (first block most significant).
#[derive(Clone, Debug, PartialEq)]
pub struct SoSCertificate {
    n: usize,
    d: usize,
    ctx: FieldCtx,
    terms: Vec<Entries>,
    metadata: String,
}

impl SoSCertificate {
    pub fn new(n: usize, d: usize, ctx: FieldCtx, terms: Vec<Entries>, metadata: impl Into<String>) -> Result<Self> {
        ctx.validate()?;
        let len = HyperMatrix::zeros(n, d, ctx)?.dim();
        for (k, t) in terms.iter().enumerate() {
            if t.len() != len {
                return Err(Error::Dimension(format!("term {k} has {} coefficients, expected {len}", t.len())));
            }
            t.validate(&ctx)?;
        }
        Ok(SoSCertificate { n, d, ctx, terms, metadata: metadata.into() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn terms(&self) -> &[Entries] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: impl Into<String>) {
        self.metadata = metadata.into();
    }

    /// Rows of `L` are the terms; `Σ g_i g_iᵀ = LᵀL`.
    pub fn factor_matrix(&self) -> DenseMatrix {
        let cols = self.n.pow(self.d as u32);
        DenseMatrix::from_fn(self.terms.len(), cols, self.ctx, |r, c| self.terms[r].get(c))
    }

    /// `D = Σ_i vec(g_i) vec(g_i)ᵀ`.
    pub fn gram(&self) -> Result<HyperMatrix> {
        let l = self.factor_matrix();
        HyperMatrix::new(self.n, self.d, l.transpose().matmul(&l)?)
    }
}

/// Coefficients of `Q_M`, keyed by per-block unordered pairs `(a, b)`, `a ≤ b`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadCoeffMap {
    pub ctx: FieldCtx,
    pub coeffs: BTreeMap<Vec<(usize, usize)>, Scalar>,
}

impl QuadCoeffMap {
    pub fn approx_eq(&self, other: &QuadCoeffMap) -> bool {
        if self.ctx != other.ctx {
            return false;
        }
        let get = |m: &QuadCoeffMap, k: &Vec<(usize, usize)>| m.coeffs.get(k).copied().unwrap_or(m.ctx.zero());
        self.coeffs
            .keys()
            .chain(other.coeffs.keys())
            .all(|k| self.ctx.is_zero(self.ctx.sub(get(self, k), get(other, k))))
    }
}

pub fn qm_coeffs(m: &HyperMatrix) -> QuadCoeffMap {
    let ctx = *m.ctx();
    let (n, d, dim) = (m.n(), m.d(), m.dim());
    let tuples: Vec<Vec<usize>> = (0..dim).map(|k| digits(k, n, d)).collect();
    let mut coeffs: BTreeMap<Vec<(usize, usize)>, Scalar> = BTreeMap::new();
    for r in 0..dim {
        for c in 0..dim {
            let x = m.body().get(r, c);
            if ctx.is_zero(x) {
                continue;
            }
            let key: Vec<(usize, usize)> =
                tuples[r].iter().zip(&tuples[c]).map(|(&a, &b)| (a.min(b), a.max(b))).collect();
            let slot = coeffs.entry(key).or_insert(ctx.zero());
            *slot = ctx.add(*slot, x);
        }
    }
    coeffs.retain(|_, v| !ctx.is_zero(*v));
    QuadCoeffMap { ctx, coeffs }
}

/// Accepts iff `Q_D = Q_M` for `D = Σ g_i g_iᵀ`. In odd characteristic this
/// is `Σ_{κ⊆[d]} (D - M)^{⊤κ} = 0`; in characteristic 2 the coefficient maps
/// are compared directly, since the symmetrized sum over-counts diagonal
/// blocks by powers of 2.
pub fn verify_sos(m: &HyperMatrix, cert: &SoSCertificate) -> Result<bool> {
    m.ctx().ensure_same(cert.ctx())?;
    if m.n() != cert.n() || m.d() != cert.d() {
        return Err(Error::Dimension(format!(
            "certificate over [{}]^{} vs matrix over [{}]^{}",
            cert.n(),
            cert.d(),
            m.n(),
            m.d()
        )));
    }
    let diff = cert.gram()?.sub(m)?;
    if m.ctx().characteristic() == 2 {
        return Ok(qm_coeffs(&diff).coeffs.is_empty());
    }
    let mut acc = HyperMatrix::zeros(m.n(), m.d(), *m.ctx())?;
    for k in all_kappas(m.d()) {
        acc = acc.add(&partial_transpose(&diff, &k)?)?;
    }
    Ok(acc.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptcore::Kappa;

    fn two_square(ctx: FieldCtx) -> SoSCertificate {
        // x1y1 - x2y2 and x1y2 + x2y1
        let g1 = DenseMatrix::from_ints(1, 4, ctx, &[1, 0, 0, -1]).unwrap().into_entries();
        let g2 = DenseMatrix::from_ints(1, 4, ctx, &[0, 1, 1, 0]).unwrap().into_entries();
        SoSCertificate::new(2, 2, ctx, vec![g1, g2], "").unwrap()
    }

    #[test]
    fn identity_coefficients() {
        let ctx = FieldCtx::gf(5).unwrap();
        let q = qm_coeffs(&HyperMatrix::identity(2, 3, ctx).unwrap());
        assert_eq!(q.coeffs.len(), 8);
        assert!(q.coeffs.iter().all(|(k, v)| k.iter().all(|(a, b)| a == b) && *v == ctx.one()));
        assert!(qm_coeffs(&HyperMatrix::zeros(2, 2, ctx).unwrap()).coeffs.is_empty());
    }

    #[test]
    fn coefficients_ignore_partial_transposes() {
        use rand::SeedableRng;
        let ctx = FieldCtx::gf(7).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let m = HyperMatrix::new(2, 3, DenseMatrix::random(8, 8, ctx, &mut rng).unwrap()).unwrap();
        let q = qm_coeffs(&m);
        for k in all_kappas(3) {
            assert_eq!(qm_coeffs(&partial_transpose(&m, &k).unwrap()), q);
        }
    }

    #[test]
    fn two_square_identity() {
        for ctx in [FieldCtx::gf(3).unwrap(), FieldCtx::gf(2).unwrap(), FieldCtx::complex(1e-9).unwrap()] {
            let id = HyperMatrix::identity(2, 2, ctx).unwrap();
            let cert = two_square(ctx);
            assert!(verify_sos(&id, &cert).unwrap());
            let dropped = SoSCertificate::new(2, 2, ctx, cert.terms()[..1].to_vec(), "").unwrap();
            assert!(!verify_sos(&id, &dropped).unwrap());
            let t = partial_transpose(&id, &Kappa::new(2, &[1]).unwrap()).unwrap();
            assert!(verify_sos(&t, &cert).unwrap());
        }
        let ctx = FieldCtx::gf(3).unwrap();
        let empty = SoSCertificate::new(2, 2, ctx, vec![], "").unwrap();
        assert!(verify_sos(&HyperMatrix::zeros(2, 2, ctx).unwrap(), &empty).unwrap());
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let ctx = FieldCtx::gf(3).unwrap();
        assert!(verify_sos(&HyperMatrix::identity(2, 3, ctx).unwrap(), &two_square(ctx)).is_err());
        assert!(SoSCertificate::new(2, 2, ctx, vec![Entries::Fp(vec![1, 2])], "").is_err());
    }
}
