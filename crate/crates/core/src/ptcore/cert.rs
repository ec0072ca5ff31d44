use crate::error::{Error, Result};
use crate::tensorspace::HyperMatrix;

use super::kappa::Kappa;
use super::transpose::transpose_rank;

/// A decomposition `M = Σ_κ N_κ` over canonical `κ ⊆ [d-1]` with value
/// `Σ_κ rank(N_κ^{⊤κ})`.
#[derive(Clone, Debug, PartialEq)]
pub struct PTCertificate {
    target: HyperMatrix,
    parts: Vec<(Kappa, HyperMatrix)>,
    value: usize,
    metadata: String,
}

fn check_part(target: &HyperMatrix, kappa: &Kappa, part: &HyperMatrix) -> Result<()> {
    target.ctx().ensure_same(part.ctx())?;
    if part.n() != target.n() || part.d() != target.d() || kappa.d() != target.d() {
        return Err(Error::Dimension(format!(
            "part {kappa} over [{}]^{} does not match target [{}]^{}",
            part.n(),
            part.d(),
            target.n(),
            target.d()
        )));
    }
    Ok(())
}

/// Re-keys parts by canonical κ, merges repeated keys and drops zero parts.
fn normalize(parts: Vec<(Kappa, HyperMatrix)>) -> Result<Vec<(Kappa, HyperMatrix)>> {
    let mut out: Vec<(Kappa, HyperMatrix)> = Vec::new();
    for (kappa, part) in parts {
        let key = kappa.canonical();
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, acc)) => *acc = acc.add(&part)?,
            None => out.push((key, part)),
        }
    }
    out.retain(|(_, p)| !p.is_zero());
    out.sort_by_key(|a| a.0);
    Ok(out)
}

fn parts_value(parts: &[(Kappa, HyperMatrix)]) -> Result<usize> {
    parts.iter().map(|(k, p)| transpose_rank(p, k)).sum()
}

impl PTCertificate {
    /// Builds a normalized certificate and computes its value. The sum
    /// constraint is checked by [`verify_pt_certificate`], not here.
    pub fn new(target: HyperMatrix, parts: Vec<(Kappa, HyperMatrix)>, metadata: impl Into<String>) -> Result<Self> {
        for (k, p) in &parts {
            check_part(&target, k, p)?;
        }
        let parts = normalize(parts)?;
        let value = parts_value(&parts)?;
        Ok(PTCertificate { target, parts, value, metadata: metadata.into() })
    }

    /// A certificate carrying a claimed value, as read from storage.
    pub fn with_claimed_value(
        target: HyperMatrix,
        parts: Vec<(Kappa, HyperMatrix)>,
        value: usize,
        metadata: impl Into<String>,
    ) -> Result<Self> {
        for (k, p) in &parts {
            check_part(&target, k, p)?;
        }
        let parts = normalize(parts)?;
        Ok(PTCertificate { target, parts, value, metadata: metadata.into() })
    }

    /// All of `M` on one κ.
    pub fn single(target: HyperMatrix, kappa: Kappa, metadata: impl Into<String>) -> Result<Self> {
        let part = target.clone();
        PTCertificate::new(target, vec![(kappa, part)], metadata)
    }

    pub fn target(&self) -> &HyperMatrix {
        &self.target
    }

    pub fn parts(&self) -> &[(Kappa, HyperMatrix)] {
        &self.parts
    }

    pub fn part(&self, kappa: &Kappa) -> Option<&HyperMatrix> {
        let key = kappa.canonical();
        self.parts.iter().find(|(k, _)| *k == key).map(|(_, p)| p)
    }

    pub fn value(&self) -> usize {
        self.value
    }

    pub fn metadata(&self) -> &str {
        &self.metadata
    }

    pub fn set_metadata(&mut self, metadata: impl Into<String>) {
        self.metadata = metadata.into();
    }

    pub fn append_metadata(&mut self, line: &str) {
        if !self.metadata.is_empty() {
            self.metadata.push_str("; ");
        }
        self.metadata.push_str(line);
    }
}

/// Checks `Σ N_κ = M` and recomputes the value, which must equal the claim.
pub fn verify_pt_certificate(cert: &PTCertificate) -> Result<usize> {
    let target = &cert.target;
    let mut sum = HyperMatrix::zeros(target.n(), target.d(), *target.ctx())?;
    for (k, p) in &cert.parts {
        check_part(target, k, p)?;
        sum = sum.add(p)?;
    }
    if !sum.approx_eq(target) {
        return Err(Error::InvalidCertificate("parts do not sum to the target".into()));
    }
    let value = parts_value(&cert.parts)?;
    if value != cert.value {
        return Err(Error::InvalidCertificate(format!(
            "claimed value {} but parts give {value}",
            cert.value
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::FieldCtx;

    fn identity_certificate(ctx: FieldCtx) -> PTCertificate {
        let a = HyperMatrix::from_ints(2, 2, ctx, &[1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1]).unwrap();
        let b = HyperMatrix::from_ints(2, 2, ctx, &[0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0]).unwrap();
        let k1 = Kappa::new(2, &[1]).unwrap();
        let b_t = crate::ptcore::partial_transpose(&b, &k1).unwrap();
        let target = HyperMatrix::identity(2, 2, ctx).unwrap();
        PTCertificate::new(target, vec![(Kappa::empty(2), a), (k1, b_t)], "example").unwrap()
    }

    #[test]
    fn identity_decomposition_has_value_two() {
        for p in [2, 3, 5] {
            let cert = identity_certificate(FieldCtx::gf(p).unwrap());
            assert_eq!(verify_pt_certificate(&cert).unwrap(), 2);
        }
    }

    #[test]
    fn single_part_value_is_rank() {
        let ctx = FieldCtx::gf(3).unwrap();
        let m = HyperMatrix::from_ints(2, 2, ctx, &[1, 2, 0, 0, 2, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0]).unwrap();
        let cert = PTCertificate::single(m.clone(), Kappa::empty(2), "").unwrap();
        assert_eq!(verify_pt_certificate(&cert).unwrap(), m.rank());
    }

    #[test]
    fn corrupted_sum_is_rejected() {
        let ctx = FieldCtx::gf(3).unwrap();
        let good = identity_certificate(ctx);
        let mut parts = good.parts().to_vec();
        let e = HyperMatrix::from_ints(2, 2, ctx, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]).unwrap();
        parts[0].1 = parts[0].1.add(&e).unwrap();
        let bad = PTCertificate::new(good.target().clone(), parts, "").unwrap();
        assert!(matches!(verify_pt_certificate(&bad), Err(Error::InvalidCertificate(_))));
        let lying = PTCertificate::with_claimed_value(good.target().clone(), good.parts().to_vec(), 1, "").unwrap();
        assert!(verify_pt_certificate(&lying).is_err());
    }

    #[test]
    fn complement_keys_are_normalized() {
        let ctx = FieldCtx::gf(3).unwrap();
        let m = HyperMatrix::identity(2, 2, ctx).unwrap();
        let cert = PTCertificate::single(m, Kappa::new(2, &[2]).unwrap(), "").unwrap();
        assert_eq!(cert.parts()[0].0, Kappa::new(2, &[1]).unwrap());
        assert_eq!(verify_pt_certificate(&cert).unwrap(), 4);
    }
}
