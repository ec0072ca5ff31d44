//! Composition identities `(Σ x_a²)(Σ y_b²) = Σ z_k²` for `n ∈ {1, 2, 4, 8}`
//! and their recursive lift to `d = 2^m` blocks.

use crate::error::{Error, Result};
use crate::fieldlinalg::{Entries, FieldCtx};
use crate::tensorspace::HyperMatrix;

use super::quad::{verify_sos, SoSCertificate};

/// Octonion multiplication: entry `±(k+1)` at `(i, j)` means
/// `e_i · e_j = ±e_k`. The leading `2^m × 2^m` corners are the tables for
/// the reals, complex numbers and quaternions.
pub const OCTONION_TABLE: [[i8; 8]; 8] = [
    [1, 2, 3, 4, 5, 6, 7, 8],
    [2, -1, 4, -3, 6, -5, -8, 7],
    [3, -4, -1, 2, 7, 8, -5, -6],
    [4, 3, -2, -1, 8, -7, 6, -5],
    [5, -6, -7, -8, -1, 2, 3, 4],
    [6, 5, -8, 7, -2, -1, -4, 3],
    [7, 8, 5, -6, -3, 4, -1, -2],
    [8, -7, 6, 5, -4, -3, 2, -1],
];

/// Builds the bilinear terms `z_k = Σ_{table[i][j] = ±(k+1)} ±x_i y_j` from
/// an `n × n` table and checks the identity in `ctx`.
pub fn base_identity_from_table(table: &[Vec<i8>], ctx: FieldCtx) -> Result<SoSCertificate> {
    let n = table.len();
    ctx.require_odd_characteristic()?;
    if n == 0 || table.iter().any(|row| row.len() != n) {
        return Err(Error::Dimension("multiplication table must be square and nonempty".into()));
    }
    let mut terms = vec![Entries::zeros(&ctx, n * n); n];
    for (i, row) in table.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            let k = e.unsigned_abs() as usize;
            if k == 0 || k > n {
                return Err(Error::InvalidArgument(format!("table entry {e} out of range")));
            }
            let sign = if e > 0 { 1 } else { -1 };
            let t = &mut terms[k - 1];
            t.set(i * n + j, ctx.add(t.get(i * n + j), ctx.from_int(sign)));
        }
    }
    let cert = SoSCertificate::new(n, 2, ctx, terms, format!("composition identity, n = {n}"))?;
    if !verify_sos(&HyperMatrix::identity(n, 2, ctx)?, &cert)? {
        return Err(Error::VerificationFailed(format!("the n = {n} composition table fails in {ctx}")));
    }
    Ok(cert)
}

/// `n` bilinear terms whose squares sum to `Q_{I_{n²}}`.
pub fn base_identity(n: usize, ctx: FieldCtx) -> Result<SoSCertificate> {
    if !matches!(n, 1 | 2 | 4 | 8) {
        return Err(Error::Unsupported(format!("no composition identity of size {n}")));
    }
    let table: Vec<Vec<i8>> = OCTONION_TABLE[..n].iter().map(|r| r[..n].to_vec()).collect();
    base_identity_from_table(&table, ctx)
}

/// Exactly `n` terms for `Q_{I_{n^d}}` with `d = 2^m`: the two halves are
/// built recursively and combined through the base identity,
/// `g_k = Σ_{a,b} c^k_{ab} · gL_a ⊗ gR_b`.
pub fn compose_sos(n: usize, d: usize, ctx: FieldCtx) -> Result<SoSCertificate> {
    compose_with(&base_identity(n, ctx)?, d)
}

pub(crate) fn compose_with(base: &SoSCertificate, d: usize) -> Result<SoSCertificate> {
    let (n, ctx) = (base.n(), *base.ctx());
    if d == 0 || !d.is_power_of_two() {
        return Err(Error::Unsupported(format!("d = {d} is not a power of two")));
    }
    HyperMatrix::zeros(n, d, ctx)?;
    let mut terms: Vec<Entries> = (0..n)
        .map(|a| {
            let mut e = Entries::zeros(&ctx, n);
            e.set(a, ctx.one());
            e
        })
        .collect();
    let mut width = 1;
    while width < d {
        let len = n.pow(width as u32);
        terms = base
            .terms()
            .iter()
            .map(|c| {
                let mut g = Entries::zeros(&ctx, len * len);
                for a in 0..n {
                    for b in 0..n {
                        let coef = c.get(a * n + b);
                        if ctx.is_zero(coef) {
                            continue;
                        }
                        for l in 0..len {
                            let x = ctx.mul(coef, terms[a].get(l));
                            if ctx.is_zero(x) {
                                continue;
                            }
                            for r in 0..len {
                                let at = l * len + r;
                                g.set(at, ctx.add(g.get(at), ctx.mul(x, terms[b].get(r))));
                            }
                        }
                    }
                }
                g
            })
            .collect();
        width *= 2;
    }
    SoSCertificate::new(n, d, ctx, terms, format!("composed identity, n = {n}, d = {d}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_identities_hold() {
        for ctx in [FieldCtx::gf(3).unwrap(), FieldCtx::gf(7).unwrap(), FieldCtx::complex(1e-9).unwrap()] {
            for n in [1, 2, 4, 8] {
                let c = base_identity(n, ctx).unwrap();
                assert_eq!(c.len(), n);
            }
        }
        assert!(base_identity(3, FieldCtx::gf(3).unwrap()).is_err());
        assert!(base_identity(2, FieldCtx::gf(2).unwrap()).is_err());
    }

    #[test]
    fn corrupted_table_is_rejected() {
        let ctx = FieldCtx::gf(5).unwrap();
        let mut table: Vec<Vec<i8>> = OCTONION_TABLE[..4].iter().map(|r| r[..4].to_vec()).collect();
        table[1][2] = -table[1][2];
        assert!(matches!(base_identity_from_table(&table, ctx), Err(Error::VerificationFailed(_))));
    }

    #[test]
    fn composed_identities() {
        let ctx = FieldCtx::gf(3).unwrap();
        for (n, d) in [(2, 1), (2, 2), (2, 4), (4, 2), (2, 8), (4, 4)] {
            let c = compose_sos(n, d, ctx).unwrap();
            assert_eq!(c.len(), n);
            assert!(verify_sos(&HyperMatrix::identity(n, d, ctx).unwrap(), &c).unwrap(), "n={n} d={d}");
        }
        assert!(compose_sos(2, 3, ctx).is_err());
        assert!(compose_sos(3, 2, ctx).is_err());
    }
}
