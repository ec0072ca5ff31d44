//! Small matrices with known PT-rank behaviour.

use crate::error::Result;
use crate::fieldlinalg::FieldCtx;
use crate::tensorspace::HyperMatrix;

use super::cert::PTCertificate;
use super::kappa::Kappa;
use super::transpose::partial_transpose;

/// The swap matrix on `[n]²`: `M_{(i₁,i₂),(j₁,j₂)} = 1` iff `j₁ = i₂` and
/// `j₂ = i₁`. It has full rank `n²`, but `M^{⊤1}` is the rank-one matrix
/// `vec(I) vec(I)ᵀ`.
pub fn swap_matrix(n: usize, ctx: FieldCtx) -> Result<HyperMatrix> {
    HyperMatrix::from_fn(n, 2, ctx, |i, j| ctx.from_int(i64::from(j[0] == i[1] && j[1] == i[0])))
}

/// The swap matrix for `n = 3` as an explicit 9×9 array.
pub const SWAP_3: [[i64; 9]; 9] = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1],
];

/// `I_4 = A + B^{⊤1}` over `[2]²` with `A` and `B` both of rank one.
pub fn identity_split(ctx: FieldCtx) -> Result<PTCertificate> {
    let a = HyperMatrix::from_ints(2, 2, ctx, &[1, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0, 0, 1])?;
    let b = HyperMatrix::from_ints(2, 2, ctx, &[0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0])?;
    let k1 = Kappa::new(2, &[1])?;
    let b_t = partial_transpose(&b, &k1)?;
    PTCertificate::new(
        HyperMatrix::identity(2, 2, ctx)?,
        vec![(Kappa::empty(2), a), (k1, b_t)],
        "I_4 = A + B^⊤1 with rank(A) = rank(B) = 1",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptcore::{is_pt_basic, verify_pt_certificate};

    #[test]
    fn swap_matches_array() {
        let ctx = FieldCtx::gf(2).unwrap();
        let flat: Vec<i64> = SWAP_3.iter().flatten().copied().collect();
        assert_eq!(swap_matrix(3, ctx).unwrap(), HyperMatrix::from_ints(3, 2, ctx, &flat).unwrap());
        assert!(is_pt_basic(&swap_matrix(3, ctx).unwrap()).0);
    }

    #[test]
    fn split_verifies_in_every_small_field() {
        for p in [2, 3, 5, 7] {
            let cert = identity_split(FieldCtx::gf(p).unwrap()).unwrap();
            assert_eq!(verify_pt_certificate(&cert).unwrap(), 2, "p = {p}");
        }
    }
}
