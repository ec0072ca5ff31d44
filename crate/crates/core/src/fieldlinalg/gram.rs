//! Symmetric congruence reduction: writes a symmetric `S` as `LᵀL`.

use super::field::{sqrt_mod, two_squares_mod, Entries, FieldCtx, Scalar};
use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Returns `L` with `transpose(L)·L = S`.
///
/// Each elimination step removes `t·w·wᵀ` from the working matrix. A square
/// pivot `t = s²` emits one row `s·w`; a non-square pivot is split as
/// `t = x² + y²` and emits two rows. Zero diagonals with a nonzero
/// off-diagonal entry are handled by pivoting on `e_i + e_j`.
pub fn gram_factor(s: &DenseMatrix) -> Result<DenseMatrix> {
    let ctx = *s.ctx();
    ctx.require_odd_characteristic()?;
    if !s.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", s.rows(), s.cols())));
    }
    if !s.is_symmetric() {
        return Err(Error::InvalidArgument("gram_factor needs a symmetric matrix".into()));
    }
    let n = s.rows();
    let mut a = s.clone();
    let mut rows: Vec<Entries> = Vec::new();
    // Each step lowers the rank by one, so n steps always suffice.
    for _ in 0..n {
        let Some(u) = pivot_direction(&a) else { break };
        let b: Vec<Scalar> = (0..n)
            .map(|r| u.iter().fold(ctx.zero(), |acc, &k| ctx.add(acc, a.get(r, k))))
            .collect();
        let t = u.iter().fold(ctx.zero(), |acc, &k| ctx.add(acc, b[k]));
        let t_inv = ctx.inv(t).ok_or_else(|| Error::InvalidArgument("vanishing pivot".into()))?;
        let w: Vec<Scalar> = b.iter().map(|&x| ctx.mul(x, t_inv)).collect();
        for r in 0..n {
            for c in 0..n {
                let v = ctx.sub(a.get(r, c), ctx.mul(ctx.mul(b[r], b[c]), t_inv));
                a.set(r, c, v);
            }
        }
        for coef in split_square(&ctx, t) {
            let mut row = Entries::zeros(&ctx, n);
            for (k, &x) in w.iter().enumerate() {
                row.set(k, ctx.mul(coef, x));
            }
            rows.push(row);
        }
    }
    let mut l = DenseMatrix::zeros(rows.len(), n, ctx);
    for (r, row) in rows.iter().enumerate() {
        for c in 0..n {
            l.set(r, c, row.get(c));
        }
    }
    Ok(l)
}

/// Indices whose unit-vector sum gives a nonzero quadratic value, or `None`
/// when the matrix is zero.
fn pivot_direction(a: &DenseMatrix) -> Option<Vec<usize>> {
    let ctx = *a.ctx();
    let n = a.rows();
    if let Some(i) = (0..n).find(|&i| !ctx.is_zero(a.get(i, i))) {
        return Some(vec![i]);
    }
    for i in 0..n {
        if let Some(j) = (i + 1..n).find(|&j| !ctx.is_zero(a.get(i, j))) {
            return Some(vec![i, j]);
        }
    }
    None
}

/// Coefficients `c_1, …` with `Σ c_k² = t`.
fn split_square(ctx: &FieldCtx, t: Scalar) -> Vec<Scalar> {
    match t {
        Scalar::C(z) => vec![Scalar::C(z.sqrt())],
        Scalar::Fp(x) => {
            let p = ctx.characteristic();
            match sqrt_mod(x, p) {
                Some(s) => vec![Scalar::Fp(s)],
                None => {
                    let (a, b) = two_squares_mod(x, p);
                    vec![Scalar::Fp(a), Scalar::Fp(b)]
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(s: &DenseMatrix) -> DenseMatrix {
        let l = gram_factor(s).unwrap();
        assert!(l.transpose().matmul(&l).unwrap().approx_eq(s));
        l
    }

    #[test]
    fn identity_over_gf5() {
        let ctx = FieldCtx::gf(5).unwrap();
        let l = check(&DenseMatrix::identity(3, ctx));
        assert_eq!(l, DenseMatrix::identity(3, ctx));
    }

    #[test]
    fn non_square_pivot_splits() {
        let ctx = FieldCtx::gf(5).unwrap();
        let l = check(&DenseMatrix::from_ints(1, 1, ctx, &[2]).unwrap());
        assert_eq!(l, DenseMatrix::from_ints(2, 1, ctx, &[1, 1]).unwrap());
    }

    #[test]
    fn zero_matrix_has_no_rows() {
        let ctx = FieldCtx::gf(3).unwrap();
        assert_eq!(check(&DenseMatrix::zeros(2, 2, ctx)).rows(), 0);
    }

    #[test]
    fn isotropic_diagonal() {
        let ctx = FieldCtx::gf(7).unwrap();
        let s = DenseMatrix::from_ints(2, 2, ctx, &[0, 1, 1, 0]).unwrap();
        let l = check(&s);
        assert!(l.rows() <= 4);
    }

    #[test]
    fn complex_factor() {
        let ctx = FieldCtx::complex(1e-9).unwrap();
        check(&DenseMatrix::from_ints(3, 3, ctx, &[2, -1, 0, -1, 2, -1, 0, -1, 2]).unwrap());
        check(&DenseMatrix::from_ints(2, 2, ctx, &[0, 3, 3, 0]).unwrap());
    }

    #[test]
    fn rejects_characteristic_two_and_asymmetry() {
        let ctx2 = FieldCtx::gf(2).unwrap();
        assert_eq!(gram_factor(&DenseMatrix::identity(2, ctx2)), Err(Error::CharacteristicTwo));
        let ctx = FieldCtx::gf(3).unwrap();
        assert!(gram_factor(&DenseMatrix::from_ints(2, 2, ctx, &[1, 1, 0, 1]).unwrap()).is_err());
    }
}
