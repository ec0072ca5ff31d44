//! Exponent matrices `T` and the root-of-unity matrices `W_T`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fieldlinalg::field::{inv_mod, is_prime};
use crate::fieldlinalg::{DenseMatrix, FieldCtx, Scalar};
use crate::tensorspace::HyperMatrix;

/// Parameter policy. `Strict` keeps `d` even and `n` a prime above `2d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Strict,
    Relaxed,
}

pub fn check_params(n: u64, d: usize, policy: Policy) -> Result<()> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument("n and d must be positive".into()));
    }
    if policy == Policy::Strict {
        if !d.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("d = {d} must be even (use --relax to explore)")));
        }
        if !is_prime(n) || n <= 2 * d as u64 {
            return Err(Error::InvalidArgument(format!(
                "n = {n} must be a prime above 2d = {} (use --relax to explore)",
                2 * d
            )));
        }
    }
    Ok(())
}

/// A `d × d` matrix over `Z/n`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentMatrix {
    n: u64,
    d: usize,
    entries: Vec<u64>,
}

impl ExponentMatrix {
    pub fn new(n: u64, d: usize, entries: Vec<u64>, policy: Policy) -> Result<Self> {
        check_params(n, d, policy)?;
        if entries.len() != d * d {
            return Err(Error::Dimension(format!("{} entries for a {d}×{d} matrix", entries.len())));
        }
        if let Some(&e) = entries.iter().find(|&&e| e >= n) {
            return Err(Error::OutOfRange(format!("entry {e} is not reduced mod {n}")));
        }
        Ok(ExponentMatrix { n, d, entries })
    }

    pub fn from_fn(n: u64, d: usize, policy: Policy, f: impl Fn(usize, usize) -> i64) -> Result<Self> {
        check_params(n, d, policy)?;
        let entries = (0..d * d).map(|k| f(k / d, k % d).rem_euclid(n as i64) as u64).collect();
        ExponentMatrix::new(n, d, entries, policy)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Entry `(a, b)`, 0-based.
    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.entries[a * self.d + b]
    }

    /// `i T jᵀ mod n`.
    pub fn exponent(&self, i: &[usize], j: &[usize]) -> u64 {
        let n = self.n as u128;
        let mut e = 0u128;
        for (a, &x) in i.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let row: u128 = j.iter().enumerate().map(|(b, &y)| self.get(a, b) as u128 * y as u128).sum();
            e = (e + x as u128 * (row % n)) % n;
        }
        e as u64
    }

    /// Whether the submatrix on `rows × cols` is invertible over `GF(n)`.
    fn minor_nonsingular(&self, rows: &[usize], cols: &[usize]) -> Result<bool> {
        let ctx = FieldCtx::gf(self.n)?;
        let k = rows.len();
        let m = DenseMatrix::from_fn(k, k, ctx, |r, c| Scalar::Fp(self.get(rows[r], cols[c])));
        Ok(m.rank() == k)
    }
}

pub fn zero_t(n: u64, d: usize, policy: Policy) -> Result<ExponentMatrix> {
    ExponentMatrix::from_fn(n, d, policy, |_, _| 0)
}

pub fn identity_t(n: u64, d: usize, policy: Policy) -> Result<ExponentMatrix> {
    ExponentMatrix::from_fn(n, d, policy, |a, b| i64::from(a == b))
}

/// `T_{a,b} = 1` when `b ≡ a + 1 (mod d)`.
pub fn cyclic_t(n: u64, d: usize, policy: Policy) -> Result<ExponentMatrix> {
    ExponentMatrix::from_fn(n, d, policy, |a, b| i64::from(b == (a + 1) % d))
}

/// `T_{a,b} = 1` when `a ≤ b`.
pub fn triangular_t(n: u64, d: usize, policy: Policy) -> Result<ExponentMatrix> {
    ExponentMatrix::from_fn(n, d, policy, |a, b| i64::from(a <= b))
}

/// Largest minor size checked after building a Cauchy matrix.
const MINOR_CHECK: usize = 3;

/// `T_{a,b} = (x_a - y_b)^{-1}` with `x_a = a`, `y_b = d + b` (1-based). All
/// `2d` points are distinct mod `n` once `n > 2d`, so every square submatrix
/// is nonsingular; minors up to 3×3 are re-checked.
pub fn cauchy_t(d: usize, n: u64, policy: Policy) -> Result<ExponentMatrix> {
    check_params(n, d, policy)?;
    if !is_prime(n) || n <= 2 * d as u64 {
        return Err(Error::InvalidArgument(format!("a Cauchy matrix needs a prime n > 2d; got n = {n}, d = {d}")));
    }
    let entries = (0..d * d)
        .map(|k| {
            let (a, b) = (k / d + 1, k % d + 1);
            let diff = (a as i64 - (d + b) as i64).rem_euclid(n as i64) as u64;
            inv_mod(diff, n).expect("distinct points")
        })
        .collect();
    let t = ExponentMatrix::new(n, d, entries, policy)?;
    for k in 1..=MINOR_CHECK.min(d) {
        for rows in subsets(d, k) {
            for cols in subsets(d, k) {
                if !t.minor_nonsingular(&rows, &cols)? {
                    return Err(Error::VerificationFailed(format!("singular minor {rows:?}×{cols:?}")));
                }
            }
        }
    }
    Ok(t)
}

pub(crate) fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    (0u64..1 << d)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..d).filter(|&b| m >> b & 1 == 1).collect())
        .collect()
}

/// `(W_T)_{i,j} = ω^{i T jᵀ}` for an order-`n` root `ω` of `ctx`.
pub fn build_wt(t: &ExponentMatrix, ctx: FieldCtx) -> Result<HyperMatrix> {
    let omega = ctx
        .root_of_unity(t.n)
        .ok_or_else(|| Error::InvalidField(format!("{ctx} has no root of unity of order {}", t.n)))?;
    let powers: Vec<Scalar> = (0..t.n).map(|e| ctx.pow(omega, e)).collect();
    HyperMatrix::from_fn(t.n as usize, t.d, ctx, |i, j| powers[t.exponent(i, j) as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptcore::transpose_rank_scan;

    #[test]
    fn policy() {
        assert!(check_params(5, 2, Policy::Strict).is_ok());
        assert!(check_params(5, 3, Policy::Strict).is_err());
        assert!(check_params(4, 2, Policy::Strict).is_err());
        assert!(check_params(3, 2, Policy::Strict).is_err());
        assert!(check_params(3, 2, Policy::Relaxed).is_ok());
        assert!(ExponentMatrix::new(5, 2, vec![0, 5, 0, 0], Policy::Strict).is_err());
    }

    #[test]
    fn cauchy_parameters() {
        let t = cauchy_t(2, 5, Policy::Strict).unwrap();
        assert!(t.entries().iter().all(|&e| e != 0));
        assert!(t.minor_nonsingular(&[0, 1], &[0, 1]).unwrap());
        // x = (1, 2), y = (3, 4): entries (1-3)^{-1}, (1-4)^{-1}, (2-3)^{-1}, (2-4)^{-1} mod 5.
        assert_eq!(t.entries(), &[2, 3, 4, 2]);
        let t1 = cauchy_t(1, 3, Policy::Relaxed).unwrap();
        assert_ne!(t1.get(0, 0), 0);
        assert!(cauchy_t(2, 4, Policy::Relaxed).is_err());
        assert!(cauchy_t(2, 4, Policy::Strict).is_err());
        let big = cauchy_t(4, 11, Policy::Strict).unwrap();
        assert!(big.entries().iter().all(|&e| e != 0));
    }

    #[test]
    fn zero_and_identity_exponents() {
        let ctx = FieldCtx::cycmod_above(5, 1 << 20).unwrap();
        let w0 = build_wt(&zero_t(5, 2, Policy::Strict).unwrap(), ctx).unwrap();
        assert_eq!(w0.rank(), 1);
        let w1 = build_wt(&identity_t(5, 2, Policy::Strict).unwrap(), ctx).unwrap();
        let omega = ctx.root_of_unity(5).unwrap();
        let dft = DenseMatrix::from_fn(5, 5, ctx, |r, c| ctx.pow(omega, (r * c) as u64));
        assert_eq!(w1.body(), &dft.kron(&dft).unwrap());
        assert!(transpose_rank_scan(&w0).iter().all(|&(_, r)| r == 1));
    }

    #[test]
    fn missing_root() {
        let t = zero_t(5, 2, Policy::Strict).unwrap();
        assert!(build_wt(&t, FieldCtx::gf(7).unwrap()).is_err());
        assert!(build_wt(&t, FieldCtx::gf(11).unwrap()).is_ok());
    }
}
