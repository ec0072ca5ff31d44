//! Gaussian elimination: rank, reduced row echelon form, rank factorizations
//! and kernels.
//!
//! GF(2) ranks run on bit-packed rows with word-parallel XOR. Other prime
//! fields eliminate on `u64` residues. The complex context uses partial
//! pivoting, counting a pivot only when its modulus exceeds
//! `eps * max|initial entry|`.

use num_complex::Complex64;

use super::field::{with_ring, Entries, FieldCtx, Ring};
use super::matrix::DenseMatrix;

/// Rank of a GF(2) matrix whose rows are packed in `u64` words (at most 64
/// columns). The slice is used as scratch space.
pub fn rank_gf2_rows(rows: &mut [u64]) -> usize {
    let mut rank = 0;
    for i in 0..rows.len() {
        let pivot = rows[i];
        if pivot == 0 {
            continue;
        }
        rank += 1;
        let low = pivot & pivot.wrapping_neg();
        for r in rows[i + 1..].iter_mut() {
            if *r & low != 0 {
                *r ^= pivot;
            }
        }
    }
    rank
}

/// Rank of a GF(2) matrix with rows packed into `words` words each.
pub fn rank_gf2_multiword(data: &mut [u64], words: usize) -> usize {
    if words == 0 {
        return 0;
    }
    let nrows = data.len() / words;
    let mut rank = 0;
    for i in 0..nrows {
        let lead = (0..words).find_map(|w| {
            let x = data[i * words + w];
            (x != 0).then(|| (w, x & x.wrapping_neg()))
        });
        let Some((w, bit)) = lead else { continue };
        rank += 1;
        let (head, tail) = data.split_at_mut((i + 1) * words);
        let pivot = &head[i * words..];
        for row in tail.chunks_mut(words) {
            if row[w] & bit != 0 {
                for (x, &y) in row.iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
    }
    rank
}

/// Rank of a row-major residue matrix modulo the prime `p`, destroying `buf`.
pub fn rank_modp_in_place(buf: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    debug_assert_eq!(buf.len(), rows * cols);
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&r| buf[r * cols + c] != 0) else {
            continue;
        };
        if piv != rank {
            for k in c..cols {
                buf.swap(piv * cols + k, rank * cols + k);
            }
        }
        let inv = super::field::inv_mod(buf[rank * cols + c], p).expect("nonzero pivot");
        for r in rank + 1..rows {
            let f = buf[r * cols + c];
            if f == 0 {
                continue;
            }
            let f = f * inv % p;
            for k in c..cols {
                let t = buf[rank * cols + k];
                if t != 0 {
                    let x = buf[r * cols + k] + p - f * t % p;
                    buf[r * cols + k] = if x >= p { x - p } else { x };
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pack_gf2(m: &DenseMatrix) -> (Vec<u64>, usize) {
    let cols = m.cols();
    let words = cols.div_ceil(64).max(1);
    let v = m.residues().expect("finite field");
    let mut out = vec![0u64; m.rows() * words];
    for r in 0..m.rows() {
        for c in 0..cols {
            if v[r * cols + c] & 1 == 1 {
                out[r * words + c / 64] |= 1u64 << (c % 64);
            }
        }
    }
    (out, words)
}

fn rank_complex(v: &[Complex64], rows: usize, cols: usize, eps: f64) -> usize {
    let mut a = v.to_vec();
    let scale = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let tol = eps * scale;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, best) = (rank..rows)
            .map(|r| (r, a[r * cols + c].norm()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        if piv != rank {
            for k in 0..cols {
                a.swap(piv * cols + k, rank * cols + k);
            }
        }
        let pivot = a[rank * cols + c];
        for r in rank + 1..rows {
            let f = a[r * cols + c] / pivot;
            if f.norm() == 0.0 {
                continue;
            }
            for k in c..cols {
                let t = a[rank * cols + k];
                a[r * cols + k] -= f * t;
            }
        }
        rank += 1;
    }
    rank
}

impl DenseMatrix {
    pub fn rank(&self) -> usize {
        if self.rows() == 0 || self.cols() == 0 {
            return 0;
        }
        match *self.ctx() {
            FieldCtx::Complex { eps } => {
                rank_complex(self.complex_entries().expect("complex"), self.rows(), self.cols(), eps)
            }
            ctx => {
                let p = ctx.modulus().expect("finite");
                if p == 2 {
                    let (mut packed, words) = pack_gf2(self);
                    if words == 1 {
                        rank_gf2_rows(&mut packed)
                    } else {
                        rank_gf2_multiword(&mut packed, words)
                    }
                } else {
                    let mut buf = self.residues().expect("finite").to_vec();
                    rank_modp_in_place(&mut buf, self.rows(), self.cols(), p)
                }
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (DenseMatrix, Vec<usize>) {
        let (rows, cols) = (self.rows(), self.cols());
        let mut out = self.clone();
        let tol = match *self.ctx() {
            FieldCtx::Complex { eps } => eps * self.max_abs(),
            _ => 0.0,
        };
        let mut pivots = Vec::new();
        with_ring!(*self.ctx(), |r| {
            let a = r.view_mut(out.entries_mut());
            rref_kernel(r, a, rows, cols, tol, &mut pivots);
        });
        (out, pivots)
    }

    /// Factors `self = C·R` with `C` of shape `rows × rank` and `R` of shape
    /// `rank × cols`; returns the column vectors of `C` and row vectors of `R`.
    pub fn rank_factorization(&self) -> Vec<(Entries, Entries)> {
        let (red, pivots) = self.rref();
        pivots
            .iter()
            .enumerate()
            .map(|(k, &c)| (self.col(c), red.row(k)))
            .collect()
    }

    /// Basis of the right kernel `{x : self·x = 0}` as column vectors.
    pub fn kernel(&self) -> Vec<Entries> {
        let (red, pivots) = self.rref();
        let ctx = *self.ctx();
        let cols = self.cols();
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = Entries::zeros(&ctx, cols);
                v.set(f, ctx.one());
                for (k, &pc) in pivots.iter().enumerate() {
                    v.set(pc, ctx.neg(red.get(k, f)));
                }
                v
            })
            .collect()
    }
}

fn rref_kernel<R: Ring>(r: R, a: &mut [R::E], rows: usize, cols: usize, tol: f64, pivots: &mut Vec<usize>)
where
    R::E: MagnitudeExt,
{
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, best) = (rank..rows)
            .map(|i| (i, a[i * cols + c].magnitude()))
            .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        if piv != rank {
            for k in 0..cols {
                a.swap(piv * cols + k, rank * cols + k);
            }
        }
        let inv = r.inv(a[rank * cols + c]).expect("nonzero pivot");
        for k in 0..cols {
            a[rank * cols + k] = r.mul(a[rank * cols + k], inv);
        }
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let f = a[i * cols + c];
            if f == r.zero() {
                continue;
            }
            for k in 0..cols {
                let t = a[rank * cols + k];
                a[i * cols + k] = r.sub(a[i * cols + k], r.mul(f, t));
            }
        }
        pivots.push(c);
        rank += 1;
    }
}

/// Pivot magnitude used by the shared elimination kernel; residues count as
/// 1 when nonzero so the first nonzero entry wins.
pub(crate) trait MagnitudeExt {
    fn magnitude(&self) -> f64;
}

impl MagnitudeExt for u64 {
    fn magnitude(&self) -> f64 {
        if *self == 0 {
            0.0
        } else {
            1.0
        }
    }
}

impl MagnitudeExt for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::gf(p).unwrap()
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(DenseMatrix::identity(4, gf(2)).rank(), 4);
        assert_eq!(DenseMatrix::zeros(3, 3, gf(3)).rank(), 0);
        assert_eq!(DenseMatrix::zeros(0, 5, gf(3)).rank(), 0);
    }

    #[test]
    fn multiword_gf2_matches_modp_path() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = DenseMatrix::random(70, 130, gf(2), &mut rng).unwrap();
            let generic = {
                let mut buf = m.residues().unwrap().to_vec();
                rank_modp_in_place(&mut buf, 70, 130, 2)
            };
            assert_eq!(m.rank(), generic);
        }
    }

    #[test]
    fn rank_factorization_reassembles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let ctx = gf(7);
        let a = DenseMatrix::random(5, 2, ctx, &mut rng).unwrap();
        let b = DenseMatrix::random(2, 6, ctx, &mut rng).unwrap();
        let m = a.matmul(&b).unwrap();
        let parts = m.rank_factorization();
        assert_eq!(parts.len(), m.rank());
        let mut acc = DenseMatrix::zeros(5, 6, ctx);
        for (u, v) in &parts {
            acc.add_assign(&DenseMatrix::outer(u, v, ctx)).unwrap();
        }
        assert_eq!(acc, m);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let ctx = gf(5);
        let m = DenseMatrix::from_ints(2, 4, ctx, &[1, 2, 3, 4, 2, 4, 1, 0]).unwrap();
        let ker = m.kernel();
        assert_eq!(ker.len(), 4 - m.rank());
        for v in ker {
            let col = DenseMatrix::new(4, 1, ctx, v).unwrap();
            assert!(m.matmul(&col).unwrap().is_zero());
        }
    }

    #[test]
    fn complex_rank_uses_relative_tolerance() {
        let ctx = FieldCtx::complex(1e-9).unwrap();
        let m = DenseMatrix::from_ints(2, 2, ctx, &[1, 2, 2, 4]).unwrap();
        assert_eq!(m.rank(), 1);
        let big = m.scale(ctx.from_int(1_000_000));
        assert_eq!(big.rank(), 1);
    }
}
