//! Pairing bijection, edge flattening, shifted and padded tensors, and the
//! iterated matrix multiplication tensor.
//!
//! Path edges are integers `e` standing for `{v_{e-1}, v_e}`. The directed
//! edge `v_{e-1} → v_e` carries label `2e-1` and `v_e → v_{e-1}` carries
//! label `2e`, so flattening pairs labels `(2e-1, 2e)` into edge `e`.

use crate::error::{Error, Result};
use crate::fieldlinalg::FieldCtx;

use super::hyper::HyperMatrix;
use super::tensor::{checked_volume, Tensor};

/// `⟨i, j⟩ = (i-1)n + j` on 1-based indices.
pub fn pair_index(i: usize, j: usize, n: usize) -> Result<usize> {
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::OutOfRange(format!("({i}, {j}) not in [{n}]^2")));
    }
    Ok((i - 1) * n + j)
}

pub fn unpair(k: usize, n: usize) -> Result<(usize, usize)> {
    if k == 0 || k > n * n {
        return Err(Error::OutOfRange(format!("{k} not in [{}]", n * n)));
    }
    Ok(((k - 1) / n + 1, (k - 1) % n + 1))
}

/// Labels of the two directed versions of edge `e`: forward (`v_{e-1} → v_e`)
/// then backward.
pub fn directed_labels(edge: i64) -> (i64, i64) {
    (2 * edge - 1, 2 * edge)
}

/// The edge a directed label belongs to.
pub fn edge_of_label(label: i64) -> i64 {
    (label + 1).div_euclid(2)
}

/// `A♭`: pairs each edge's two directed labels into one `[n²]` index. The
/// result is labelled by edge number in increasing order.
pub fn flat(a: &Tensor) -> Result<Tensor> {
    let mut edges: Vec<i64> = a.labels().iter().map(|&l| edge_of_label(l)).collect();
    edges.sort_unstable();
    edges.dedup();
    let n = a.n();
    let mut fwd = Vec::with_capacity(edges.len());
    let mut bwd = Vec::with_capacity(edges.len());
    for &e in &edges {
        let (f, b) = directed_labels(e);
        match (a.position(f), a.position(b)) {
            (Some(pf), Some(pb)) => {
                fwd.push(pf);
                bwd.push(pb);
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "labels {:?} are not the directed edges of a path subgraph",
                    a.labels()
                )))
            }
        }
    }
    let nn = n * n;
    checked_volume(nn, edges.len())?;
    let mut x = vec![0usize; a.order()];
    Tensor::from_fn(nn, edges, *a.ctx(), |y| {
        for (k, &v) in y.iter().enumerate() {
            x[fwd[k]] = v / n;
            x[bwd[k]] = v % n;
        }
        a.get(&x)
    })
}

/// Inverse of [`flat`]: a tensor over `[n²]^E` labelled by edges becomes a
/// tensor over `[n]^{D}` with labels `2e-1, 2e` for each edge `e`.
pub fn unflat(t: &Tensor, n: usize) -> Result<Tensor> {
    if n == 0 || n.checked_mul(n) != Some(t.n()) {
        return Err(Error::InvalidArgument(format!("alphabet {} is not {n}²", t.n())));
    }
    let edges = t.labels().to_vec();
    let mut labels = Vec::with_capacity(2 * edges.len());
    for &e in &edges {
        if e.unsigned_abs() > 1 << 40 {
            return Err(Error::OutOfRange(format!("edge {e}")));
        }
        let (f, b) = directed_labels(e);
        labels.extend([f, b]);
    }
    checked_volume(n, labels.len())?;
    let mut y = vec![0usize; edges.len()];
    let a = Tensor::from_fn(n, labels, *t.ctx(), |x| {
        for (k, v) in y.iter_mut().enumerate() {
            *v = x[2 * k] * n + x[2 * k + 1];
        }
        t.get(&y)
    })?;
    let mut sorted = a.labels().to_vec();
    sorted.sort_unstable();
    a.reorder(&sorted)
}

/// `ShiftedTensor(M)` over `[n²]^{d+1}`, labels `1..=d+1`.
pub fn shifted_tensor(m: &HyperMatrix) -> Result<Tensor> {
    let (n, d) = (m.n(), m.d());
    let ctx = *m.ctx();
    let zero = ctx.zero();
    let mut i = vec![0usize; d];
    let mut j = vec![0usize; d];
    Tensor::from_fn(n * n, (1..=d as i64 + 1).collect(), ctx, |y| {
        let (p, q) = (y[0] / n, y[d] % n);
        if p != 0 || q != 0 {
            return zero;
        }
        for k in 0..d {
            i[k] = y[k] % n;
            j[k] = y[k + 1] / n;
        }
        m.get(&i, &j)
    })
}

/// `Padded(M)` over `[n]^{2d+2}` with labels `1..=2d+2` read as
/// `(p, i_1, j_1, …, i_d, j_d, q)`.
pub fn padded_tensor(m: &HyperMatrix) -> Result<Tensor> {
    let (n, d) = (m.n(), m.d());
    let ctx = *m.ctx();
    let zero = ctx.zero();
    let mut i = vec![0usize; d];
    let mut j = vec![0usize; d];
    Tensor::from_fn(n, (1..=2 * d as i64 + 2).collect(), ctx, |x| {
        if x[0] != 0 || x[2 * d + 1] != 0 {
            return zero;
        }
        for k in 0..d {
            i[k] = x[2 * k + 1];
            j[k] = x[2 * k + 2];
        }
        m.get(&i, &j)
    })
}

/// Recovers `M` from the `p = q = 1` slice of a shifted tensor, ignoring
/// entries outside the slice.
pub fn unshift(t: &Tensor) -> Result<HyperMatrix> {
    let nn = t.n();
    let n = (nn as f64).sqrt().round() as usize;
    if n * n != nn || t.order() < 2 {
        return Err(Error::InvalidArgument(format!(
            "an order-{} tensor over [{nn}] is not a shifted tensor shape",
            t.order()
        )));
    }
    let d = t.order() - 1;
    let mut y = vec![0usize; d + 1];
    HyperMatrix::from_fn(n, d, *t.ctx(), |i, j| {
        y[0] = i[0];
        for k in 1..d {
            y[k] = j[k - 1] * n + i[k];
        }
        y[d] = j[d - 1] * n;
        t.get(&y)
    })
}

/// `IMM_{n,d}` over `[n²]^d`: one at `(⟨a_1,b_1⟩,…,⟨a_d,b_d⟩)` exactly when
/// `b_k = a_{k+1}` for all `k < d`. Both chain endpoints are free.
pub fn imm_tensor(n: usize, d: usize, ctx: FieldCtx) -> Result<Tensor> {
    if d == 0 {
        return Err(Error::InvalidArgument("IMM needs d >= 1".into()));
    }
    let (one, zero) = (ctx.one(), ctx.zero());
    Tensor::from_fn(n * n, (1..=d as i64).collect(), ctx, |y| {
        let chained = y.windows(2).all(|w| w[0] % n == w[1] / n);
        if chained {
            one
        } else {
            zero
        }
    })
}

/// `IMM_{n,d}` with both endpoints pinned to the first index; this is the
/// shifted tensor of `I_{n^{d-1}}`.
pub fn imm_endpoint_slice(n: usize, d: usize, ctx: FieldCtx) -> Result<Tensor> {
    let full = imm_tensor(n, d, ctx)?;
    let zero = ctx.zero();
    Tensor::from_fn(n * n, full.labels().to_vec(), ctx, |y| {
        if y[0] / n == 0 && y[d - 1] % n == 0 {
            full.get(y)
        } else {
            zero
        }
    })
}

pub(crate) fn one_hot(n: usize, labels: Vec<i64>, ctx: FieldCtx, at: &[usize]) -> Result<Tensor> {
    let mut t = Tensor::zeros(n, labels, ctx)?;
    t.set(at, ctx.one());
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlinalg::{DenseMatrix, Entries, Scalar};
    use rand::SeedableRng;

    fn gf(p: u64) -> FieldCtx {
        FieldCtx::gf(p).unwrap()
    }

    #[test]
    fn pairing() {
        assert_eq!(pair_index(1, 1, 2).unwrap(), 1);
        assert_eq!(pair_index(2, 3, 3).unwrap(), 6);
        for i in 1..=4 {
            for j in 1..=4 {
                assert_eq!(unpair(pair_index(i, j, 4).unwrap(), 4).unwrap(), (i, j));
            }
        }
        assert!(pair_index(0, 1, 2).is_err());
        assert!(pair_index(3, 1, 2).is_err());
        assert!(unpair(5, 2).is_err());
    }

    #[test]
    fn single_edge_flat_layout() {
        let ctx = gf(2);
        let a = Tensor::new(2, vec![1, 2], ctx, Entries::Fp(vec![1, 0, 0, 1])).unwrap();
        let f = flat(&a).unwrap();
        assert_eq!(f.labels(), &[1]);
        assert_eq!(f.entries(), &Entries::Fp(vec![1, 0, 0, 1]));
    }

    #[test]
    fn flat_rejects_unpaired_labels() {
        let a = Tensor::zeros(2, vec![1, 3], gf(2)).unwrap();
        assert!(flat(&a).is_err());
    }

    #[test]
    fn negative_edges_flatten() {
        let ctx = gf(3);
        let (f0, b0) = directed_labels(0);
        assert_eq!((f0, b0), (-1, 0));
        assert_eq!(edge_of_label(-1), 0);
        assert_eq!(edge_of_label(0), 0);
        let a = Tensor::from_fn(2, vec![0, -1], ctx, |x| Scalar::Fp((x[0] * 2 + x[1]) as u64 % 3)).unwrap();
        let f = flat(&a).unwrap();
        // y = ⟨x_{-1}, x_0⟩, so y = 1 means x_{-1} = 0, x_0 = 1.
        assert_eq!(f.get(&[1]), a.get(&[1, 0]));
    }

    #[test]
    fn flat_of_padded_is_shifted() {
        let ctx = gf(2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for d in 1..=2 {
            for _ in 0..20 {
                let m = HyperMatrix::new(2, d, DenseMatrix::random(1 << d, 1 << d, ctx, &mut rng).unwrap()).unwrap();
                assert_eq!(flat(&padded_tensor(&m).unwrap()).unwrap(), shifted_tensor(&m).unwrap());
                assert_eq!(unshift(&shifted_tensor(&m).unwrap()).unwrap(), m);
            }
        }
    }

    #[test]
    fn unflat_inverts_flat() {
        let ctx = gf(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let data = DenseMatrix::random(1, 81, ctx, &mut rng).unwrap().into_entries();
        let t = Tensor::new(3, vec![4, -1, 0, 3], ctx, data).unwrap();
        let f = flat(&t).unwrap();
        assert_eq!(f.labels(), &[0, 2]);
        let back = unflat(&f, 3).unwrap();
        assert_eq!(back.labels(), &[-1, 0, 3, 4]);
        assert_eq!(flat(&back).unwrap(), f);
        assert!(back.approx_eq(&t.reorder(&[-1, 0, 3, 4]).unwrap()));
        assert!(unflat(&f, 2).is_err());
    }

    #[test]
    fn shifted_tensor_counts() {
        let ctx = gf(3);
        let m = HyperMatrix::from_ints(2, 2, ctx, &[1, 0, 2, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 2]).unwrap();
        let s = shifted_tensor(&m).unwrap();
        assert_eq!(s.len(), 64);
        assert_eq!(s.nnz(), m.nnz());
        assert!(shifted_tensor(&HyperMatrix::zeros(2, 2, ctx).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn padded_identity_support() {
        let ctx = gf(2);
        let p = padded_tensor(&HyperMatrix::identity(2, 1, ctx).unwrap()).unwrap();
        assert_eq!(p.nnz(), 2);
        assert_eq!(p.get(&[0, 0, 0, 0]), Scalar::Fp(1));
        assert_eq!(p.get(&[0, 1, 1, 0]), Scalar::Fp(1));
    }

    #[test]
    fn imm_counts_and_slice() {
        let ctx = gf(2);
        assert!(imm_tensor(1, 3, ctx).unwrap().entries() == &Entries::Fp(vec![1]));
        let t = imm_tensor(2, 2, ctx).unwrap();
        assert_eq!((t.len(), t.nnz()), (16, 8));
        for d in 1..=4 {
            let id = HyperMatrix::identity(2, d - 1, ctx).unwrap();
            assert_eq!(shifted_tensor(&id).unwrap(), imm_endpoint_slice(2, d, ctx).unwrap());
            assert_eq!(flat(&padded_tensor(&id).unwrap()).unwrap(), imm_endpoint_slice(2, d, ctx).unwrap());
        }
    }
}
