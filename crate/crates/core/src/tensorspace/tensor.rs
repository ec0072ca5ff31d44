use crate::error::{Error, Result};
use crate::fieldlinalg::field::{with_ring, Entries, FieldCtx, Ring, Scalar};
use crate::fieldlinalg::DenseMatrix;

/// Largest index space (in bits) a dense tensor may occupy.
pub const MAX_INDEX_BITS: u32 = 30;

/// Checks `n^order <= 2^MAX_INDEX_BITS` and returns `n^order`.
pub fn checked_volume(n: usize, order: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("alphabet size must be positive".into()));
    }
    let mut vol: u128 = 1;
    for _ in 0..order {
        vol *= n as u128;
        if vol > 1u128 << MAX_INDEX_BITS {
            return Err(Error::OutOfRange(format!(
                "index space {n}^{order} exceeds 2^{MAX_INDEX_BITS}"
            )));
        }
    }
    Ok(vol as usize)
}

/// Mixed-radix digits of `offset`, most significant first.
pub fn digits(mut offset: usize, n: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = offset % n;
        offset /= n;
    }
    out
}

pub fn offset(digits: &[usize], n: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * n + x)
}

/// A dense map `[n]^D → F` with a fixed label order; the first label is the
/// most significant index.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    n: usize,
    labels: Vec<i64>,
    ctx: FieldCtx,
    data: Entries,
}

/// A partition of a tensor's labels into row and column labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatteningSpec {
    pub rows: Vec<i64>,
    pub cols: Vec<i64>,
}

impl FlatteningSpec {
    pub fn new(rows: Vec<i64>, cols: Vec<i64>) -> Self {
        FlatteningSpec { rows, cols }
    }

    pub fn swapped(&self) -> Self {
        FlatteningSpec { rows: self.cols.clone(), cols: self.rows.clone() }
    }
}

fn check_labels(labels: &[i64]) -> Result<()> {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument(format!("repeated label in {labels:?}")));
    }
    Ok(())
}

impl Tensor {
    pub fn new(n: usize, labels: Vec<i64>, ctx: FieldCtx, data: Entries) -> Result<Self> {
        ctx.validate()?;
        check_labels(&labels)?;
        let vol = checked_volume(n, labels.len())?;
        if data.len() != vol {
            return Err(Error::Dimension(format!("expected {vol} entries, got {}", data.len())));
        }
        data.validate(&ctx)?;
        Ok(Tensor { n, labels, ctx, data })
    }

    pub fn zeros(n: usize, labels: Vec<i64>, ctx: FieldCtx) -> Result<Self> {
        check_labels(&labels)?;
        let vol = checked_volume(n, labels.len())?;
        Ok(Tensor { n, labels, ctx, data: Entries::zeros(&ctx, vol) })
    }

    pub fn from_fn(
        n: usize,
        labels: Vec<i64>,
        ctx: FieldCtx,
        mut f: impl FnMut(&[usize]) -> Scalar,
    ) -> Result<Self> {
        let mut t = Self::zeros(n, labels, ctx)?;
        let order = t.order();
        let mut idx = vec![0usize; order];
        for k in 0..t.data.len() {
            t.data.set(k, f(&idx));
            for pos in (0..order).rev() {
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn entries(&self) -> &Entries {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn position(&self, label: i64) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn get(&self, idx: &[usize]) -> Scalar {
        self.data.get(offset(idx, self.n))
    }

    pub fn set(&mut self, idx: &[usize], s: Scalar) {
        let k = offset(idx, self.n);
        self.data.set(k, s);
    }

    pub fn get_flat(&self, k: usize) -> Scalar {
        self.data.get(k)
    }

    pub fn is_zero(&self) -> bool {
        with_ring!(self.ctx, |r| r.view(&self.data).iter().all(|&x| r.is_zero(x)))
    }

    pub fn nnz(&self) -> usize {
        with_ring!(self.ctx, |r| r.view(&self.data).iter().filter(|&&x| !r.is_zero(x)).count())
    }

    fn check_compatible(&self, other: &Tensor) -> Result<()> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.n != other.n || self.labels != other.labels {
            return Err(Error::Dimension(format!(
                "tensors over [{}]^{:?} and [{}]^{:?}",
                self.n, self.labels, other.n, other.labels
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.check_compatible(other)?;
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            r.wrap(a.iter().zip(b).map(|(&x, &y)| r.add(x, y)).collect())
        });
        Ok(Tensor { data, ..self.clone() })
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Tensor {
        let data = with_ring!(self.ctx, |r| r.wrap(r.view(&self.data).iter().map(|&x| r.neg(x)).collect()));
        Tensor { data, ..self.clone() }
    }

    pub fn scale(&self, s: Scalar) -> Tensor {
        let data = with_ring!(self.ctx, |r| {
            let k = r.scalar(s);
            r.wrap(r.view(&self.data).iter().map(|&x| r.mul(x, k)).collect())
        });
        Tensor { data, ..self.clone() }
    }

    pub fn approx_eq(&self, other: &Tensor) -> bool {
        self.check_compatible(other).is_ok() && self.sub(other).map(|t| t.is_zero()).unwrap_or(false)
    }

    /// Same entries under new label names (positionally).
    pub fn relabel(&self, labels: Vec<i64>) -> Result<Tensor> {
        if labels.len() != self.order() {
            return Err(Error::Dimension(format!("{} labels for an order-{} tensor", labels.len(), self.order())));
        }
        check_labels(&labels)?;
        Ok(Tensor { labels, ..self.clone() })
    }

    /// The same tensor stored under a permuted label order.
    pub fn reorder(&self, order: &[i64]) -> Result<Tensor> {
        let pos = self.positions_of(order)?;
        if pos.len() != self.order() {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation of {:?}", self.labels)));
        }
        let strides = self.strides();
        let src = gather_indices(self.n, &pos, &[], &strides);
        Ok(Tensor {
            n: self.n,
            labels: order.to_vec(),
            ctx: self.ctx,
            data: self.data.gather(&src),
        })
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1usize; self.order()];
        for k in (0..self.order().saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.n;
        }
        s
    }

    fn positions_of(&self, labels: &[i64]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|&l| {
                self.position(l)
                    .ok_or_else(|| Error::InvalidArgument(format!("label {l} not in {:?}", self.labels)))
            })
            .collect()
    }

    /// Row/column shape and source offsets of `Mat_{I,J}`: entry
    /// `(r, c)` of the flattening is `flat[src[r * cols + c]]`.
    pub fn flatten_index(&self, spec: &FlatteningSpec) -> Result<(usize, usize, Vec<usize>)> {
        let mut rp = self.positions_of(&spec.rows)?;
        let mut cp = self.positions_of(&spec.cols)?;
        let mut all: Vec<usize> = rp.iter().chain(&cp).copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != self.order() || rp.len() + cp.len() != self.order() {
            return Err(Error::InvalidArgument(format!(
                "{:?} | {:?} is not a partition of {:?}",
                spec.rows, spec.cols, self.labels
            )));
        }
        // Row and column multi-indices follow the tensor's own label order.
        rp.sort_unstable();
        cp.sort_unstable();
        let strides = self.strides();
        let src = gather_indices(self.n, &rp, &cp, &strides);
        Ok((self.n.pow(rp.len() as u32), self.n.pow(cp.len() as u32), src))
    }

    pub fn flatten_mat(&self, spec: &FlatteningSpec) -> Result<DenseMatrix> {
        let (rows, cols, src) = self.flatten_index(spec)?;
        Ok(DenseMatrix::from_parts(rows, cols, self.ctx, self.data.gather(&src)))
    }

    /// `A ⊗ B` over the concatenated label list.
    pub fn tensor_product(&self, other: &Tensor) -> Result<Tensor> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.n != other.n {
            return Err(Error::Dimension(format!("alphabets {} and {}", self.n, other.n)));
        }
        let labels: Vec<i64> = self.labels.iter().chain(&other.labels).copied().collect();
        check_labels(&labels).map_err(|_| {
            Error::InvalidArgument(format!("label sets {:?} and {:?} overlap", self.labels, other.labels))
        })?;
        checked_volume(self.n, labels.len())?;
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            let mut out = Vec::with_capacity(a.len() * b.len());
            for &x in a {
                out.extend(b.iter().map(|&y| r.mul(x, y)));
            }
            r.wrap(out)
        });
        Ok(Tensor { n: self.n, labels, ctx: self.ctx, data })
    }
}

/// Offsets enumerating the multi-indices over `outer` positions (most
/// significant) then `inner` positions, in row-major order.
fn gather_indices(n: usize, outer: &[usize], inner: &[usize], strides: &[usize]) -> Vec<usize> {
    let axes: Vec<usize> = outer.iter().chain(inner).map(|&p| strides[p]).collect();
    let total = n.pow(axes.len() as u32);
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    let mut cur = 0usize;
    for _ in 0..total {
        out.push(cur);
        for k in (0..axes.len()).rev() {
            idx[k] += 1;
            cur += axes[k];
            if idx[k] < n {
                break;
            }
            cur -= axes[k] * n;
            idx[k] = 0;
        }
    }
    out
}
