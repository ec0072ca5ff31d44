use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{with_ring, Entries, FieldCtx, Ring, Scalar};
use crate::error::{Error, Result};

/// A dense row-major matrix over a field context.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    ctx: FieldCtx,
    data: Entries,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, ctx: FieldCtx, data: Entries) -> Result<Self> {
        ctx.validate()?;
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows.saturating_mul(cols),
                data.len()
            )));
        }
        data.validate(&ctx)?;
        Ok(DenseMatrix { rows, cols, ctx, data })
    }

    pub(crate) fn from_parts(rows: usize, cols: usize, ctx: FieldCtx, data: Entries) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        DenseMatrix { rows, cols, ctx, data }
    }

    pub fn zeros(rows: usize, cols: usize, ctx: FieldCtx) -> Self {
        DenseMatrix { rows, cols, ctx, data: Entries::zeros(&ctx, rows * cols) }
    }

    pub fn identity(n: usize, ctx: FieldCtx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    /// Builds a matrix from integers, reducing them into the field.
    pub fn from_ints(rows: usize, cols: usize, ctx: FieldCtx, values: &[i64]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                values.len()
            )));
        }
        let mut m = Self::zeros(rows, cols, ctx);
        for (k, &v) in values.iter().enumerate() {
            m.data.set(k, ctx.from_int(v));
        }
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, ctx: FieldCtx, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut m = Self::zeros(rows, cols, ctx);
        for r in 0..rows {
            for c in 0..cols {
                m.data.set(r * cols + c, f(r, c));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn entries(&self) -> &Entries {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut Entries {
        &mut self.data
    }

    pub fn into_entries(self) -> Entries {
        self.data
    }

    /// Residues of a finite-field matrix; `None` over the complex context.
    pub fn residues(&self) -> Option<&[u64]> {
        match &self.data {
            Entries::Fp(v) => Some(v),
            Entries::C(_) => None,
        }
    }

    pub fn complex_entries(&self) -> Option<&[Complex64]> {
        match &self.data {
            Entries::C(v) => Some(v),
            Entries::Fp(_) => None,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data.get(r * self.cols + c)
    }

    pub fn set(&mut self, r: usize, c: usize, s: Scalar) {
        self.data.set(r * self.cols + c, s);
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        with_ring!(self.ctx, |r| r.view(&self.data).iter().all(|&x| r.is_zero(x)))
    }

    /// Number of entries not (approximately) zero.
    pub fn nnz(&self) -> usize {
        with_ring!(self.ctx, |r| r.view(&self.data).iter().filter(|&&x| !r.is_zero(x)).count())
    }

    /// Equality up to the context tolerance (exact for finite fields).
    pub fn approx_eq(&self, other: &DenseMatrix) -> bool {
        if self.rows != other.rows || self.cols != other.cols || self.ctx != other.ctx {
            return false;
        }
        match self.sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let src: Vec<usize> = (0..self.cols)
            .flat_map(|c| (0..self.rows).map(move |r| r * self.cols + c))
            .collect();
        DenseMatrix::from_parts(self.cols, self.rows, self.ctx, self.data.gather(&src))
    }

    /// Entry permutation: `out[k] = self.flat[src[k]]` with the given shape.
    pub fn gather(&self, rows: usize, cols: usize, src: &[usize]) -> DenseMatrix {
        debug_assert_eq!(rows * cols, src.len());
        DenseMatrix::from_parts(rows, cols, self.ctx, self.data.gather(src))
    }

    fn check_same_shape(&self, other: &DenseMatrix) -> Result<()> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            r.wrap(a.iter().zip(b).map(|(&x, &y)| r.add(x, y)).collect())
        });
        Ok(DenseMatrix::from_parts(self.rows, self.cols, self.ctx, data))
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.check_same_shape(other)?;
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            r.wrap(a.iter().zip(b).map(|(&x, &y)| r.sub(x, y)).collect())
        });
        Ok(DenseMatrix::from_parts(self.rows, self.cols, self.ctx, data))
    }

    pub fn add_assign(&mut self, other: &DenseMatrix) -> Result<()> {
        self.check_same_shape(other)?;
        with_ring!(self.ctx, |r| {
            let b = r.view(&other.data);
            for (x, &y) in r.view_mut(&mut self.data).iter_mut().zip(b) {
                *x = r.add(*x, y);
            }
        });
        Ok(())
    }

    pub fn neg(&self) -> DenseMatrix {
        let data = with_ring!(self.ctx, |r| r.wrap(r.view(&self.data).iter().map(|&x| r.neg(x)).collect()));
        DenseMatrix::from_parts(self.rows, self.cols, self.ctx, data)
    }

    pub fn scale(&self, s: Scalar) -> DenseMatrix {
        let data = with_ring!(self.ctx, |r| {
            let k = r.scalar(s);
            r.wrap(r.view(&self.data).iter().map(|&x| r.mul(x, k)).collect())
        });
        DenseMatrix::from_parts(self.rows, self.cols, self.ctx, data)
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.ctx.ensure_same(&other.ctx)?;
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            let mut out = vec![r.zero(); m * n];
            for i in 0..m {
                for t in 0..k {
                    let x = a[i * k + t];
                    if r.is_zero(x) {
                        continue;
                    }
                    let row = &b[t * n..(t + 1) * n];
                    let dst = &mut out[i * n..(i + 1) * n];
                    for (o, &y) in dst.iter_mut().zip(row) {
                        *o = r.add(*o, r.mul(x, y));
                    }
                }
            }
            r.wrap(out)
        });
        Ok(DenseMatrix::from_parts(m, n, self.ctx, data))
    }

    /// Kronecker product `self ⊠ other`.
    pub fn kron(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        self.ctx.ensure_same(&other.ctx)?;
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        let (rows, cols) = (r1 * r2, c1 * c2);
        let data = with_ring!(self.ctx, |r| {
            let (a, b) = (r.view(&self.data), r.view(&other.data));
            let mut out = vec![r.zero(); rows * cols];
            for i1 in 0..r1 {
                for j1 in 0..c1 {
                    let x = a[i1 * c1 + j1];
                    for i2 in 0..r2 {
                        let base = (i1 * r2 + i2) * cols + j1 * c2;
                        for j2 in 0..c2 {
                            out[base + j2] = r.mul(x, b[i2 * c2 + j2]);
                        }
                    }
                }
            }
            r.wrap(out)
        });
        Ok(DenseMatrix::from_parts(rows, cols, self.ctx, data))
    }

    /// Outer product `u vᵀ` of two coordinate vectors.
    pub fn outer(u: &Entries, v: &Entries, ctx: FieldCtx) -> DenseMatrix {
        let (m, n) = (u.len(), v.len());
        let data = with_ring!(ctx, |r| {
            let (a, b) = (r.view(u), r.view(v));
            let mut out = Vec::with_capacity(m * n);
            for &x in a {
                out.extend(b.iter().map(|&y| r.mul(x, y)));
            }
            r.wrap(out)
        });
        DenseMatrix::from_parts(m, n, ctx, data)
    }

    pub fn row(&self, r: usize) -> Entries {
        let src: Vec<usize> = (0..self.cols).map(|c| r * self.cols + c).collect();
        self.data.gather(&src)
    }

    pub fn col(&self, c: usize) -> Entries {
        let src: Vec<usize> = (0..self.rows).map(|r| r * self.cols + c).collect();
        self.data.gather(&src)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.approx_eq(&self.transpose())
    }

    /// Maximum absolute entry (complex) or 1/0 for finite fields.
    pub(crate) fn max_abs(&self) -> f64 {
        match &self.data {
            Entries::C(v) => v.iter().map(|c| c.norm()).fold(0.0, f64::max),
            Entries::Fp(v) => {
                if v.iter().any(|&x| x != 0) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Uniformly random matrix over a finite field, deterministic per RNG state.
    pub fn random<R: Rng>(rows: usize, cols: usize, ctx: FieldCtx, rng: &mut R) -> Result<DenseMatrix> {
        let p = ctx.require_finite()?;
        let data = (0..rows * cols).map(|_| rng.gen_range(0..p)).collect();
        Ok(DenseMatrix::from_parts(rows, cols, ctx, Entries::Fp(data)))
    }

    /// Random nonsingular `n × n` matrix by rejection sampling.
    pub fn random_nonsingular(n: usize, ctx: FieldCtx, seed: u64) -> Result<DenseMatrix> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_nonsingular_with(n, ctx, &mut rng)
    }

    pub fn random_nonsingular_with<R: Rng>(n: usize, ctx: FieldCtx, rng: &mut R) -> Result<DenseMatrix> {
        loop {
            let m = Self::random(n, n, ctx, rng)?;
            if m.rank() == n {
                return Ok(m);
            }
        }
    }
}
