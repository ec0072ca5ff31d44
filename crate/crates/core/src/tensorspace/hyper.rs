use crate::error::{Error, Result};
use crate::fieldlinalg::{DenseMatrix, FieldCtx, Scalar};

use super::tensor::{checked_volume, digits, offset};

/// An `n^d × n^d` matrix whose rows and columns are indexed by `[n]^d`,
/// first index most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperMatrix {
    n: usize,
    d: usize,
    body: DenseMatrix,
}

/// Block counts are stored in bitmasks; `n = 1` would otherwise let `d` grow
/// without bound.
pub const MAX_BLOCKS: usize = 30;

fn check_shape(n: usize, d: usize) -> Result<usize> {
    if d > MAX_BLOCKS {
        return Err(Error::OutOfRange(format!("{d} blocks exceeds {MAX_BLOCKS}")));
    }
    let dim = checked_volume(n, d)?;
    checked_volume(n, 2 * d)?;
    Ok(dim)
}

impl HyperMatrix {
    pub fn new(n: usize, d: usize, body: DenseMatrix) -> Result<Self> {
        let dim = check_shape(n, d)?;
        if body.rows() != dim || body.cols() != dim {
            return Err(Error::Dimension(format!(
                "a [{n}]^{d} hypermatrix is {dim}x{dim}, got {}x{}",
                body.rows(),
                body.cols()
            )));
        }
        Ok(HyperMatrix { n, d, body })
    }

    pub fn zeros(n: usize, d: usize, ctx: FieldCtx) -> Result<Self> {
        let dim = check_shape(n, d)?;
        Ok(HyperMatrix { n, d, body: DenseMatrix::zeros(dim, dim, ctx) })
    }

    pub fn identity(n: usize, d: usize, ctx: FieldCtx) -> Result<Self> {
        let dim = check_shape(n, d)?;
        Ok(HyperMatrix { n, d, body: DenseMatrix::identity(dim, ctx) })
    }

    pub fn from_ints(n: usize, d: usize, ctx: FieldCtx, values: &[i64]) -> Result<Self> {
        let dim = check_shape(n, d)?;
        Self::new(n, d, DenseMatrix::from_ints(dim, dim, ctx, values)?)
    }

    /// Builds entries from row and column multi-indices.
    pub fn from_fn(
        n: usize,
        d: usize,
        ctx: FieldCtx,
        mut f: impl FnMut(&[usize], &[usize]) -> Scalar,
    ) -> Result<Self> {
        let dim = check_shape(n, d)?;
        let tuples: Vec<Vec<usize>> = (0..dim).map(|k| digits(k, n, d)).collect();
        let body = DenseMatrix::from_fn(dim, dim, ctx, |r, c| f(&tuples[r], &tuples[c]));
        Ok(HyperMatrix { n, d, body })
    }

    pub(crate) fn from_body(n: usize, d: usize, body: DenseMatrix) -> Self {
        debug_assert_eq!(body.rows(), n.pow(d as u32));
        HyperMatrix { n, d, body }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Side length `n^d`.
    pub fn dim(&self) -> usize {
        self.body.rows()
    }

    pub fn body(&self) -> &DenseMatrix {
        &self.body
    }

    pub fn into_body(self) -> DenseMatrix {
        self.body
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.body.ctx()
    }

    pub fn tuple(&self, offset: usize) -> Vec<usize> {
        digits(offset, self.n, self.d)
    }

    pub fn offset(&self, tuple: &[usize]) -> usize {
        offset(tuple, self.n)
    }

    pub fn get(&self, i: &[usize], j: &[usize]) -> Scalar {
        self.body.get(self.offset(i), self.offset(j))
    }

    pub fn rank(&self) -> usize {
        self.body.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    pub fn nnz(&self) -> usize {
        self.body.nnz()
    }

    fn check_same_shape(&self, other: &HyperMatrix) -> Result<()> {
        if self.n != other.n || self.d != other.d {
            return Err(Error::Dimension(format!(
                "[{}]^{} vs [{}]^{}",
                self.n, self.d, other.n, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &HyperMatrix) -> Result<HyperMatrix> {
        self.check_same_shape(other)?;
        Ok(HyperMatrix { body: self.body.add(&other.body)?, n: self.n, d: self.d })
    }

    pub fn sub(&self, other: &HyperMatrix) -> Result<HyperMatrix> {
        self.check_same_shape(other)?;
        Ok(HyperMatrix { body: self.body.sub(&other.body)?, n: self.n, d: self.d })
    }

    pub fn scale(&self, s: Scalar) -> HyperMatrix {
        HyperMatrix { body: self.body.scale(s), n: self.n, d: self.d }
    }

    pub fn transpose(&self) -> HyperMatrix {
        HyperMatrix { body: self.body.transpose(), n: self.n, d: self.d }
    }

    pub fn approx_eq(&self, other: &HyperMatrix) -> bool {
        self.n == other.n && self.d == other.d && self.body.approx_eq(&other.body)
    }

    /// Reinterprets the same body over a different block structure with
    /// `n'^{d'} = n^d`.
    pub fn reshape(&self, n: usize, d: usize) -> Result<HyperMatrix> {
        HyperMatrix::new(n, d, self.body.clone())
    }
}
