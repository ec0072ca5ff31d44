//! Field contexts and dense linear algebra.

pub mod field;
pub mod gram;
pub mod matrix;
pub mod rank;

pub use field::{Entries, FieldCtx, Scalar};
pub use gram::gram_factor;
pub use matrix::DenseMatrix;
