pub mod abpformula;
pub mod candidates;
pub mod error;
pub mod fieldlinalg;
pub mod io;
pub mod pathmeasures;
pub mod ptcore;
pub mod soslink;
pub mod suite;
pub mod tensorspace;

pub use error::{Error, Result};
pub use fieldlinalg::{gram_factor, DenseMatrix, Entries, FieldCtx, Scalar};
pub use tensorspace::{FlatteningSpec, HyperMatrix, Tensor};
