//! Tensors over label sets, flattenings, and the hypermatrix view of
//! `n^d × n^d` matrices.

pub mod constructions;
pub mod hyper;
pub mod tensor;

pub use constructions::{
    directed_labels, edge_of_label, flat, imm_endpoint_slice, imm_tensor, padded_tensor, pair_index,
    shifted_tensor, unflat, unpair, unshift,
};
pub use hyper::HyperMatrix;
pub use tensor::{FlatteningSpec, Tensor};
