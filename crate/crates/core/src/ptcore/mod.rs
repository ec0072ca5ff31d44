//! Partial transposes and PT-rank.

pub mod action;
pub mod census;
pub mod cert;
pub mod exact;
pub mod examples;
pub mod kappa;
pub mod minplus;
pub mod search;
pub(crate) mod split;
pub mod transpose;

pub use action::{kron_act, refine_certificate, regroup, transpose_rank_growth, OuterFactor};
pub use census::{ptrank_census, symmetric_orbits, Census, CensusMode, Population};
pub use cert::{verify_pt_certificate, PTCertificate};
pub use examples::{identity_split, swap_matrix, SWAP_3};
pub use exact::{pt_rank_exact, pt_rank_exact_with_budget, DEFAULT_BUDGET};
pub use kappa::{all_kappas, canonical_kappas, Kappa};
pub use search::{pt_rank_search, Strategy};
pub use transpose::{
    is_fully_symmetric, is_pt_basic, partial_transpose, symmetrize, transpose_rank, transpose_rank_scan,
    transpose_source,
};
