//! Root-of-unity candidate matrices `W_T` and checks of their rank
//! properties.

mod checks;
mod family;

pub use checks::{
    cyclic_rank1_cert, lambda_full_rank, rescale_units, triangular_abp, triangular_flattening_check, unit_entries,
    wt_kappa_rank_scan, wt_lambda_flatten_rank, wt_rescaled_scan, wt_lambda_matrix, CyclicCert, TriangularReport,
};
pub use family::{
    build_wt, cauchy_t, check_params, cyclic_t, identity_t, triangular_t, zero_t, ExponentMatrix, Policy,
};
