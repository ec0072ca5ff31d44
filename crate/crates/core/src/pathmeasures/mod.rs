//! Path subgraphs, orientations, relative ranks and the measure ρ.

mod graph;
mod identity;
mod lemmas;
mod measure;

pub use graph::{gamma_delta_pm, orientations, out_labels, tail_of, GraphAnalysis, Orientation, PathGraph, MAX_BASE};
pub use identity::{rho_pt_identity_check, RhoPtReport, RhoRoute};
pub use lemmas::{lemma_check, lemma_suite, LemmaMode, LemmaReport, LEMMAS};
pub use measure::{
    path_partition, relrk, relrk_path, relrk_spec, rho_enumeration_size, rho_exact, rho_from_decomposition,
    rho_from_decompositions, RelValue, Rho,
};
