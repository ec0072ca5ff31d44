//! Sums of squares of multilinear forms and their exchange with PT-rank
//! certificates.

pub mod convert;
pub mod hurwitz;
pub mod quad;

pub use convert::{pairing_upper_bound, pt_to_sos, sos_to_pt};
pub use hurwitz::{base_identity, base_identity_from_table, compose_sos, OCTONION_TABLE};
pub use quad::{qm_coeffs, verify_sos, QuadCoeffMap, SoSCertificate};
