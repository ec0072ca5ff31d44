//! Self-describing JSON containers. Every object carries a `kind` tag and,
//! where it holds field elements, a `field` descriptor; parsing validates
//! shapes and element ranges before anything is allocated from sizes alone.

mod field;
mod roundtrip;
mod wire;

pub use field::{field_descriptor, parse_field, RATIONAL_PRIME};
pub use wire::{CandidateSpec, Json};
pub use roundtrip::{roundtrip_census, RoundTrip, JSON_KINDS};
