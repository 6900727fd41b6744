//! Exact verification of the Hydra-k partial fields.
//!
//! The pipeline per field: build the fundamental elements twice (closure of seeds
//! under associates, and a norm-bounded sieve), find the automorphism group by
//! substitution, and check that every U(2,5) representation over GF(5)^m lifts.

pub mod error;
pub mod exact;
pub mod genesis;
pub mod lift;
pub mod pfield;
pub mod report;
pub mod sieve;
pub mod symmetry;

pub use error::{Error, Result};
