//! Exact computer algebra for the generalized Witt algebra, the algebra of
//! generalized differential operators and the generalized
//! Heisenberg-Virasoro algebra, with constructive cocycle, derivation and
//! automorphism classifications.

pub mod algebra;
pub mod automorphisms;
pub mod cohomology;
pub mod error;
pub mod derivations;
pub mod foundations;
pub mod lift;
pub mod sample;

pub use error::{Error, Result};
