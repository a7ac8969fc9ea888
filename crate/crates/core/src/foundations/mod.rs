//! Exact scalar fields, grading groups and maps out of them.

pub mod group;
pub mod linalg;
pub mod scalar;

pub use group::{AdditiveMap, Character, FieldMode, GroupElement, GroupInstance, GroupKind};
pub use scalar::Scalar;
