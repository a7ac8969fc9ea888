//! Sparse elements of `W`, `D`, `D1` and `HV` with their brackets and products.

mod element;
mod ops;

pub use element::{Element, Symbol, Tag};
pub use ops::{
    bracket, commutator, diffop_product, diffop_product_capped, grade_components, hv_bracket,
    jacobi_defect, project_to_d1, witt_bracket, DEFAULT_ORDER_CAP,
};
