//! Class invariants and singular values for imaginary quadratic fields.
//!
//! The crate computes Weber and Klein invariants at CM points, assembles
//! their class polynomials with certified integer rounding, evaluates the
//! Chowla–Selberg type products behind the singular modulus `k_N`, and
//! searches for integer relations with an exact LLL.

pub mod apnum;
pub mod chowla;
pub mod error;
pub mod exactpoly;
pub mod fixtures;
pub mod invariants;
pub mod latrel;
pub mod polybuild;
pub mod quadforms;

pub use error::{Error, Result};
