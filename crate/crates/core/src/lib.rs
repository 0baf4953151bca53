//! Estimation kernel for germanium spin-qubit design.
//!
//! The crate bundles the desk-scale numbers that recur when sizing a Ge
//! spin-qubit device: density-of-states and conductivity effective masses
//! derived from the band-edge parameters, residual-impurity strain
//! backgrounds in the covalent-radius-mismatch picture, and longitudinal
//! relaxation (T1) budgets for phononic-crystal-patterned geometries,
//! including Purcell channels and parasitic rates.
//!
//! Everything is SI and angular frequency internally; unit conversions
//! (cm⁻³, ordinary Hz) belong to the I/O boundary. All types are immutable
//! after construction and all operations are pure, so values can be shared
//! across threads freely.

// Validation deliberately writes `!(x > 0.0)` instead of `x <= 0.0`:
// the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod budget;
pub mod error;
pub mod materials;
pub mod montecarlo;
pub mod strain;
pub mod sweep;

pub use error::CoreError;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
