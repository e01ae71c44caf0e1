//! Parametric quantum channels, energy dephasing and their spectral-form-factor,
//! coherence and superoperator-spectrum diagnostics for random-matrix
//! Hamiltonians.
//!
//! Conventions used throughout:
//! - states and operators are written in the eigenbasis of `H`;
//! - density matrices are vectorized row by row, so `AρB ↦ (A ⊗ Bᵀ)|ρ)`;
//! - `ħ` is an explicit parameter everywhere (the CLI defaults it to 1).

pub mod dephasing;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod pqc;
pub mod rmt;
pub mod spectral;
pub mod states;

pub use error::{Error, Result};
pub use linalg::c64;
