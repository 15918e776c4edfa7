//! Dilute measurement-induced cooling of frustration-free spin chains.
//!
//! The crate is organised in layers:
//!
//! - [`spin`]: spin matrices, chain embeddings, total-spin projectors and
//!   coupled-basis states.
//! - [`models`]: AKLT and Majumdar–Ghosh Hamiltonians with single-link jump
//!   operators, analytic target states and the coherent repair term.
//! - [`spectral`]: eigendecompositions, the hot/cold split, gap estimates,
//!   the effective non-Hermitian Hamiltonian and Liouvillian gaps.
//! - [`trajectories`]: quantum-jump unravelling with bootstrap statistics
//!   and exponential fits.
//! - [`steer`]: jump validity, necessary conditions, the kernelizer and
//!   Lie-algebra closure.

pub mod error;
pub mod linalg;
pub mod models;
pub mod operator;
pub mod spectral;
pub mod spin;
pub mod steer;
pub mod trajectories;

pub use error::{Error, Result};
pub use operator::{Operator, StateVector, SubspaceBasis};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
