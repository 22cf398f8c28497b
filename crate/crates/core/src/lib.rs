//! Krylov-subspace phase estimation from time-evolved reference states.
//!
//! Build a qubit Hamiltonian ([`operators`]), pick a time-step propagator
//! (exact, Trotter or variationally fast-forwarded), estimate the overlap row
//! with Hadamard tests ([`simulator`]) and diagonalize the projected problem
//! ([`subspace`]).

pub mod error;
pub mod experiment;
pub mod linalg;
pub mod operators;
pub mod qpe;
pub mod simulator;
pub mod subspace;
pub mod vff;

pub use error::{Error, Result};
