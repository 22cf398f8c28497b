//! State vectors, gate circuits, Pauli gadgets, time-step propagators and
//! Hadamard-test readout.

mod circuit;
mod gadget;
mod measure;
mod propagator;
mod state;
mod trotter;

pub use circuit::{apply_circuit, Circuit, Gate};
pub use gadget::{controlled_gadget, pauli_gadget};
pub use measure::{hadamard_test, hadamard_test_weighted, Basis, Estimate, MeasurementBackend};
pub(crate) use propagator::check_register;
pub use propagator::{exact_evolve, ExactPropagator, Propagator, TrotterPropagator};
pub use state::{StateVector, NORM_TOLERANCE};
pub use trotter::{controlled_trotter_step, trotter_circuit, trotter_step};
