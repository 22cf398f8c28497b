//! Overlap, Hamiltonian and time-step matrices over the Krylov basis
//! |Φ_j⟩ = U^j|Φ₀⟩ and their generalized eigenproblems.

mod diagnostics;
mod matrices;
mod solve;

pub use diagnostics::phase_cancellation_residual;
pub use matrices::{
    assemble_s, build_gram_matrices, build_h_matrix, build_overlap_row, build_u_from_row, MeasuredMatrix, OverlapRow,
    Provenance, SubspaceMatrices, TimeGrid,
};
pub use solve::{
    canonical_orthogonalize, ground_energy_std, hamiltonian_residual, phase_to_energy, solve_hamiltonian,
    solve_unitary, EigenSolution, Orthogonalization, UNITARITY_WINDOW,
};
