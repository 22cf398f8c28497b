//! Pauli-string algebra, fermion-to-qubit mapping, Hamiltonian construction
//! and the dense diagonalization oracle.

mod dense;
mod fermion;
mod hamiltonian;
mod pauli;

pub(crate) use dense::check_limit;
pub use dense::{
    dense_matrix, dense_matrix_with_limit, spectral_decompose, spectral_decompose_with_limit, SpectralDecomposition,
    DEFAULT_ORACLE_LIMIT, DEGENERACY_TOLERANCE, SUPPORT_CUTOFF,
};
pub use fermion::{hubbard_model, jordan_wigner, FermionTerm};
pub use hamiltonian::{parse_pauli_sum, QubitHamiltonian, HERMITIAN_TOLERANCE, PRUNE_TOLERANCE};
pub use pauli::{Pauli, PauliTerm, PauliWord};
