//! Dense-matrix oracle: explicit 2ⁿ×2ⁿ Hamiltonians and their spectra.

use super::hamiltonian::QubitHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, CVector, C64};
use crate::simulator::StateVector;

/// Default qubit limit for anything that materializes a dense operator.
pub const DEFAULT_ORACLE_LIMIT: usize = 14;

pub(crate) fn check_limit(n_qubits: usize, limit: usize) -> Result<()> {
    if n_qubits > limit {
        return Err(Error::SizeLimit { n_qubits, limit });
    }
    Ok(())
}

/// Σ_k h_k P_k as a dense matrix, qubit 0 = least significant bit.
pub fn dense_matrix(h: &QubitHamiltonian) -> Result<CMatrix> {
    dense_matrix_with_limit(h, DEFAULT_ORACLE_LIMIT)
}

pub fn dense_matrix_with_limit(h: &QubitHamiltonian, limit: usize) -> Result<CMatrix> {
    check_limit(h.n_qubits(), limit)?;
    let dim = 1usize << h.n_qubits();
    let mut m = CMatrix::zeros(dim, dim);
    for t in h.terms() {
        for col in 0..dim {
            let (phase, row) = t.word.apply_to_basis(col);
            m[(row, col)] += t.coefficient * phase;
        }
    }
    Ok(m)
}

/// Eigen-expansion of H and of a reference state in that eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// E_N, ascending.
    pub energies: Vec<f64>,
    /// Orthonormal eigenvectors |N⟩ as columns.
    pub vectors: CMatrix,
    /// φ⁰_N = ⟨N|Φ₀⟩.
    pub amplitudes: Vec<C64>,
}

/// Default weight cutoff for counting a level as part of the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

impl SpectralDecomposition {
    pub fn weights(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Distinct energy levels carrying reference weight above `cutoff`, as
    /// (energy, total weight). Degenerate eigenvectors are merged because the
    /// reference only ever occupies one direction inside a degenerate space.
    pub fn support_levels(&self, cutoff: f64) -> Vec<(f64, f64)> {
        let weights = self.weights();
        let mut levels: Vec<(f64, f64)> = Vec::new();
        for (&e, &w) in self.energies.iter().zip(&weights) {
            match levels.last_mut() {
                Some((le, lw)) if (e - *le).abs() < DEGENERACY_TOLERANCE => *lw += w,
                _ => levels.push((e, w)),
            }
        }
        levels.retain(|&(_, w)| w > cutoff);
        levels
    }

    /// Support dimension Q.
    pub fn support_dimension(&self, cutoff: f64) -> usize {
        self.support_levels(cutoff).len()
    }

    /// Lowest energy present in the reference.
    pub fn support_ground_energy(&self, cutoff: f64) -> Option<f64> {
        self.support_levels(cutoff).first().map(|&(e, _)| e)
    }

    /// ⟨Φ₀|e^{−iHt}|Φ₀⟩ = Σ_N |φ⁰_N|² e^{−iE_N t}.
    pub fn autocorrelation(&self, t: f64) -> C64 {
        self.energies
            .iter()
            .zip(&self.amplitudes)
            .map(|(&e, a)| C64::from_polar(a.norm_sqr(), -e * t))
            .sum()
    }
}

pub fn spectral_decompose(h: &QubitHamiltonian, reference: &StateVector) -> Result<SpectralDecomposition> {
    spectral_decompose_with_limit(h, reference, DEFAULT_ORACLE_LIMIT)
}

pub fn spectral_decompose_with_limit(
    h: &QubitHamiltonian,
    reference: &StateVector,
    limit: usize,
) -> Result<SpectralDecomposition> {
    if reference.n_qubits() != h.n_qubits() {
        return Err(Error::WireMismatch {
            expected: h.n_qubits(),
            got: reference.n_qubits(),
        });
    }
    let m = dense_matrix_with_limit(h, limit)?;
    let eig = eigh(&m);
    let psi = CVector::from_column_slice(reference.amplitudes());
    let amps = eig.vectors.adjoint() * psi;
    Ok(SpectralDecomposition {
        energies: eig.values,
        vectors: eig.vectors,
        amplitudes: amps.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{hubbard_model, parse_pauli_sum};

    #[test]
    fn single_qubit_matrices() {
        let z = dense_matrix(&parse_pauli_sum("1.0 Z0").unwrap()).unwrap();
        assert_eq!(z[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(z[(1, 1)], C64::new(-1.0, 0.0));
        let x = dense_matrix(&parse_pauli_sum("1.0 X0").unwrap()).unwrap();
        assert_eq!(x[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(x[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn dimer_ground_energy() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let e = eigh(&dense_matrix(&h).unwrap());
        let closed = (0.5 - 16.25f64.sqrt()) / 2.0;
        assert!((e.values[0] - closed).abs() < 1e-12);
        assert!((e.values[0] + 1.7655644).abs() < 1e-7);
    }

    #[test]
    fn size_limit_enforced() {
        let h = parse_pauli_sum("qubits: 5\n1.0 Z0").unwrap();
        assert!(matches!(
            dense_matrix_with_limit(&h, 4),
            Err(Error::SizeLimit { n_qubits: 5, limit: 4 })
        ));
    }

    #[test]
    fn z_reference_zero() {
        let h = parse_pauli_sum("1.0 Z0").unwrap();
        let s = spectral_decompose(&h, &StateVector::basis(1, 0).unwrap()).unwrap();
        assert_eq!(s.energies, vec![-1.0, 1.0]);
        assert!(s.amplitudes[0].norm() < 1e-15);
        assert!((s.amplitudes[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvector_reference_has_single_amplitude() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let full = spectral_decompose(&h, &StateVector::basis(4, 0).unwrap()).unwrap();
        let v: Vec<C64> = full.vectors.column(0).iter().copied().collect();
        let s = spectral_decompose(&h, &StateVector::from_amplitudes(v).unwrap()).unwrap();
        let nonzero = s.weights().iter().filter(|&&w| w > 1e-12).count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn dimer_hartree_fock_support() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let s = spectral_decompose(&h, &StateVector::hartree_fock(4, 2).unwrap()).unwrap();
        let levels = s.support_levels(SUPPORT_CUTOFF);
        // both singlet-g levels plus the ionic singlet-u level at E = U
        assert_eq!(levels.len(), 3);
        assert!((levels[1].0 - 0.5).abs() < 1e-12);
        assert!((levels[1].1 - 0.5).abs() < 1e-12);
        let total: f64 = s.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
