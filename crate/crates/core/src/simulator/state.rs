use crate::error::{Error, Result};
use crate::linalg::{C64, ONE, ZERO};

/// Normalization tolerance for state construction.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Normalized amplitudes over `n_qubits` qubits, qubit 0 = least significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits >= usize::BITS as usize - 1 {
            return Err(Error::InvalidInput(format!("{n_qubits} qubits is too many")));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange {
                what: "basis states",
                index,
                size: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Lowest `n_electrons` qubits occupied.
    pub fn hartree_fock(n_qubits: usize, n_electrons: usize) -> Result<Self> {
        if n_electrons > n_qubits {
            return Err(Error::InvalidInput(format!(
                "{n_electrons} electrons do not fit in {n_qubits} spin-orbitals"
            )));
        }
        Self::basis(n_qubits, (1usize << n_electrons) - 1)
    }

    /// Wrap amplitudes whose length is a power of two and whose norm is 1.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::InvalidInput(format!("state length {dim} is not a power of two")));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidInput(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("cannot normalize a zero vector".into()));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// This state tensored with `extra` fresh |0⟩ qubits above it.
    pub fn with_ancillas(&self, extra: usize) -> StateVector {
        let mut amps = vec![ZERO; self.amps.len() << extra];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        StateVector {
            n_qubits: self.n_qubits + extra,
            amps,
        }
    }

    /// Probability of each value of the qubits at and above `low`.
    pub fn marginal_high(&self, low: usize) -> Vec<f64> {
        let block = 1usize << low;
        self.amps
            .chunks(block)
            .map(|c| c.iter().map(|a| a.norm_sqr()).sum())
            .collect()
    }

    /// Indices with amplitude modulus above `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.amps.len()).filter(|&i| self.amps[i].norm() > tol).collect()
    }
}
