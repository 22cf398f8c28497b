use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::circuit::Gate;
use super::propagator::Propagator;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::operators::{PauliWord, QubitHamiltonian};

/// Ancilla measurement basis: Z gives the real part, Y the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Z,
    Y,
}

/// How ancilla expectation values are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementBackend {
    /// Noiseless expectation values.
    Exact,
    /// Finite sampling; every element draws from its own seeded stream.
    Shots { shots: u64, seed: u64 },
}

impl MeasurementBackend {
    pub fn shots(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::InvalidInput("shot count must be positive".into()));
        }
        Ok(Self::Shots { shots, seed })
    }

    fn rng(&self, stream: u64) -> Option<(u64, ChaCha8Rng)> {
        match *self {
            Self::Exact => None,
            Self::Shots { shots, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream);
                Some((shots, rng))
            }
        }
    }
}

/// A measured value with its sampling variance (zero for exact readout).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub variance: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, variance: 0.0 }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Sample a ±1 observable with mean `mean` using `shots` shots.
fn sample(mean: f64, shots: u64, rng: &mut ChaCha8Rng) -> Estimate {
    let p = ((1.0 + mean) / 2.0).clamp(0.0, 1.0);
    let ups = Binomial::new(shots, p)
        .expect("probability clamped to [0, 1]")
        .sample(rng);
    let value = 2.0 * ups as f64 / shots as f64 - 1.0;
    Estimate {
        value,
        variance: (1.0 - value * value) / shots as f64,
    }
}

/// Register after H, C-U^j, X, C-U^k, X, H with the ancilla on the top wire.
fn hadamard_register(prop: &dyn Propagator, j: i64, k: i64, phi0: &StateVector) -> Result<StateVector> {
    let n = prop.n_qubits();
    if phi0.n_qubits() != n {
        return Err(Error::WireMismatch {
            expected: n,
            got: phi0.n_qubits(),
        });
    }
    let mut reg = phi0.with_ancillas(1);
    Gate::H(n).apply(reg.amplitudes_mut());
    prop.apply_power(&mut reg, j, Some(n))?;
    Gate::X(n).apply(reg.amplitudes_mut());
    prop.apply_power(&mut reg, k, Some(n))?;
    Gate::X(n).apply(reg.amplitudes_mut());
    Gate::H(n).apply(reg.amplitudes_mut());
    Ok(reg)
}

/// ⟨σ_a ⊗ P⟩ for σ = Z or Y on the top wire.
fn ancilla_expectation(reg: &StateVector, word: &PauliWord, basis: Basis) -> f64 {
    let half = reg.dim() / 2;
    let (b0, b1) = reg.amplitudes().split_at(half);
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..half {
        let (phase, out) = word.apply_to_basis(i);
        match basis {
            Basis::Z => acc += phase * (b0[out].conj() * b0[i] - b1[out].conj() * b1[i]),
            Basis::Y => acc += phase * b0[out].conj() * b1[i],
        }
    }
    match basis {
        Basis::Z => acc.re,
        Basis::Y => 2.0 * acc.im,
    }
}

/// Real (Z) or imaginary (Y) part of ⟨φ0|U^{−j} U^k|φ0⟩ from the ancilla.
pub fn hadamard_test(
    prop: &dyn Propagator,
    j: i64,
    k: i64,
    phi0: &StateVector,
    basis: Basis,
    backend: &MeasurementBackend,
    stream: u64,
) -> Result<Estimate> {
    let reg = hadamard_register(prop, j, k, phi0)?;
    let mean = ancilla_expectation(&reg, &PauliWord::identity(), basis);
    Ok(match backend.rng(stream) {
        None => Estimate::exact(mean),
        Some((shots, mut rng)) => sample(mean, shots, &mut rng),
    })
}

/// Real (Z) or imaginary (Y) part of ⟨φ0|U^{−j} H U^k|φ0⟩, measuring Z_a⊗P or
/// Y_a⊗P per non-identity term with the shot budget split evenly. The identity
/// term is added as c times `overlap` when given, otherwise from a plain
/// Hadamard test at the full budget.
#[allow(clippy::too_many_arguments)]
pub fn hadamard_test_weighted(
    prop: &dyn Propagator,
    j: i64,
    k: i64,
    phi0: &StateVector,
    h: &QubitHamiltonian,
    basis: Basis,
    backend: &MeasurementBackend,
    stream: u64,
    overlap: Option<Estimate>,
) -> Result<Estimate> {
    if h.n_qubits() != prop.n_qubits() {
        return Err(Error::WireMismatch {
            expected: prop.n_qubits(),
            got: h.n_qubits(),
        });
    }
    let reg = hadamard_register(prop, j, k, phi0)?;
    let mut rng = backend.rng(stream);
    let n_terms = h.non_identity_terms().count().max(1) as u64;
    let mut total = Estimate::exact(0.0);
    for term in h.non_identity_terms() {
        let mean = ancilla_expectation(&reg, &term.word, basis);
        let est = match rng.as_mut() {
            None => Estimate::exact(mean),
            Some((shots, rng)) => sample(mean, (*shots / n_terms).max(1), rng),
        };
        let c = term.coefficient.re;
        total.value += c * est.value;
        total.variance += c * c * est.variance;
    }
    let c = h.identity_coefficient();
    if c != 0.0 {
        let s = match (overlap, rng.as_mut()) {
            (Some(s), _) => s,
            (None, None) => Estimate::exact(ancilla_expectation(&reg, &PauliWord::identity(), basis)),
            (None, Some((shots, rng))) => sample(ancilla_expectation(&reg, &PauliWord::identity(), basis), *shots, rng),
        };
        total.value += c * s.value;
        total.variance += c * c * s.variance;
    }
    Ok(total)
}
