use nalgebra::DVector;

use super::circuit::Circuit;
use super::state::StateVector;
use super::trotter::{controlled_trotter_step, trotter_step};
use crate::error::{Error, Result};
use crate::linalg::{eigh, CMatrix, C64};
use crate::operators::{dense_matrix, QubitHamiltonian};

/// A time-step unitary U acting on wires 0..n of a possibly wider register.
pub trait Propagator: Sync {
    fn n_qubits(&self) -> usize;

    /// Apply U^power, controlled on wire `control` when given.
    fn apply_power(&self, state: &mut StateVector, power: i64, control: Option<usize>) -> Result<()>;

    /// U^power applied to a copy of `state`.
    fn evolve(&self, state: &StateVector, power: i64) -> Result<StateVector> {
        let mut out = state.clone();
        self.apply_power(&mut out, power, None)?;
        Ok(out)
    }
}

pub(crate) fn check_register(n_system: usize, state: &StateVector, control: Option<usize>) -> Result<()> {
    if state.n_qubits() < n_system {
        return Err(Error::WireMismatch {
            expected: n_system,
            got: state.n_qubits(),
        });
    }
    if let Some(c) = control {
        if c < n_system {
            return Err(Error::AncillaCollision(c));
        }
        if c >= state.n_qubits() {
            return Err(Error::IndexOutOfRange {
                what: "control wire",
                index: c,
                size: state.n_qubits(),
            });
        }
    }
    Ok(())
}

/// Apply `f` to every system-sized block of amplitudes, restricted to blocks
/// where the control bit is set.
pub(crate) fn for_each_block(
    state: &mut StateVector,
    n_system: usize,
    control: Option<usize>,
    mut f: impl FnMut(&mut [C64]),
) {
    let size = 1usize << n_system;
    for (b, block) in state.amplitudes_mut().chunks_mut(size).enumerate() {
        let active = control.is_none_or(|c| ((b * size) >> c) & 1 == 1);
        if active {
            f(block);
        }
    }
}

/// Generic circuits: powers by repetition, control by block restriction.
impl Propagator for Circuit {
    fn n_qubits(&self) -> usize {
        Circuit::n_qubits(self)
    }

    fn apply_power(&self, state: &mut StateVector, power: i64, control: Option<usize>) -> Result<()> {
        check_register(Circuit::n_qubits(self), state, control)?;
        let step = if power < 0 { self.inverse() } else { self.clone() };
        let times = power.unsigned_abs();
        for_each_block(state, Circuit::n_qubits(self), control, |block| {
            for _ in 0..times {
                step.apply_slice(block);
            }
        });
        Ok(())
    }
}

/// e^{−iHΔt} from the dense eigendecomposition.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    n_qubits: usize,
    dt: f64,
    energies: Vec<f64>,
    vectors: CMatrix,
}

impl ExactPropagator {
    pub fn new(h: &QubitHamiltonian, dt: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite time step {dt}")));
        }
        let eig = eigh(&dense_matrix(h)?);
        Ok(Self {
            n_qubits: h.n_qubits(),
            dt,
            energies: eig.values,
            vectors: eig.vectors,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn phases(&self, power: i64) -> Vec<C64> {
        let t = self.dt * power as f64;
        self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)).collect()
    }

    /// Dense U^power.
    pub fn unitary(&self, power: i64) -> CMatrix {
        let d = CMatrix::from_diagonal(&DVector::from_vec(self.phases(power)));
        &self.vectors * d * self.vectors.adjoint()
    }
}

impl Propagator for ExactPropagator {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_power(&self, state: &mut StateVector, power: i64, control: Option<usize>) -> Result<()> {
        check_register(self.n_qubits, state, control)?;
        let phases = self.phases(power);
        let vadj = self.vectors.adjoint();
        for_each_block(state, self.n_qubits, control, |block| {
            let x = DVector::from_column_slice(block);
            let mut y = &vadj * x;
            for (yi, p) in y.iter_mut().zip(&phases) {
                *yi *= p;
            }
            let out = &self.vectors * y;
            block.copy_from_slice(out.as_slice());
        });
        Ok(())
    }
}

/// e^{−iHt}|ψ⟩ by exact diagonalization.
pub fn exact_evolve(h: &QubitHamiltonian, t: f64, state: &StateVector) -> Result<StateVector> {
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::WireMismatch {
            expected: h.n_qubits(),
            got: state.n_qubits(),
        });
    }
    ExactPropagator::new(h, t)?.evolve(state, 1)
}

/// One first-order Trotter step per power, with gate-level controlled gadgets.
#[derive(Debug, Clone)]
pub struct TrotterPropagator {
    h: QubitHamiltonian,
    dt: f64,
    step: Circuit,
}

impl TrotterPropagator {
    pub fn new(h: &QubitHamiltonian, dt: f64) -> Result<Self> {
        Ok(Self {
            h: h.clone(),
            dt,
            step: trotter_step(h, dt)?,
        })
    }

    pub fn step(&self) -> &Circuit {
        &self.step
    }

    pub fn controlled_step(&self, ancilla: usize) -> Result<Circuit> {
        controlled_trotter_step(&self.h, self.dt, ancilla)
    }
}

impl Propagator for TrotterPropagator {
    fn n_qubits(&self) -> usize {
        self.h.n_qubits()
    }

    fn apply_power(&self, state: &mut StateVector, power: i64, control: Option<usize>) -> Result<()> {
        check_register(self.h.n_qubits(), state, control)?;
        let step = match control {
            Some(a) => self.controlled_step(a)?,
            None => self.step.clone(),
        };
        let step = if power < 0 { step.inverse() } else { step };
        let amps = state.amplitudes_mut();
        for _ in 0..power.unsigned_abs() {
            step.apply_slice(amps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::operators::hubbard_model;

    #[test]
    fn exact_matches_spectral_autocorrelation() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let psi = StateVector::hartree_fock(4, 2).unwrap();
        let spec = crate::operators::spectral_decompose(&h, &psi).unwrap();
        let out = exact_evolve(&h, 0.3, &psi).unwrap();
        assert!((psi.inner(&out) - spec.autocorrelation(0.3)).norm() < 1e-12);
    }

    #[test]
    fn controlled_trotter_matches_block_control() {
        let h = hubbard_model(2, 1.0, 2.0).unwrap();
        let prop = TrotterPropagator::new(&h, 0.2).unwrap();
        let base = StateVector::normalized(
            (0..32)
                .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos()))
                .collect(),
        )
        .unwrap();
        for power in [-2, 0, 1, 3] {
            let mut gate_level = base.clone();
            prop.apply_power(&mut gate_level, power, Some(4)).unwrap();
            let mut block = base.clone();
            prop.step().apply_power(&mut block, power, Some(4)).unwrap();
            let diff = gate_level
                .amplitudes()
                .iter()
                .zip(block.amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "power {power}: {diff}");
        }
    }

    #[test]
    fn exact_powers_compose() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let p = ExactPropagator::new(&h, 0.1).unwrap();
        let u3 = p.unitary(3);
        let u1 = p.unitary(1);
        assert!(max_abs_diff(&u3, &(&u1 * &u1 * &u1)) < 1e-12);
        let id = &p.unitary(-2) * p.unitary(2);
        assert!(max_abs_diff(&id, &CMatrix::identity(16, 16)) < 1e-12);
    }

    #[test]
    fn register_checks() {
        let h = hubbard_model(2, 1.0, 0.5).unwrap();
        let p = ExactPropagator::new(&h, 0.1).unwrap();
        let mut s = StateVector::basis(5, 0).unwrap();
        assert!(matches!(
            p.apply_power(&mut s, 1, Some(2)),
            Err(Error::AncillaCollision(2))
        ));
        assert!(p.apply_power(&mut s, 1, Some(5)).is_err());
        let mut small = StateVector::basis(3, 0).unwrap();
        assert!(p.apply_power(&mut small, 1, None).is_err());
    }
}
