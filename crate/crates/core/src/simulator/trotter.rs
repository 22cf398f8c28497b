use super::circuit::{Circuit, Gate};
use super::gadget::{controlled_gadget, pauli_gadget};
use crate::error::{Error, Result};
use crate::operators::QubitHamiltonian;

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "time step must be positive and finite, got {dt}"
        )))
    }
}

/// First-order product formula Π_k e^{−i h_k P_k Δt}, terms in canonical order.
pub fn trotter_step(h: &QubitHamiltonian, dt: f64) -> Result<Circuit> {
    check_dt(dt)?;
    let n = h.n_qubits();
    let mut c = Circuit::new(n);
    for term in h.non_identity_terms() {
        c.append(&pauli_gadget(&term.word, 2.0 * term.coefficient.re * dt, n)?)?;
    }
    let id = h.identity_coefficient();
    if id != 0.0 {
        c.push(Gate::GlobalPhase(-id * dt))?;
    }
    Ok(c)
}

/// Trotter step controlled on `ancilla`; the identity term becomes a phase on the ancilla.
pub fn controlled_trotter_step(h: &QubitHamiltonian, dt: f64, ancilla: usize) -> Result<Circuit> {
    check_dt(dt)?;
    let n = h.n_qubits();
    if ancilla < n {
        return Err(Error::AncillaCollision(ancilla));
    }
    let mut c = Circuit::new(ancilla + 1);
    for term in h.non_identity_terms() {
        c.append(&controlled_gadget(
            &term.word,
            2.0 * term.coefficient.re * dt,
            n,
            ancilla,
        )?)?;
    }
    let id = h.identity_coefficient();
    if id != 0.0 {
        c.push(Gate::Phase(ancilla, -id * dt))?;
    }
    Ok(c)
}

/// `steps` Trotter steps; negative counts give the inverse.
pub fn trotter_circuit(h: &QubitHamiltonian, dt: f64, steps: i64) -> Result<Circuit> {
    let step = trotter_step(h, dt)?;
    let step = if steps < 0 { step.inverse() } else { step };
    Ok(step.repeated(steps.unsigned_abs() as usize))
}
