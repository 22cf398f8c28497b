use std::f64::consts::FRAC_PI_2;

use super::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::operators::{Pauli, PauliWord};

/// e^{−i(θ/2)P} as basis change, CNOT parity ladder, Rz(θ), and mirror.
pub fn pauli_gadget(word: &PauliWord, theta: f64, n_qubits: usize) -> Result<Circuit> {
    gadget(word, theta, n_qubits, None)
}

/// Same gadget with the central rotation controlled on `ancilla`.
pub fn controlled_gadget(word: &PauliWord, theta: f64, n_qubits: usize, ancilla: usize) -> Result<Circuit> {
    gadget(word, theta, n_qubits, Some(ancilla))
}

fn gadget(word: &PauliWord, theta: f64, n_qubits: usize, ancilla: Option<usize>) -> Result<Circuit> {
    if word.is_identity() {
        return Err(Error::EmptyWord);
    }
    if !theta.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite gadget angle {theta}")));
    }
    let width = match ancilla {
        Some(a) => {
            if word.get(a).is_some() {
                return Err(Error::AncillaCollision(a));
            }
            n_qubits.max(a + 1)
        }
        None => n_qubits,
    };
    let factors = word.factors();
    if let Some(&(q, _)) = factors.iter().find(|(q, _)| *q >= n_qubits) {
        return Err(Error::IndexOutOfRange {
            what: "gadget qubits",
            index: q,
            size: n_qubits,
        });
    }
    let mut c = Circuit::new(width);
    for &(q, p) in factors {
        match p {
            Pauli::X => c.push_unchecked(Gate::H(q)),
            Pauli::Y => c.push_unchecked(Gate::Rx(q, FRAC_PI_2)),
            Pauli::Z => {}
        }
    }
    let ladder: Vec<Gate> = factors
        .windows(2)
        .rev()
        .map(|w| Gate::Cnot {
            control: w[1].0,
            target: w[0].0,
        })
        .collect();
    for g in &ladder {
        c.push_unchecked(*g);
    }
    let low = factors[0].0;
    match ancilla {
        Some(a) => c.push_unchecked(Gate::Crz {
            control: a,
            target: low,
            angle: theta,
        }),
        None => c.push_unchecked(Gate::Rz(low, theta)),
    }
    for g in ladder.iter().rev() {
        c.push_unchecked(*g);
    }
    for &(q, p) in factors {
        match p {
            Pauli::X => c.push_unchecked(Gate::H(q)),
            Pauli::Y => c.push_unchecked(Gate::Rx(q, -FRAC_PI_2)),
            Pauli::Z => {}
        }
    }
    Ok(c)
}
