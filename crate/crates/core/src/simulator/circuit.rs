use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// e^{−iθX/2}
    Rx(usize, f64),
    /// e^{−iθZ/2}
    Rz(usize, f64),
    Cnot {
        control: usize,
        target: usize,
    },
    /// |0⟩⟨0|⊗I + |1⟩⟨1|⊗R_z(θ)
    Crz {
        control: usize,
        target: usize,
        angle: f64,
    },
    /// e^{iφ} on the whole register.
    GlobalPhase(f64),
    /// diag(1, e^{iφ}); a global phase controlled on this wire.
    Phase(usize, f64),
    /// e^{iφ} on |11⟩ of the two wires.
    CPhase {
        control: usize,
        target: usize,
        angle: f64,
    },
    Swap(usize, usize),
}

impl Gate {
    fn wires(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Rx(q, _) | Gate::Rz(q, _) | Gate::Phase(q, _) => vec![q],
            Gate::Cnot { control, target }
            | Gate::Crz { control, target, .. }
            | Gate::CPhase { control, target, .. } => vec![control, target],
            Gate::Swap(a, b) => vec![a, b],
            Gate::GlobalPhase(_) => vec![],
        }
    }

    fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, a) | Gate::Rz(_, a) | Gate::GlobalPhase(a) | Gate::Phase(_, a) => Some(a),
            Gate::Crz { angle, .. } | Gate::CPhase { angle, .. } => Some(angle),
            _ => None,
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            Gate::Crz { control, target, angle } => Gate::Crz {
                control,
                target,
                angle: -angle,
            },
            Gate::GlobalPhase(a) => Gate::GlobalPhase(-a),
            Gate::Phase(q, a) => Gate::Phase(q, -a),
            Gate::CPhase { control, target, angle } => Gate::CPhase {
                control,
                target,
                angle: -angle,
            },
            g => g,
        }
    }

    /// CNOTs needed in a CNOT + single-qubit decomposition.
    pub fn cnot_cost(&self) -> usize {
        match self {
            Gate::Cnot { .. } => 1,
            Gate::Crz { .. } | Gate::CPhase { .. } => 2,
            Gate::Swap(..) => 3,
            _ => 0,
        }
    }

    fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::X(q) => Gate::X(q + offset),
            Gate::Rx(q, a) => Gate::Rx(q + offset, a),
            Gate::Rz(q, a) => Gate::Rz(q + offset, a),
            Gate::Phase(q, a) => Gate::Phase(q + offset, a),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
            Gate::Crz { control, target, angle } => Gate::Crz {
                control: control + offset,
                target: target + offset,
                angle,
            },
            Gate::CPhase { control, target, angle } => Gate::CPhase {
                control: control + offset,
                target: target + offset,
                angle,
            },
            Gate::Swap(a, b) => Gate::Swap(a + offset, b + offset),
            Gate::GlobalPhase(a) => Gate::GlobalPhase(a),
        }
    }

    pub(crate) fn apply(&self, amps: &mut [C64]) {
        match *self {
            Gate::H(q) => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                single(amps, q, [[h, h], [h, -h]]);
            }
            Gate::X(q) => {
                let bit = 1 << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Rx(q, a) => {
                let c = C64::new((a / 2.0).cos(), 0.0);
                let s = C64::new(0.0, -(a / 2.0).sin());
                single(amps, q, [[c, s], [s, c]]);
            }
            Gate::Rz(q, a) => {
                let (lo, hi) = (C64::from_polar(1.0, -a / 2.0), C64::from_polar(1.0, a / 2.0));
                let bit = 1 << q;
                for (i, z) in amps.iter_mut().enumerate() {
                    *z *= if i & bit == 0 { lo } else { hi };
                }
            }
            Gate::Cnot { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in 0..amps.len() {
                    if i & c != 0 && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::Crz { control, target, angle } => {
                let (lo, hi) = (C64::from_polar(1.0, -angle / 2.0), C64::from_polar(1.0, angle / 2.0));
                let (c, t) = (1 << control, 1 << target);
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & c != 0 {
                        *z *= if i & t == 0 { lo } else { hi };
                    }
                }
            }
            Gate::GlobalPhase(a) => {
                let p = C64::from_polar(1.0, a);
                amps.iter_mut().for_each(|z| *z *= p);
            }
            Gate::Phase(q, a) => {
                let p = C64::from_polar(1.0, a);
                let bit = 1 << q;
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *z *= p;
                    }
                }
            }
            Gate::CPhase { control, target, angle } => {
                let p = C64::from_polar(1.0, angle);
                let mask = (1 << control) | (1 << target);
                for (i, z) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *z *= p;
                    }
                }
            }
            Gate::Swap(a, b) => {
                let (ba, bb) = (1 << a, 1 << b);
                for i in 0..amps.len() {
                    if i & ba != 0 && i & bb == 0 {
                        amps.swap(i, (i & !ba) | bb);
                    }
                }
            }
        }
    }
}

fn single(amps: &mut [C64], q: usize, m: [[C64; 2]; 2]) {
    let bit = 1 << q;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = m[0][0] * a + m[0][1] * b;
            amps[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        let wires = gate.wires();
        for &w in &wires {
            if w >= self.n_qubits {
                return Err(Error::IndexOutOfRange {
                    what: "circuit wires",
                    index: w,
                    size: self.n_qubits,
                });
            }
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(Error::InvalidInput(format!(
                "gate {gate:?} uses wire {} twice",
                wires[0]
            )));
        }
        if let Some(a) = gate.angle() {
            if !a.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite angle in {gate:?}")));
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, gate: Gate) {
        debug_assert!(gate.wires().iter().all(|&w| w < self.n_qubits));
        self.gates.push(gate);
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::WireMismatch {
                expected: self.n_qubits,
                got: other.n_qubits,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Reversed gate order with inverted gates.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// The same gates on wires `offset..offset + n`, inside a `width`-qubit register.
    pub fn shifted(&self, offset: usize, width: usize) -> Result<Circuit> {
        if offset + self.n_qubits > width {
            return Err(Error::WireMismatch {
                expected: width,
                got: offset + self.n_qubits,
            });
        }
        Ok(Circuit {
            n_qubits: width,
            gates: self.gates.iter().map(|g| g.shifted(offset)).collect(),
        })
    }

    /// Circuit repeated `times` times.
    pub fn repeated(&self, times: usize) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len() * times);
        for _ in 0..times {
            gates.extend_from_slice(&self.gates);
        }
        Circuit {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    /// Physical gates; unobservable global phases are not counted.
    pub fn gate_count(&self) -> usize {
        self.gates.iter().filter(|g| !matches!(g, Gate::GlobalPhase(_))).count()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().map(Gate::cnot_cost).sum()
    }

    /// Run on raw amplitudes of a register at least as wide as the circuit.
    pub(crate) fn apply_slice(&self, amps: &mut [C64]) {
        debug_assert!(amps.len() >= 1 << self.n_qubits);
        for g in &self.gates {
            g.apply(amps);
        }
    }

    /// Apply in place; the state must have exactly this circuit's width.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::WireMismatch {
                expected: self.n_qubits,
                got: state.n_qubits(),
            });
        }
        self.apply_slice(state.amplitudes_mut());
        Ok(())
    }

    /// Dense unitary, column j = circuit applied to |j⟩.
    pub fn unitary(&self) -> Result<CMatrix> {
        crate::operators::check_limit(self.n_qubits, crate::operators::DEFAULT_ORACLE_LIMIT)?;
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.apply_slice(&mut col);
            for (i, z) in col.iter().enumerate() {
                m[(i, j)] = *z;
            }
        }
        Ok(m)
    }

    /// One gate per line, e.g. `H 0`, `CNOT 2 3`, `RZ 1 0.7853981633974483`.
    /// Angles use the shortest decimal that round-trips the f64.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            let _ = match *g {
                Gate::H(q) => writeln!(out, "H {q}"),
                Gate::X(q) => writeln!(out, "X {q}"),
                Gate::Rx(q, a) => writeln!(out, "RX {q} {a:?}"),
                Gate::Rz(q, a) => writeln!(out, "RZ {q} {a:?}"),
                Gate::Cnot { control, target } => writeln!(out, "CNOT {control} {target}"),
                Gate::Crz { control, target, angle } => writeln!(out, "CRZ {control} {target} {angle:?}"),
                Gate::GlobalPhase(a) => writeln!(out, "GPHASE {a:?}"),
                Gate::Phase(q, a) => writeln!(out, "PHASE {q} {a:?}"),
                Gate::CPhase { control, target, angle } => {
                    writeln!(out, "CPHASE {control} {target} {angle:?}")
                }
                Gate::Swap(a, b) => writeln!(out, "SWAP {a} {b}"),
            };
        }
        out
    }
}

/// Functional form: a fresh state with `circuit` applied.
pub fn apply_circuit(circuit: &Circuit, state: &StateVector) -> Result<StateVector> {
    let mut out = state.clone();
    circuit.apply(&mut out)?;
    Ok(out)
}
