use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Pauli, PauliWord};
use crate::simulator::{controlled_gadget, pauli_gadget, Circuit, Gate};

/// Two-parameter number-conserving block on a wire pair: e^{−iθ₀(XX+YY)/2}
/// followed by a phase e^{iθ₁} on |11⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub wires: (usize, usize),
    pub theta: [f64; 2],
}

/// Parameters and layout of V = W D(γ) W†.
#[derive(Debug, Clone, PartialEq)]
pub struct VffModel {
    pub n_qubits: usize,
    pub dt: f64,
    pub m_max: usize,
    /// Z-words with at most `m_max` factors and their angles; the identity
    /// word carries the global phase.
    pub gamma: Vec<(PauliWord, f64)>,
    pub layers: Vec<Vec<Block>>,
    pub fit: Option<FitSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub cost: f64,
    pub overlaps: Vec<f64>,
}

/// All Z-words on `n` qubits with at most `m_max` factors, identity first.
pub fn z_words(n: usize, m_max: usize) -> Vec<PauliWord> {
    fn extend(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<PauliWord>) {
        for q in start..n {
            cur.push(q);
            out.push(PauliWord::new(cur.iter().map(|&q| (q, Pauli::Z))).expect("distinct qubits"));
            if left > 1 {
                extend(q + 1, n, left - 1, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = vec![PauliWord::identity()];
    if m_max > 0 {
        extend(0, n, m_max, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// Brick-wall layout: each layer is a sublayer of even pairs (0,1),(2,3),…
/// followed by a sublayer of odd pairs (1,2),(3,4),… Empty sublayers are dropped.
pub fn brick_layout(n_qubits: usize, n_layers: usize) -> Vec<Vec<(usize, usize)>> {
    (0..2 * n_layers)
        .map(|l| {
            (l % 2..n_qubits.saturating_sub(1))
                .step_by(2)
                .map(|a| (a, a + 1))
                .collect::<Vec<_>>()
        })
        .filter(|sub| !sub.is_empty())
        .collect()
}

impl VffModel {
    /// Zero parameters on `n_layers` brick layers.
    pub fn new(n_qubits: usize, dt: f64, m_max: usize, n_layers: usize) -> Result<Self> {
        let model = Self {
            n_qubits,
            dt,
            m_max,
            gamma: z_words(n_qubits, m_max).into_iter().map(|w| (w, 0.0)).collect(),
            layers: brick_layout(n_qubits, n_layers)
                .into_iter()
                .map(|layer| {
                    layer
                        .into_iter()
                        .map(|wires| Block { wires, theta: [0.0; 2] })
                        .collect()
                })
                .collect(),
            fit: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidInput(format!(
                "model time step {} must be positive",
                self.dt
            )));
        }
        for (w, g) in &self.gamma {
            if !g.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite gamma for '{w}'")));
            }
            if w.factors().iter().any(|&(_, p)| p != Pauli::Z) {
                return Err(Error::InvalidInput(format!("gamma word '{w}' is not a Z-word")));
            }
            if w.weight() > self.m_max {
                return Err(Error::InvalidInput(format!(
                    "gamma word '{w}' exceeds m_max = {}",
                    self.m_max
                )));
            }
            if let Some(q) = w.max_qubit().filter(|&q| q >= self.n_qubits) {
                return Err(Error::IndexOutOfRange {
                    what: "gamma qubits",
                    index: q,
                    size: self.n_qubits,
                });
            }
        }
        for (l, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; self.n_qubits];
            for b in layer {
                let (a, c) = b.wires;
                if a == c || a >= self.n_qubits || c >= self.n_qubits {
                    return Err(Error::InvalidInput(format!(
                        "layer {l}: invalid block wires ({a}, {c})"
                    )));
                }
                if used[a] || used[c] {
                    return Err(Error::InvalidInput(format!("layer {l}: wire collision at ({a}, {c})")));
                }
                used[a] = true;
                used[c] = true;
                if !b.theta.iter().all(|t| t.is_finite()) {
                    return Err(Error::InvalidInput(format!("layer {l}: non-finite block angle")));
                }
            }
        }
        Ok(())
    }

    pub fn n_theta(&self) -> usize {
        2 * self.layers.iter().map(Vec::len).sum::<usize>()
    }

    /// Block angles in layer order.
    pub fn theta(&self) -> Vec<f64> {
        self.layers.iter().flatten().flat_map(|b| b.theta).collect()
    }

    pub fn set_theta(&mut self, theta: &[f64]) {
        for (b, t) in self.layers.iter_mut().flatten().zip(theta.chunks(2)) {
            b.theta = [t[0], t[1]];
        }
    }

    pub fn global_phase(&self) -> f64 {
        self.gamma
            .iter()
            .find(|(w, _)| w.is_identity())
            .map_or(0.0, |(_, g)| *g)
    }

    /// (Z-mask, γ) pairs, identity included with mask 0.
    pub(crate) fn gamma_masks(&self) -> Vec<(usize, f64)> {
        self.gamma
            .iter()
            .map(|(w, g)| (w.factors().iter().fold(0usize, |m, &(q, _)| m | 1 << q), *g))
            .collect()
    }

    /// Serialize to the model file layout.
    pub fn to_json(&self) -> serde_json::Value {
        let file = ModelFile {
            n_qubits: self.n_qubits,
            dt: self.dt,
            m_max: self.m_max,
            gamma: self.gamma.iter().map(|(w, g)| (w.to_string(), *g)).collect(),
            layers: self
                .layers
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|b| BlockFile {
                            wires: [b.wires.0, b.wires.1],
                            theta: b.theta,
                        })
                        .collect()
                })
                .collect(),
            fit: self.fit.clone(),
        };
        serde_json::to_value(file).expect("model serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let file: ModelFile = serde_json::from_value(value)?;
        let mut gamma = Vec::with_capacity(file.gamma.len());
        for (key, g) in file.gamma {
            let w: PauliWord = key
                .parse()
                .map_err(|e| Error::InvalidInput(format!("gamma key '{key}': {e}")))?;
            gamma.push((w, g));
        }
        gamma.sort_by(|a, b| a.0.cmp(&b.0));
        let model = Self {
            n_qubits: file.n_qubits,
            dt: file.dt,
            m_max: file.m_max,
            gamma,
            layers: file
                .layers
                .into_iter()
                .map(|l| {
                    l.into_iter()
                        .map(|b| Block {
                            wires: (b.wires[0], b.wires[1]),
                            theta: b.theta,
                        })
                        .collect()
                })
                .collect(),
            fit: file.fit,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(&self.to_json())?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n_qubits: usize,
    dt: f64,
    m_max: usize,
    gamma: BTreeMap<String, f64>,
    layers: Vec<Vec<BlockFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fit: Option<FitSummary>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlockFile {
    wires: [usize; 2],
    theta: [f64; 2],
}

fn block_circuit(c: &mut Circuit, b: &Block, n: usize) -> Result<()> {
    let (a, d) = b.wires;
    for p in [Pauli::X, Pauli::Y] {
        let word = PauliWord::new([(a, p), (d, p)]).ok_or(Error::InvalidInput("block wires coincide".into()))?;
        c.append(&pauli_gadget(&word, b.theta[0], n)?)?;
    }
    c.push(Gate::CPhase {
        control: a,
        target: d,
        angle: b.theta[1],
    })
}

/// W(θ) as a gate circuit.
pub fn ansatz_circuit(model: &VffModel) -> Result<Circuit> {
    model.validate()?;
    let mut c = Circuit::new(model.n_qubits);
    for b in model.layers.iter().flatten() {
        block_circuit(&mut c, b, model.n_qubits)?;
    }
    Ok(c)
}

/// D(γ)^power = Π e^{iγ_j·power·Z_j}; the identity word becomes a global phase.
pub fn diagonal_circuit(gamma: &[(PauliWord, f64)], n_qubits: usize, power: i64) -> Result<Circuit> {
    let mut c = Circuit::new(n_qubits);
    let p = power as f64;
    for (w, g) in gamma {
        if w.is_identity() {
            c.push(Gate::GlobalPhase(g * p))?;
        } else {
            c.append(&pauli_gadget(w, -2.0 * g * p, n_qubits)?)?;
        }
    }
    Ok(c)
}

fn controlled_diagonal(gamma: &[(PauliWord, f64)], n_qubits: usize, power: i64, ancilla: usize) -> Result<Circuit> {
    let mut c = Circuit::new(ancilla + 1);
    let p = power as f64;
    for (w, g) in gamma {
        if w.is_identity() {
            c.push(Gate::Phase(ancilla, g * p))?;
        } else {
            c.append(&controlled_gadget(w, -2.0 * g * p, n_qubits, ancilla)?)?;
        }
    }
    Ok(c)
}

/// V^power = W D(γ)^power W†, the same size for every power.
pub fn vff_propagator(model: &VffModel, power: i64) -> Result<Circuit> {
    let w = ansatz_circuit(model)?;
    let mut c = w.inverse();
    c.append(&diagonal_circuit(&model.gamma, model.n_qubits, power)?)?;
    c.append(&w)?;
    Ok(c)
}

/// W and W† uncontrolled around a diagonal controlled on `ancilla`.
pub fn controlled_vff_propagator(model: &VffModel, power: i64, ancilla: usize) -> Result<Circuit> {
    if ancilla < model.n_qubits {
        return Err(Error::AncillaCollision(ancilla));
    }
    let w = ansatz_circuit(model)?;
    let mut c = Circuit::new(ancilla + 1);
    c.append(&w.inverse())?;
    c.append(&controlled_diagonal(&model.gamma, model.n_qubits, power, ancilla)?)?;
    c.append(&w)?;
    Ok(c)
}
