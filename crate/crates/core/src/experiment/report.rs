use serde::Serialize;

use crate::error::Result;
use crate::operators::QubitHamiltonian;
use crate::simulator::trotter_circuit;
use crate::vff::{vff_propagator, VffModel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GateCountRow {
    pub circuit: &'static str,
    pub power: i64,
    pub gates: usize,
    pub cnots: usize,
}

/// Gate and CNOT totals for Trotter circuits of `steps` steps and for the
/// VFF propagator at each of `powers`.
pub fn gate_counts(
    h: &QubitHamiltonian,
    dt: f64,
    model: &VffModel,
    steps: &[i64],
    powers: &[i64],
) -> Result<Vec<GateCountRow>> {
    let mut rows = Vec::new();
    for &s in steps {
        let c = trotter_circuit(h, dt, s)?;
        rows.push(GateCountRow {
            circuit: "trotter",
            power: s,
            gates: c.gate_count(),
            cnots: c.cnot_count(),
        });
    }
    for &p in powers {
        let c = vff_propagator(model, p)?;
        rows.push(GateCountRow {
            circuit: "vff",
            power: p,
            gates: c.gate_count(),
            cnots: c.cnot_count(),
        });
    }
    Ok(rows)
}

pub fn gate_counts_csv(rows: &[GateCountRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| crate::Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
