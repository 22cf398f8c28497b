use super::model::{controlled_vff_propagator, vff_propagator, VffModel};
use crate::error::Result;
use crate::simulator::{check_register, Propagator, StateVector};

/// V = W D W† as a propagator; powers only rescale the diagonal.
#[derive(Debug, Clone)]
pub struct VffPropagator {
    model: VffModel,
}

impl VffPropagator {
    pub fn new(model: VffModel) -> Result<Self> {
        model.validate()?;
        Ok(Self { model })
    }

    pub fn model(&self) -> &VffModel {
        &self.model
    }
}

impl Propagator for VffPropagator {
    fn n_qubits(&self) -> usize {
        self.model.n_qubits
    }

    fn apply_power(&self, state: &mut StateVector, power: i64, control: Option<usize>) -> Result<()> {
        check_register(self.model.n_qubits, state, control)?;
        let circuit = match control {
            Some(a) => controlled_vff_propagator(&self.model, power, a)?,
            None => vff_propagator(&self.model, power)?,
        };
        circuit.apply_slice(state.amplitudes_mut());
        Ok(())
    }
}
