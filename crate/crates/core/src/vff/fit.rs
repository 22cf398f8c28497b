use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{ansatz_circuit, FitSummary, VffModel};
use super::optimize::{central_gradient, Lbfgs};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::operators::QubitHamiltonian;
use crate::simulator::{ExactPropagator, Propagator, StateVector};

/// Fit settings; `layers` counts brick layers of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub m_max: usize,
    pub layers: usize,
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_step: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            m_max: 1,
            layers: 2,
            k: 2,
            restarts: 8,
            max_iterations: 500,
            gradient_step: 1e-6,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    /// Best restart's cost per optimizer iteration.
    pub cost_trace: Vec<f64>,
    pub cost: f64,
    /// |⟨ψ|(V^k)† e^{−iHkΔt}|ψ⟩| for k = 1…K.
    pub overlaps: Vec<f64>,
    pub restarts_used: usize,
    pub restart_costs: Vec<Option<f64>>,
}

/// Cost 1 − mean_k |⟨ψ|(V^k)† e^{−iHkΔt}|ψ⟩|² and the per-step overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub cost: f64,
    pub overlaps: Vec<f64>,
}

/// Reference state and its exact trajectory.
struct Target {
    psi: StateVector,
    evolved: Vec<StateVector>,
}

impl Target {
    fn new(h: &QubitHamiltonian, psi: &StateVector, dt: f64, k: usize) -> Result<Self> {
        if psi.n_qubits() != h.n_qubits() {
            return Err(Error::WireMismatch {
                expected: h.n_qubits(),
                got: psi.n_qubits(),
            });
        }
        if k == 0 {
            return Err(Error::InvalidInput("cost needs at least one time step".into()));
        }
        let exact = ExactPropagator::new(h, dt)?;
        let evolved = (1..=k as i64).map(|p| exact.evolve(psi, p)).collect::<Result<_>>()?;
        Ok(Self {
            psi: psi.clone(),
            evolved,
        })
    }

    /// ⟨target_k|V^k ψ⟩ for k = 1…K with W applied as gates and D^k as phases.
    fn overlaps(&self, model: &VffModel) -> Result<Vec<C64>> {
        let w = ansatz_circuit(model)?;
        let mut rotated = self.psi.clone();
        w.inverse().apply(&mut rotated)?;
        let masks = model.gamma_masks();
        let angle: Vec<f64> = (0..rotated.dim())
            .map(|b| {
                masks
                    .iter()
                    .map(|&(m, g)| if (b & m).count_ones() % 2 == 0 { g } else { -g })
                    .sum()
            })
            .collect();
        let mut out = Vec::with_capacity(self.evolved.len());
        for (k, target) in self.evolved.iter().enumerate() {
            let p = (k + 1) as f64;
            let amps: Vec<C64> = rotated
                .amplitudes()
                .iter()
                .zip(&angle)
                .map(|(a, &g)| a * C64::from_polar(1.0, g * p))
                .collect();
            let mut v = StateVector::from_amplitudes(amps)?;
            w.apply(&mut v)?;
            out.push(target.inner(&v));
        }
        Ok(out)
    }

    fn cost(&self, model: &VffModel) -> Result<CostReport> {
        let overlaps: Vec<f64> = self.overlaps(model)?.iter().map(|z| z.norm()).collect();
        let cost = 1.0 - overlaps.iter().map(|o| o * o).sum::<f64>() / overlaps.len() as f64;
        Ok(CostReport { cost, overlaps })
    }
}

pub fn vff_cost(model: &VffModel, h: &QubitHamiltonian, psi: &StateVector, k: usize) -> Result<CostReport> {
    if model.n_qubits != h.n_qubits() {
        return Err(Error::WireMismatch {
            expected: model.n_qubits,
            got: h.n_qubits(),
        });
    }
    Target::new(h, psi, model.dt, k)?.cost(model)
}

/// Optimized parameters: block angles, then γ for every non-identity word.
fn unpack(template: &VffModel, x: &[f64]) -> VffModel {
    let mut m = template.clone();
    let nt = m.n_theta();
    m.set_theta(&x[..nt]);
    let mut rest = x[nt..].iter();
    for (w, g) in m.gamma.iter_mut() {
        if !w.is_identity() {
            *g = *rest.next().expect("parameter count");
        }
    }
    m
}

/// Multi-start L-BFGS fit of W and D against the exact trajectory of ψ.
pub fn fit_vff(h: &QubitHamiltonian, psi: &StateVector, dt: f64, config: &FitConfig) -> Result<(VffModel, FitReport)> {
    if config.restarts == 0 {
        return Err(Error::InvalidInput("at least one restart is required".into()));
    }
    if !(config.gradient_step > 0.0) {
        return Err(Error::InvalidInput("gradient step must be positive".into()));
    }
    let template = VffModel::new(h.n_qubits(), dt, config.m_max, config.layers)?;
    let target = Target::new(h, psi, dt, config.k)?;
    let n_params = template.n_theta() + template.gamma.iter().filter(|(w, _)| !w.is_identity()).count();
    let objective = |x: &[f64]| target.cost(&unpack(&template, x)).map_or(f64::NAN, |r| r.cost);
    let optimizer = Lbfgs {
        max_iterations: config.max_iterations,
        ..Default::default()
    };

    let runs: Vec<Option<(f64, Vec<f64>, Vec<f64>)>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let x0: Vec<f64> = (0..n_params).map(|_| rng.random_range(-0.1..=0.1)).collect();
            let min = optimizer.minimize(x0, |x| {
                (objective(x), central_gradient(objective, x, config.gradient_step))
            })?;
            min.f.is_finite().then_some((min.f, min.x, min.trace))
        })
        .collect();

    let restart_costs: Vec<Option<f64>> = runs.iter().map(|r| r.as_ref().map(|r| r.0)).collect();
    let (_, x, trace) = runs
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or(Error::AllRestartsFailed(config.restarts))?;

    let mut model = unpack(&template, &x);
    align_global_phase(&mut model, &target)?;
    let report = target.cost(&model)?;
    model.fit = Some(FitSummary {
        cost: report.cost,
        overlaps: report.overlaps.clone(),
    });
    Ok((
        model,
        FitReport {
            cost_trace: trace,
            cost: report.cost,
            overlaps: report.overlaps,
            restarts_used: config.restarts,
            restart_costs,
        },
    ))
}

/// Set γ₀ so that Arg⟨ψ|V|ψ⟩ matches Arg⟨ψ|e^{−iHΔt}|ψ⟩.
fn align_global_phase(model: &mut VffModel, target: &Target) -> Result<()> {
    for (w, g) in model.gamma.iter_mut() {
        if w.is_identity() {
            *g = 0.0;
        }
    }
    let want = target.psi.inner(&target.evolved[0]).arg();
    let v = super::VffPropagator::new(model.clone())?.evolve(&target.psi, 1)?;
    let have = target.psi.inner(&v).arg();
    let phase = want - have;
    let wrapped = phase.sin().atan2(phase.cos());
    for (w, g) in model.gamma.iter_mut() {
        if w.is_identity() {
            *g = wrapped;
        }
    }
    Ok(())
}
