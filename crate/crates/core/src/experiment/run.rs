use std::collections::BTreeMap;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, Method, ReadoutMode, SolvePath, System};
use crate::error::{Error, Result};
use crate::simulator::{ExactPropagator, MeasurementBackend, Propagator, TrotterPropagator};
use crate::subspace::{
    build_overlap_row, phase_to_energy, solve_hamiltonian, solve_unitary, Provenance, SubspaceMatrices, TimeGrid,
};
use crate::vff::{fit_vff, VffModel, VffPropagator};

/// One CSV row: a retained eigenstate of one scan cell and repeat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub system: String,
    pub dt: f64,
    pub nt: usize,
    pub n_independent: usize,
    pub method: String,
    pub state_index: usize,
    pub energy: Option<f64>,
    pub lambda_re: Option<f64>,
    pub lambda_im: Option<f64>,
    pub repeat: usize,
    pub mean_energy: Option<f64>,
    pub std_energy: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct RowKey {
    dt_idx: usize,
    nt_idx: usize,
    path: SolvePath,
    repeat: usize,
    state: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub failures: usize,
}

impl ExperimentResult {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "system",
                "dt",
                "nt",
                "n_independent",
                "method",
                "state_index",
                "energy",
                "lambda_re",
                "lambda_im",
                "repeat",
                "mean_energy",
                "std_energy",
                "status",
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Time-step propagator for the configured method.
pub fn build_propagator(config: &ExperimentConfig, system: &System, dt: f64) -> Result<Box<dyn Propagator + Send>> {
    let h = &system.hamiltonian;
    Ok(match config.method {
        Method::VqpeExact => Box::new(ExactPropagator::new(h, dt)?),
        Method::VqpeTrotter => Box::new(TrotterPropagator::new(h, dt)?),
        Method::VffVqpe => Box::new(VffPropagator::new(vff_model(config, system, dt)?)?),
    })
}

/// Load the configured model or fit a fresh one for this time step.
pub fn vff_model(config: &ExperimentConfig, system: &System, dt: f64) -> Result<VffModel> {
    if let Some(path) = &config.vff.model_path {
        let model = VffModel::load(path)?;
        if model.n_qubits != system.hamiltonian.n_qubits() || (model.dt - dt).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "model {} is for {} qubits at dt = {}, scan needs {} qubits at dt = {dt}",
                path.display(),
                model.n_qubits,
                model.dt,
                system.hamiltonian.n_qubits()
            )));
        }
        return Ok(model);
    }
    let (model, report) = fit_vff(&system.hamiltonian, &system.reference, dt, &config.vff.fit_config())?;
    info!(
        "fitted VFF model at dt = {dt}: cost {:.3e}, overlaps {:?}",
        report.cost, report.overlaps
    );
    Ok(model)
}

fn provenance(method: Method) -> Provenance {
    match method {
        Method::VqpeExact => Provenance::Exact,
        Method::VqpeTrotter => Provenance::Trotter,
        Method::VffVqpe => Provenance::Vff,
    }
}

struct Draft {
    key: RowKey,
    dt: f64,
    nt: usize,
    n_independent: usize,
    energy: Option<f64>,
    lambda: Option<(f64, f64)>,
    status: &'static str,
}

fn error_drafts(config: &ExperimentConfig, dt_idx: usize, repeat: usize, paths: &[SolvePath]) -> Vec<Draft> {
    let mut out = Vec::new();
    for (nt_idx, &nt) in config.grid.nt.iter().enumerate() {
        for &path in paths {
            out.push(Draft {
                key: RowKey {
                    dt_idx,
                    nt_idx,
                    path,
                    repeat,
                    state: 0,
                },
                dt: config.grid.dt[dt_idx],
                nt,
                n_independent: 0,
                energy: None,
                lambda: None,
                status: "error",
            });
        }
    }
    out
}

/// Measure once at the largest N_T for one (Δt, repeat) and solve every
/// requested N_T on leading blocks.
fn run_unit(
    config: &ExperimentConfig,
    system: &System,
    prop: &dyn Propagator,
    dt_idx: usize,
    repeat: usize,
    paths: &[SolvePath],
) -> Result<Vec<Draft>> {
    let dt = config.grid.dt[dt_idx];
    let nt_max = *config.grid.nt.iter().max().expect("validated non-empty");
    let backend = config.cell_backend(&[dt_idx as u64, repeat as u64]);
    let grid = TimeGrid::new(dt, nt_max)?;
    let row = build_overlap_row(prop, &system.reference, &grid, &backend)?;
    let mut full = SubspaceMatrices::from_row(row, grid, provenance(config.method), backend)?;
    if paths.contains(&SolvePath::Hamiltonian) {
        full.measure_h(prop, &system.reference, &system.hamiltonian)?;
    }

    let mut out = Vec::new();
    for (nt_idx, &nt) in config.grid.nt.iter().enumerate() {
        let m = full.truncated(nt)?;
        for &path in paths {
            let key = |state| RowKey {
                dt_idx,
                nt_idx,
                path,
                repeat,
                state,
            };
            let solved = match path {
                SolvePath::Hamiltonian => solve_hamiltonian(&m, config.threshold),
                SolvePath::Unitary => solve_unitary(&m, config.threshold, dt),
            };
            match solved {
                Ok(sol) => {
                    for (i, &e) in sol.energies.iter().enumerate() {
                        out.push(Draft {
                            key: key(i),
                            dt,
                            nt,
                            n_independent: sol.n_independent,
                            energy: Some(e),
                            lambda: sol.phases.get(i).map(|l| (l.re, l.im)),
                            status: "ok",
                        });
                    }
                }
                Err(Error::NoIndependentStates(_)) => {
                    warn!("dt = {dt}, nt = {nt}: no independent states, using the reference energy");
                    let (energy, lambda) = match path {
                        SolvePath::Hamiltonian => (m.h.as_ref().map(|h| h.value[(0, 0)].re), None),
                        SolvePath::Unitary => {
                            let s1 = m.row.as_ref().expect("built from row").entries[1];
                            (Some(phase_to_energy(s1, dt)), Some((s1.re, s1.im)))
                        }
                    };
                    out.push(Draft {
                        key: key(0),
                        dt,
                        nt,
                        n_independent: 0,
                        energy,
                        lambda,
                        status: "fallback",
                    });
                }
                Err(e) => {
                    warn!("dt = {dt}, nt = {nt}, {}: {e}", path.as_str());
                    out.push(Draft {
                        key: key(0),
                        dt,
                        nt,
                        n_independent: 0,
                        energy: None,
                        lambda: None,
                        status: "error",
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Run every (Δt, N_T, repeat) cell. Configuration problems are returned as
/// errors; failures inside a cell become rows with status `error`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let system = config.load_system()?;
    let paths = config.diagonalization.paths();
    let repeats = match config.backend.mode {
        ReadoutMode::Exact => 1,
        ReadoutMode::Shots => config.repeats,
    };

    let props: Vec<std::result::Result<Box<dyn Propagator + Send>, String>> = config
        .grid
        .dt
        .par_iter()
        .map(|&dt| build_propagator(config, &system, dt).map_err(|e| e.to_string()))
        .collect();

    let units: Vec<(usize, usize)> = (0..config.grid.dt.len())
        .flat_map(|d| (0..repeats).map(move |r| (d, r)))
        .collect();
    let mut drafts: Vec<Draft> = units
        .par_iter()
        .flat_map_iter(|&(dt_idx, repeat)| {
            let result = match &props[dt_idx] {
                Ok(p) => run_unit(config, &system, p.as_ref(), dt_idx, repeat, &paths).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            };
            result.unwrap_or_else(|e| {
                warn!("dt = {}, repeat {repeat}: {e}", config.grid.dt[dt_idx]);
                error_drafts(config, dt_idx, repeat, &paths)
            })
        })
        .collect();
    drafts.sort_by_key(|d| d.key);

    let mut groups: BTreeMap<(usize, usize, SolvePath, usize), Vec<f64>> = BTreeMap::new();
    for d in &drafts {
        if let (Some(e), "ok" | "fallback") = (d.energy, d.status) {
            groups
                .entry((d.key.dt_idx, d.key.nt_idx, d.key.path, d.key.state))
                .or_default()
                .push(e);
        }
    }
    let stats = |k: &RowKey| -> (Option<f64>, Option<f64>) {
        let Some(v) = groups.get(&(k.dt_idx, k.nt_idx, k.path, k.state)) else {
            return (None, None);
        };
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let std = if v.len() > 1 {
            Some((v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
        } else {
            Some(0.0)
        };
        (Some(mean), std)
    };

    let failures = drafts.iter().filter(|d| d.status == "error").count();
    let rows = drafts
        .iter()
        .map(|d| {
            let (mean_energy, std_energy) = stats(&d.key);
            ResultRow {
                system: system.name.clone(),
                dt: d.dt,
                nt: d.nt,
                n_independent: d.n_independent,
                method: format!("{}/{}", config.method.as_str(), d.key.path.as_str()),
                state_index: d.key.state,
                energy: d.energy,
                lambda_re: d.lambda.map(|l| l.0),
                lambda_im: d.lambda.map(|l| l.1),
                repeat: d.key.repeat,
                mean_energy,
                std_energy,
                status: d.status.to_string(),
            }
        })
        .collect();
    Ok(ExperimentResult { rows, failures })
}

/// Measured matrices for one (Δt, N_T) cell as a JSON dump.
pub fn dump_matrices(config: &ExperimentConfig, dt: f64, nt: usize) -> Result<serde_json::Value> {
    config.validate()?;
    let system = config.load_system()?;
    let prop = build_propagator(config, &system, dt)?;
    let backend: MeasurementBackend = config.cell_backend(&[0, 0]);
    let grid = TimeGrid::new(dt, nt)?;
    let row = build_overlap_row(prop.as_ref(), &system.reference, &grid, &backend)?;
    let mut m = SubspaceMatrices::from_row(row, grid, provenance(config.method), backend)?;
    m.measure_h(prop.as_ref(), &system.reference, &system.hamiltonian)?;
    Ok(m.to_json())
}
