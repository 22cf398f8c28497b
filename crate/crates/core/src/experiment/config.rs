use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{hubbard_model, parse_pauli_sum, QubitHamiltonian};
use crate::simulator::{MeasurementBackend, StateVector};
use crate::vff::FitConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSource {
    Hubbard { sites: usize, t: f64, u: f64 },
    PauliFile(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    /// Number of electrons filling the lowest spin-orbitals.
    HartreeFock(usize),
    BasisState(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "vqpe-exact")]
    VqpeExact,
    #[serde(rename = "vqpe-trotter")]
    VqpeTrotter,
    #[serde(rename = "vff-vqpe")]
    VffVqpe,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::VqpeExact => "vqpe-exact",
            Method::VqpeTrotter => "vqpe-trotter",
            Method::VffVqpe => "vff-vqpe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonalization {
    #[default]
    Hamiltonian,
    Unitary,
    Both,
}

/// Generalized eigenproblem used to extract energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SolvePath {
    Hamiltonian,
    Unitary,
}

impl SolvePath {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolvePath::Hamiltonian => "hamiltonian",
            SolvePath::Unitary => "unitary",
        }
    }
}

impl Diagonalization {
    pub fn paths(&self) -> Vec<SolvePath> {
        match self {
            Diagonalization::Hamiltonian => vec![SolvePath::Hamiltonian],
            Diagonalization::Unitary => vec![SolvePath::Unitary],
            Diagonalization::Both => vec![SolvePath::Hamiltonian, SolvePath::Unitary],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dt: Vec<f64>,
    pub nt: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    #[default]
    Exact,
    Shots,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub mode: ReadoutMode,
    pub shots: u64,
    pub seed: Option<u64>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            mode: ReadoutMode::Exact,
            shots: 10_000,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VffSettings {
    pub m_max: usize,
    pub layers: usize,
    pub k: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_step: f64,
    pub seed: u64,
    /// Use a saved model instead of fitting.
    pub model_path: Option<PathBuf>,
}

impl Default for VffSettings {
    fn default() -> Self {
        let f = FitConfig::default();
        Self {
            m_max: f.m_max,
            layers: f.layers,
            k: f.k,
            restarts: f.restarts,
            max_iterations: f.max_iterations,
            gradient_step: f.gradient_step,
            seed: f.seed,
            model_path: None,
        }
    }
}

impl VffSettings {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            m_max: self.m_max,
            layers: self.layers,
            k: self.k,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            gradient_step: self.gradient_step,
            seed: self.seed,
        }
    }
}

fn default_threshold() -> f64 {
    1e-5
}

fn default_repeats() -> usize {
    5
}

fn default_method() -> Method {
    Method::VqpeExact
}

/// One scan over time steps and subspace sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub system: SystemSource,
    pub reference: Reference,
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default)]
    pub diagonalization: Diagonalization,
    pub grid: GridConfig,
    #[serde(default)]
    pub backend: BackendConfig,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub vff: VffSettings,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn config_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        message: message.into(),
    }
}

/// Hamiltonian, reference state and display name of a configured system.
#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub hamiltonian: QubitHamiltonian,
    pub reference: StateVector,
}

impl ExperimentConfig {
    /// Parse JSON, reporting the offending field path on failure. Nothing is validated yet.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path == "." { "(root)".into() } else { path }, e.inner().to_string())
        })
    }

    /// Read a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err("(file)", format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let SystemSource::PauliFile(p) = &mut cfg.system {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(p) = &mut cfg.vff.model_path {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.dt.is_empty() {
            return Err(config_err("grid.dt", "at least one time step is required"));
        }
        for (i, dt) in self.grid.dt.iter().enumerate() {
            if !(dt.is_finite() && *dt > 0.0) {
                return Err(config_err(
                    format!("grid.dt[{i}]"),
                    format!("time step must be positive, got {dt}"),
                ));
            }
        }
        if self.grid.nt.is_empty() {
            return Err(config_err("grid.nt", "at least one subspace size is required"));
        }
        if self.repeats == 0 {
            return Err(config_err("repeats", "must be at least 1"));
        }
        if !(self.threshold.is_finite() && self.threshold > 0.0) {
            return Err(config_err(
                "threshold",
                format!("must be positive, got {}", self.threshold),
            ));
        }
        if self.backend.mode == ReadoutMode::Shots {
            if self.backend.shots == 0 {
                return Err(config_err("backend.shots", "must be at least 1 in shot mode"));
            }
            if self.backend.seed.is_none() {
                return Err(config_err(
                    "backend.seed",
                    "a seed is required in shot mode (pass --seed)",
                ));
            }
        }
        if let SystemSource::Hubbard { sites, t, u } = self.system {
            if sites == 0 {
                return Err(config_err("system.hubbard.sites", "must be at least 1"));
            }
            if !t.is_finite() || !u.is_finite() {
                return Err(config_err("system.hubbard", "t and u must be finite"));
            }
        }
        if self.method == Method::VffVqpe {
            let v = &self.vff;
            if v.model_path.is_none() {
                if v.k == 0 {
                    return Err(config_err("vff.k", "must be at least 1"));
                }
                if v.restarts == 0 {
                    return Err(config_err("vff.restarts", "must be at least 1"));
                }
                if !(v.gradient_step > 0.0) {
                    return Err(config_err("vff.gradient_step", "must be positive"));
                }
            }
        }
        Ok(())
    }

    /// Build the Hamiltonian and reference state.
    pub fn load_system(&self) -> Result<System> {
        let (name, hamiltonian) = match &self.system {
            SystemSource::Hubbard { sites, t, u } => (
                format!("hubbard-{sites}-t{t}-u{u}"),
                hubbard_model(*sites, *t, *u).map_err(|e| config_err("system.hubbard", e.to_string()))?,
            ),
            SystemSource::PauliFile(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| config_err("system.pauli_file", format!("{}: {e}", path.display())))?;
                let h = parse_pauli_sum(&text)
                    .map_err(|e| config_err("system.pauli_file", format!("{}: {e}", path.display())))?;
                let stem = path
                    .file_stem()
                    .map_or("pauli".into(), |s| s.to_string_lossy().into_owned());
                (stem, h)
            }
        };
        let n = hamiltonian.n_qubits();
        let reference = match self.reference {
            Reference::HartreeFock(ne) => {
                StateVector::hartree_fock(n, ne).map_err(|e| config_err("reference.hartree_fock", e.to_string()))?
            }
            Reference::BasisState(idx) => {
                StateVector::basis(n, idx).map_err(|e| config_err("reference.basis_state", e.to_string()))?
            }
        };
        Ok(System {
            name: self.name.clone().unwrap_or(name),
            hamiltonian,
            reference,
        })
    }

    /// Backend for one scan cell; shot seeds are derived from the master seed
    /// and the cell coordinates.
    pub fn cell_backend(&self, coords: &[u64]) -> MeasurementBackend {
        match self.backend.mode {
            ReadoutMode::Exact => MeasurementBackend::Exact,
            ReadoutMode::Shots => MeasurementBackend::Shots {
                shots: self.backend.shots,
                seed: derive_seed(self.backend.seed.unwrap_or(0), coords),
            },
        }
    }
}

/// SplitMix64 over the master seed and coordinates.
pub fn derive_seed(master: u64, coords: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    coords.iter().fold(mix(master), |acc, &c| mix(acc ^ mix(c)))
}
