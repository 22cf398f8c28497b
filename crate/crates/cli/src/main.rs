use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;
use vqpe_core::experiment::{
    dump_matrices, gate_counts, gate_counts_csv, run_experiment, vff_model, ExperimentConfig, Method, ReadoutMode,
};
use vqpe_core::qpe::run_qpe;
use vqpe_core::vff::{fit_vff, VffModel};

#[derive(Parser)]
#[command(
    name = "vqpe",
    version,
    about = "Krylov phase estimation experiments on simulated qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan Δt × N_T and write one CSV row per retained eigenstate.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Fit a fast-forwarding model at one time step and write it as JSON.
    FitVff {
        #[command(flatten)]
        common: Common,
    },
    /// Gate and CNOT counts of Trotter and VFF propagators.
    GateCounts {
        #[command(flatten)]
        common: Common,
        /// Trotter step counts to report.
        #[arg(long, value_delimiter = ',', default_value = "1,2,10")]
        steps: Vec<i64>,
        /// VFF powers to report.
        #[arg(long, value_delimiter = ',', default_value = "1,100")]
        powers: Vec<i64>,
    },
    /// Phase-estimation outcome distribution for the reference state.
    Qpe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ancillas: usize,
        /// Evolution time t of the base controlled unitary.
        #[arg(long)]
        time: f64,
    },
    /// Measured S row, H and U for a single (Δt, N_T) cell as JSON.
    DumpMatrices {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    VqpeExact,
    VqpeTrotter,
    VffVqpe,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    config: PathBuf,
    /// Master seed; required in shot mode.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Replace the configured time steps.
    #[arg(long, value_delimiter = ',')]
    dt: Option<Vec<f64>>,
    /// Replace the configured subspace sizes.
    #[arg(long, value_delimiter = ',')]
    nt: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Saved VFF model to use instead of fitting.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> vqpe_core::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.backend.seed = Some(s);
        }
        if let Some(s) = self.shots {
            cfg.backend.shots = s;
            cfg.backend.mode = ReadoutMode::Shots;
        }
        if let Some(t) = self.threshold {
            cfg.threshold = t;
        }
        if let Some(dt) = &self.dt {
            cfg.grid.dt = dt.clone();
        }
        if let Some(nt) = &self.nt {
            cfg.grid.nt = nt.clone();
        }
        if let Some(m) = self.method {
            cfg.method = match m {
                MethodArg::VqpeExact => Method::VqpeExact,
                MethodArg::VqpeTrotter => Method::VqpeTrotter,
                MethodArg::VffVqpe => Method::VffVqpe,
            };
        }
        if let Some(r) = self.repeats {
            cfg.repeats = r;
        }
        if let Some(m) = &self.model {
            cfg.vff.model_path = Some(m.clone());
        }
        if cfg.backend.mode == ReadoutMode::Shots && self.seed.is_none() && cfg.backend.seed.is_none() {
            return Err(vqpe_core::Error::Config {
                field: "backend.seed".into(),
                message: "shot mode needs --seed".into(),
            });
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Outcome of a verb: config problems exit 1, partial cell failures exit 2.
enum Failure {
    Config(anyhow::Error),
    Partial(usize),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.into())
    }
}

fn single_dt(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.grid.dt.as_slice() {
        [dt] => Ok(*dt),
        [dt, ..] => {
            log::info!("using the first of {} time steps ({dt})", cfg.grid.dt.len());
            Ok(*dt)
        }
        [] => bail!("no time step configured"),
    }
}

fn execute(command: &Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Run { common } => {
            let cfg = common.config()?;
            let result = run_experiment(&cfg)?;
            common.emit(&result.to_csv()?)?;
            if result.failures > 0 {
                return Err(Failure::Partial(result.failures));
            }
        }
        Command::FitVff { common } => {
            let cfg = common.config()?;
            let system = cfg.load_system()?;
            let dt = single_dt(&cfg)?;
            let (model, report) = fit_vff(&system.hamiltonian, &system.reference, dt, &cfg.vff.fit_config())?;
            eprintln!(
                "{}",
                serde_json::json!({
                    "cost": report.cost,
                    "overlaps": report.overlaps,
                    "iterations": report.cost_trace.len().saturating_sub(1),
                    "restart_costs": report.restart_costs,
                })
            );
            common.emit(&(serde_json::to_string_pretty(&model.to_json())? + "\n"))?;
        }
        Command::GateCounts { common, steps, powers } => {
            let cfg = common.config()?;
            let system = cfg.load_system()?;
            let dt = single_dt(&cfg)?;
            let model = match &cfg.vff.model_path {
                Some(_) => vff_model(&cfg, &system, dt)?,
                None => VffModel::new(system.hamiltonian.n_qubits(), dt, cfg.vff.m_max, cfg.vff.layers)?,
            };
            let rows = gate_counts(&system.hamiltonian, dt, &model, steps, powers)?;
            common.emit(&gate_counts_csv(&rows)?)?;
        }
        Command::Qpe { common, ancillas, time } => {
            let cfg = common.config()?;
            let system = cfg.load_system()?;
            let backend = cfg.cell_backend(&[]);
            let result = run_qpe(&system.hamiltonian, &system.reference, *ancillas, *time, &backend)?;
            common.emit(&result.to_csv())?;
        }
        Command::DumpMatrices { common } => {
            let cfg = common.config()?;
            let dt = single_dt(&cfg)?;
            let nt = *cfg.grid.nt.first().context("no subspace size configured")?;
            let dump = dump_matrices(&cfg, dt, nt)?;
            common.emit(&(serde_json::to_string_pretty(&dump)? + "\n"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial(n)) => {
            error!("{n} cell(s) failed; see rows with status 'error'");
            ExitCode::from(2)
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
