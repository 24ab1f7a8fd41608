//! The `annulus` command line.
//!
//! ```text
//! annulus run <config> [--seed N] [--out-coords F] [--out-series F] [--out-metrics F] [--svg F]
//! annulus experiment <spec> [--out F] [--out-series F] [--parallel N] [--trials N] [--no-timing]
//! annulus metrics <coords>
//! annulus gen <config> [--layout random|presorted] [--seed N] [--out F]
//! annulus specs [name]
//! ```
//!
//! Exit status is 0 on success, 1 for a bad argument, configuration or input
//! file, and 2 when a run or an output write fails.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::config_file::{parse_config, ConfigError};
use crate::engine::{EngineError, Simulation, Terminated};
use crate::experiment::{bundled_spec, parse_spec, run_experiment, ExperimentError, SpecError, BUNDLED_SPECS};
use crate::io::{self, FileError};
use crate::metrics::{assess, MetricsError};
use crate::model::{validate_config, InitLayout, SimConfig};
use crate::rng::RngStream;
use crate::scenarios::initial_world;

#[derive(Debug, Parser)]
#[command(name = "annulus", version, about = "Swarm simulation of annular sorting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one simulation and report the final separation and shape.
    Run {
        config: PathBuf,
        /// Overrides the configured seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Final object coordinates (id,type,x,y).
        #[arg(long)]
        out_coords: Option<PathBuf>,
        /// Sampled metrics (step,separation,shape); needs sample_interval > 0.
        #[arg(long)]
        out_series: Option<PathBuf>,
        /// Final metrics report as JSON.
        #[arg(long)]
        out_metrics: Option<PathBuf>,
        /// Final structure as an SVG picture.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run a trial sweep from a spec file or a bundled spec name.
    Experiment {
        spec: String,
        /// Results table; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Mean metric curves per sweep point.
        #[arg(long)]
        out_series: Option<PathBuf>,
        /// Worker threads; 0 means one per core.
        #[arg(long, env = "ANNULUS_PARALLEL", default_value_t = 0)]
        parallel: usize,
        /// Overrides the trial count in the spec file.
        #[arg(long)]
        trials: Option<usize>,
        /// Leave the wall time column empty so the table is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the metrics report of a coordinate file as JSON.
    Metrics { coords: PathBuf },
    /// Write an initial layout without simulating.
    Gen {
        config: PathBuf,
        #[arg(long, value_enum)]
        layout: Option<LayoutArg>,
        #[arg(long)]
        seed: Option<u64>,
        /// Coordinate file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled specs, or print one.
    Specs { name: Option<String> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LayoutArg {
    Random,
    Presorted,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Spec { path: String, source: SpecError },
    #[error("{path}: {source}")]
    File { path: String, source: FileError },
    #[error("simulation failed: {0}")]
    Engine(#[from] EngineError),
    #[error("cannot assess the final configuration: {0}")]
    Metrics(#[from] MetricsError),
    #[error("experiment failed: {0}")]
    Experiment(#[from] ExperimentError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::Read { .. }
            | CliError::Config { .. }
            | CliError::Invalid(_)
            | CliError::Spec { .. }
            | CliError::File { .. } => 1,
            CliError::Engine(EngineError::Config(_)) => 1,
            CliError::Engine(_) | CliError::Metrics(_) | CliError::Experiment(_) | CliError::Write { .. } => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn load_config(path: &Path, seed: Option<u64>) -> Result<SimConfig, CliError> {
    let mut config = parse_config(&read(path)?).map_err(|source| CliError::Config {
        path: path.display().to_string(),
        source,
    })?;
    if let Some(s) = seed {
        config.seed = s;
    }
    validate_config(&config)
        .map_err(|v| CliError::Invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")))?;
    Ok(config)
}

fn terminated_name(t: Terminated) -> &'static str {
    match t {
        Terminated::EnergyExhaustion => "energy",
        Terminated::StepLimit => "steps",
        Terminated::StepCap => "step cap",
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn execute<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let say = |out: &mut dyn Write, s: String| {
        let _ = out.write_all(s.as_bytes());
    };
    match cli.command {
        Command::Run {
            config,
            seed,
            out_coords,
            out_series,
            out_metrics,
            svg,
        } => {
            let c = load_config(&config, seed)?;
            if out_series.is_some() && c.sample_interval == 0 {
                return Err(CliError::Invalid("sample_interval: must be positive to write --out-series".into()));
            }
            let result = Simulation::new(c.clone())?.run_to_end();
            let report = assess(&result.final_world.objects)?;
            if let Some(p) = out_coords {
                write(&p, &io::write_coordinates(&result.final_world.objects))?;
            }
            if let Some(p) = out_series {
                write(&p, &io::write_series(&result.samples))?;
            }
            if let Some(p) = out_metrics {
                write(&p, &(report.to_json() + "\n"))?;
            }
            if let Some(p) = svg {
                write(&p, &io::render_svg(&result.final_world.objects, c.board_width, c.board_height))?;
            }
            say(
                out,
                format!(
                    "separation {:.2}\nshape {:.2}\nsteps {}\nterminated {}\nwall_time_s {:.3}\n",
                    report.separation_pct,
                    report.shape_pct,
                    result.steps_executed,
                    terminated_name(result.terminated_by),
                    result.wall_time
                ),
            );
        }
        Command::Experiment {
            spec,
            out: out_path,
            out_series,
            parallel,
            trials,
            no_timing,
        } => {
            let path = Path::new(&spec);
            let text = if path.exists() {
                read(path)?
            } else {
                bundled_spec(&spec)
                    .ok_or_else(|| CliError::Usage(format!("no spec file or bundled spec named `{spec}`")))?
                    .to_string()
            };
            let mut parsed = parse_spec(&text).map_err(|source| CliError::Spec {
                path: spec.clone(),
                source,
            })?;
            if let Some(n) = trials {
                if n == 0 {
                    return Err(CliError::Usage("--trials must be at least 1".into()));
                }
                parsed.trials = n;
            }
            let result = run_experiment(&parsed, parallel)?;
            let table = io::write_results(&result, !no_timing);
            match out_path {
                Some(p) => write(&p, &table)?,
                None => say(out, table),
            }
            if let Some(p) = out_series {
                write(&p, &io::write_mean_series(&result))?;
            }
        }
        Command::Metrics { coords } => {
            let objects = io::read_coordinates(&read(&coords)?).map_err(|source| CliError::File {
                path: coords.display().to_string(),
                source,
            })?;
            let report = assess(&objects)?;
            say(out, report.to_json() + "\n");
        }
        Command::Gen {
            config,
            layout,
            seed,
            out: out_path,
        } => {
            let mut c = load_config(&config, seed)?;
            match layout {
                Some(LayoutArg::Random) => c.init_layout = InitLayout::RandomUniform,
                Some(LayoutArg::Presorted) if c.init_layout == InitLayout::RandomUniform => {
                    c.init_layout = InitLayout::presorted_default(c.board_width, c.board_height)
                }
                _ => {}
            }
            let world = initial_world(&c, &mut RngStream::new(c.seed, c.agent_count).layout()).map_err(EngineError::from)?;
            let text = io::write_coordinates(&world.objects);
            match out_path {
                Some(p) => write(&p, &text)?,
                None => say(out, text),
            }
        }
        Command::Specs { name } => match name {
            None => {
                for (n, _) in BUNDLED_SPECS {
                    say(out, format!("{n}\n"));
                }
            }
            Some(n) => {
                let text = bundled_spec(&n).ok_or_else(|| CliError::Usage(format!("no bundled spec named `{n}`")))?;
                say(out, text.to_string());
            }
        },
    }
    Ok(())
}

/// Entry point for the binary: runs, reports errors on standard error and
/// returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
