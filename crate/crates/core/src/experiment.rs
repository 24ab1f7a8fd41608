//! Trial sweeps: run many seeds at each point of a parameter sweep and
//! aggregate the final metrics.
//!
//! A spec file is a configuration file (see [`crate::config_file`]) with three
//! extra kinds of line:
//!
//! ```text
//! trials = 50
//! net_energy = 9000            # per-agent energy = net_energy / agent_count
//! sweep.initial_energy = 250,500,750
//! ```
//!
//! Several `sweep.` lines are zipped: they must list the same number of
//! values, and point `k` takes the `k`-th value of each. Without a sweep line
//! the experiment has a single point.
//!
//! Trial `t` runs with seed `derive_seed(seed, TRIAL_STREAM, t)` at every
//! point. Points therefore differ only in the swept parameters, which keeps
//! paired comparisons between points tight, and adding points or trials
//! never changes the trials already there.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::config_file::{apply, split_line, ConfigError, CONFIG_KEYS};
use crate::engine::{EngineError, RunResult, Simulation, Terminated};
use crate::metrics::{assess, MetricsError, MetricsReport};
use crate::model::{validate_config, SimConfig};
use crate::rng::derive_seed;
use crate::scenarios::net_energy_distribution;

pub const DEFAULT_TRIALS: usize = 50;
/// Tag mixed into trial seeds.
pub const TRIAL_STREAM: u64 = 0x7472_6961_6c73;

#[derive(Debug, Error, PartialEq)]
pub enum SpecError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("line {line}: `sweep.{field}` names no configuration field")]
    UnknownSweepField { line: usize, field: String },
    #[error("line {line}: `sweep.{field}` lists no values")]
    EmptySweep { line: usize, field: String },
    #[error("sweep lists disagree in length: `{first}` has {first_len} values, `{other}` has {other_len}")]
    SweepLength {
        first: String,
        first_len: usize,
        other: String,
        other_len: usize,
    },
    #[error("`net_energy` sets each agent's energy, so `initial_energy` cannot be set or swept with it")]
    EnergyConflict,
    #[error("sweep point {point} ({label}): invalid configuration: {message}")]
    InvalidPoint {
        point: usize,
        label: String,
        message: String,
    },
}

#[derive(Debug, Error)]
pub enum TrialError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("final configuration: {0}")]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Spec(#[from] SpecError),
}

#[derive(Debug, Error)]
#[error("sweep point {point} ({label}), trial {trial}, seed {seed}: {source}")]
pub struct ExperimentError {
    pub point: usize,
    pub label: String,
    pub trial: usize,
    pub seed: u64,
    #[source]
    pub source: TrialError,
}

/// One swept field and its values, as written in the spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub field: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub base_config: SimConfig,
    pub sweep: Vec<Sweep>,
    pub trials: usize,
    /// Total energy shared equally by the agents at every point.
    pub net_energy: Option<f64>,
    /// `init_layout` as written, re-applied after the sweep values so a
    /// default pile arrangement follows a swept board size.
    layout: Option<String>,
}

impl ExperimentSpec {
    /// A single-point spec.
    pub fn new(base_config: SimConfig, trials: usize) -> Self {
        ExperimentSpec {
            base_config,
            sweep: Vec::new(),
            trials,
            net_energy: None,
            layout: None,
        }
    }

    pub fn with_sweep(mut self, field: &str, values: &[&str]) -> Self {
        self.sweep.push(Sweep {
            field: field.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
        });
        self
    }

    pub fn with_net_energy(mut self, total: f64) -> Self {
        self.net_energy = Some(total);
        self
    }

    pub fn point_count(&self) -> usize {
        self.sweep.first().map_or(1, |s| s.values.len())
    }

    /// Swept field names joined with `+`; empty without a sweep.
    pub fn sweep_label(&self) -> String {
        self.sweep.iter().map(|s| s.field.as_str()).collect::<Vec<_>>().join("+")
    }

    /// Values of point `k` joined with `+`.
    pub fn point_label(&self, k: usize) -> String {
        self.sweep.iter().map(|s| s.values[k].as_str()).collect::<Vec<_>>().join("+")
    }

    /// Configuration of sweep point `k`, before the trial seed is applied.
    pub fn point_config(&self, k: usize) -> Result<SimConfig, SpecError> {
        let mut c = self.base_config.clone();
        let invalid = |message: String| SpecError::InvalidPoint {
            point: k,
            label: self.point_label(k),
            message,
        };
        for s in &self.sweep {
            apply(&mut c, &s.field, &s.values[k], 0).map_err(|e| invalid(e.to_string()))?;
        }
        if let Some(layout) = &self.layout {
            if !self.sweep.iter().any(|s| s.field == "init_layout") {
                apply(&mut c, "init_layout", layout, 0).map_err(|e| invalid(e.to_string()))?;
            }
        }
        if let Some(total) = self.net_energy {
            if c.agent_count >= 1 {
                c.initial_energy = net_energy_distribution(total, c.agent_count);
            }
        }
        validate_config(&c).map_err(|v| {
            invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))
        })?;
        Ok(c)
    }

    /// Checks the sweep shape and every point's configuration.
    pub fn validate(&self) -> Result<(), SpecError> {
        if let Some(first) = self.sweep.first() {
            for s in &self.sweep[1..] {
                if s.values.len() != first.values.len() {
                    return Err(SpecError::SweepLength {
                        first: first.field.clone(),
                        first_len: first.values.len(),
                        other: s.field.clone(),
                        other_len: s.values.len(),
                    });
                }
            }
        }
        if self.net_energy.is_some() && self.sweep.iter().any(|s| s.field == "initial_energy") {
            return Err(SpecError::EnergyConflict);
        }
        for k in 0..self.point_count() {
            self.point_config(k)?;
        }
        Ok(())
    }
}

/// Parses and validates a spec file.
pub fn parse_spec(text: &str) -> Result<ExperimentSpec, SpecError> {
    let mut config_lines = String::new();
    let mut spec = ExperimentSpec::new(SimConfig::default(), DEFAULT_TRIALS);
    let mut seen: Vec<String> = Vec::new();
    let mut energy_line = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let Some((key, value)) = split_line(line, lineno)? else {
            config_lines.push('\n');
            continue;
        };
        if seen.iter().any(|s| s == key) {
            return Err(ConfigError::DuplicateKey {
                line: lineno,
                key: key.to_string(),
            }
            .into());
        }
        seen.push(key.to_string());
        let bad = |message: String| ConfigError::BadValue {
            line: lineno,
            key: key.to_string(),
            message,
        };
        if key == "trials" {
            spec.trials = value
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| bad(format!("`{value}`: expected a positive integer")))?;
        } else if key == "net_energy" {
            let v: f64 = value.parse().map_err(|e| bad(format!("`{value}`: {e}")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(format!("`{value}`: must be positive")).into());
            }
            spec.net_energy = Some(v);
        } else if let Some(field) = key.strip_prefix("sweep.") {
            if !CONFIG_KEYS.contains(&field) {
                return Err(SpecError::UnknownSweepField {
                    line: lineno,
                    field: field.to_string(),
                });
            }
            let values: Vec<String> = value
                .split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(str::to_string)
                .collect();
            if values.is_empty() {
                return Err(SpecError::EmptySweep {
                    line: lineno,
                    field: field.to_string(),
                });
            }
            // Each value must parse on its own; the line number is only known here.
            for v in &values {
                let mut probe = SimConfig::default();
                apply(&mut probe, field, v, lineno)?;
            }
            spec.sweep.push(Sweep {
                field: field.to_string(),
                values,
            });
        } else {
            if key == "init_layout" {
                spec.layout = Some(value.to_string());
            }
            if key == "initial_energy" {
                energy_line = Some(lineno);
            }
            config_lines.push_str(line);
        }
        config_lines.push('\n');
    }
    // Line numbers survive because every consumed line left a newline behind.
    spec.base_config = crate::config_file::parse_config(&config_lines)?;
    if spec.net_energy.is_some() && energy_line.is_some() {
        return Err(SpecError::EnergyConflict);
    }
    spec.validate()?;
    Ok(spec)
}

/// Spec files shipped with the crate, by name.
pub const BUNDLED_SPECS: [(&str, &str); 15] = [
    ("table1", include_str!("../specs/table1.spec")),
    ("table2", include_str!("../specs/table2.spec")),
    ("table3", include_str!("../specs/table3.spec")),
    ("table4", include_str!("../specs/table4.spec")),
    ("table5", include_str!("../specs/table5.spec")),
    ("table6", include_str!("../specs/table6.spec")),
    ("table7", include_str!("../specs/table7.spec")),
    ("fig9", include_str!("../specs/fig9.spec")),
    ("fig10", include_str!("../specs/fig10.spec")),
    ("fig11", include_str!("../specs/fig11.spec")),
    ("fig12", include_str!("../specs/fig12.spec")),
    ("fig13", include_str!("../specs/fig13.spec")),
    ("fig14", include_str!("../specs/fig14.spec")),
    ("control_equal", include_str!("../specs/control_equal.spec")),
    ("control_mixed", include_str!("../specs/control_mixed.spec")),
];

/// A bundled spec by name, with or without the `.spec` suffix.
pub fn bundled_spec(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".spec").unwrap_or(name);
    BUNDLED_SPECS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive_seed(base_seed, TRIAL_STREAM, trial as u64)
}

/// One finished trial.
#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub point: usize,
    pub trial: usize,
    pub seed: u64,
    /// Metrics of the starting layout; `None` when undefined (an empty class).
    pub initial: Option<MetricsReport>,
    pub report: MetricsReport,
    pub steps: u64,
    pub wall_time: f64,
    pub terminated_by: Terminated,
    pub samples: Vec<(u64, MetricsReport)>,
}

/// Mean and sample standard deviation; the deviation is 0 for one value.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregates of one sweep point, trials in index order.
#[derive(Clone, Debug)]
pub struct PointSummary {
    pub sweep_field: String,
    pub value: String,
    pub config: SimConfig,
    pub trials: Vec<TrialOutcome>,
    pub mean_separation: f64,
    pub std_separation: f64,
    pub mean_shape: f64,
    pub std_shape: f64,
    pub mean_steps: f64,
    pub mean_wall_time_s: f64,
}

impl PointSummary {
    fn new(sweep_field: String, value: String, config: SimConfig, trials: Vec<TrialOutcome>) -> Self {
        let col = |f: fn(&TrialOutcome) -> f64| trials.iter().map(f).collect::<Vec<_>>();
        let (mean_separation, std_separation) = mean_std(&col(|t| t.report.separation_pct));
        let (mean_shape, std_shape) = mean_std(&col(|t| t.report.shape_pct));
        let (mean_steps, _) = mean_std(&col(|t| t.steps as f64));
        let (mean_wall_time_s, _) = mean_std(&col(|t| t.wall_time));
        PointSummary {
            sweep_field,
            value,
            config,
            trials,
            mean_separation,
            std_separation,
            mean_shape,
            std_shape,
            mean_steps,
            mean_wall_time_s,
        }
    }

    /// Mean of a per-trial quantity.
    pub fn mean_of(&self, f: impl Fn(&TrialOutcome) -> f64) -> f64 {
        mean_std(&self.trials.iter().map(f).collect::<Vec<_>>()).0
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub points: Vec<PointSummary>,
    /// Seconds for the whole sweep.
    pub wall_time: f64,
}

fn run_trial(config: &SimConfig, point: usize, trial: usize) -> Result<TrialOutcome, TrialError> {
    let sim = Simulation::new(config.clone())?;
    let initial = assess(&sim.world().objects).ok();
    let RunResult {
        final_world,
        steps_executed,
        wall_time,
        samples,
        terminated_by,
        ..
    } = sim.run_to_end();
    let report = assess(&final_world.objects)?;
    Ok(TrialOutcome {
        point,
        trial,
        seed: config.seed,
        initial,
        report,
        steps: steps_executed,
        wall_time,
        terminated_by,
        samples,
    })
}

/// Runs every trial of every point on a pool of `parallel` threads (0 means
/// one per core). Results do not depend on `parallel` apart from wall times.
pub fn run_experiment(spec: &ExperimentSpec, parallel: usize) -> Result<ExperimentResult, ExperimentError> {
    let start = Instant::now();
    let points = spec.point_count();
    let configs: Vec<SimConfig> = (0..points)
        .map(|k| {
            spec.point_config(k).map_err(|e| ExperimentError {
                point: k,
                label: spec.point_label(k),
                trial: 0,
                seed: spec.base_config.seed,
                source: e.into(),
            })
        })
        .collect::<Result<_, _>>()?;
    let tasks: Vec<(usize, usize, SimConfig)> = configs
        .iter()
        .enumerate()
        .flat_map(|(k, c)| {
            (0..spec.trials).map(move |t| {
                let config = SimConfig {
                    seed: trial_seed(spec.base_config.seed, t),
                    ..c.clone()
                };
                (k, t, config)
            })
        })
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel)
        .build()
        .expect("thread pool starts");
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(k, t, c)| {
                run_trial(c, *k, *t).map_err(|source| ExperimentError {
                    point: *k,
                    label: spec.point_label(*k),
                    trial: *t,
                    seed: c.seed,
                    source,
                })
            })
            .collect::<Result<_, _>>()
    })?;
    let mut by_point: Vec<Vec<TrialOutcome>> = vec![Vec::new(); points];
    for o in outcomes {
        by_point[o.point].push(o);
    }
    let summaries = by_point
        .into_iter()
        .zip(configs)
        .enumerate()
        .map(|(k, (trials, config))| PointSummary::new(spec.sweep_label(), spec.point_label(k), config, trials))
        .collect();
    Ok(ExperimentResult {
        points: summaries,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PenaltyMode, Termination};

    #[test]
    fn bundled_specs_parse() {
        for (name, text) in BUNDLED_SPECS {
            let spec = parse_spec(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(spec.trials, DEFAULT_TRIALS, "{name}");
        }
        assert_eq!(parse_spec(bundled_spec("table1.spec").unwrap()).unwrap().point_count(), 7);
        assert_eq!(parse_spec(bundled_spec("table4").unwrap()).unwrap().point_count(), 4);
        assert!(bundled_spec("table8").is_none());
    }

    #[test]
    fn mean_std_examples() {
        assert_eq!(mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]).0, 5.0);
        let (_, s) = mean_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
        assert!((s - (32.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn parses_sweeps_and_extras() {
        let spec = parse_spec(
            "# energy sweep\ncount_small = 10\ntrials = 3\nsweep.penalty_mode = proportional, fixed:3\nsweep.agent_count = 4,8\nnet_energy = 800\n",
        )
        .unwrap();
        assert_eq!(spec.trials, 3);
        assert_eq!(spec.base_config.count_small, 10);
        assert_eq!(spec.point_count(), 2);
        assert_eq!(spec.sweep_label(), "penalty_mode+agent_count");
        assert_eq!(spec.point_label(1), "fixed:3+8");
        let c = spec.point_config(1).unwrap();
        assert_eq!(c.penalty_mode, PenaltyMode::Fixed(3.0));
        assert_eq!(c.agent_count, 8);
        assert_eq!(c.initial_energy, 100.0);
    }

    #[test]
    fn spec_errors_name_the_line() {
        let e = parse_spec("trials = 2\nsweep.bogus = 1,2").unwrap_err();
        assert_eq!(e, SpecError::UnknownSweepField { line: 2, field: "bogus".into() });
        let e = parse_spec("\n\nsweep.p_min = 0.1,x").unwrap_err();
        assert!(matches!(e, SpecError::Config(ConfigError::BadValue { line: 3, .. })), "{e}");
        let e = parse_spec("a = 1").unwrap_err();
        assert!(e.to_string().contains("line 1"));
        assert!(matches!(parse_spec("trials = 0"), Err(SpecError::Config(ConfigError::BadValue { .. }))));
        assert!(matches!(
            parse_spec("sweep.agent_count = 1,2\nsweep.seed = 1"),
            Err(SpecError::SweepLength { .. })
        ));
        assert_eq!(parse_spec("net_energy = 10\ninitial_energy = 4"), Err(SpecError::EnergyConflict));
        let e = parse_spec("sweep.p_min = 0.4,5").unwrap_err();
        assert!(matches!(e, SpecError::InvalidPoint { point: 1, .. }), "{e}");
    }

    #[test]
    fn swept_board_moves_default_piles() {
        let spec = parse_spec("init_layout = presorted\nsweep.board_width = 120,200\nsweep.board_height = 120,200").unwrap();
        let a = spec.point_config(0).unwrap().init_layout;
        let b = spec.point_config(1).unwrap().init_layout;
        assert_eq!(a, crate::model::InitLayout::presorted_default(120.0, 120.0));
        assert_eq!(b, crate::model::InitLayout::presorted_default(200.0, 200.0));
    }

    fn tiny() -> SimConfig {
        SimConfig {
            board_width: 40.0,
            board_height: 40.0,
            count_small: 4,
            count_medium: 4,
            count_large: 4,
            agent_count: 3,
            termination: Termination::StepLimit(2_000),
            ..SimConfig::default()
        }
    }

    #[test]
    fn parallel_degree_does_not_change_results() {
        let spec = ExperimentSpec::new(tiny(), 4).with_sweep("agent_count", &["1", "3"]);
        let a = run_experiment(&spec, 1).unwrap();
        let b = run_experiment(&spec, 3).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p.mean_separation, q.mean_separation);
            assert_eq!(p.std_shape, q.std_shape);
            assert_eq!(p.mean_steps, q.mean_steps);
            let seeds: Vec<u64> = p.trials.iter().map(|t| t.seed).collect();
            assert_eq!(seeds, q.trials.iter().map(|t| t.seed).collect::<Vec<_>>());
        }
        // Points share trial seeds.
        assert_eq!(a.points[0].trials[2].seed, a.points[1].trials[2].seed);
    }

    #[test]
    fn one_trial_one_point_equals_a_single_run() {
        let spec = ExperimentSpec::new(tiny(), 1);
        let r = run_experiment(&spec, 1).unwrap();
        assert_eq!(r.points.len(), 1);
        let config = SimConfig { seed: trial_seed(tiny().seed, 0), ..tiny() };
        let single = crate::engine::run(&config).unwrap();
        let m = assess(&single.final_world.objects).unwrap();
        assert_eq!(r.points[0].mean_separation, m.separation_pct);
        assert_eq!(r.points[0].mean_shape, m.shape_pct);
        assert_eq!(r.points[0].std_separation, 0.0);
    }

    #[test]
    fn failures_name_point_and_seed() {
        // Every object carried at once leaves nothing to measure.
        let c = SimConfig {
            count_small: 1,
            count_medium: 1,
            count_large: 1,
            agent_count: 1,
            termination: Termination::StepLimit(0),
            ..tiny()
        };
        let spec = ExperimentSpec::new(c, 1).with_sweep("count_small", &["1", "0"]);
        let e = run_experiment(&spec, 1).unwrap_err();
        assert_eq!(e.point, 1);
        assert_eq!(e.seed, trial_seed(tiny().seed, 0));
        assert!(e.to_string().contains("count_small") || e.to_string().contains("sweep point 1"));
    }
}
