//! Metric curves under a step limit, averaged over trials, for two swarm
//! sizes. The point where a curve levels off is a candidate step limit.

use annulus::experiment::{run_experiment, ExperimentSpec};
use annulus::io::write_mean_series;
use annulus::model::Termination;
use annulus::SimConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = SimConfig {
        termination: Termination::StepLimit(600_000),
        sample_interval: 50_000,
        seed: 14,
        ..SimConfig::default()
    };
    let spec = ExperimentSpec::new(base, 6).with_sweep("agent_count", &["5", "25"]);
    let result = run_experiment(&spec, 0)?;

    let table = write_mean_series(&result);
    println!("agents     step  separation  shape");
    for line in table.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (sep, shape): (f64, f64) = (f[3].parse()?, f[4].parse()?);
        println!("{:>6} {:>8} {:>11.2} {:>6.2}", f[1], f[2], sep, shape);
    }
    Ok(())
}
