//! A small energy sweep built in code, run on every core and written as the
//! results table.
//!
//! ```text
//! cargo run --release --example energy_sweep -- [trials]
//! ```

use annulus::experiment::{run_experiment, ExperimentSpec};
use annulus::io::write_results;
use annulus::SimConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(8);
    let spec = ExperimentSpec::new(SimConfig::default(), trials).with_sweep("initial_energy", &["250", "750", "1500"]);
    spec.validate()?;

    let result = run_experiment(&spec, 0)?;
    print!("{}", write_results(&result, true));

    for p in &result.points {
        let seps: Vec<String> = p.trials.iter().map(|t| format!("{:.0}", t.report.separation_pct)).collect();
        println!("energy {:>5}: per-trial separation {}", p.value, seps.join(" "));
    }
    println!("{} trials in {:.1} s", trials * spec.point_count(), result.wall_time);
    Ok(())
}
