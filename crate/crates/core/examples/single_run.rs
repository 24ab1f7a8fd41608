//! One run with the default equal-count setup, reported and drawn.
//!
//! ```text
//! cargo run --release --example single_run -- [seed] [out.svg]
//! ```

use annulus::io::render_svg;
use annulus::{assess, run, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let svg_path = args.next().unwrap_or_else(|| "single_run.svg".to_string());

    let config = SimConfig { seed, ..SimConfig::default() };
    let result = run(&config)?;
    let before = assess(&result.initial_world.objects)?;
    let after = assess(&result.final_world.objects)?;

    println!("seed {seed}: {} steps, {:.2} s, ended by {:?}", result.steps_executed, result.wall_time, result.terminated_by);
    println!("            separation  shape  small cluster");
    println!("initial     {:>10.2}  {:>5.2}  {:>13.2}", before.separation_pct, before.shape_pct, before.cluster_fraction);
    println!("final       {:>10.2}  {:>5.2}  {:>13.2}", after.separation_pct, after.shape_pct, after.cluster_fraction);

    std::fs::write(&svg_path, render_svg(&result.final_world.objects, config.board_width, config.board_height))?;
    println!("wrote {svg_path}");
    Ok(())
}
