//! Lists the bundled experiment specs and runs one with fewer trials.
//!
//! ```text
//! cargo run --release --example bundled_specs -- [name] [trials]
//! ```

use annulus::experiment::{bundled_spec, parse_spec, run_experiment, BUNDLED_SPECS};
use annulus::io::write_results;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "table4".to_string());
    let trials: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(4);

    println!("bundled: {}", BUNDLED_SPECS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(" "));
    let text = bundled_spec(&name).ok_or_else(|| format!("no bundled spec named {name}"))?;
    println!("\n{text}");

    let mut spec = parse_spec(text)?;
    spec.trials = trials;
    let result = run_experiment(&spec, 0)?;
    print!("{}", write_results(&result, false));
    Ok(())
}
