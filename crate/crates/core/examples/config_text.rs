//! Configuration text: parse, validate, print the full form.

use annulus::config_file::{parse_config, serialize_config};
use annulus::model::validate_config;

const TEXT: &str = "\
# mixed counts, a tighter board
count_small = 40
count_medium = 20
count_large = 10
agent_count = 10
initial_energy = 750
board_width = 120
board_height = 120
penalty_mode = fixed:1.5
init_layout = presorted:5
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = parse_config(TEXT)?;
    validate_config(&config).map_err(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))?;
    let full = serialize_config(&config);
    print!("{full}");
    assert_eq!(parse_config(&full)?, config);

    let bad = parse_config("p_min = 5.0\np_max = 4.0\n")?;
    for v in validate_config(&bad).unwrap_err() {
        println!("rejected: {v}");
    }
    match parse_config("count_small = 3\ncolor = red\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
