//! Starting from three single-size piles instead of a random scatter. The
//! piles are taken apart and rebuilt as rings.

use annulus::io::{render_svg, write_coordinates};
use annulus::model::InitLayout;
use annulus::{assess, run, SimConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = SimConfig {
        initial_energy: 1000.0,
        seed: 5,
        ..SimConfig::default()
    };
    config.init_layout = InitLayout::presorted_default(config.board_width, config.board_height);

    let result = run(&config)?;
    for (name, world) in [("piles", &result.initial_world), ("final", &result.final_world)] {
        let m = assess(&world.objects)?;
        println!("{name}: separation {:.2}, shape {:.2}", m.separation_pct, m.shape_pct);
        std::fs::write(format!("presorted_{name}.svg"), render_svg(&world.objects, config.board_width, config.board_height))?;
    }
    std::fs::write("presorted_final.csv", write_coordinates(&result.final_world.objects))?;
    println!("wrote presorted_piles.svg, presorted_final.svg, presorted_final.csv");
    Ok(())
}
