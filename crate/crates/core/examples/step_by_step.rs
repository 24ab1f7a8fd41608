//! Drives a simulation one agent tick at a time and tallies what the agents
//! did, printing the metrics every 200,000 steps.

use std::collections::BTreeMap;

use annulus::model::Termination;
use annulus::{assess, SimConfig, Simulation, TickEvent};

fn kind(e: &TickEvent) -> &'static str {
    match e {
        TickEvent::Died => "died",
        TickEvent::CoolingDown => "cooling down",
        TickEvent::PickedUp { .. } => "picked up",
        TickEvent::PickupDeclined { .. } => "declined pickup",
        TickEvent::Deposited { .. } => "deposited",
        TickEvent::DepositDeclined { .. } => "declined deposit",
        TickEvent::Blocked => "blocked",
        TickEvent::Wandered => "wandered",
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = SimConfig {
        agent_count: 10,
        termination: Termination::StepLimit(1_000_000),
        seed: 3,
        ..SimConfig::default()
    };
    let mut sim = Simulation::new(config)?;
    let mut tally: BTreeMap<&str, u64> = BTreeMap::new();
    while let Some((_, event)) = sim.step() {
        *tally.entry(kind(&event)).or_default() += 1;
        let world = sim.world();
        if world.step_count % 200_000 == 0 {
            match assess(&world.objects) {
                Ok(m) => println!(
                    "step {:>9}: separation {:>6.2}  shape {:>6.2}  carried {}",
                    world.step_count,
                    m.separation_pct,
                    m.shape_pct,
                    world.carried_count()
                ),
                Err(e) => println!("step {:>9}: {e}", world.step_count),
            }
        }
    }
    println!();
    for (k, n) in tally {
        println!("{k:<17} {n:>9}");
    }
    Ok(())
}
