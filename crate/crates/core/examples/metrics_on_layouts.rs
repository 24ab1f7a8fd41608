//! Separation and shape on hand-built configurations: a perfect annulus, the
//! same rings inverted, and a coordinate file read from text.

use std::f64::consts::TAU;

use annulus::io::{read_coordinates, write_coordinates};
use annulus::{assess, ObjectState, Point, SizeClass};

/// `count` objects of `class` evenly spaced on a circle around (50, 50).
fn ring(objects: &mut Vec<ObjectState>, class: SizeClass, count: usize, radius: f64) {
    for k in 0..count {
        let a = TAU * k as f64 / count as f64;
        let p = Point::new(50.0 + radius * a.cos(), 50.0 + radius * a.sin());
        objects.push(ObjectState::new(objects.len(), class, p));
    }
}

fn show(name: &str, objects: &[ObjectState]) -> Result<(), annulus::metrics::MetricsError> {
    let m = assess(objects)?;
    println!(
        "{name:<10} separation {:>6.2}  shape {:>6.2}  (violations S/M/L {}/{}/{})",
        m.separation_pct, m.shape_pct, m.small_violations, m.medium_violations, m.large_violations
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Small objects packed in a core, medium and large on wider rings.
    let mut annulus = Vec::new();
    for (k, (dx, dy)) in [(0.0, 0.0), (1.2, 0.0), (-1.2, 0.0), (0.0, 1.2), (0.0, -1.2)].iter().enumerate() {
        annulus.push(ObjectState::new(k, SizeClass::Small, Point::new(50.0 + dx, 50.0 + dy)));
    }
    ring(&mut annulus, SizeClass::Medium, 8, 8.0);
    ring(&mut annulus, SizeClass::Large, 10, 20.0);
    show("annulus", &annulus)?;

    let mut inverted = Vec::new();
    ring(&mut inverted, SizeClass::Large, 15, 6.0);
    ring(&mut inverted, SizeClass::Medium, 15, 14.0);
    ring(&mut inverted, SizeClass::Small, 15, 22.0);
    show("inverted", &inverted)?;

    // Files written by `annulus run --out-coords` look like this.
    let text = write_coordinates(&annulus);
    println!("\n{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    let back = read_coordinates(&text)?;
    show("from file", &back)?;
    Ok(())
}
