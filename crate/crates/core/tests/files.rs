//! Every file format round-trips byte for byte.

use annulus::config_file::{parse_config, serialize_config};
use annulus::experiment::{run_experiment, ExperimentSpec};
use annulus::io::{read_coordinates, read_results, read_series, write_coordinates, write_results, write_series};
use annulus::model::Termination;
use annulus::{ObjectState, Point, SimConfig, SizeClass};
use proptest::prelude::*;

fn class() -> impl Strategy<Value = SizeClass> {
    prop_oneof![Just(SizeClass::Small), Just(SizeClass::Medium), Just(SizeClass::Large)]
}

proptest! {
    #[test]
    fn coordinates(objs in prop::collection::vec((class(), -1e6..1e6f64, -1e6..1e6f64), 0..60)) {
        let objects: Vec<ObjectState> = objs
            .into_iter()
            .enumerate()
            .map(|(i, (c, x, y))| ObjectState::new(i * 3, c, Point::new(x, y)))
            .collect();
        let text = write_coordinates(&objects);
        let back = read_coordinates(&text).unwrap();
        prop_assert_eq!(&back, &objects);
        prop_assert_eq!(write_coordinates(&back), text);
    }
}

#[test]
fn series_and_results_from_a_real_experiment() {
    let base = SimConfig {
        count_small: 8,
        count_medium: 8,
        count_large: 8,
        agent_count: 3,
        termination: Termination::StepLimit(40_000),
        sample_interval: 5_000,
        ..SimConfig::default()
    };
    let spec = ExperimentSpec::new(base, 3).with_sweep("step_length", &["2", "7.5"]);
    let result = run_experiment(&spec, 1).unwrap();

    for p in &result.points {
        for t in &p.trials {
            let text = write_series(&t.samples);
            let rows = read_series(&text).unwrap();
            assert_eq!(rows.len(), t.samples.len());
            for ((step, sep, shape), (s, m)) in rows.iter().zip(&t.samples) {
                assert_eq!((*step, *sep, *shape), (*s, m.separation_pct, m.shape_pct));
            }
        }
    }

    for timing in [true, false] {
        let text = write_results(&result, timing);
        let rows = read_results(&text).unwrap();
        for (row, p) in rows.iter().zip(&result.points) {
            assert_eq!(row.value, p.value);
            assert_eq!(row.mean_separation, p.mean_separation);
            assert_eq!(row.std_shape, p.std_shape);
            assert_eq!(row.mean_steps, p.mean_steps);
            assert_eq!(row.mean_wall_time_s, timing.then_some(p.mean_wall_time_s));
        }
    }
}

#[test]
fn configuration_text() {
    let c = SimConfig {
        board_width: 123.456,
        initial_energy: 1.0 / 3.0,
        termination: Termination::StepLimit(77),
        ..SimConfig::mixed()
    };
    let text = serialize_config(&c);
    let back = parse_config(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(serialize_config(&back), text);
}
