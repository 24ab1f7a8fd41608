//! The `annulus` binary end to end: exit codes, messages and files.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn annulus(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args(args)
        .current_dir(dir)
        .env_remove("ANNULUS_PARALLEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_RUN: &str = "count_small = 10\ncount_medium = 10\ncount_large = 10\nagent_count = 4\ninitial_energy = 200\nsample_interval = 10000\n";

fn ring(out: &mut String, id: &mut usize, letter: char, count: usize, radius: f64) {
    for k in 0..count {
        let a = TAU * k as f64 / count as f64;
        out.push_str(&format!("{id},{letter},{},{}\n", 50.0 + radius * a.cos(), 50.0 + radius * a.sin()));
        *id += 1;
    }
}

fn metrics_json(dir: &Path, file: &str) -> Value {
    let o = annulus(dir, &["metrics", file]);
    assert!(o.status.success(), "{}", stderr(&o));
    serde_json::from_str(&stdout(&o)).expect("metrics prints JSON")
}

#[test]
fn run_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.cfg"), SMALL_RUN).unwrap();
    let o = annulus(
        d,
        &["run", "c.cfg", "--seed", "7", "--out-coords", "xy.csv", "--out-series", "s.csv", "--out-metrics", "m.json", "--svg", "f.svg"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for key in ["separation ", "shape ", "steps ", "terminated energy", "wall_time_s "] {
        assert!(text.contains(key), "missing {key:?} in {text}");
    }
    assert_eq!(fs::read_to_string(d.join("xy.csv")).unwrap().lines().next(), Some("id,type,x,y"));
    assert_eq!(fs::read_to_string(d.join("s.csv")).unwrap().lines().next(), Some("step,separation,shape"));
    assert!(fs::read_to_string(d.join("f.svg")).unwrap().starts_with("<svg"));

    // Metrics of the written coordinates equal the written report.
    let written: Value = serde_json::from_str(&fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(metrics_json(d, "xy.csv"), written);
}

#[test]
fn bad_configuration_exits_1_and_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.cfg"), "p_min = 5.0\n").unwrap();
    let o = annulus(d, &["run", "bad.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("p_min"), "{}", stderr(&o));

    fs::write(d.join("typo.cfg"), "count_small = 3\n\nagent_cuont = 2\n").unwrap();
    let o = annulus(d, &["run", "typo.cfg"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3") && stderr(&o).contains("agent_cuont"), "{}", stderr(&o));

    let o = annulus(d, &["run", "missing.cfg"]);
    assert_eq!(o.status.code(), Some(1));

    fs::write(d.join("noseries.cfg"), "initial_energy = 10\n").unwrap();
    let o = annulus(d, &["run", "noseries.cfg", "--out-series", "s.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("sample_interval"));
}

#[test]
fn usage_errors_exit_1_and_help_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(annulus(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(annulus(dir.path(), &["run"]).status.code(), Some(1));
    let o = annulus(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in ["run", "experiment", "metrics", "gen"] {
        assert!(stdout(&o).contains(cmd));
    }
}

#[test]
fn bundled_table1_has_seven_energy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = annulus(dir.path(), &["experiment", "table1", "--trials", "1", "--no-timing"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_field,value,mean_separation,std_separation,mean_shape,std_shape,mean_steps,mean_wall_time_s")
    );
    let values: Vec<&str> = lines.map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["250", "500", "750", "1000", "1250", "1500", "1750"]);
}

#[test]
fn bundled_table4_includes_the_control_row() {
    let dir = tempfile::tempdir().unwrap();
    let o = annulus(dir.path(), &["experiment", "table4", "--trials", "1", "--out", "t4.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("t4.csv")).unwrap();
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(values, ["proportional", "fixed:0.5", "fixed:1.5", "fixed:3"]);
    // Timing on: the last column is filled.
    assert!(text.lines().skip(1).all(|l| !l.ends_with(',')));
}

#[test]
fn experiment_parallel_degree_and_env_do_not_change_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("s.spec"), format!("{SMALL_RUN}trials = 3\nsweep.agent_count = 2,5\n")).unwrap();
    let one = annulus(d, &["experiment", "s.spec", "--parallel", "1", "--no-timing"]);
    let four = annulus(d, &["experiment", "s.spec", "--parallel", "4", "--no-timing"]);
    let env = Command::new(env!("CARGO_BIN_EXE_annulus"))
        .args(["experiment", "s.spec", "--no-timing"])
        .current_dir(d)
        .env("ANNULUS_PARALLEL", "2")
        .output()
        .unwrap();
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, env.stdout);
}

#[test]
fn experiment_spec_errors_exit_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.spec"), "trials = 2\nsweep.initial_energy = 10,abc\n").unwrap();
    let o = annulus(d, &["experiment", "bad.spec"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = annulus(d, &["experiment", "no_such_spec"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiment_runtime_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    // A step limit of 1 leaves the single small object in the agent's hands
    // whenever it is picked up, and the metrics are then undefined. With an
    // agent parked on it from the start that happens on the first tick.
    fs::write(
        d.join("s.spec"),
        "count_small = 1\ncount_medium = 1\ncount_large = 1\nboard_width = 12\nboard_height = 12\nagent_count = 40\nagent_radius = 6\ntermination = steps:200\npenalty = 0\nbonus = 0\ntrials = 4\n",
    )
    .unwrap();
    let o = annulus(d, &["experiment", "s.spec"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
}

#[test]
fn metrics_on_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();

    let mut ideal = String::from("id,type,x,y\n");
    let mut id = 0;
    for (dx, dy) in [(0.0, 0.0), (1.2, 0.0), (-1.2, 0.0), (0.0, 1.2), (0.0, -1.2)] {
        ideal.push_str(&format!("{id},S,{},{}\n", 50.0 + dx, 50.0 + dy));
        id += 1;
    }
    ring(&mut ideal, &mut id, 'M', 8, 8.0);
    ring(&mut ideal, &mut id, 'L', 10, 20.0);
    fs::write(d.join("ideal.csv"), ideal).unwrap();
    let m = metrics_json(d, "ideal.csv");
    assert_eq!(m["separation_pct"].as_f64(), Some(100.0));
    assert!((m["shape_pct"].as_f64().unwrap() - 100.0).abs() < 1e-9, "{m}");

    // Large inside, small outside, each class on its own circle. Every small
    // lies beyond the large q1, every large inside the small q3, and every
    // medium violates both medium conditions: 15 + 15 + 30 / 2 of 45.
    let mut inverted = String::from("id,type,x,y\n");
    let mut id = 0;
    ring(&mut inverted, &mut id, 'L', 15, 6.0);
    ring(&mut inverted, &mut id, 'M', 15, 14.0);
    ring(&mut inverted, &mut id, 'S', 15, 22.0);
    fs::write(d.join("inverted.csv"), inverted).unwrap();
    let m = metrics_json(d, "inverted.csv");
    assert_eq!(m["small_violations"].as_u64(), Some(15));
    assert_eq!(m["large_violations"].as_u64(), Some(15));
    assert_eq!(m["medium_violations"].as_u64(), Some(30));
    assert!(m["separation_pct"].as_f64().unwrap().abs() < 1e-9, "{m}");
}

#[test]
fn metrics_file_errors_exit_1_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("nohead.csv"), "0,S,1,1\n").unwrap();
    let o = annulus(d, &["metrics", "nohead.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 1"), "{}", stderr(&o));

    fs::write(d.join("letter.csv"), "id,type,x,y\n0,S,1,1\n1,Q,2,2\n").unwrap();
    let o = annulus(d, &["metrics", "letter.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn gen_random_and_presorted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.cfg"), "seed = 4\n").unwrap();
    let a = annulus(d, &["gen", "c.cfg", "--layout", "random"]);
    let b = annulus(d, &["gen", "c.cfg", "--layout", "random"]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 46);
    let other = annulus(d, &["gen", "c.cfg", "--seed", "5"]);
    assert_ne!(a.stdout, other.stdout);

    let o = annulus(d, &["gen", "c.cfg", "--layout", "presorted", "--out", "p.csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let objects = annulus::io::read_coordinates(&fs::read_to_string(d.join("p.csv")).unwrap()).unwrap();
    // Each class forms one tight pile, and the piles are far apart.
    let mut centers = Vec::new();
    for class in annulus::SizeClass::ALL {
        let pile: Vec<_> = objects.iter().filter(|o| o.size_class == class).collect();
        let n = pile.len() as f64;
        let c = annulus::Point::new(pile.iter().map(|o| o.position.x).sum::<f64>() / n, pile.iter().map(|o| o.position.y).sum::<f64>() / n);
        let spread = pile.iter().map(|o| o.position.distance(c)).fold(0.0, f64::max);
        assert!(spread < 25.0, "{class:?} pile spread {spread}");
        centers.push((c, spread));
    }
    for i in 0..3 {
        for j in i + 1..3 {
            assert!(centers[i].0.distance(centers[j].0) > centers[i].1 + centers[j].1);
        }
    }
}

#[test]
fn gen_matches_the_run_start() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("c.cfg"), SMALL_RUN).unwrap();
    let o = annulus(d, &["gen", "c.cfg", "--seed", "9"]);
    let config = annulus::config_file::parse_config(SMALL_RUN).unwrap();
    let sim = annulus::Simulation::new(annulus::SimConfig { seed: 9, ..config }).unwrap();
    assert_eq!(stdout(&o), annulus::io::write_coordinates(&sim.world().objects));
}

#[test]
fn specs_lists_and_prints() {
    let dir = tempfile::tempdir().unwrap();
    let o = annulus(dir.path(), &["specs"]);
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    for n in (1..=7).map(|k| format!("table{k}")).chain((9..=14).map(|k| format!("fig{k}"))) {
        assert!(names.contains(&n), "{n} missing");
    }
    let o = annulus(dir.path(), &["specs", "fig11"]);
    assert!(stdout(&o).contains("net_energy = 9000"));
    assert_eq!(annulus(dir.path(), &["specs", "table99"]).status.code(), Some(1));
}
