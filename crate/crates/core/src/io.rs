//! Plain-text files: object coordinates, metric time series, experiment
//! tables and SVG snapshots.
//!
//! Reals are written in Rust's shortest round-trip form, so reading a file
//! and writing it again reproduces it byte for byte.

use std::fmt::Write as _;

use thiserror::Error;

use crate::experiment::ExperimentResult;
use crate::metrics::MetricsReport;
use crate::model::{ObjectState, Point, SizeClass};

pub const COORDINATE_HEADER: [&str; 4] = ["id", "type", "x", "y"];
pub const SERIES_HEADER: [&str; 3] = ["step", "separation", "shape"];
pub const RESULTS_HEADER: [&str; 8] = [
    "sweep_field",
    "value",
    "mean_separation",
    "std_separation",
    "mean_shape",
    "std_shape",
    "mean_steps",
    "mean_wall_time_s",
];

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn parse_err(line: u64, message: impl Into<String>) -> FileError {
    FileError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads rows after checking the header; yields `(line, record)`.
fn records(text: &str, header: &[&str]) -> Result<Vec<(u64, csv::StringRecord)>, FileError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut first = true;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if first {
            first = false;
            if rec.iter().ne(header.iter().copied()) {
                return Err(parse_err(line, format!("expected header `{}`", header.join(","))));
            }
            continue;
        }
        if rec.len() != header.len() {
            return Err(parse_err(line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        rows.push((line, rec));
    }
    if first {
        return Err(parse_err(1, format!("expected header `{}`", header.join(","))));
    }
    Ok(rows)
}

fn field<T: std::str::FromStr>(line: u64, name: &str, v: &str) -> Result<T, FileError> {
    v.parse()
        .map_err(|_| parse_err(line, format!("bad {name} `{v}`")))
}

fn real(line: u64, name: &str, v: &str) -> Result<f64, FileError> {
    let x: f64 = field(line, name, v)?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("{name} must be finite")));
    }
    Ok(x)
}

/// On-board objects as `id,type,x,y` rows, in slice order.
pub fn write_coordinates(objects: &[ObjectState]) -> String {
    let mut out = COORDINATE_HEADER.join(",");
    out.push('\n');
    for o in objects.iter().filter(|o| o.on_board) {
        let _ = writeln!(out, "{},{},{},{}", o.id, o.size_class.letter(), o.position.x, o.position.y);
    }
    out
}

/// Parses a coordinate file. Every object read is marked on the board.
pub fn read_coordinates(text: &str) -> Result<Vec<ObjectState>, FileError> {
    let mut objects: Vec<ObjectState> = Vec::new();
    for (line, rec) in records(text, &COORDINATE_HEADER)? {
        let id: usize = field(line, "id", &rec[0])?;
        let class = SizeClass::from_letter(&rec[1])
            .ok_or_else(|| parse_err(line, format!("unknown type `{}` (expected S, M or L)", &rec[1])))?;
        let x = real(line, "x", &rec[2])?;
        let y = real(line, "y", &rec[3])?;
        if objects.iter().any(|o| o.id == id) {
            return Err(parse_err(line, format!("duplicate id {id}")));
        }
        objects.push(ObjectState::new(id, class, Point::new(x, y)));
    }
    Ok(objects)
}

/// `step,separation,shape` rows.
pub fn write_series(samples: &[(u64, MetricsReport)]) -> String {
    let mut out = SERIES_HEADER.join(",");
    out.push('\n');
    for (step, m) in samples {
        let _ = writeln!(out, "{step},{},{}", m.separation_pct, m.shape_pct);
    }
    out
}

/// A parsed time series: `(step, separation, shape)`.
pub fn read_series(text: &str) -> Result<Vec<(u64, f64, f64)>, FileError> {
    let mut rows: Vec<(u64, f64, f64)> = Vec::new();
    for (line, rec) in records(text, &SERIES_HEADER)? {
        let step: u64 = field(line, "step", &rec[0])?;
        if rows.last().is_some_and(|&(prev, _, _)| step <= prev) {
            return Err(parse_err(line, "steps must be strictly increasing"));
        }
        rows.push((step, real(line, "separation", &rec[1])?, real(line, "shape", &rec[2])?));
    }
    Ok(rows)
}

/// The experiment table, one row per sweep point. With `timing` off the wall
/// time column is left empty, so the file depends only on the experiment definition.
pub fn write_results(result: &ExperimentResult, timing: bool) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RESULTS_HEADER).expect("in-memory write");
    for p in &result.points {
        let wall = if timing { p.mean_wall_time_s.to_string() } else { String::new() };
        w.write_record([
            p.sweep_field.clone(),
            p.value.clone(),
            p.mean_separation.to_string(),
            p.std_separation.to_string(),
            p.mean_shape.to_string(),
            p.std_shape.to_string(),
            p.mean_steps.to_string(),
            wall,
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

pub const MEAN_SERIES_HEADER: [&str; 6] = ["sweep_field", "value", "step", "mean_separation", "mean_shape", "trials"];

/// Per-point metric curves averaged over the trials sampled at each step.
pub fn write_mean_series(result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(MEAN_SERIES_HEADER).expect("in-memory write");
    for p in &result.points {
        let mut acc: std::collections::BTreeMap<u64, (f64, f64, usize)> = Default::default();
        for t in &p.trials {
            for (step, m) in &t.samples {
                let e = acc.entry(*step).or_default();
                e.0 += m.separation_pct;
                e.1 += m.shape_pct;
                e.2 += 1;
            }
        }
        for (step, (sep, shape, n)) in acc {
            let k = n as f64;
            w.write_record([
                p.sweep_field.clone(),
                p.value.clone(),
                step.to_string(),
                (sep / k).to_string(),
                (shape / k).to_string(),
                n.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Parsed row of an experiment table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub sweep_field: String,
    pub value: String,
    pub mean_separation: f64,
    pub std_separation: f64,
    pub mean_shape: f64,
    pub std_shape: f64,
    pub mean_steps: f64,
    pub mean_wall_time_s: Option<f64>,
}

pub fn read_results(text: &str) -> Result<Vec<ResultRow>, FileError> {
    records(text, &RESULTS_HEADER)?
        .into_iter()
        .map(|(line, r)| {
            let num = |i: usize, name: &str| -> Result<f64, FileError> { field(line, name, &r[i]) };
            Ok(ResultRow {
                sweep_field: r[0].to_string(),
                value: r[1].to_string(),
                mean_separation: num(2, "mean_separation")?,
                std_separation: num(3, "std_separation")?,
                mean_shape: num(4, "mean_shape")?,
                std_shape: num(5, "std_shape")?,
                mean_steps: num(6, "mean_steps")?,
                mean_wall_time_s: if r[7].is_empty() { None } else { Some(num(7, "mean_wall_time_s")?) },
            })
        })
        .collect()
}

fn grey(class: SizeClass) -> &'static str {
    match class {
        SizeClass::Small => "#202020",
        SizeClass::Medium => "#808080",
        SizeClass::Large => "#c8c8c8",
    }
}

/// On-board objects as filled circles on a white board, darker for smaller
/// objects. The y axis points up.
pub fn render_svg(objects: &[ObjectState], width: f64, height: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{}" height="{}">"#,
        (width * 4.0).round(),
        (height * 4.0).round()
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white" stroke="black" stroke-width="0.3"/>"#);
    for o in objects.iter().filter(|o| o.on_board) {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}" stroke="black" stroke-width="0.1"/>"#,
            o.position.x,
            height - o.position.y,
            o.radius(),
            grey(o.size_class)
        );
    }
    out.push_str("</svg>\n");
    out
}
