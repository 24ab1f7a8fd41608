//! Swarm-based annular sorting.
//!
//! Agents wander a rectangular board, picking up and depositing disc-shaped
//! objects of three sizes. Each decision compares a placement score (a sum of
//! short-range repulsion and longer-range attraction terms around the
//! object) with a uniform draw. Over time the objects settle into concentric
//! rings with the smallest at the center.
//!
//! * [`model`]: objects, agents, [`SimConfig`] and validation.
//! * [`config_file`]: the `key = value` configuration format.
//! * [`scoring`] and [`spatial`]: placement scores and the grid that speeds them up.
//! * [`engine`]: the seeded, deterministic simulation loop.
//! * [`metrics`]: separation, shape and radial-displacement measures.
//! * [`scenarios`] and [`experiment`]: initial layouts and trial sweeps.
//! * [`io`]: coordinate, time-series and SVG files.
//! * [`cli`]: the `annulus` command-line front end.

pub mod cli;
pub mod config_file;
pub mod engine;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod scenarios;
pub mod scoring;
pub mod spatial;

pub use engine::{run, RunResult, Simulation, TickEvent};
pub use metrics::{assess, MetricsReport};
pub use model::{ObjectState, Point, SimConfig, SizeClass, WorldState};
