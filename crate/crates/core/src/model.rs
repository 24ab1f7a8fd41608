//! Domain types shared by every layer: objects, agents, the run configuration
//! and the world snapshot.
//!
//! An object's size is its radius. Small, medium and large objects are discs of
//! radius 0.5, 1.5 and 3.0.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Score contribution of a neighbour inside the maximum perimeter.
pub const DEFAULT_BONUS: f64 = 0.1;
/// Score contribution of a neighbour inside the minimum perimeter.
pub const DEFAULT_PENALTY: f64 = -60.0;
/// Maximum perimeter multiplier.
pub const DEFAULT_P_MAX: f64 = 4.0;
/// Minimum perimeter multiplier.
pub const DEFAULT_P_MIN: f64 = 0.4;
/// Cool-down ticks after a collision evaluation or a deposit.
pub const DEFAULT_DELAY_RESET: u32 = 4;
pub const DEFAULT_BOARD_SIDE: f64 = 170.0;
pub const DEFAULT_STEP_LENGTH: f64 = 11.0;
pub const DEFAULT_AGENT_RADIUS: f64 = 3.0;
pub const DEFAULT_STEP_CAP: u64 = 50_000_000;
/// Pile radius for pre-sorted layouts, in multiples of the pile's object size.
pub const DEFAULT_PILE_SPREAD: f64 = 6.5;
/// Largest object radius of any size class.
pub const MAX_OBJECT_RADIUS: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeClass {
    Small,
    Medium,
    Large,
}

impl SizeClass {
    pub const ALL: [SizeClass; 3] = [SizeClass::Small, SizeClass::Medium, SizeClass::Large];

    pub fn size(self) -> f64 {
        match self {
            SizeClass::Small => 0.5,
            SizeClass::Medium => 1.5,
            SizeClass::Large => 3.0,
        }
    }

    /// Disc radius; identical to [`SizeClass::size`].
    pub fn radius(self) -> f64 {
        self.size()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            SizeClass::Small => 'S',
            SizeClass::Medium => 'M',
            SizeClass::Large => 'L',
        }
    }

    pub fn from_letter(s: &str) -> Option<SizeClass> {
        match s {
            "S" => Some(SizeClass::Small),
            "M" => Some(SizeClass::Medium),
            "L" => Some(SizeClass::Large),
            _ => None,
        }
    }
}

impl fmt::Display for SizeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SizeClass::Small => "small",
            SizeClass::Medium => "medium",
            SizeClass::Large => "large",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectState {
    pub id: usize,
    pub size_class: SizeClass,
    pub position: Point,
    /// False while an agent carries the object.
    pub on_board: bool,
}

impl ObjectState {
    pub fn new(id: usize, size_class: SizeClass, position: Point) -> Self {
        ObjectState {
            id,
            size_class,
            position,
            on_board: true,
        }
    }

    pub fn radius(&self) -> f64 {
        self.size_class.radius()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub id: usize,
    pub position: Point,
    /// Id of the carried object; an agent is laden exactly when this is set.
    pub carried: Option<usize>,
    pub energy: f64,
    pub delay: u32,
    pub alive: bool,
}

impl AgentState {
    pub fn new(id: usize, position: Point, energy: f64) -> Self {
        AgentState {
            id,
            position,
            carried: None,
            energy,
            delay: 0,
            alive: true,
        }
    }

    pub fn is_laden(&self) -> bool {
        self.carried.is_some()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Run until every agent has died of energy exhaustion.
    EnergyExhaustion,
    /// Run for a fixed number of agent ticks.
    StepLimit(u64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PenaltyMode {
    /// A pickup costs the object's size.
    Proportional,
    /// A pickup costs this much regardless of size.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlacementPolicy {
    Score,
    /// Pickup and deposit decisions are fair coin flips.
    CoinFlip,
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitLayout {
    RandomUniform,
    /// One pile per size class (small, medium, large). A pile's radius is
    /// `spread` times the size of the objects in it.
    PreSortedPiles { centers: [Point; 3], spread: f64 },
}

impl InitLayout {
    /// Three piles on an equilateral triangle inscribed in the central disc of
    /// the board, small on top.
    pub fn presorted_default(board_width: f64, board_height: f64) -> Self {
        let cx = board_width / 2.0;
        let cy = board_height / 2.0;
        let r = board_width.min(board_height) / 4.0;
        let at = |deg: f64| {
            let a = deg.to_radians();
            Point::new(cx + r * a.cos(), cy + r * a.sin())
        };
        InitLayout::PreSortedPiles {
            centers: [at(90.0), at(210.0), at(330.0)],
            spread: DEFAULT_PILE_SPREAD,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub board_width: f64,
    pub board_height: f64,
    pub count_small: usize,
    pub count_medium: usize,
    pub count_large: usize,
    pub agent_count: usize,
    pub initial_energy: f64,
    pub bonus: f64,
    pub penalty: f64,
    pub p_max: f64,
    pub p_min: f64,
    pub delay_reset: u32,
    pub step_length: f64,
    /// Reach of an agent: it stands on an object when its position is within
    /// this distance of the object's edge.
    pub agent_radius: f64,
    pub termination: Termination,
    pub penalty_mode: PenaltyMode,
    pub placement_policy: PlacementPolicy,
    /// Metrics are sampled every this many steps; 0 disables sampling.
    pub sample_interval: u64,
    /// Hard ceiling on steps for energy-terminated runs. A laden agent never
    /// dies, so a run where no deposit site is reachable would otherwise not
    /// end.
    pub step_cap: u64,
    pub seed: u64,
    pub init_layout: InitLayout,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            board_width: DEFAULT_BOARD_SIDE,
            board_height: DEFAULT_BOARD_SIDE,
            count_small: 15,
            count_medium: 15,
            count_large: 15,
            agent_count: 6,
            initial_energy: 1500.0,
            bonus: DEFAULT_BONUS,
            penalty: DEFAULT_PENALTY,
            p_max: DEFAULT_P_MAX,
            p_min: DEFAULT_P_MIN,
            delay_reset: DEFAULT_DELAY_RESET,
            step_length: DEFAULT_STEP_LENGTH,
            agent_radius: DEFAULT_AGENT_RADIUS,
            termination: Termination::EnergyExhaustion,
            penalty_mode: PenaltyMode::Proportional,
            placement_policy: PlacementPolicy::Score,
            sample_interval: 0,
            step_cap: DEFAULT_STEP_CAP,
            seed: 1,
            init_layout: InitLayout::RandomUniform,
        }
    }
}

impl SimConfig {
    /// 40 small, 20 medium and 10 large objects with 10 agents.
    pub fn mixed() -> Self {
        SimConfig {
            count_small: 40,
            count_medium: 20,
            count_large: 10,
            agent_count: 10,
            initial_energy: 750.0,
            ..SimConfig::default()
        }
    }

    pub fn count_of(&self, class: SizeClass) -> usize {
        match class {
            SizeClass::Small => self.count_small,
            SizeClass::Medium => self.count_medium,
            SizeClass::Large => self.count_large,
        }
    }

    pub fn object_count(&self) -> usize {
        self.count_small + self.count_medium + self.count_large
    }

    pub fn board_area(&self) -> f64 {
        self.board_width * self.board_height
    }

    /// Sum of object disc areas.
    pub fn object_area(&self) -> f64 {
        SizeClass::ALL
            .iter()
            .map(|c| self.count_of(*c) as f64 * PI * c.radius() * c.radius())
            .sum()
    }

    pub fn validate(&self) -> ValidationResult {
        validate_config(self)
    }
}

/// One violated configuration constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

impl Violation {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        Violation {
            field,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub type ValidationResult = Result<(), Vec<Violation>>;

/// Checks every configuration constraint and reports all violations at once.
pub fn validate_config(config: &SimConfig) -> ValidationResult {
    let mut out = Vec::new();
    let positive = |v: f64| v.is_finite() && v > 0.0;

    if !positive(config.board_width) {
        out.push(Violation::new("board_width", "must be positive"));
    }
    if !positive(config.board_height) {
        out.push(Violation::new("board_height", "must be positive"));
    }
    if config.agent_count < 1 {
        out.push(Violation::new("agent_count", "at least one agent is required"));
    }
    if !config.initial_energy.is_finite() {
        out.push(Violation::new("initial_energy", "must be finite"));
    }
    if !config.bonus.is_finite() {
        out.push(Violation::new("bonus", "must be finite"));
    }
    if !config.penalty.is_finite() {
        out.push(Violation::new("penalty", "must be finite"));
    }
    if !(config.p_min.is_finite() && config.p_min >= 0.0) {
        out.push(Violation::new("p_min", "must be non-negative"));
    }
    if !config.p_max.is_finite() {
        out.push(Violation::new("p_max", "must be finite"));
    }
    if !(config.p_min < config.p_max) {
        out.push(Violation::new("p_min", "p_min < p_max is required"));
    }
    if !positive(config.step_length) {
        out.push(Violation::new("step_length", "must be positive"));
    }
    if !(config.agent_radius.is_finite() && config.agent_radius >= 0.0) {
        out.push(Violation::new("agent_radius", "must be non-negative"));
    }
    if let PenaltyMode::Fixed(v) = config.penalty_mode {
        if !(v.is_finite() && v >= 0.0) {
            out.push(Violation::new("penalty_mode", "fixed cost must be non-negative"));
        }
    }
    if config.termination == Termination::EnergyExhaustion {
        // Without a positive drain (or without anything to pick up) agents never die.
        if config.object_count() == 0 {
            out.push(Violation::new(
                "termination",
                "energy termination needs at least one object",
            ));
        }
        if config.penalty_mode == PenaltyMode::Fixed(0.0) {
            out.push(Violation::new(
                "penalty_mode",
                "a zero fixed cost never exhausts energy; use a step limit",
            ));
        }
    }
    if let InitLayout::PreSortedPiles { centers, spread } = &config.init_layout {
        if !positive(*spread) {
            out.push(Violation::new("init_layout", "pile spread must be positive"));
        }
        for c in centers {
            if !(c.x >= 0.0 && c.x <= config.board_width && c.y >= 0.0 && c.y <= config.board_height) {
                out.push(Violation::new("init_layout", "pile center lies outside the board"));
            }
        }
    }
    if positive(config.board_width) && positive(config.board_height) {
        let area = config.object_area();
        let limit = 0.5 * config.board_area();
        if area >= limit {
            out.push(Violation::new(
                "board_width",
                format!("packing density: object area {area:.2} exceeds half the board area {limit:.2}"),
            ));
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Complete simulation state.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub objects: Vec<ObjectState>,
    pub agents: Vec<AgentState>,
    /// Agent ticks executed so far.
    pub step_count: u64,
}

impl WorldState {
    pub fn on_board(&self) -> impl Iterator<Item = &ObjectState> {
        self.objects.iter().filter(|o| o.on_board)
    }

    pub fn on_board_objects(&self) -> Vec<ObjectState> {
        self.on_board().cloned().collect()
    }

    pub fn carried_count(&self) -> usize {
        self.agents.iter().filter(|a| a.carried.is_some()).count()
    }

    pub fn live_agents(&self) -> usize {
        self.agents.iter().filter(|a| a.alive).count()
    }
}
