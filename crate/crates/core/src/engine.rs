//! The simulation loop.
//!
//! Agents are ticked one at a time in id order, skipping the dead; one tick is
//! one step. A tick runs the first applicable rule:
//!
//! 1. out of energy and unladen: the agent dies (energy termination only);
//! 2. cooling down: the delay counter is decremented;
//! 3. unladen and standing on an object: the delay is reset, the object's
//!    placement score is computed, and the object is picked up if the score
//!    is below a uniform draw;
//! 4. laden and standing in free space: the score the carried object would
//!    have here is computed, and the object is deposited at the agent's
//!    position if the score exceeds a uniform draw (the delay is reset).
//!
//! Every surviving agent then moves `step_length` in a uniformly random
//! direction, reflecting off the walls.
//!
//! An agent stands on an object when it lies within `agent_radius` of the
//! object's edge; the nearest such object is chosen, lowest id on ties. Free space means the
//! carried object's disc would overlap no on-board object. A laden agent is
//! never removed, so every object is back on the board when an
//! energy-terminated run ends. An energy run also stops at `step_cap`: with as
//! many agents as objects every object can end up carried, leaving nothing to
//! deposit next to.
//!
//! Under a step limit agents never die; energy is still drawn down but only
//! bookkeeping. The run stops at the limit with objects still in transit, and
//! metrics cover the objects on the board.

use std::f64::consts::TAU;
use std::time::Instant;

use rand::Rng as _;
use thiserror::Error;

use crate::metrics::{assess, MetricsReport};
use crate::model::{
    validate_config, PenaltyMode, PlacementPolicy, Point, SimConfig, SizeClass, Termination, Violation,
    WorldState, MAX_OBJECT_RADIUS,
};
use crate::rng::RngStream;
use crate::scenarios::{initial_world, LayoutError};
use crate::scoring::{placement_score_indexed, quality, PlacementQuery, ScoreParams};
use crate::spatial::SpatialIndex;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid configuration: {}", join_violations(.0))]
    Config(Vec<Violation>),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error("world does not match configuration: {0}")]
    World(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// Energy an agent spends picking up an object of the given size.
pub fn pickup_cost(size: f64, mode: PenaltyMode) -> f64 {
    match mode {
        PenaltyMode::Proportional => size,
        PenaltyMode::Fixed(v) => v,
    }
}

/// Whether an agent at `agent` with reach `reach` stands on the disc of
/// radius `radius` at `center`.
pub fn is_collision(agent: Point, reach: f64, center: Point, radius: f64) -> bool {
    agent.distance(center) - radius <= reach
}

/// Pick up when the score falls below the draw.
pub fn pickup_decision(policy: PlacementPolicy, score: f64, u: f64) -> bool {
    match policy {
        PlacementPolicy::Score => score < u,
        PlacementPolicy::CoinFlip => u < 0.5,
    }
}

/// Deposit when the score exceeds the draw.
pub fn deposit_decision(policy: PlacementPolicy, score: f64, u: f64) -> bool {
    match policy {
        PlacementPolicy::Score => score > u,
        PlacementPolicy::CoinFlip => u < 0.5,
    }
}

/// Reflects a coordinate into `[0, limit]`.
fn reflect(mut v: f64, limit: f64) -> f64 {
    loop {
        if v < 0.0 {
            v = -v;
        } else if v > limit {
            v = 2.0 * limit - v;
        } else {
            return v;
        }
    }
}

/// What one tick did.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TickEvent {
    Died,
    CoolingDown,
    PickedUp { object: usize, score: f64 },
    PickupDeclined { object: usize, score: f64 },
    Deposited { object: usize, score: f64 },
    DepositDeclined { score: f64 },
    /// Laden, but the spot is occupied.
    Blocked,
    /// Unladen and not on any object.
    Wandered,
}

impl TickEvent {
    /// Whether a placement score was computed.
    pub fn evaluated(&self) -> bool {
        matches!(
            self,
            TickEvent::PickedUp { .. }
                | TickEvent::PickupDeclined { .. }
                | TickEvent::Deposited { .. }
                | TickEvent::DepositDeclined { .. }
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Terminated {
    EnergyExhaustion,
    StepLimit,
    /// An energy run hit `step_cap` with agents still alive.
    StepCap,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub initial_world: WorldState,
    pub final_world: WorldState,
    pub steps_executed: u64,
    /// Seconds spent in the simulation loop.
    pub wall_time: f64,
    /// `(step_count, report)` every `sample_interval` steps; none when a size
    /// class is empty and the metrics are undefined.
    pub samples: Vec<(u64, MetricsReport)>,
    pub terminated_by: Terminated,
}

pub struct Simulation {
    config: SimConfig,
    params: ScoreParams,
    world: WorldState,
    index: SpatialIndex,
    rng: RngStream,
    cursor: usize,
}

impl Simulation {
    /// Validates the configuration and lays out the initial world.
    pub fn new(config: SimConfig) -> Result<Self, EngineError> {
        validate_config(&config).map_err(EngineError::Config)?;
        let rng = RngStream::new(config.seed, config.agent_count);
        let world = initial_world(&config, &mut rng.layout())?;
        Simulation::with_rng(config, world, rng)
    }

    /// Starts from a prepared world.
    pub fn from_world(config: SimConfig, world: WorldState) -> Result<Self, EngineError> {
        validate_config(&config).map_err(EngineError::Config)?;
        let rng = RngStream::new(config.seed, world.agents.len());
        Simulation::with_rng(config, world, rng)
    }

    fn with_rng(config: SimConfig, world: WorldState, rng: RngStream) -> Result<Self, EngineError> {
        for (i, o) in world.objects.iter().enumerate() {
            if o.id != i {
                return Err(EngineError::World(format!("object at index {i} has id {}", o.id)));
            }
        }
        for (i, a) in world.agents.iter().enumerate() {
            if a.id != i {
                return Err(EngineError::World(format!("agent at index {i} has id {}", a.id)));
            }
            if let Some(c) = a.carried {
                if world.objects.get(c).map_or(true, |o| o.on_board) {
                    return Err(EngineError::World(format!("agent {i} carries an on-board or missing object")));
                }
            }
        }
        let params = ScoreParams::from(&config);
        let index = SpatialIndex::from_objects(
            config.board_width,
            config.board_height,
            params.index_cell_size(),
            MAX_OBJECT_RADIUS,
            &world.objects,
        );
        Ok(Simulation {
            config,
            params,
            world,
            index,
            rng,
            cursor: 0,
        })
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn index(&self) -> &SpatialIndex {
        &self.index
    }

    pub fn into_world(self) -> WorldState {
        self.world
    }

    fn energy_mode(&self) -> bool {
        self.config.termination == Termination::EnergyExhaustion
    }

    pub fn is_finished(&self) -> bool {
        match self.config.termination {
            Termination::EnergyExhaustion => {
                self.world.agents.iter().all(|a| !a.alive) || self.world.step_count >= self.config.step_cap
            }
            Termination::StepLimit(n) => self.world.step_count >= n || self.world.agents.is_empty(),
        }
    }

    /// Ticks the next live agent in round-robin order. Returns the agent id
    /// and what happened, or `None` once the run is over.
    pub fn step(&mut self) -> Option<(usize, TickEvent)> {
        if self.is_finished() {
            return None;
        }
        let n = self.world.agents.len();
        let id = (0..n)
            .map(|k| (self.cursor + k) % n)
            .find(|&i| self.world.agents[i].alive)?;
        self.cursor = (id + 1) % n;
        Some((id, self.agent_tick(id)))
    }

    /// Nearest on-board object within the agent's reach of `p` (edge
    /// distance), lowest id on ties.
    fn colliding_object(&self, p: Point) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        self.index.for_each_within(p, self.config.agent_radius, |id, center, radius| {
            let d = center.distance(p) - radius;
            let better = match best {
                None => true,
                Some((bd, bid)) => d < bd || (d == bd && id < bid),
            };
            if better {
                best = Some((d, id));
            }
        });
        best.map(|(_, id)| id)
    }

    /// Score a disc of class `class` would have at `p`, or `None` if it would
    /// overlap an on-board object. One grid pass serves both tests.
    fn deposit_score(&self, p: Point, class: SizeClass) -> Option<f64> {
        let r = class.radius();
        let reach = self.params.reach(class) + r;
        let mut score = 0.0;
        let mut free = true;
        self.index.for_each_within(p, reach, |_, center, radius| {
            let d = center.distance(p);
            if d - radius - r < 0.0 {
                free = false;
            }
            score += quality(&self.params, p, class, center);
        });
        free.then_some(score)
    }

    fn draw(&mut self, agent: usize) -> f64 {
        self.rng.agent(agent).gen::<f64>()
    }

    /// Executes one instruction block for agent `id`.
    ///
    /// # Panics
    /// If the agent is dead.
    pub fn agent_tick(&mut self, id: usize) -> TickEvent {
        assert!(self.world.agents[id].alive, "dead agents do not act");
        self.world.step_count += 1;
        let agent = &self.world.agents[id];
        let (pos, carried, energy, delay) = (agent.position, agent.carried, agent.energy, agent.delay);

        if self.energy_mode() && energy <= 0.0 && carried.is_none() {
            self.world.agents[id].alive = false;
            return TickEvent::Died;
        }

        let event = if delay > 0 {
            self.world.agents[id].delay -= 1;
            TickEvent::CoolingDown
        } else if let Some(obj) = carried {
            self.try_deposit(id, obj, pos)
        } else if let Some(obj) = self.colliding_object(pos) {
            self.try_pickup(id, obj)
        } else {
            TickEvent::Wandered
        };

        self.move_agent(id);
        event
    }

    fn try_pickup(&mut self, id: usize, obj: usize) -> TickEvent {
        self.world.agents[id].delay = self.config.delay_reset;
        let query = PlacementQuery::for_object(&self.world.objects[obj]);
        let score = placement_score_indexed(&self.params, &query, &self.index);
        let u = self.draw(id);
        if !pickup_decision(self.config.placement_policy, score, u) {
            return TickEvent::PickupDeclined { object: obj, score };
        }
        let o = &mut self.world.objects[obj];
        o.on_board = false;
        let cost = pickup_cost(o.size_class.size(), self.config.penalty_mode);
        self.index.remove(obj);
        let agent = &mut self.world.agents[id];
        agent.carried = Some(obj);
        agent.energy -= cost;
        TickEvent::PickedUp { object: obj, score }
    }

    fn try_deposit(&mut self, id: usize, obj: usize, pos: Point) -> TickEvent {
        // The carried object is off the board, so it never meets itself here.
        let class = self.world.objects[obj].size_class;
        let Some(score) = self.deposit_score(pos, class) else {
            return TickEvent::Blocked;
        };
        let u = self.draw(id);
        if !deposit_decision(self.config.placement_policy, score, u) {
            return TickEvent::DepositDeclined { score };
        }
        let o = &mut self.world.objects[obj];
        o.position = pos;
        o.on_board = true;
        self.index.insert(obj, pos, class.radius());
        let agent = &mut self.world.agents[id];
        agent.carried = None;
        agent.delay = self.config.delay_reset;
        TickEvent::Deposited { object: obj, score }
    }

    fn move_agent(&mut self, id: usize) {
        let angle = TAU * self.draw(id);
        let (w, h, step) = (self.config.board_width, self.config.board_height, self.config.step_length);
        let agent = &mut self.world.agents[id];
        let (s, c) = angle.sin_cos();
        agent.position = Point::new(
            reflect(agent.position.x + step * c, w),
            reflect(agent.position.y + step * s, h),
        );
        if let Some(obj) = agent.carried {
            self.world.objects[obj].position = agent.position;
        }
    }

    /// Runs to termination, sampling metrics every `sample_interval` steps.
    pub fn run_to_end(mut self) -> RunResult {
        let initial_world = self.world.clone();
        let interval = self.config.sample_interval;
        let mut samples = Vec::new();
        let start = Instant::now();
        while self.step().is_some() {
            if interval > 0 && self.world.step_count % interval == 0 {
                if let Ok(report) = assess(&self.world.objects) {
                    samples.push((self.world.step_count, report));
                }
            }
        }
        let wall_time = start.elapsed().as_secs_f64();
        let terminated_by = match self.config.termination {
            Termination::EnergyExhaustion if self.world.agents.iter().any(|a| a.alive) => Terminated::StepCap,
            Termination::EnergyExhaustion => Terminated::EnergyExhaustion,
            Termination::StepLimit(_) => Terminated::StepLimit,
        };
        RunResult {
            initial_world,
            steps_executed: self.world.step_count,
            final_world: self.world,
            wall_time,
            samples,
            terminated_by,
        }
    }
}

/// Runs one simulation from the layout the configuration describes.
pub fn run(config: &SimConfig) -> Result<RunResult, EngineError> {
    Ok(Simulation::new(config.clone())?.run_to_end())
}
