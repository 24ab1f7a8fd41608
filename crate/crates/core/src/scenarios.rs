//! Initial configurations: uniformly scattered objects, or one pile per size
//! class.

use std::f64::consts::TAU;

use rand::Rng as _;
use thiserror::Error;

use crate::model::{AgentState, InitLayout, ObjectState, Point, SimConfig, SizeClass, WorldState};
use crate::rng::Rng;

/// Rejections tolerated per object before giving up.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("could not place {class} object {id} without overlap after {attempts} attempts")]
    PlacementFailed {
        id: usize,
        class: SizeClass,
        attempts: usize,
    },
}

/// A cluster of same-size objects scattered uniformly in a disc.
#[derive(Clone, Debug, PartialEq)]
pub struct PileSpec {
    pub center: Point,
    pub size_class: SizeClass,
    pub count: usize,
    /// Radius of the disc the centers are drawn from.
    pub spread: f64,
}

/// Object ids run small, then medium, then large.
fn object_classes(config: &SimConfig) -> Vec<SizeClass> {
    SizeClass::ALL
        .iter()
        .flat_map(|&c| std::iter::repeat(c).take(config.count_of(c)))
        .collect()
}

fn overlaps(placed: &[ObjectState], p: Point, r: f64) -> bool {
    placed
        .iter()
        .any(|o| o.position.distance(p) - o.radius() - r < 0.0)
}

fn inside(config: &SimConfig, p: Point, r: f64) -> bool {
    p.x - r >= 0.0 && p.x + r <= config.board_width && p.y - r >= 0.0 && p.y + r <= config.board_height
}

fn place_agents(config: &SimConfig, rng: &mut Rng) -> Vec<AgentState> {
    (0..config.agent_count)
        .map(|id| {
            let p = Point::new(
                rng.gen::<f64>() * config.board_width,
                rng.gen::<f64>() * config.board_height,
            );
            AgentState::new(id, p, config.initial_energy)
        })
        .collect()
}

/// Places `objects[i]` for each index in `order`, drawing candidate centers
/// from `sample` until one fits.
fn place_objects<F>(
    config: &SimConfig,
    classes: &[SizeClass],
    order: &[usize],
    rng: &mut Rng,
    mut sample: F,
) -> Result<Vec<ObjectState>, LayoutError>
where
    F: FnMut(usize, &mut Rng) -> Point,
{
    let mut placed: Vec<ObjectState> = Vec::with_capacity(classes.len());
    for &id in order {
        let class = classes[id];
        let r = class.radius();
        let mut found = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = sample(id, rng);
            if inside(config, p, r) && !overlaps(&placed, p, r) {
                found = Some(p);
                break;
            }
        }
        let Some(p) = found else {
            return Err(LayoutError::PlacementFailed {
                id,
                class,
                attempts: MAX_PLACEMENT_ATTEMPTS,
            });
        };
        placed.push(ObjectState::new(id, class, p));
    }
    placed.sort_by_key(|o| o.id);
    Ok(placed)
}

/// Largest objects first; they are the hardest to fit.
fn placement_order(classes: &[SizeClass]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..classes.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(classes[i]));
    order
}

/// Objects uniformly at random, fully inside the board and non-overlapping;
/// agents uniformly at random.
pub fn gen_random(config: &SimConfig, rng: &mut Rng) -> Result<WorldState, LayoutError> {
    let classes = object_classes(config);
    let order = placement_order(&classes);
    let (w, h) = (config.board_width, config.board_height);
    let objects = place_objects(config, &classes, &order, rng, |id, rng| {
        let r = classes[id].radius();
        Point::new(
            r + rng.gen::<f64>() * (w - 2.0 * r).max(0.0),
            r + rng.gen::<f64>() * (h - 2.0 * r).max(0.0),
        )
    })?;
    let agents = place_agents(config, rng);
    Ok(WorldState {
        objects,
        agents,
        step_count: 0,
    })
}

/// Objects drawn uniformly from each pile's disc. Pile objects take
/// consecutive ids in pile order. Agents are scattered over the whole board.
pub fn gen_presorted(piles: &[PileSpec], config: &SimConfig, rng: &mut Rng) -> Result<WorldState, LayoutError> {
    let mut classes = Vec::new();
    let mut pile_of = Vec::new();
    for (k, pile) in piles.iter().enumerate() {
        classes.extend(std::iter::repeat(pile.size_class).take(pile.count));
        pile_of.extend(std::iter::repeat(k).take(pile.count));
    }
    let order = placement_order(&classes);
    let objects = place_objects(config, &classes, &order, rng, |id, rng| {
        let pile = &piles[pile_of[id]];
        let rad = pile.spread * rng.gen::<f64>().sqrt();
        let a = TAU * rng.gen::<f64>();
        Point::new(pile.center.x + rad * a.cos(), pile.center.y + rad * a.sin())
    })?;
    let agents = place_agents(config, rng);
    Ok(WorldState {
        objects,
        agents,
        step_count: 0,
    })
}

/// Piles described by a pre-sorted layout; `None` for the random layout.
pub fn piles_for(config: &SimConfig) -> Option<Vec<PileSpec>> {
    match &config.init_layout {
        InitLayout::RandomUniform => None,
        InitLayout::PreSortedPiles { centers, spread } => Some(
            SizeClass::ALL
                .iter()
                .zip(centers)
                .map(|(&class, &center)| PileSpec {
                    center,
                    size_class: class,
                    count: config.count_of(class),
                    spread: spread * class.size(),
                })
                .collect(),
        ),
    }
}

/// Builds the starting world the configuration describes.
pub fn initial_world(config: &SimConfig, rng: &mut Rng) -> Result<WorldState, LayoutError> {
    match piles_for(config) {
        None => gen_random(config, rng),
        Some(piles) => gen_presorted(&piles, config, rng),
    }
}

/// Per-agent share of a fixed system energy.
pub fn net_energy_distribution(total_energy: f64, agent_count: usize) -> f64 {
    assert!(agent_count >= 1, "at least one agent is required");
    total_energy / agent_count as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cluster_fraction;
    use crate::rng::RngStream;

    fn layout_rng(seed: u64) -> Rng {
        RngStream::new(seed, 0).layout()
    }

    fn assert_no_overlap(objects: &[ObjectState]) {
        for (i, a) in objects.iter().enumerate() {
            for b in &objects[i + 1..] {
                assert!(a.position.distance(b.position) - a.radius() - b.radius() >= 0.0);
            }
        }
    }

    #[test]
    fn zero_objects() {
        let c = SimConfig {
            count_small: 0,
            count_medium: 0,
            count_large: 0,
            ..SimConfig::default()
        };
        let w = gen_random(&c, &mut layout_rng(1)).unwrap();
        assert!(w.objects.is_empty());
        assert_eq!(w.agents.len(), 6);
    }

    #[test]
    fn random_layout_is_valid_and_reproducible() {
        let c = SimConfig::default();
        let w = gen_random(&c, &mut layout_rng(1)).unwrap();
        assert_eq!(w.objects.len(), 45);
        assert_no_overlap(&w.objects);
        for o in &w.objects {
            assert!(inside(&c, o.position, o.radius()));
        }
        for (i, o) in w.objects.iter().enumerate() {
            assert_eq!(o.id, i);
        }
        assert_eq!(w, gen_random(&c, &mut layout_rng(1)).unwrap());
        assert_ne!(w, gen_random(&c, &mut layout_rng(2)).unwrap());
    }

    #[test]
    fn impossible_packing_fails() {
        let c = SimConfig {
            board_width: 7.0,
            board_height: 7.0,
            count_small: 0,
            count_medium: 0,
            count_large: 3,
            ..SimConfig::default()
        };
        assert!(matches!(
            gen_random(&c, &mut layout_rng(1)),
            Err(LayoutError::PlacementFailed { .. })
        ));
    }

    #[test]
    fn single_object_pile() {
        let c = SimConfig::default();
        let pile = PileSpec {
            center: Point::new(40.0, 40.0),
            size_class: SizeClass::Medium,
            count: 1,
            spread: 5.0,
        };
        let w = gen_presorted(&[pile], &c, &mut layout_rng(3)).unwrap();
        assert_eq!(w.objects.len(), 1);
        assert!(w.objects[0].position.distance(Point::new(40.0, 40.0)) <= 5.0);
    }

    #[test]
    fn default_piles_are_tight_and_separate() {
        let c = SimConfig {
            init_layout: InitLayout::presorted_default(100.0, 100.0),
            ..SimConfig::default()
        };
        let piles = piles_for(&c).unwrap();
        let a = initial_world(&c, &mut layout_rng(5)).unwrap();
        let b = initial_world(&c, &mut layout_rng(5)).unwrap();
        assert_eq!(a, b);
        assert_no_overlap(&a.objects);
        for pile in &piles {
            let members: Vec<ObjectState> = a
                .objects
                .iter()
                .filter(|o| o.size_class == pile.size_class)
                .cloned()
                .collect();
            assert_eq!(members.len(), 15);
            for o in &members {
                assert!(o.position.distance(pile.center) <= pile.spread + 1e-9);
            }
        }
        // Small pile forms one linked cluster.
        let small: Vec<ObjectState> = a.objects.iter().filter(|o| o.size_class == SizeClass::Small).cloned().collect();
        assert_eq!(cluster_fraction(&small).unwrap(), 1.0);
    }

    #[test]
    fn net_energy_examples() {
        assert_eq!(net_energy_distribution(9000.0, 1), 9000.0);
        assert_eq!(net_energy_distribution(9000.0, 45), 200.0);
        assert_eq!(net_energy_distribution(7500.0, 40), 187.5);
    }
}
