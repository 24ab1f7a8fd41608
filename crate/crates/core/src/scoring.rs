//! Placement scores.
//!
//! The score of placing an object of size `s` at a point is the sum, over
//! every other on-board object, of a pairwise quality term: the penalty when
//! the neighbour lies within `p_min * s` of the object's edge, the bonus when
//! it lies within `p_max * s`, and zero otherwise. Band tests are closed
//! (`<=`).
//!
//! The perimeters belong to the evaluated object alone. They are measured
//! outward from its edge and a neighbour counts by its center, so a large
//! object next to a small one sees the small one at a different distance than
//! the small one sees it. Overlap tests elsewhere use the full edge-to-edge
//! gap ([`edge_distance`]).

use crate::model::{ObjectState, Point, SimConfig, SizeClass, MAX_OBJECT_RADIUS};
use crate::spatial::SpatialIndex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreParams {
    pub bonus: f64,
    pub penalty: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams::from(&SimConfig::default())
    }
}

impl From<&SimConfig> for ScoreParams {
    fn from(c: &SimConfig) -> Self {
        ScoreParams {
            bonus: c.bonus,
            penalty: c.penalty,
            p_min: c.p_min,
            p_max: c.p_max,
        }
    }
}

impl ScoreParams {
    /// Widest edge distance at which any neighbour can still contribute.
    pub fn reach(&self, class: SizeClass) -> f64 {
        self.p_max.max(self.p_min) * class.size()
    }

    /// Grid cell size that keeps every scoring query within a 3x3 block.
    pub fn index_cell_size(&self) -> f64 {
        self.reach(SizeClass::Large) + 2.0 * MAX_OBJECT_RADIUS
    }
}

/// Gap between two discs, zero when they touch or overlap.
pub fn edge_distance(a: Point, radius_a: f64, b: Point, radius_b: f64) -> f64 {
    (a.distance(b) - radius_a - radius_b).max(0.0)
}

/// Distance from the edge of a disc of radius `radius` at `from` to the point
/// `to`, zero when `to` lies inside the disc.
pub fn perimeter_distance(from: Point, radius: f64, to: Point) -> f64 {
    (from.distance(to) - radius).max(0.0)
}

/// Quality of placing an object of class `i_class` at `i_pos` next to a
/// neighbour centered at `j_pos`.
#[inline]
pub fn quality(params: &ScoreParams, i_pos: Point, i_class: SizeClass, j_pos: Point) -> f64 {
    let s = i_class.size();
    let d = perimeter_distance(i_pos, i_class.radius(), j_pos);
    if d <= params.p_min * s {
        params.penalty
    } else if d <= params.p_max * s {
        params.bonus
    } else {
        0.0
    }
}

/// Where an object would be placed, and which object (itself, typically) to
/// leave out of its neighbourhood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlacementQuery {
    pub position: Point,
    pub size_class: SizeClass,
    pub excluded_object_id: Option<usize>,
}

impl PlacementQuery {
    /// Query for an on-board object at its current position.
    pub fn for_object(o: &ObjectState) -> Self {
        PlacementQuery {
            position: o.position,
            size_class: o.size_class,
            excluded_object_id: Some(o.id),
        }
    }
}

/// Linear scan over every on-board object.
pub fn placement_score(params: &ScoreParams, query: &PlacementQuery, objects: &[ObjectState]) -> f64 {
    objects
        .iter()
        .filter(|o| o.on_board && Some(o.id) != query.excluded_object_id)
        .map(|o| quality(params, query.position, query.size_class, o.position))
        .sum()
}

/// Same sum as [`placement_score`], visiting only objects the index reports
/// as close enough to contribute.
#[inline]
pub fn placement_score_indexed(params: &ScoreParams, query: &PlacementQuery, index: &SpatialIndex) -> f64 {
    // Every neighbour whose center is within this distance has its edge within it too.
    let reach = params.reach(query.size_class) + query.size_class.radius();
    let mut score = 0.0;
    index.for_each_within(query.position, reach, |id, pos, _| {
        if Some(id) != query.excluded_object_id {
            score += quality(params, query.position, query.size_class, pos);
        }
    });
    score
}
