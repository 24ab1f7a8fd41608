//! Uniform grid over the board for neighbour queries on on-board objects.
//!
//! Each object is bucketed by its center. A query for everything within edge
//! distance `r` of a point scans the cells overlapping the square of half-side
//! `r + max_radius` around it, so no object whose disc reaches the query disc
//! is missed.

use thiserror::Error;

use crate::model::{ObjectState, Point};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("stale spatial index: holds {indexed} objects but {on_board} are on the board")]
    Stale { indexed: usize, on_board: usize },
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    position: Point,
    radius: f64,
    cell: usize,
}

#[derive(Clone, Debug)]
pub struct SpatialIndex {
    cell_size: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<usize>>,
    // Indexed by object id.
    entries: Vec<Option<Entry>>,
    max_radius: f64,
    len: usize,
}

impl SpatialIndex {
    pub fn new(width: f64, height: f64, cell_size: f64, max_radius: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        let cols = ((width / cell_size).ceil() as usize).max(1);
        let rows = ((height / cell_size).ceil() as usize).max(1);
        SpatialIndex {
            cell_size,
            cols,
            rows,
            cells: vec![Vec::new(); cols * rows],
            entries: Vec::new(),
            max_radius,
            len: 0,
        }
    }

    /// Indexes every on-board object of `objects`.
    pub fn from_objects(
        width: f64,
        height: f64,
        cell_size: f64,
        max_radius: f64,
        objects: &[ObjectState],
    ) -> Self {
        let mut index = SpatialIndex::new(width, height, cell_size, max_radius);
        for o in objects.iter().filter(|o| o.on_board) {
            index.insert(o.id, o.position, o.radius());
        }
        index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn contains(&self, id: usize) -> bool {
        matches!(self.entries.get(id), Some(Some(_)))
    }

    fn col_of(&self, x: f64) -> usize {
        ((x / self.cell_size).floor().max(0.0) as usize).min(self.cols - 1)
    }

    fn row_of(&self, y: f64) -> usize {
        ((y / self.cell_size).floor().max(0.0) as usize).min(self.rows - 1)
    }

    /// Inserts or moves object `id`.
    pub fn insert(&mut self, id: usize, position: Point, radius: f64) {
        assert!(radius <= self.max_radius, "object radius exceeds the index bound");
        self.remove(id);
        if self.entries.len() <= id {
            self.entries.resize(id + 1, None);
        }
        let cell = self.row_of(position.y) * self.cols + self.col_of(position.x);
        self.cells[cell].push(id);
        self.entries[id] = Some(Entry {
            position,
            radius,
            cell,
        });
        self.len += 1;
    }

    /// Removes object `id`; returns whether it was present.
    pub fn remove(&mut self, id: usize) -> bool {
        let Some(entry) = self.entries.get_mut(id).and_then(Option::take) else {
            return false;
        };
        let bucket = &mut self.cells[entry.cell];
        let pos = bucket.iter().position(|&x| x == id).expect("entry is in its cell");
        bucket.swap_remove(pos);
        self.len -= 1;
        true
    }

    /// Calls `f(id, center, radius)` for every object whose disc comes within
    /// edge distance `reach` of `position`. Visit order is unspecified.
    #[inline]
    pub fn for_each_within<F: FnMut(usize, Point, f64)>(&self, position: Point, reach: f64, mut f: F) {
        let span = reach + self.max_radius;
        let c0 = self.col_of(position.x - span);
        let c1 = self.col_of(position.x + span);
        let r0 = self.row_of(position.y - span);
        let r1 = self.row_of(position.y + span);
        for row in r0..=r1 {
            for col in c0..=c1 {
                for &id in &self.cells[row * self.cols + col] {
                    let e = self.entries[id].as_ref().expect("bucketed ids have entries");
                    // Cheap reject first; the exact test matches a plain linear scan bit for bit.
                    let limit = reach + e.radius + 1e-6;
                    if e.position.distance_sq(position) > limit * limit {
                        continue;
                    }
                    if e.position.distance(position) - e.radius <= reach {
                        f(id, e.position, e.radius);
                    }
                }
            }
        }
    }
}

/// Ids (ascending) of on-board objects whose edge lies within `radius` of
/// `position`, i.e. `|center - position| - object_radius <= radius`.
///
/// Fails when the index does not hold exactly the on-board objects' count.
pub fn neighbors_within(
    position: Point,
    radius: f64,
    index: &SpatialIndex,
    objects: &[ObjectState],
) -> Result<Vec<usize>, IndexError> {
    let on_board = objects.iter().filter(|o| o.on_board).count();
    if on_board != index.len() {
        return Err(IndexError::Stale {
            indexed: index.len(),
            on_board,
        });
    }
    let mut out = Vec::new();
    index.for_each_within(position, radius, |id, _, _| out.push(id));
    out.sort_unstable();
    Ok(out)
}
