//! Structure quality: separation, shape, and radial displacement.
//!
//! All three are computed from each object's center-to-centroid distance,
//! where the centroid is the unweighted mean of the object centers.
//!
//! * Separation counts quartile violations. `N_s` is the number of small
//!   objects farther out than the lower quartile of the medium or the large
//!   class (the smaller of the two quartiles), `N_l` the number of large
//!   objects closer in than the upper quartile of the medium or the small
//!   class (the larger of the two), and `N_m` the medium objects beyond the
//!   large lower quartile plus those inside the small upper quartile.
//!   Comparisons are strict. `Se = 100 * (1 - (N_s + N_l + N_m / 2) / n)`.
//! * Shape averages three percentages: `100 * F_s`, where `F_s` is the
//!   largest connected component of small objects (linked at edge distance
//!   <= 2.5) over the small count, and one radial term per medium and large
//!   class, `100 * (1 - d / (n * r))` clamped to `[0, 100]`, where `r` is the
//!   class's mean distance and `d` the summed absolute deviation from it.
//! * Radial displacement is the five-number summary of each class's
//!   distances.
//!
//! Quartiles interpolate linearly between order statistics at zero-based
//! position `(k - 1) * p` of the sorted sample (Hyndman-Fan type 7).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ObjectState, Point, SizeClass};
use crate::scoring::edge_distance;

/// Small objects closer than this (edge to edge) are linked in the cluster graph.
pub const CLUSTER_LINK_DISTANCE: f64 = 2.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("metric undefined for an empty set")]
    Empty,
    #[error("metric undefined: no {0} objects")]
    EmptyClass(SizeClass),
    #[error("metric undefined: mean {0} radius is zero")]
    DegenerateRadius(SizeClass),
}

/// Five-number summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialDisplacement {
    pub small: BoxStats,
    pub medium: BoxStats,
    pub large: BoxStats,
}

impl RadialDisplacement {
    pub fn get(&self, class: SizeClass) -> &BoxStats {
        match class {
            SizeClass::Small => &self.small,
            SizeClass::Medium => &self.medium,
            SizeClass::Large => &self.large,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCounts {
    pub small_violations: usize,
    pub large_violations: usize,
    /// Before halving.
    pub medium_violations: usize,
    pub n: usize,
}

impl SeparationCounts {
    pub fn percent(&self) -> f64 {
        let bad = self.small_violations as f64
            + self.large_violations as f64
            + self.medium_violations as f64 / 2.0;
        100.0 * (1.0 - bad / self.n as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeTerms {
    pub cluster_fraction: f64,
    pub mean_radius_medium: f64,
    pub mean_radius_large: f64,
    pub deviation_medium: f64,
    pub deviation_large: f64,
    pub count_medium: usize,
    pub count_large: usize,
    /// Clamped radial percentages.
    pub term_medium: f64,
    pub term_large: f64,
}

impl ShapeTerms {
    pub fn percent(&self) -> f64 {
        (100.0 * self.cluster_fraction + self.term_medium + self.term_large) / 3.0
    }
}

/// Everything measured on one configuration. Field order is the JSON and CSV order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub separation_pct: f64,
    pub shape_pct: f64,
    pub cluster_fraction: f64,
    pub centroid: Point,
    pub count_small: usize,
    pub count_medium: usize,
    pub count_large: usize,
    pub small_violations: usize,
    pub large_violations: usize,
    pub medium_violations: usize,
    pub mean_radius_medium: f64,
    pub mean_radius_large: f64,
    pub deviation_medium: f64,
    pub deviation_large: f64,
    pub radial_displacement: RadialDisplacement,
}

impl MetricsReport {
    pub fn csv_header() -> String {
        let mut cols: Vec<String> = [
            "separation_pct",
            "shape_pct",
            "cluster_fraction",
            "centroid_x",
            "centroid_y",
            "count_small",
            "count_medium",
            "count_large",
            "small_violations",
            "large_violations",
            "medium_violations",
            "mean_radius_medium",
            "mean_radius_large",
            "deviation_medium",
            "deviation_large",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        for class in SizeClass::ALL {
            for stat in ["min", "q1", "median", "q3", "max"] {
                cols.push(format!("{class}_{stat}"));
            }
        }
        cols.join(",")
    }

    pub fn csv_row(&self) -> String {
        let mut cols = vec![
            self.separation_pct.to_string(),
            self.shape_pct.to_string(),
            self.cluster_fraction.to_string(),
            self.centroid.x.to_string(),
            self.centroid.y.to_string(),
            self.count_small.to_string(),
            self.count_medium.to_string(),
            self.count_large.to_string(),
            self.small_violations.to_string(),
            self.large_violations.to_string(),
            self.medium_violations.to_string(),
            self.mean_radius_medium.to_string(),
            self.mean_radius_large.to_string(),
            self.deviation_medium.to_string(),
            self.deviation_large.to_string(),
        ];
        for class in SizeClass::ALL {
            let b = self.radial_displacement.get(class);
            cols.extend([b.min, b.q1, b.median, b.q3, b.max].iter().map(f64::to_string));
        }
        cols.join(",")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn centroid(objects: &[ObjectState]) -> Result<Point, MetricsError> {
    if objects.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = objects.len() as f64;
    let (sx, sy) = objects
        .iter()
        .fold((0.0, 0.0), |(sx, sy), o| (sx + o.position.x, sy + o.position.y));
    Ok(Point::new(sx / n, sy / n))
}

fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match sorted.get(lo + 1) {
        Some(&next) if frac > 0.0 => sorted[lo] + frac * (next - sorted[lo]),
        _ => sorted[lo],
    }
}

pub fn quartiles(values: &[f64]) -> Result<BoxStats, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(BoxStats {
        min: v[0],
        q1: quantile_sorted(&v, 0.25),
        median: quantile_sorted(&v, 0.5),
        q3: quantile_sorted(&v, 0.75),
        max: v[v.len() - 1],
    })
}

/// Center-to-centroid distances, grouped by class (small, medium, large).
fn class_distances(objects: &[ObjectState], c: Point) -> [Vec<f64>; 3] {
    let mut out: [Vec<f64>; 3] = Default::default();
    for o in objects {
        out[o.size_class.index()].push(o.position.distance(c));
    }
    out
}

fn require_classes(dist: &[Vec<f64>; 3]) -> Result<(), MetricsError> {
    for class in SizeClass::ALL {
        if dist[class.index()].is_empty() {
            return Err(MetricsError::EmptyClass(class));
        }
    }
    Ok(())
}

fn separation_from(dist: &[Vec<f64>; 3]) -> Result<SeparationCounts, MetricsError> {
    require_classes(dist)?;
    let [s, m, l] = dist;
    let (qs, qm, ql) = (quartiles(s)?, quartiles(m)?, quartiles(l)?);
    let small_limit = qm.q1.min(ql.q1);
    let large_limit = qm.q3.max(qs.q3);
    let small_violations = s.iter().filter(|&&d| d > small_limit).count();
    let large_violations = l.iter().filter(|&&d| d < large_limit).count();
    let medium_violations = m.iter().filter(|&&d| d > ql.q1).count() + m.iter().filter(|&&d| d < qs.q3).count();
    Ok(SeparationCounts {
        small_violations,
        large_violations,
        medium_violations,
        n: s.len() + m.len() + l.len(),
    })
}

pub fn separation_counts(objects: &[ObjectState]) -> Result<SeparationCounts, MetricsError> {
    let c = centroid(objects)?;
    separation_from(&class_distances(objects, c))
}

/// Separation percentage; needs every class present.
pub fn separation(objects: &[ObjectState]) -> Result<f64, MetricsError> {
    Ok(separation_counts(objects)?.percent())
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }

    fn largest(&mut self) -> usize {
        let roots: Vec<usize> = (0..self.parent.len()).filter(|&i| self.find(i) == i).collect();
        roots.into_iter().map(|i| self.size[i]).max().unwrap_or(0)
    }
}

/// Largest linked group of the given objects over their count. Callers pass
/// the small objects.
pub fn cluster_fraction(small: &[ObjectState]) -> Result<f64, MetricsError> {
    if small.is_empty() {
        return Err(MetricsError::EmptyClass(SizeClass::Small));
    }
    let mut sets = DisjointSets::new(small.len());
    for i in 0..small.len() {
        for j in i + 1..small.len() {
            let (a, b) = (&small[i], &small[j]);
            if edge_distance(a.position, a.radius(), b.position, b.radius()) <= CLUSTER_LINK_DISTANCE {
                sets.union(i, j);
            }
        }
    }
    Ok(sets.largest() as f64 / small.len() as f64)
}

fn radial_term(dist: &[f64], class: SizeClass) -> Result<(f64, f64, f64), MetricsError> {
    let n = dist.len() as f64;
    let r = dist.iter().sum::<f64>() / n;
    if r <= 0.0 {
        return Err(MetricsError::DegenerateRadius(class));
    }
    let d: f64 = dist.iter().map(|x| (x - r).abs()).sum();
    let term = (100.0 * (1.0 - d / (n * r))).clamp(0.0, 100.0);
    Ok((r, d, term))
}

fn shape_from(objects: &[ObjectState], dist: &[Vec<f64>; 3]) -> Result<ShapeTerms, MetricsError> {
    require_classes(dist)?;
    let small: Vec<ObjectState> = objects
        .iter()
        .filter(|o| o.size_class == SizeClass::Small)
        .cloned()
        .collect();
    let cluster_fraction = cluster_fraction(&small)?;
    let (rm, dm, tm) = radial_term(&dist[SizeClass::Medium.index()], SizeClass::Medium)?;
    let (rl, dl, tl) = radial_term(&dist[SizeClass::Large.index()], SizeClass::Large)?;
    Ok(ShapeTerms {
        cluster_fraction,
        mean_radius_medium: rm,
        mean_radius_large: rl,
        deviation_medium: dm,
        deviation_large: dl,
        count_medium: dist[SizeClass::Medium.index()].len(),
        count_large: dist[SizeClass::Large.index()].len(),
        term_medium: tm,
        term_large: tl,
    })
}

pub fn shape_terms(objects: &[ObjectState]) -> Result<ShapeTerms, MetricsError> {
    let c = centroid(objects)?;
    shape_from(objects, &class_distances(objects, c))
}

/// Shape percentage; needs every class present and nonzero mean radii.
pub fn shape(objects: &[ObjectState]) -> Result<f64, MetricsError> {
    Ok(shape_terms(objects)?.percent())
}

fn radial_from(dist: &[Vec<f64>; 3]) -> Result<RadialDisplacement, MetricsError> {
    require_classes(dist)?;
    Ok(RadialDisplacement {
        small: quartiles(&dist[0])?,
        medium: quartiles(&dist[1])?,
        large: quartiles(&dist[2])?,
    })
}

pub fn radial_displacement(objects: &[ObjectState]) -> Result<RadialDisplacement, MetricsError> {
    let c = centroid(objects)?;
    radial_from(&class_distances(objects, c))
}

/// Full report over the on-board objects of `objects`.
pub fn assess(objects: &[ObjectState]) -> Result<MetricsReport, MetricsError> {
    let on_board: Vec<ObjectState> = objects.iter().filter(|o| o.on_board).cloned().collect();
    let c = centroid(&on_board)?;
    let dist = class_distances(&on_board, c);
    let sep = separation_from(&dist)?;
    let shape = shape_from(&on_board, &dist)?;
    let radial = radial_from(&dist)?;
    Ok(MetricsReport {
        separation_pct: sep.percent(),
        shape_pct: shape.percent(),
        cluster_fraction: shape.cluster_fraction,
        centroid: c,
        count_small: dist[0].len(),
        count_medium: dist[1].len(),
        count_large: dist[2].len(),
        small_violations: sep.small_violations,
        large_violations: sep.large_violations,
        medium_violations: sep.medium_violations,
        mean_radius_medium: shape.mean_radius_medium,
        mean_radius_large: shape.mean_radius_large,
        deviation_medium: shape.deviation_medium,
        deviation_large: shape.deviation_large,
        radial_displacement: radial,
    })
}
