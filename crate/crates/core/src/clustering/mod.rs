//! Spatial-temporal clustering of personal drivers and riders.
//!
//! Agents are binned by a grid cell (origin for first mile, destination for
//! last mile) and by the sector their other endpoint falls in as seen from
//! that cell. Within a bin, interval windows decide who travels together.
//! The resulting clusters are then merged, balanced and split, and
//! designated drivers are attached to the clusters of the riders they are
//! paired with. Each cluster is solved as an independent sub-instance.

mod allocate;
mod phase1;
mod refine;
mod solve;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::model::{Driver, DriverId, Location, MatchType, Rider, RiderId, Seconds};
use crate::routing::RoadNetwork;

pub use allocate::{allocate_designated, pair_designated, AllocationMode};
pub use phase1::build_clusters_phase1;
pub use refine::{imbalance, refine_clusters};
pub use solve::{build_clusters, solve_clustered, solve_with_clusters};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClusterError {
    #[error("degenerate interval window [{a}, {b}]")]
    DegenerateWindow { a: Seconds, b: Seconds },
    #[error("point ({x}, {y}) lies outside the grid")]
    OutOfBounds { x: f64, y: f64 },
    #[error("{drivers} designated drivers cannot be paired with {riders} riders")]
    CardinalityMismatch { drivers: usize, riders: usize },
    #[error("invalid cluster configuration: {0}")]
    Config(String),
}

/// Sub-interval of an agent's time window used to test temporal
/// compatibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalWindow {
    pub a: Seconds,
    pub b: Seconds,
}

impl IntervalWindow {
    pub fn new(a: Seconds, b: Seconds) -> Result<Self, ClusterError> {
        if a > b {
            return Err(ClusterError::DegenerateWindow { a, b });
        }
        Ok(Self { a, b })
    }

    /// Closed-interval overlap.
    pub fn overlaps(&self, other: &IntervalWindow) -> bool {
        self.a <= other.b && other.a <= self.b
    }
}

/// Either kind of clustered agent.
#[derive(Debug, Clone, Copy)]
pub enum Agent<'a> {
    Driver(&'a Driver),
    Rider(&'a Rider),
}

impl Agent<'_> {
    pub fn match_type(&self) -> MatchType {
        match self {
            Agent::Driver(d) => d.match_type,
            Agent::Rider(r) => r.match_type,
        }
    }

    fn earliest(&self) -> Seconds {
        match self {
            Agent::Driver(d) => d.earliest_departure,
            Agent::Rider(r) => r.earliest_departure,
        }
    }
}

fn round_half_up(x: f64) -> Seconds {
    (x + 0.5).floor() as Seconds
}

/// Interval window of an agent:
///
/// * FM driver `[α, β − z]`, LM driver `[α + 0.2 z, β − 0.3 z]`
/// * FM rider `[α, β − θ t̂]`, LM rider `[α + 0.25 θ t̂, β − 0.35 θ t̂]`
pub fn interval_window(agent: Agent) -> Result<IntervalWindow, ClusterError> {
    let (a, b) = match agent {
        Agent::Driver(d) => {
            let (al, be, z) = (
                d.earliest_departure as f64,
                d.latest_arrival as f64,
                d.detour_limit as f64,
            );
            match d.match_type {
                MatchType::FirstMile => (al, be - z),
                MatchType::LastMile => (al + 0.2 * z, be - 0.3 * z),
            }
        }
        Agent::Rider(r) => {
            let (al, be) = (r.earliest_departure as f64, r.latest_arrival as f64);
            let s = r.acceptance_threshold * r.transit_baseline as f64;
            match r.match_type {
                MatchType::FirstMile => (al, be - s),
                MatchType::LastMile => (al + 0.25 * s, be - 0.35 * s),
            }
        }
    };
    IntervalWindow::new(round_half_up(a), round_half_up(b))
}

/// [`interval_window`] with degenerate windows clamped to `[α, α]`.
pub fn window_or_clamped(agent: Agent) -> IntervalWindow {
    interval_window(agent).unwrap_or(IntervalWindow {
        a: agent.earliest(),
        b: agent.earliest(),
    })
}

/// Cell coordinate `(x, y)`, 1-based, `(1, 1)` at the top left.
pub type Cell = (u32, u32);

/// `m1 × m2` tiling of a bounding box. `x` grows to the east, `y` grows to
/// the south.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
    pub m1: u32,
    pub m2: u32,
}

impl Grid {
    pub fn new(bbox: (f64, f64, f64, f64), m1: u32, m2: u32) -> Result<Self, ClusterError> {
        if m1 == 0 || m2 == 0 {
            return Err(ClusterError::Config("grid dimensions must be positive".into()));
        }
        let (min_x, min_y, max_x, max_y) = bbox;
        if !(min_x <= max_x && min_y <= max_y) {
            return Err(ClusterError::Config("empty bounding box".into()));
        }
        Ok(Self {
            min_x,
            min_y,
            max_x,
            max_y,
            m1,
            m2,
        })
    }

    pub fn covering(net: &RoadNetwork, m1: u32, m2: u32) -> Result<Self, ClusterError> {
        Self::new(net.bounding_box(), m1, m2)
    }

    pub fn cell_width(&self) -> f64 {
        (self.max_x - self.min_x) / self.m1 as f64
    }

    pub fn cell_height(&self) -> f64 {
        (self.max_y - self.min_y) / self.m2 as f64
    }

    /// Cell containing `p`. Points on an inner boundary go to the cell with
    /// the larger index.
    pub fn locate_cell(&self, p: (f64, f64)) -> Result<Cell, ClusterError> {
        let (px, py) = p;
        if !(self.min_x..=self.max_x).contains(&px) || !(self.min_y..=self.max_y).contains(&py) {
            return Err(ClusterError::OutOfBounds { x: px, y: py });
        }
        let index = |offset: f64, size: f64, m: u32| -> u32 {
            if size <= 0.0 {
                return 1;
            }
            ((offset / size).floor() as u32 + 1).min(m)
        };
        Ok((
            index(px - self.min_x, self.cell_width(), self.m1),
            index(self.max_y - py, self.cell_height(), self.m2),
        ))
    }

    pub fn locate(&self, loc: &Location) -> Result<Cell, ClusterError> {
        self.locate_cell(loc.coord)
    }
}

/// At most two cells apart in Manhattan distance.
pub fn cells_adjacent(a: Cell, b: Cell) -> bool {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1) <= 2
}

/// Destination sector 1..=8 of `target` as seen from `center`.
///
/// Diagonal sectors 1..4 are the open quadrants (+,+), (−,+), (−,−), (+,−)
/// of `(dx, dy)` in cell coordinates; 5/6 are east/west, 7/8 south/north
/// (`dy > 0` / `dy < 0`). When both cells coincide, `fallback_bearing`
/// (planar radians, counter-clockwise from east) decides, each direction
/// owning a 45° wedge.
pub fn sector_of(center: Cell, target: Cell, fallback_bearing: f64) -> u8 {
    let dx = target.0 as i64 - center.0 as i64;
    let dy = target.1 as i64 - center.1 as i64;
    if dx == 0 && dy == 0 {
        let k = (fallback_bearing / (PI / 4.0)).round().rem_euclid(8.0) as i64;
        // planar north is negative cell dy
        let (sx, sy) = match k {
            0 => (1, 0),
            1 => (1, -1),
            2 => (0, -1),
            3 => (-1, -1),
            4 => (-1, 0),
            5 => (-1, 1),
            6 => (0, 1),
            _ => (1, 1),
        };
        return sign_sector(sx, sy);
    }
    sign_sector(dx.signum(), dy.signum())
}

fn sign_sector(sx: i64, sy: i64) -> u8 {
    match (sx, sy) {
        (1, 1) => 1,
        (-1, 1) => 2,
        (-1, -1) => 3,
        (1, -1) => 4,
        (1, 0) => 5,
        (-1, 0) => 6,
        (0, 1) => 7,
        _ => 8,
    }
}

/// Planar bearing from `a` to `b` in radians.
pub fn bearing(a: &Location, b: &Location) -> f64 {
    (b.coord.1 - a.coord.1).atan2(b.coord.0 - a.coord.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusterConfig {
    pub m1: u32,
    pub m2: u32,
    pub s_min: usize,
    pub s_max: usize,
    pub tau1: f64,
    pub tau2: f64,
    pub allocation: AllocationMode,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        Self {
            m1: 4,
            m2: 4,
            s_min: 4,
            s_max: 12,
            tau1: 1.0,
            tau2: 2.0,
            allocation: AllocationMode::Greedy,
        }
    }
}

impl ClusterConfig {
    /// Checks the parameter bounds for an instance with `riders` riders and
    /// `personal` personal drivers.
    pub fn validate(&self, riders: usize, personal: usize) -> Result<(), ClusterError> {
        let bad = |m: &str| Err(ClusterError::Config(m.into()));
        if self.m1 == 0 || self.m2 == 0 {
            return bad("m1 and m2 must be positive");
        }
        if self.s_min == 0 || self.s_min >= self.s_max {
            return bad("need 0 < s_min < s_max");
        }
        // split parts of a cluster just above s_max hold at least
        // (s_max + 1) / 2 members
        if self.s_min > self.s_max.div_ceil(2) {
            return bad("s_min may not exceed ceil(s_max / 2)");
        }
        if !(self.tau2 >= 1.0) {
            return bad("tau2 must be at least 1");
        }
        if !(self.tau1 > 0.0) {
            return bad("tau1 must be positive");
        }
        if personal > 0 && self.tau1 > riders as f64 / personal as f64 {
            return bad("tau1 may not exceed |R| / |Γ|");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: u32,
    pub match_type: MatchType,
    pub origin_cell: Cell,
    pub dest_sector: u8,
    /// Ascending ids.
    pub riders: Vec<RiderId>,
    /// Ascending ids.
    pub personal: Vec<DriverId>,
    /// Ascending ids.
    pub designated: Vec<DriverId>,
    /// Set when the cluster stayed below `s_min` for want of a neighbour.
    pub isolated: bool,
}

impl Cluster {
    /// `|R(C) ∪ Γ(C)|`; designated drivers are not counted.
    pub fn size(&self) -> usize {
        self.riders.len() + self.personal.len()
    }

    fn normalize(&mut self) {
        self.riders.sort_unstable();
        self.personal.sort_unstable();
        self.designated.sort_unstable();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub grid: Grid,
    pub clusters: Vec<Cluster>,
}

#[derive(Serialize)]
struct ClusterDoc<'a> {
    id: u32,
    match_type: MatchType,
    origin_cell: Cell,
    dest_sector: u8,
    size: usize,
    riders: &'a [RiderId],
    personal: &'a [DriverId],
    designated: &'a [DriverId],
    isolated: bool,
}

impl ClusterSet {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Cluster holding rider `r`.
    pub fn cluster_of_rider(&self, r: RiderId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.riders.binary_search(&r).is_ok())
    }

    /// Renumbers clusters 0.. in current order.
    fn renumber(&mut self) {
        for (i, c) in self.clusters.iter_mut().enumerate() {
            c.id = i as u32;
            c.normalize();
        }
    }

    pub fn to_json(&self) -> String {
        let docs: Vec<ClusterDoc> = self
            .clusters
            .iter()
            .map(|c| ClusterDoc {
                id: c.id,
                match_type: c.match_type,
                origin_cell: c.origin_cell,
                dest_sector: c.dest_sector,
                size: c.size(),
                riders: &c.riders,
                personal: &c.personal,
                designated: &c.designated,
                isolated: c.isolated,
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("cluster serialization is infallible")
    }
}
