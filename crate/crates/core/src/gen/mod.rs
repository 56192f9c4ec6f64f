//! Seeded synthetic instances: grid road networks with a lattice of transit
//! lines, intervals of riders and drivers, and hypergraphs built from
//! 3-dimensional matching instances.

mod interval;
mod network;
mod random_graph;
mod tdm;

use serde::{Deserialize, Serialize};

use crate::model::Seconds;

pub use interval::gen_interval_instance;
pub use network::{gen_network, gen_stations, gen_timetable};
pub use random_graph::{random_hypergraph, RandomGraphConfig};
pub use tdm::{brute_force_3dm, gen_3dm_hypergraph, random_3dm, ThreeDM};

pub const MINUTE: Seconds = 60;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator configuration: {0}")]
    InvalidConfig(String),
    #[error("gave up after {0} consecutive rejected rider candidates")]
    GenerationExhausted(usize),
}

/// Rider candidates rejected in a row before generation gives up.
pub const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// The road network is a `grid_side × grid_side` lattice.
    pub grid_side: u32,
    /// Nominal edge length in meters, a multiple of 10.
    pub spacing_m: u32,
    /// Each edge is lengthened by up to this fraction of `spacing_m`.
    pub edge_jitter: f64,
    pub station_count: u32,
    pub transit_speed_mps: f64,
    /// Seconds a trip waits at each intermediate station.
    pub dwell_s: Seconds,
    pub trips_per_line: u32,
    pub headway_s: Seconds,
    pub riders: u32,
    /// Personal drivers generated per rider.
    pub personal_ratio: f64,
    /// Zones form a `zone_side × zone_side` partition of the grid.
    pub zone_side: u32,
    /// Origin zone probabilities, row-major from the south-west zone.
    pub departure_weights: Vec<f64>,
    /// Destination zone probabilities, same layout.
    pub arrival_weights: Vec<f64>,
    pub interval_s: Seconds,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            grid_side: 20,
            spacing_m: 500,
            edge_jitter: 0.2,
            station_count: 9,
            transit_speed_mps: 12.0,
            dwell_s: 20,
            trips_per_line: 40,
            headway_s: 300,
            riders: 30,
            personal_ratio: 1.0 / 3.0,
            zone_side: 3,
            departure_weights: vec![0.08, 0.12, 0.08, 0.14, 0.16, 0.14, 0.10, 0.10, 0.08],
            arrival_weights: vec![0.06, 0.08, 0.06, 0.10, 0.40, 0.10, 0.06, 0.08, 0.06],
            interval_s: 30 * MINUTE,
            seed: 1,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidConfig(m));
        if self.grid_side < 2 {
            return bad("grid_side must be at least 2".into());
        }
        if self.spacing_m == 0 || self.spacing_m % 10 != 0 {
            return bad("spacing_m must be a positive multiple of 10".into());
        }
        if !(0.0..=5.0).contains(&self.edge_jitter) {
            return bad("edge_jitter must lie in [0, 5]".into());
        }
        if self.station_count < 3 || self.station_count > self.grid_side * self.grid_side {
            return bad("station_count must be at least 3 and fit the grid".into());
        }
        if !(self.transit_speed_mps > 0.0) {
            return bad("transit_speed_mps must be positive".into());
        }
        if self.dwell_s < 0 || self.headway_s <= 0 || self.trips_per_line == 0 {
            return bad("trip schedule parameters must be positive".into());
        }
        if self.riders == 0 {
            return bad("riders must be positive".into());
        }
        if !(self.personal_ratio >= 0.0) {
            return bad("personal_ratio must be non-negative".into());
        }
        if self.zone_side == 0 || self.zone_side > self.grid_side {
            return bad("zone_side must lie in 1..=grid_side".into());
        }
        if self.interval_s <= 0 {
            return bad("interval_s must be positive".into());
        }
        let zones = (self.zone_side * self.zone_side) as usize;
        for (name, w) in [
            ("departure_weights", &self.departure_weights),
            ("arrival_weights", &self.arrival_weights),
        ] {
            if w.len() != zones {
                return bad(format!("{name} needs {zones} entries"));
            }
            if w.iter().any(|x| !(*x >= 0.0)) {
                return bad(format!("{name} must be non-negative"));
            }
            if (w.iter().sum::<f64>() - 1.0).abs() > 1e-6 {
                return bad(format!("{name} must sum to 1"));
            }
        }
        Ok(())
    }

    pub fn personal_drivers(&self) -> u32 {
        (self.riders as f64 * self.personal_ratio).round() as u32
    }
}
