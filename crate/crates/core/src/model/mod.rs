//! Domain types shared by every stage of the matching pipeline.
//!
//! Times are integer seconds on a single simulation clock and distances are
//! integer meters. Coordinates are planar meters.

mod assumptions;
mod validate;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::routing::{RoadNetwork, TransitTimetable};

pub use assumptions::{check_assumption1, check_assumption2, check_assumption2_graph};
pub use validate::{validate_instance, Violation};

/// Seconds on the simulation clock.
pub type Seconds = i64;
/// Road-network vertex identifier.
pub type VertexId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DriverId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RiderId(pub u32);

impl fmt::Display for DriverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

impl fmt::Display for RiderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

/// A point of the road network together with its planar position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub vertex_id: VertexId,
    pub coord: (f64, f64),
}

impl Location {
    pub fn new(vertex_id: VertexId, x: f64, y: f64) -> Self {
        Self {
            vertex_id,
            coord: (x, y),
        }
    }

    /// Straight-line distance in meters.
    pub fn euclid(&self, other: &Location) -> f64 {
        let dx = self.coord.0 - other.coord.0;
        let dy = self.coord.1 - other.coord.1;
        (dx * dx + dy * dy).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatchType {
    FirstMile,
    LastMile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DriverKind {
    Personal,
    Designated,
}

/// Optimization goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Minimize the total incurred travel distance of assigned drivers.
    MinDist,
    /// Minimize the number of designated drivers used.
    MinNum,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::MinDist => "mindist",
            Problem::MinNum => "minnum",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mindist" | "min-dist" => Ok(Problem::MinDist),
            "minnum" | "min-num" => Ok(Problem::MinNum),
            other => Err(format!("unknown problem `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Driver {
    pub id: DriverId,
    pub kind: DriverKind,
    pub match_type: MatchType,
    pub origin: Location,
    pub destination: Location,
    pub earliest_departure: Seconds,
    pub latest_arrival: Seconds,
    pub capacity: u32,
    /// Extra driving time the driver accepts on top of the fastest path.
    /// Not used for designated drivers.
    pub detour_limit: Seconds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rider {
    pub id: RiderId,
    pub match_type: MatchType,
    pub origin: Location,
    pub destination: Location,
    pub earliest_departure: Seconds,
    pub latest_arrival: Seconds,
    /// Minimum fraction of the pure-transit duration the rider must save.
    pub acceptance_threshold: f64,
    /// Duration of the fastest pure-transit journey departing at
    /// `earliest_departure`.
    pub transit_baseline: Seconds,
}

impl Rider {
    /// Latest arrival at the destination that still honours both the
    /// time window and the acceptance threshold.
    pub fn arrival_deadline(&self) -> Seconds {
        let allowed = (1.0 - self.acceptance_threshold) * self.transit_baseline as f64;
        let allowed = (allowed + 1e-9).floor() as Seconds;
        self.latest_arrival
            .min(self.earliest_departure.saturating_add(allowed))
    }

    /// Seconds saved against the transit baseline when arriving at `arrive`.
    pub fn time_saved(&self, arrive: Seconds) -> Seconds {
        self.transit_baseline - (arrive - self.earliest_departure)
    }
}

/// One accumulation interval of requests and offers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub network: RoadNetwork,
    pub timetable: TransitTimetable,
    pub stations: Vec<Location>,
    pub personal_drivers: Vec<Driver>,
    pub designated_drivers: Vec<Driver>,
    pub riders: Vec<Rider>,
    pub interval: (Seconds, Seconds),
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceIoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Instance {
    pub fn drivers(&self) -> impl Iterator<Item = &Driver> {
        self.personal_drivers
            .iter()
            .chain(self.designated_drivers.iter())
    }

    pub fn driver(&self, id: DriverId) -> Option<&Driver> {
        self.drivers().find(|d| d.id == id)
    }

    pub fn rider(&self, id: RiderId) -> Option<&Rider> {
        self.riders.iter().find(|r| r.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceIoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, InstanceIoError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| InstanceIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<(), InstanceIoError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| InstanceIoError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// A copy restricted to the given agents, sharing network, timetable and
    /// stations.
    pub fn restricted(
        &self,
        personal: &[DriverId],
        designated: &[DriverId],
        riders: &[RiderId],
    ) -> Instance {
        Instance {
            network: self.network.clone(),
            timetable: self.timetable.clone(),
            stations: self.stations.clone(),
            personal_drivers: self
                .personal_drivers
                .iter()
                .filter(|d| personal.contains(&d.id))
                .cloned()
                .collect(),
            designated_drivers: self
                .designated_drivers
                .iter()
                .filter(|d| designated.contains(&d.id))
                .cloned()
                .collect(),
            riders: self
                .riders
                .iter()
                .filter(|r| riders.contains(&r.id))
                .cloned()
                .collect(),
            interval: self.interval,
        }
    }
}
