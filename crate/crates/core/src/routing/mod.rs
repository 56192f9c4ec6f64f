//! Road shortest paths and scheduled public-transit journeys.

mod road;
mod transit;

use serde::{Deserialize, Serialize};

use crate::model::{Location, Seconds, VertexId};

pub use road::{shortest_path, RoadGraph, SpTree};
pub use transit::{earliest_arrival_journey, TransitIndex};

/// Walking speed in meters per second.
pub const WALK_SPEED: f64 = 1.4;
/// Maximum total walking per transit journey, in meters.
pub const WALK_CAP_METERS: u32 = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadEdge {
    pub from: VertexId,
    pub to: VertexId,
    pub distance_meters: u32,
    pub travel_seconds: u32,
}

impl RoadEdge {
    pub fn new(from: VertexId, to: VertexId, distance_meters: u32, travel_seconds: u32) -> Self {
        Self {
            from,
            to,
            distance_meters,
            travel_seconds,
        }
    }
}

/// Directed road graph with planar vertex positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadNetwork {
    pub vertices: Vec<Location>,
    pub edges: Vec<RoadEdge>,
}

impl RoadNetwork {
    pub fn vertex(&self, id: VertexId) -> Option<&Location> {
        self.vertices.iter().find(|v| v.vertex_id == id)
    }

    /// Axis-aligned bounding box `(min_x, min_y, max_x, max_y)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        let mut bb = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for v in &self.vertices {
            bb.0 = bb.0.min(v.coord.0);
            bb.1 = bb.1.min(v.coord.1);
            bb.2 = bb.2.max(v.coord.0);
            bb.3 = bb.3.max(v.coord.1);
        }
        bb
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopEvent {
    pub station: Location,
    pub arrival: Seconds,
    pub departure: Seconds,
}

impl StopEvent {
    pub fn new(station: Location, arrival: Seconds, departure: Seconds) -> Self {
        Self {
            station,
            arrival,
            departure,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trip {
    pub id: u32,
    pub stops: Vec<StopEvent>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransitTimetable {
    pub trips: Vec<Trip>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathResult {
    pub distance_meters: u64,
    pub travel_seconds: u64,
    pub path: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Leg {
    Walk {
        from: Location,
        to: Location,
        seconds: Seconds,
        meters: u32,
    },
    Ride {
        trip: u32,
        board: Location,
        alight: Location,
        depart: Seconds,
        arrive: Seconds,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Journey {
    pub legs: Vec<Leg>,
    pub depart: Seconds,
    pub arrive: Seconds,
}

impl Journey {
    pub fn duration(&self) -> Seconds {
        self.arrive - self.depart
    }

    pub fn walk_meters(&self) -> u32 {
        self.legs
            .iter()
            .map(|l| match l {
                Leg::Walk { meters, .. } => *meters,
                Leg::Ride { .. } => 0,
            })
            .sum()
    }

    pub fn rides(&self) -> usize {
        self.legs
            .iter()
            .filter(|l| matches!(l, Leg::Ride { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RoutingError {
    #[error("vertex {0} is not in the road network")]
    UnknownVertex(VertexId),
    #[error("no road path from {from} to {to}")]
    Unreachable { from: VertexId, to: VertexId },
    #[error("no transit journey from {from} to {to} departing at {depart}")]
    NoJourney {
        from: VertexId,
        to: VertexId,
        depart: Seconds,
    },
}

/// Straight-line walking distance, rounded up to whole meters.
pub fn walk_meters(a: &Location, b: &Location) -> u32 {
    a.euclid(b).ceil() as u32
}

/// Walking time for `meters`, rounded up to whole seconds.
pub fn walk_seconds(meters: u32) -> Seconds {
    (meters as f64 / WALK_SPEED).ceil() as Seconds
}
