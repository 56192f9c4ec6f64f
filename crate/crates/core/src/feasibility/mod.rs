//! Feasible driver/rider-set matches and the hypergraph they form.
//!
//! A first-mile driver picks up its riders at their origins, drops all of
//! them at one station and continues to its own destination; each rider then
//! rides transit onwards. Last-mile is the mirror image: riders ride transit
//! to one station, the driver collects them there and drops each at home.

mod context;
mod enumerate;
mod hypergraph;

use serde::{Deserialize, Serialize};

use crate::model::{Driver, DriverId, DriverKind, Instance, Location, Rider, RiderId, Seconds};

pub use context::MatchContext;
pub use enumerate::{enumerate_hypergraph, enumerate_naive, enumerate_with};
pub use hypergraph::{
    DriverVertex, HyperEdge, Hypergraph, HypergraphError, HypergraphStats, RiderVertex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopKind {
    DriverOrigin,
    Pickup(RiderId),
    Station,
    Dropoff(RiderId),
    DriverDestination,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RouteStop {
    pub kind: StopKind,
    pub location: Location,
    /// Time the driver is at this stop in the latest-departure schedule.
    pub time: Seconds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiderService {
    pub rider: RiderId,
    pub pickup: Seconds,
    pub transit_board: Seconds,
    pub arrive: Seconds,
}

/// A driver serving a rider set along one canonical route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleMatch {
    pub driver: DriverId,
    /// Sorted by id.
    pub riders: Vec<RiderId>,
    pub station: Location,
    pub route: Vec<RouteStop>,
    pub route_distance: u64,
    /// Pure driving time; the driver leaves as late as the schedule allows.
    pub route_duration: Seconds,
    pub incurred_distance: u64,
    /// Same order as `riders`.
    pub service: Vec<RiderService>,
}

impl FeasibleMatch {
    pub fn service_of(&self, r: RiderId) -> Option<&RiderService> {
        self.service.iter().find(|s| s.rider == r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeasibilityError {
    #[error("personal route of {route} m is shorter than the fastest path of {fp} m")]
    NegativeDetour { route: u64, fp: u64 },
}

/// Detour beyond the fastest path for personal drivers, full route for
/// designated drivers.
pub fn incurred_travel_distance(
    driver: &Driver,
    route_distance: u64,
    fp_distance: u64,
) -> Result<u64, FeasibilityError> {
    match driver.kind {
        DriverKind::Designated => Ok(route_distance),
        DriverKind::Personal => {
            route_distance
                .checked_sub(fp_distance)
                .ok_or(FeasibilityError::NegativeDetour {
                    route: route_distance,
                    fp: fp_distance,
                })
        }
    }
}

/// Best feasible match of `driver` with exactly `riders`, or `None`.
///
/// Builds a fresh [`MatchContext`]; use the context directly for repeated
/// queries.
pub fn check_feasible_match(
    instance: &Instance,
    driver: &Driver,
    riders: &[&Rider],
) -> Option<FeasibleMatch> {
    MatchContext::new(instance).check(driver, riders)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::MatchType;

    #[test]
    fn incurred_distance_by_kind() {
        let v = line_instance().network.vertices;
        let p = driver(1, DriverKind::Personal, MatchType::FirstMile, v[0], v[4]);
        let d = driver(2, DriverKind::Designated, MatchType::FirstMile, v[0], v[0]);
        assert_eq!(incurred_travel_distance(&p, 1200, 1000), Ok(200));
        assert_eq!(incurred_travel_distance(&d, 1200, 999_999), Ok(1200));
        assert_eq!(incurred_travel_distance(&p, 1000, 1000), Ok(0));
        assert_eq!(
            incurred_travel_distance(&p, 900, 1000),
            Err(FeasibilityError::NegativeDetour {
                route: 900,
                fp: 1000
            })
        );
    }
}
