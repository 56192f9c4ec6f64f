use std::collections::HashSet;
use std::fmt;

use super::{Driver, DriverKind, Instance, Location, Rider};

/// One broken invariant, naming the offending agent (or structure) and field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub field: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.subject, self.field, self.message)
    }
}

struct Collector<'a> {
    vertices: HashSet<u32>,
    out: &'a mut Vec<Violation>,
}

impl Collector<'_> {
    fn push(&mut self, subject: String, field: &'static str, message: impl Into<String>) {
        self.out.push(Violation {
            subject,
            field,
            message: message.into(),
        });
    }

    fn location(&mut self, subject: &str, field: &'static str, loc: &Location) {
        if !self.vertices.contains(&loc.vertex_id) {
            self.push(
                subject.to_string(),
                field,
                format!("vertex {} is not in the road network", loc.vertex_id),
            );
        }
    }

    fn driver(&mut self, d: &Driver, expected: DriverKind) {
        let who = format!("driver {}", d.id);
        if d.kind != expected {
            self.push(
                who.clone(),
                "kind",
                format!("listed as {expected:?} but tagged {:?}", d.kind),
            );
        }
        if d.earliest_departure >= d.latest_arrival {
            self.push(
                who.clone(),
                "time_window",
                format!(
                    "earliest departure {} is not before latest arrival {}",
                    d.earliest_departure, d.latest_arrival
                ),
            );
        }
        if d.capacity < 1 {
            self.push(who.clone(), "capacity", "capacity must be at least 1");
        }
        if d.detour_limit < 0 {
            self.push(who.clone(), "detour_limit", "detour limit is negative");
        }
        self.location(&who, "origin", &d.origin);
        self.location(&who, "destination", &d.destination);
    }

    fn rider(&mut self, r: &Rider) {
        let who = format!("rider {}", r.id);
        if r.earliest_departure >= r.latest_arrival {
            self.push(
                who.clone(),
                "time_window",
                format!(
                    "earliest departure {} is not before latest arrival {}",
                    r.earliest_departure, r.latest_arrival
                ),
            );
        }
        let theta = r.acceptance_threshold;
        if !(theta > 0.0 && theta <= 1.0) {
            self.push(
                who.clone(),
                "acceptance_threshold",
                format!("theta {theta} outside (0, 1]"),
            );
        }
        if r.transit_baseline <= 0 {
            self.push(
                who.clone(),
                "transit_baseline",
                "transit baseline must be positive",
            );
        }
        if r.origin.vertex_id == r.destination.vertex_id {
            self.push(
                who.clone(),
                "destination",
                "origin and destination coincide",
            );
        }
        self.location(&who, "origin", &r.origin);
        self.location(&who, "destination", &r.destination);
    }
}

/// Lists every invariant violation of `instance`; an empty list means the
/// instance is well formed.
pub fn validate_instance(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut c = Collector {
        vertices: instance
            .network
            .vertices
            .iter()
            .map(|v| v.vertex_id)
            .collect(),
        out: &mut out,
    };

    for (i, e) in instance.network.edges.iter().enumerate() {
        let who = format!("road edge {i}");
        if !c.vertices.contains(&e.from) || !c.vertices.contains(&e.to) {
            c.push(who.clone(), "endpoints", "edge endpoint not in network");
        }
        if e.distance_meters == 0 || e.travel_seconds == 0 {
            c.push(who, "weight", "edge weights must be positive");
        }
    }

    let stations: HashSet<u32> = instance.stations.iter().map(|s| s.vertex_id).collect();
    for s in &instance.stations {
        c.location("station", "vertex_id", s);
    }
    for trip in &instance.timetable.trips {
        let who = format!("trip {}", trip.id);
        let mut last = None;
        for ev in &trip.stops {
            if !stations.contains(&ev.station.vertex_id) {
                c.push(
                    who.clone(),
                    "station",
                    format!("stop at {} is not a transit station", ev.station.vertex_id),
                );
            }
            if ev.arrival > ev.departure {
                c.push(who.clone(), "stops", "arrival after departure at a stop");
            }
            if let Some(prev) = last {
                if ev.arrival <= prev {
                    c.push(who.clone(), "stops", "stop events are not strictly ordered");
                }
            }
            last = Some(ev.departure);
        }
    }

    let mut seen = HashSet::new();
    for d in &instance.personal_drivers {
        c.driver(d, DriverKind::Personal);
        seen.insert(d.id);
    }
    for d in &instance.designated_drivers {
        c.driver(d, DriverKind::Designated);
        if seen.contains(&d.id) {
            c.push(
                format!("driver {}", d.id),
                "id",
                "id appears among both personal and designated drivers",
            );
        }
    }
    let mut rider_ids = HashSet::new();
    for r in &instance.riders {
        c.rider(r);
        if !rider_ids.insert(r.id) {
            c.push(format!("rider {}", r.id), "id", "duplicate rider id");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::MatchType;

    fn two_by_two() -> Instance {
        let mut inst = line_instance();
        let v = inst.network.vertices.clone();
        inst.personal_drivers.push(driver(
            1,
            DriverKind::Personal,
            MatchType::FirstMile,
            v[0],
            v[5],
        ));
        inst.designated_drivers.push(driver(
            2,
            DriverKind::Designated,
            MatchType::FirstMile,
            v[1],
            v[1],
        ));
        inst.riders.push(rider(1, MatchType::FirstMile, v[1], v[5]));
        inst.riders.push(rider(2, MatchType::FirstMile, v[2], v[5]));
        inst
    }

    #[test]
    fn well_formed_instance_has_no_violations() {
        assert!(validate_instance(&two_by_two()).is_empty());
    }

    #[test]
    fn zero_theta_is_reported() {
        let mut inst = two_by_two();
        inst.riders[0].acceptance_threshold = 0.0;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "acceptance_threshold");
        assert!(v[0].subject.contains("r1"));
    }

    #[test]
    fn empty_driver_window_is_reported() {
        let mut inst = two_by_two();
        inst.personal_drivers[0].latest_arrival = inst.personal_drivers[0].earliest_departure;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].field, "time_window");
        assert!(v[0].subject.contains("d1"));
    }

    #[test]
    fn shared_ids_and_dangling_vertices() {
        let mut inst = two_by_two();
        inst.designated_drivers[0].id = inst.personal_drivers[0].id;
        inst.riders[1].origin.vertex_id = 99;
        let v = validate_instance(&inst);
        assert_eq!(v.len(), 2);
        assert!(v.iter().any(|x| x.field == "id"));
        assert!(v.iter().any(|x| x.field == "origin"));
        // idempotent
        assert_eq!(validate_instance(&inst), v);
    }
}
