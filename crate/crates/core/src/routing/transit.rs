//! Earliest-arrival search over a timetable with a walking budget.
//!
//! Trips sharing a stop sequence are grouped into routes; within a route the
//! trips must not overtake each other, so only the first catchable trip of a
//! route is ever boarded. Labels carry `(time, walked)` and are kept Pareto
//! minimal per station.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{
    walk_meters, walk_seconds, Journey, Leg, RoutingError, TransitTimetable, WALK_CAP_METERS,
};
use crate::model::{Location, Seconds};

#[derive(Debug, Clone)]
struct Route {
    stops: Vec<usize>,
    /// Trip indices, ordered by departure at every stop.
    trips: Vec<usize>,
}

#[derive(Debug, Clone)]
struct TripTimes {
    id: u32,
    arrival: Vec<Seconds>,
    departure: Vec<Seconds>,
}

/// Preprocessed timetable for repeated journey queries.
#[derive(Debug, Clone)]
pub struct TransitIndex {
    stations: Vec<Location>,
    trips: Vec<TripTimes>,
    routes: Vec<Route>,
    /// Per station: `(route, position)` pairs.
    serving: Vec<Vec<(usize, usize)>>,
    walk_cap: u32,
}

#[derive(Debug, Clone, Copy)]
enum Via {
    Access,
    Ride {
        trip: usize,
        from_pos: usize,
        to_pos: usize,
    },
    Transfer,
}

#[derive(Debug, Clone, Copy)]
struct Label {
    station: usize,
    time: Seconds,
    parent: Option<usize>,
    via: Via,
}

impl TransitIndex {
    pub fn new(timetable: &TransitTimetable, stations: &[Location]) -> Self {
        Self::with_walk_cap(timetable, stations, WALK_CAP_METERS)
    }

    pub fn with_walk_cap(timetable: &TransitTimetable, stations: &[Location], cap: u32) -> Self {
        let mut stations: Vec<Location> = stations.to_vec();
        for t in &timetable.trips {
            for ev in &t.stops {
                stations.push(ev.station);
            }
        }
        stations.sort_by_key(|s| s.vertex_id);
        stations.dedup_by_key(|s| s.vertex_id);
        let pos: HashMap<u32, usize> = stations
            .iter()
            .enumerate()
            .map(|(i, s)| (s.vertex_id, i))
            .collect();

        let trips: Vec<TripTimes> = timetable
            .trips
            .iter()
            .map(|t| TripTimes {
                id: t.id,
                arrival: t.stops.iter().map(|e| e.arrival).collect(),
                departure: t.stops.iter().map(|e| e.departure).collect(),
            })
            .collect();

        let mut by_pattern: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        let mut patterns = Vec::new();
        for (ti, t) in timetable.trips.iter().enumerate() {
            if t.stops.len() < 2 {
                continue;
            }
            let key: Vec<usize> = t.stops.iter().map(|e| pos[&e.station.vertex_id]).collect();
            by_pattern
                .entry(key.clone())
                .or_insert_with(|| {
                    patterns.push(key);
                    Vec::new()
                })
                .push(ti);
        }

        let mut routes = Vec::new();
        for key in patterns {
            let mut members = by_pattern.remove(&key).unwrap_or_default();
            members.sort_by_key(|&ti| (trips[ti].departure[0], ti));
            let mut groups: Vec<Vec<usize>> = Vec::new();
            for ti in members {
                let slot = groups.iter().position(|g| {
                    let last = &trips[*g.last().unwrap()];
                    let cur = &trips[ti];
                    (0..cur.departure.len()).all(|k| {
                        last.departure[k] <= cur.departure[k] && last.arrival[k] <= cur.arrival[k]
                    })
                });
                match slot {
                    Some(g) => groups[g].push(ti),
                    None => groups.push(vec![ti]),
                }
            }
            for g in groups {
                routes.push(Route {
                    stops: key.clone(),
                    trips: g,
                });
            }
        }

        let mut serving = vec![Vec::new(); stations.len()];
        for (ri, r) in routes.iter().enumerate() {
            for (p, &s) in r.stops.iter().enumerate() {
                if p + 1 < r.stops.len() {
                    serving[s].push((ri, p));
                }
            }
        }

        Self {
            stations,
            trips,
            routes,
            serving,
            walk_cap: cap,
        }
    }

    pub fn stations(&self) -> &[Location] {
        &self.stations
    }

    pub fn walk_cap(&self) -> u32 {
        self.walk_cap
    }

    /// Earliest arrival at `to` departing `from` no earlier than `depart`.
    pub fn earliest_arrival(
        &self,
        from: &Location,
        to: &Location,
        depart: Seconds,
    ) -> Result<Journey, RoutingError> {
        let cap = self.walk_cap;
        // (arrive, walked, last label, egress meters)
        let mut best: Option<(Seconds, u32, Option<usize>, u32)> = None;
        let direct = walk_meters(from, to);
        if direct <= cap {
            best = Some((depart + walk_seconds(direct), direct, None, direct));
        }

        let mut arena: Vec<Label> = Vec::new();
        let mut heap = BinaryHeap::new();
        let mut settled: Vec<Vec<(Seconds, u32)>> = vec![Vec::new(); self.stations.len()];

        for (si, s) in self.stations.iter().enumerate() {
            let m = walk_meters(from, s);
            if m <= cap {
                arena.push(Label {
                    station: si,
                    time: depart + walk_seconds(m),
                    parent: None,
                    via: Via::Access,
                });
                let li = arena.len() - 1;
                heap.push(Reverse((arena[li].time, m, li)));
            }
        }

        let dominated = |set: &[(Seconds, u32)], t: Seconds, w: u32| {
            set.iter().any(|&(t2, w2)| t2 <= t && w2 <= w)
        };

        while let Some(Reverse((time, walked, li))) = heap.pop() {
            if let Some((b, ..)) = best {
                if time >= b {
                    break;
                }
            }
            let label = arena[li];
            if dominated(&settled[label.station], time, walked) {
                continue;
            }
            settled[label.station].push((time, walked));
            let here = &self.stations[label.station];

            let m = walk_meters(here, to);
            if walked + m <= cap {
                let arrive = time + walk_seconds(m);
                let better = match best {
                    None => true,
                    Some((b, bw, ..)) => arrive < b || (arrive == b && walked + m < bw),
                };
                if better {
                    best = Some((arrive, walked + m, Some(li), m));
                }
            }

            for &(ri, p) in &self.serving[label.station] {
                let route = &self.routes[ri];
                let k = route
                    .trips
                    .partition_point(|&ti| self.trips[ti].departure[p] < time);
                let Some(&ti) = route.trips.get(k) else {
                    continue;
                };
                let trip = &self.trips[ti];
                for q in p + 1..route.stops.len() {
                    let st = route.stops[q];
                    let at = trip.arrival[q];
                    if best.is_some_and(|(b, ..)| at >= b) || dominated(&settled[st], at, walked) {
                        continue;
                    }
                    arena.push(Label {
                        station: st,
                        time: at,
                        parent: Some(li),
                        via: Via::Ride {
                            trip: ti,
                            from_pos: p,
                            to_pos: q,
                        },
                    });
                    heap.push(Reverse((at, walked, arena.len() - 1)));
                }
            }

            // consecutive walks never beat a single walk
            if matches!(label.via, Via::Ride { .. }) {
                for (si, s) in self.stations.iter().enumerate() {
                    if si == label.station {
                        continue;
                    }
                    let m = walk_meters(here, s);
                    if walked + m > cap {
                        continue;
                    }
                    let at = time + walk_seconds(m);
                    if best.is_some_and(|(b, ..)| at >= b)
                        || dominated(&settled[si], at, walked + m)
                    {
                        continue;
                    }
                    arena.push(Label {
                        station: si,
                        time: at,
                        parent: Some(li),
                        via: Via::Transfer,
                    });
                    heap.push(Reverse((at, walked + m, arena.len() - 1)));
                }
            }
        }

        let Some((arrive, _, last, egress)) = best else {
            return Err(RoutingError::NoJourney {
                from: from.vertex_id,
                to: to.vertex_id,
                depart,
            });
        };
        let mut legs = Vec::new();
        match last {
            None => {
                if direct > 0 {
                    legs.push(Leg::Walk {
                        from: *from,
                        to: *to,
                        seconds: walk_seconds(direct),
                        meters: direct,
                    });
                }
            }
            Some(li) => {
                let mut chain = Vec::new();
                let mut cur = Some(li);
                while let Some(c) = cur {
                    chain.push(c);
                    cur = arena[c].parent;
                }
                chain.reverse();
                let mut prev_station: Option<usize> = None;
                for c in chain {
                    let l = arena[c];
                    let dest = self.stations[l.station];
                    match l.via {
                        Via::Access => {
                            let m = walk_meters(from, &dest);
                            if m > 0 {
                                legs.push(Leg::Walk {
                                    from: *from,
                                    to: dest,
                                    seconds: walk_seconds(m),
                                    meters: m,
                                });
                            }
                        }
                        Via::Transfer => {
                            let src = self.stations[prev_station.expect("transfer follows a ride")];
                            let m = walk_meters(&src, &dest);
                            legs.push(Leg::Walk {
                                from: src,
                                to: dest,
                                seconds: walk_seconds(m),
                                meters: m,
                            });
                        }
                        Via::Ride {
                            trip,
                            from_pos,
                            to_pos,
                        } => {
                            let t = &self.trips[trip];
                            let route_stops = &self
                                .routes
                                .iter()
                                .find(|r| r.trips.contains(&trip))
                                .expect("trip belongs to a route")
                                .stops;
                            legs.push(Leg::Ride {
                                trip: t.id,
                                board: self.stations[route_stops[from_pos]],
                                alight: self.stations[route_stops[to_pos]],
                                depart: t.departure[from_pos],
                                arrive: t.arrival[to_pos],
                            });
                        }
                    }
                    prev_station = Some(l.station);
                }
                if egress > 0 {
                    let src = self.stations[arena[li].station];
                    legs.push(Leg::Walk {
                        from: src,
                        to: *to,
                        seconds: walk_seconds(egress),
                        meters: egress,
                    });
                }
            }
        }
        Ok(Journey {
            legs,
            depart,
            arrive,
        })
    }

    /// Arrival time only; see [`TransitIndex::earliest_arrival`].
    pub fn arrival_time(&self, from: &Location, to: &Location, depart: Seconds) -> Option<Seconds> {
        self.earliest_arrival(from, to, depart).ok().map(|j| j.arrive)
    }

    /// Latest departure in `[earliest, deadline]` from `from` that still
    /// reaches `to` by `deadline`.
    pub fn latest_departure(
        &self,
        from: &Location,
        to: &Location,
        earliest: Seconds,
        deadline: Seconds,
    ) -> Option<Seconds> {
        let ok = |t: Seconds| self.arrival_time(from, to, t).is_some_and(|a| a <= deadline);
        if earliest > deadline || !ok(earliest) {
            return None;
        }
        let (mut lo, mut hi) = (earliest, deadline);
        while lo < hi {
            let mid = lo + (hi - lo + 1) / 2;
            if ok(mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }
}

/// Earliest-arrival public-transit journey with walking access, transfers and
/// egress; total walking is capped at [`WALK_CAP_METERS`].
pub fn earliest_arrival_journey(
    timetable: &TransitTimetable,
    stations: &[Location],
    o: &Location,
    d: &Location,
    depart: Seconds,
) -> Result<Journey, RoutingError> {
    TransitIndex::new(timetable, stations).earliest_arrival(o, d, depart)
}
