use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use super::{incurred_travel_distance, FeasibleMatch, RiderService, RouteStop, StopKind};
use crate::model::{
    Driver, DriverId, DriverKind, Instance, Location, MatchType, Rider, RiderId, Seconds, VertexId,
};
use crate::routing::{RoadGraph, SpTree, TransitIndex};

/// Routing data shared by every feasibility query on one instance: road
/// trees from every agent endpoint and station, latest useful departures
/// from each station for first-mile riders, and earliest arrivals at each
/// station for last-mile riders.
pub struct MatchContext<'a> {
    instance: &'a Instance,
    road: RoadGraph,
    trees: HashMap<VertexId, SpTree>,
    transit: TransitIndex,
    stations: Vec<Location>,
    /// FM rider -> per station, latest departure still meeting the deadline.
    fm_latest: HashMap<RiderId, Vec<Option<Seconds>>>,
    /// LM rider -> per station, earliest transit arrival.
    lm_arrival: HashMap<RiderId, Vec<Option<Seconds>>>,
}

struct Plan {
    distance: u64,
    duration: Seconds,
}

impl<'a> MatchContext<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        let road = RoadGraph::new(&instance.network);
        let mut stations = instance.stations.clone();
        stations.sort_by_key(|s| s.vertex_id);
        stations.dedup_by_key(|s| s.vertex_id);

        let mut sources = BTreeSet::new();
        for d in instance.drivers() {
            sources.insert(d.origin.vertex_id);
        }
        for r in &instance.riders {
            match r.match_type {
                MatchType::FirstMile => sources.insert(r.origin.vertex_id),
                MatchType::LastMile => sources.insert(r.destination.vertex_id),
            };
        }
        for s in &stations {
            sources.insert(s.vertex_id);
        }
        let sources: Vec<VertexId> = sources.into_iter().collect();
        let trees: HashMap<VertexId, SpTree> = sources
            .par_iter()
            .filter_map(|&v| road.tree_from(v).ok().map(|t| (v, t)))
            .collect();

        let transit = TransitIndex::new(&instance.timetable, &stations);
        let per_rider: Vec<(RiderId, MatchType, Vec<Option<Seconds>>)> = instance
            .riders
            .par_iter()
            .map(|r| {
                let row = stations
                    .iter()
                    .map(|s| match r.match_type {
                        MatchType::FirstMile => transit.latest_departure(
                            s,
                            &r.destination,
                            r.earliest_departure,
                            r.arrival_deadline(),
                        ),
                        MatchType::LastMile => {
                            transit.arrival_time(&r.origin, s, r.earliest_departure)
                        }
                    })
                    .collect();
                (r.id, r.match_type, row)
            })
            .collect();
        let mut fm_latest = HashMap::new();
        let mut lm_arrival = HashMap::new();
        for (id, mt, row) in per_rider {
            match mt {
                MatchType::FirstMile => fm_latest.insert(id, row),
                MatchType::LastMile => lm_arrival.insert(id, row),
            };
        }

        Self {
            instance,
            road,
            trees,
            transit,
            stations,
            fm_latest,
            lm_arrival,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    /// Candidate stations, ascending vertex id.
    pub fn stations(&self) -> &[Location] {
        &self.stations
    }

    pub fn transit(&self) -> &TransitIndex {
        &self.transit
    }

    /// Fastest road leg `(seconds, meters)` between two precomputed
    /// endpoints.
    pub fn leg(&self, from: VertexId, to: VertexId) -> Option<(Seconds, u64)> {
        let tree = self.trees.get(&from)?;
        self.road
            .leg(tree, to)
            .map(|(s, m)| (s as Seconds, m))
    }

    /// The driver's own fastest path `(seconds, meters)`.
    pub fn fastest_path(&self, d: &Driver) -> Option<(Seconds, u64)> {
        self.leg(d.origin.vertex_id, d.destination.vertex_id)
    }

    fn duration_limit(&self, d: &Driver, fp: (Seconds, u64)) -> Seconds {
        match d.kind {
            DriverKind::Personal => fp.0 + d.detour_limit,
            DriverKind::Designated => Seconds::MAX,
        }
    }

    /// Best feasible match of `driver` with exactly `riders`: minimum
    /// incurred distance over all stations and all pickup (first-mile) or
    /// drop-off (last-mile) orders; ties go to the lower station id, then
    /// the lexicographically first order.
    pub fn check(&self, driver: &Driver, riders: &[&Rider]) -> Option<FeasibleMatch> {
        let mut best: Option<(u64, usize, Vec<usize>)> = None;
        self.for_each_candidate(driver, riders, |td, s, order| {
            if best.as_ref().is_none_or(|(b, ..)| td < *b) {
                best = Some((td, s, order.to_vec()));
            }
        })?;
        let (_, s, order) = best?;
        let mut sorted: Vec<&Rider> = riders.to_vec();
        sorted.sort_by_key(|r| r.id);
        let ordered: Vec<&Rider> = order.iter().map(|&i| sorted[i]).collect();
        Some(self.build(driver, &ordered, s))
    }

    /// Every feasible `(station, order)` candidate as a full match, in
    /// station-major, then lexicographic order.
    pub fn candidates(&self, driver: &Driver, riders: &[&Rider]) -> Vec<FeasibleMatch> {
        let mut found = Vec::new();
        let _ = self.for_each_candidate(driver, riders, |_, s, order| {
            found.push((s, order.to_vec()));
        });
        let mut sorted: Vec<&Rider> = riders.to_vec();
        sorted.sort_by_key(|r| r.id);
        found
            .into_iter()
            .map(|(s, order)| {
                let ordered: Vec<&Rider> = order.iter().map(|&i| sorted[i]).collect();
                self.build(driver, &ordered, s)
            })
            .collect()
    }

    fn for_each_candidate(
        &self,
        driver: &Driver,
        riders: &[&Rider],
        mut visit: impl FnMut(u64, usize, &[usize]),
    ) -> Option<()> {
        if riders.is_empty() || riders.len() > driver.capacity as usize {
            return None;
        }
        if riders.iter().any(|r| r.match_type != driver.match_type) {
            return None;
        }
        let mut sorted: Vec<&Rider> = riders.to_vec();
        sorted.sort_by_key(|r| r.id);
        if sorted.windows(2).any(|w| w[0].id == w[1].id) {
            return None;
        }
        let fp = self.fastest_path(driver)?;
        let limit = self.duration_limit(driver, fp);

        for (si, s) in self.stations.iter().enumerate() {
            let (Some(to_s), Some(from_s)) = (
                self.leg(driver.origin.vertex_id, s.vertex_id),
                self.leg(s.vertex_id, driver.destination.vertex_id),
            ) else {
                continue;
            };
            if to_s.0.saturating_add(from_s.0) > limit {
                continue;
            }
            let mut order: Vec<usize> = (0..sorted.len()).collect();
            loop {
                let ordered: Vec<&Rider> = order.iter().map(|&i| sorted[i]).collect();
                let plan = match driver.match_type {
                    MatchType::FirstMile => self.plan_fm(driver, &ordered, si),
                    MatchType::LastMile => self.plan_lm(driver, &ordered, si),
                };
                if let Some(p) = plan {
                    if p.duration <= limit {
                        // routes shorter than the fastest path can only come
                        // from non-proportional time/distance weights
                        let td = incurred_travel_distance(driver, p.distance, fp.1).unwrap_or(0);
                        visit(td, si, &order);
                    }
                }
                if !next_permutation(&mut order) {
                    break;
                }
            }
        }
        Some(())
    }

    fn plan_fm(&self, d: &Driver, order: &[&Rider], si: usize) -> Option<Plan> {
        let s = self.stations[si].vertex_id;
        let mut pos = d.origin.vertex_id;
        let mut t = d.earliest_departure;
        let mut dist = 0u64;
        let mut drive: Seconds = 0;
        let mut latest_at_station = Seconds::MAX;
        for r in order {
            let (sec, m) = self.leg(pos, r.origin.vertex_id)?;
            t = (t + sec).max(r.earliest_departure);
            drive += sec;
            dist += m;
            pos = r.origin.vertex_id;
            latest_at_station = latest_at_station.min(self.fm_latest.get(&r.id)?[si]?);
        }
        let (sec, m) = self.leg(pos, s)?;
        t += sec;
        drive += sec;
        dist += m;
        let (sec_end, m_end) = self.leg(s, d.destination.vertex_id)?;
        latest_at_station = latest_at_station.min(d.latest_arrival - sec_end);
        if t > latest_at_station {
            return None;
        }
        Some(Plan {
            distance: dist + m_end,
            duration: drive + sec_end,
        })
    }

    fn plan_lm(&self, d: &Driver, order: &[&Rider], si: usize) -> Option<Plan> {
        let s = self.stations[si].vertex_id;
        let (sec0, m0) = self.leg(d.origin.vertex_id, s)?;
        let mut pickup = d.earliest_departure + sec0;
        for r in order {
            pickup = pickup.max(self.lm_arrival.get(&r.id)?[si]?);
        }
        let mut t = pickup;
        let mut pos = s;
        let mut dist = m0;
        let mut drive = sec0;
        for r in order {
            let (sec, m) = self.leg(pos, r.destination.vertex_id)?;
            t += sec;
            if t > r.arrival_deadline() {
                return None;
            }
            drive += sec;
            dist += m;
            pos = r.destination.vertex_id;
        }
        let (sec, m) = self.leg(pos, d.destination.vertex_id)?;
        if t + sec > d.latest_arrival {
            return None;
        }
        Some(Plan {
            distance: dist + m,
            duration: drive + sec,
        })
    }

    /// Full route and service times for a candidate already known to be
    /// feasible.
    fn build(&self, d: &Driver, order: &[&Rider], si: usize) -> FeasibleMatch {
        let station = self.stations[si];
        let s = station.vertex_id;
        let leg = |a: VertexId, b: VertexId| self.leg(a, b).expect("leg checked during planning");
        let fp = self.fastest_path(d).expect("fastest path checked");
        let mut route = Vec::new();
        let mut service = Vec::new();
        let mut dist = 0u64;
        let mut drive: Seconds = 0;

        match d.match_type {
            MatchType::FirstMile => {
                let mut stops: Vec<(StopKind, Location)> = vec![(StopKind::DriverOrigin, d.origin)];
                for r in order {
                    stops.push((StopKind::Pickup(r.id), r.origin));
                }
                stops.push((StopKind::Station, station));
                let mut legs = Vec::new();
                for w in stops.windows(2) {
                    let l = leg(w[0].1.vertex_id, w[1].1.vertex_id);
                    legs.push(l);
                    dist += l.1;
                    drive += l.0;
                }
                let end = leg(s, d.destination.vertex_id);
                dist += end.1;
                drive += end.0;
                let mut latest = d.latest_arrival - end.0;
                for r in order {
                    latest = latest.min(self.fm_latest[&r.id][si].expect("station checked"));
                }
                // walk back from the station to get the late schedule
                let mut times = vec![0; stops.len()];
                times[stops.len() - 1] = latest;
                for k in (0..stops.len() - 1).rev() {
                    times[k] = times[k + 1] - legs[k].0;
                }
                for (k, (kind, loc)) in stops.iter().enumerate() {
                    route.push(RouteStop {
                        kind: *kind,
                        location: *loc,
                        time: times[k],
                    });
                }
                route.push(RouteStop {
                    kind: StopKind::DriverDestination,
                    location: d.destination,
                    time: latest + end.0,
                });
                for (k, r) in order.iter().enumerate() {
                    let arrive = self
                        .transit
                        .arrival_time(&station, &r.destination, latest)
                        .expect("latest departure guarantees a journey");
                    service.push(RiderService {
                        rider: r.id,
                        pickup: times[k + 1],
                        transit_board: latest,
                        arrive,
                    });
                }
            }
            MatchType::LastMile => {
                let first = leg(d.origin.vertex_id, s);
                let mut pickup = d.earliest_departure + first.0;
                for r in order {
                    pickup = pickup.max(self.lm_arrival[&r.id][si].expect("station checked"));
                }
                dist += first.1;
                drive += first.0;
                route.push(RouteStop {
                    kind: StopKind::DriverOrigin,
                    location: d.origin,
                    time: pickup - first.0,
                });
                route.push(RouteStop {
                    kind: StopKind::Station,
                    location: station,
                    time: pickup,
                });
                let mut t = pickup;
                let mut pos = s;
                for r in order {
                    let l = leg(pos, r.destination.vertex_id);
                    t += l.0;
                    dist += l.1;
                    drive += l.0;
                    pos = r.destination.vertex_id;
                    route.push(RouteStop {
                        kind: StopKind::Dropoff(r.id),
                        location: r.destination,
                        time: t,
                    });
                    service.push(RiderService {
                        rider: r.id,
                        pickup,
                        transit_board: r.earliest_departure,
                        arrive: t,
                    });
                }
                let l = leg(pos, d.destination.vertex_id);
                dist += l.1;
                drive += l.0;
                route.push(RouteStop {
                    kind: StopKind::DriverDestination,
                    location: d.destination,
                    time: t + l.0,
                });
            }
        }
        service.sort_by_key(|x| x.rider);
        let mut riders: Vec<RiderId> = order.iter().map(|r| r.id).collect();
        riders.sort_unstable();
        FeasibleMatch {
            driver: d.id,
            riders,
            station,
            route,
            route_distance: dist,
            route_duration: drive,
            incurred_distance: incurred_travel_distance(d, dist, fp.1).unwrap_or(0),
            service,
        }
    }

    pub fn driver_by_id(&self, id: DriverId) -> Option<&'a Driver> {
        self.instance.driver(id)
    }
}

/// Advances to the next lexicographic permutation; false after the last.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
