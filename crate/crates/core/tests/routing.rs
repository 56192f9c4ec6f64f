use feeder::model::{Location, Seconds};
use feeder::routing::{
    shortest_path, walk_meters, walk_seconds, Leg, RoadEdge, RoadNetwork, StopEvent,
    TransitIndex, TransitTimetable, Trip, WALK_CAP_METERS,
};
use proptest::prelude::*;

fn network(n: u32, arcs: &[(u32, u32, u32, u32)]) -> RoadNetwork {
    RoadNetwork {
        vertices: (0..n).map(|i| Location::new(i, i as f64 * 100.0, 0.0)).collect(),
        edges: arcs
            .iter()
            .map(|&(a, b, m, s)| RoadEdge::new(a % n, b % n, m, s))
            .collect(),
    }
}

fn floyd(n: usize, net: &RoadNetwork) -> Vec<Vec<Option<u64>>> {
    let mut d = vec![vec![None; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = Some(0);
    }
    for e in &net.edges {
        let (a, b) = (e.from as usize, e.to as usize);
        let s = e.travel_seconds as u64;
        if d[a][b].is_none_or(|x| s < x) {
            d[a][b] = Some(s);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|z| x + y < z) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

proptest! {
    #[test]
    fn fastest_paths_match_floyd_warshall(
        n in 2u32..8,
        arcs in prop::collection::vec((0u32..8, 0u32..8, 1u32..500, 1u32..60), 0..20),
    ) {
        let net = network(n, &arcs);
        let d = floyd(n as usize, &net);
        for o in 0..n {
            for t in 0..n {
                let res = shortest_path(&net, &net.vertices[o as usize], &net.vertices[t as usize]);
                match d[o as usize][t as usize] {
                    None => prop_assert!(res.is_err()),
                    Some(secs) => {
                        let p = res.unwrap();
                        prop_assert_eq!(p.travel_seconds, secs);
                        prop_assert_eq!(p.path.first(), Some(&o));
                        prop_assert_eq!(p.path.last(), Some(&t));
                        // the reported path realises the reported totals
                        let (mut s, mut m) = (0u64, 0u64);
                        for w in p.path.windows(2) {
                            let best = net.edges.iter()
                                .filter(|e| e.from == w[0] && e.to == w[1])
                                .map(|e| (e.travel_seconds as u64, e.distance_meters as u64))
                                .min();
                            prop_assert!(best.is_some());
                            let (es, em) = best.unwrap();
                            s += es;
                            m += em;
                        }
                        prop_assert_eq!(s, secs);
                        prop_assert_eq!(m, p.distance_meters);
                    }
                }
            }
        }
    }
}

fn loc(id: u32, x: f64, y: f64) -> Location {
    Location::new(id, x, y)
}

/// Earliest arrival over the direct walk and every journey with a single
/// ride, by enumeration.
fn single_ride_oracle(tt: &TransitTimetable, o: &Location, d: &Location, t: Seconds) -> Option<Seconds> {
    let mut best = None;
    let direct = walk_meters(o, d);
    if direct <= WALK_CAP_METERS {
        best = Some(t + walk_seconds(direct));
    }
    for trip in &tt.trips {
        for (i, a) in trip.stops.iter().enumerate() {
            let wa = walk_meters(o, &a.station);
            if wa > WALK_CAP_METERS || a.departure < t + walk_seconds(wa) {
                continue;
            }
            for b in &trip.stops[i + 1..] {
                let wb = walk_meters(&b.station, d);
                if wa + wb > WALK_CAP_METERS {
                    continue;
                }
                let arr = b.arrival + walk_seconds(wb);
                if best.is_none_or(|x| arr < x) {
                    best = Some(arr);
                }
            }
        }
    }
    best
}

fn trip(id: u32, stations: &[Location], start: Seconds, run: Seconds) -> Trip {
    Trip {
        id,
        stops: stations
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let at = start + k as Seconds * run;
                StopEvent::new(*s, at, at + 10)
            })
            .collect(),
    }
}

fn stations() -> Vec<Location> {
    (0..5).map(|i| loc(100 + i, i as f64 * 3000.0, 0.0)).collect()
}

proptest! {
    #[test]
    fn single_trip_timetables_match_enumeration(
        start in 0i64..3600,
        run in 60i64..600,
        ox in -2000.0f64..14000.0, oy in -1500.0f64..1500.0,
        dx in -2000.0f64..14000.0, dy in -1500.0f64..1500.0,
        t in 0i64..3600,
    ) {
        let st = stations();
        let tt = TransitTimetable { trips: vec![trip(1, &st, start, run)] };
        let idx = TransitIndex::new(&tt, &st);
        let (o, d) = (loc(1, ox, oy), loc(2, dx, dy));
        let got = idx.earliest_arrival(&o, &d, t).ok().map(|j| j.arrive);
        prop_assert_eq!(got, single_ride_oracle(&tt, &o, &d, t));
    }

    #[test]
    fn journeys_are_consistent_and_no_worse_than_one_ride(
        starts in prop::collection::vec((0i64..3600, 60i64..400, any::<bool>()), 1..5),
        ox in -2000.0f64..14000.0, oy in -1500.0f64..1500.0,
        dx in -2000.0f64..14000.0, dy in -1500.0f64..1500.0,
        t in 0i64..3600,
    ) {
        let st = stations();
        let trips: Vec<Trip> = starts
            .iter()
            .enumerate()
            .map(|(k, &(s, r, rev))| {
                let mut seq = st.clone();
                if rev {
                    seq.reverse();
                }
                trip(k as u32 + 1, &seq, s, r)
            })
            .collect();
        let tt = TransitTimetable { trips };
        let idx = TransitIndex::new(&tt, &st);
        let (o, d) = (loc(1, ox, oy), loc(2, dx, dy));
        let oracle = single_ride_oracle(&tt, &o, &d, t);
        match idx.earliest_arrival(&o, &d, t) {
            Err(_) => prop_assert!(oracle.is_none()),
            Ok(j) => {
                prop_assert!(oracle.is_none_or(|x| j.arrive <= x));
                prop_assert!(j.walk_meters() <= WALK_CAP_METERS);
                prop_assert_eq!(j.depart, t);
                let mut now = t;
                let mut at = o;
                for leg in &j.legs {
                    match leg {
                        Leg::Walk { from, to, seconds, meters } => {
                            prop_assert_eq!(from.vertex_id, at.vertex_id);
                            prop_assert_eq!(*meters, walk_meters(from, to));
                            prop_assert_eq!(*seconds, walk_seconds(*meters));
                            now += seconds;
                            at = *to;
                        }
                        Leg::Ride { trip, board, alight, depart, arrive } => {
                            prop_assert_eq!(board.vertex_id, at.vertex_id);
                            let tr = &tt.trips[*trip as usize - 1];
                            let b = tr.stops.iter().position(|s| s.station.vertex_id == board.vertex_id);
                            let a = tr.stops.iter().position(|s| s.station.vertex_id == alight.vertex_id);
                            prop_assert!(b.is_some() && a.is_some() && b < a);
                            prop_assert_eq!(tr.stops[b.unwrap()].departure, *depart);
                            prop_assert_eq!(tr.stops[a.unwrap()].arrival, *arrive);
                            prop_assert!(*depart >= now);
                            now = *arrive;
                            at = *alight;
                        }
                    }
                }
                prop_assert_eq!(at.vertex_id, d.vertex_id);
                prop_assert!(now <= j.arrive);
            }
        }
    }
}
