use rand::Rng;

use super::GenConfig;
use crate::model::{Location, Seconds, VertexId};
use crate::routing::{RoadEdge, RoadNetwork, StopEvent, TransitTimetable, Trip};

/// Vertex id of lattice point `(i, j)`, `i` east, `j` north.
pub(super) fn vertex_at(n: u32, i: u32, j: u32) -> VertexId {
    j * n + i
}

/// Grid road network. Both directions of every lattice edge get their own
/// jittered length; travel time is a tenth of the length (36 km/h), so
/// the fastest path is also the shortest.
pub fn gen_network(cfg: &GenConfig, rng: &mut impl Rng) -> RoadNetwork {
    let n = cfg.grid_side;
    let s = cfg.spacing_m;
    let mut vertices = Vec::with_capacity((n * n) as usize);
    for j in 0..n {
        for i in 0..n {
            vertices.push(Location::new(
                vertex_at(n, i, j),
                (i * s) as f64,
                (j * s) as f64,
            ));
        }
    }
    let steps = (cfg.edge_jitter * s as f64 / 10.0).floor() as u32;
    let mut edge = |a: VertexId, b: VertexId, edges: &mut Vec<RoadEdge>| {
        let meters = s + 10 * rng.gen_range(0..=steps);
        edges.push(RoadEdge::new(a, b, meters, meters / 10));
    };
    let mut edges = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = vertex_at(n, i, j);
            if i + 1 < n {
                let w = vertex_at(n, i + 1, j);
                edge(v, w, &mut edges);
                edge(w, v, &mut edges);
            }
            if j + 1 < n {
                let w = vertex_at(n, i, j + 1);
                edge(v, w, &mut edges);
                edge(w, v, &mut edges);
            }
        }
    }
    RoadNetwork { vertices, edges }
}

/// Stations on an evenly spaced `k × k` lattice inside the grid, filled
/// row by row, `k = ceil(sqrt(count))`.
pub fn gen_stations(cfg: &GenConfig, net: &RoadNetwork) -> Vec<Location> {
    let n = cfg.grid_side;
    let k = (cfg.station_count as f64).sqrt().ceil() as u32;
    let pos = |t: u32| ((t + 1) * (n - 1) + (k + 1) / 2) / (k + 1);
    let mut out: Vec<Location> = Vec::new();
    for idx in 0..cfg.station_count {
        let (row, col) = (idx / k, idx % k);
        let v = vertex_at(n, pos(col), pos(row));
        let loc = net.vertices[v as usize];
        if !out.iter().any(|l| l.vertex_id == loc.vertex_id) {
            out.push(loc);
        }
    }
    out
}

/// Station sequences of the transit lines: every lattice row and column
/// holding at least three stations, or a single snake through all
/// stations when none does.
fn lines(stations: &[Location]) -> Vec<Vec<Location>> {
    let mut out = Vec::new();
    for axis in [0usize, 1] {
        let key = |l: &Location| if axis == 0 { l.coord.1 } else { l.coord.0 };
        let along = |l: &Location| if axis == 0 { l.coord.0 } else { l.coord.1 };
        let mut keys: Vec<f64> = stations.iter().map(key).collect();
        keys.sort_by(f64::total_cmp);
        keys.dedup();
        for k in keys {
            let mut line: Vec<Location> =
                stations.iter().copied().filter(|l| key(l) == k).collect();
            if line.len() >= 3 {
                line.sort_by(|a, b| along(a).total_cmp(&along(b)));
                out.push(line);
            }
        }
    }
    if out.is_empty() {
        let mut all = stations.to_vec();
        all.sort_by(|a, b| a.coord.1.total_cmp(&b.coord.1).then(a.coord.0.total_cmp(&b.coord.0)));
        out.push(all);
    }
    out
}

/// Trips in both directions of every line, repeating at the configured
/// headway from `start`, with constant run times between stations.
pub fn gen_timetable(cfg: &GenConfig, stations: &[Location], start: Seconds) -> TransitTimetable {
    let mut trips = Vec::new();
    let mut id = 0;
    for (li, line) in lines(stations).iter().enumerate() {
        let offset = (li as Seconds * 97) % cfg.headway_s;
        for dir in 0..2 {
            let seq: Vec<Location> = if dir == 0 {
                line.clone()
            } else {
                line.iter().rev().copied().collect()
            };
            let runs: Vec<Seconds> = seq
                .windows(2)
                .map(|w| (w[0].euclid(&w[1]) / cfg.transit_speed_mps).ceil().max(1.0) as Seconds)
                .collect();
            for k in 0..cfg.trips_per_line {
                let mut t = start + offset + k as Seconds * cfg.headway_s;
                let mut stops = Vec::with_capacity(seq.len());
                for (si, loc) in seq.iter().enumerate() {
                    let arrival = t;
                    let departure = if si == 0 || si + 1 == seq.len() {
                        arrival
                    } else {
                        arrival + cfg.dwell_s
                    };
                    stops.push(StopEvent::new(*loc, arrival, departure));
                    if si < runs.len() {
                        t = departure + runs[si];
                    }
                }
                trips.push(Trip { id, stops });
                id += 1;
            }
        }
    }
    TransitTimetable { trips }
}
