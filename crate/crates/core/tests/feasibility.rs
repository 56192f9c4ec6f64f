use std::collections::BTreeSet;

use feeder::feasibility::{
    enumerate_hypergraph, enumerate_naive, enumerate_with, Hypergraph, MatchContext, StopKind,
};
use feeder::gen::{gen_interval_instance, GenConfig};
use feeder::model::{Driver, DriverKind, Instance, MatchType, Rider};
use feeder::routing::shortest_path;
use feeder::Problem;

fn instance(riders: u32, seed: u64) -> Instance {
    let cfg = GenConfig {
        riders,
        seed,
        ..GenConfig::default()
    };
    gen_interval_instance(&cfg, 6 * 3600 + seed as i64 * 600).unwrap()
}

fn edge_set(h: &Hypergraph) -> BTreeSet<(u32, Vec<u32>, u64)> {
    h.edges()
        .iter()
        .map(|e| (e.driver.0, e.riders.iter().map(|r| r.0).collect(), e.weight))
        .collect()
}

#[test]
fn pruned_enumeration_equals_naive() {
    for seed in 1..=6 {
        let inst = instance(9, seed);
        let ctx = MatchContext::new(&inst);
        let mut riders: Vec<&Rider> = inst.riders.iter().collect();
        riders.sort_by_key(|r| r.id);
        for problem in [Problem::MinDist, Problem::MinNum] {
            let drivers: Vec<&Driver> = match problem {
                Problem::MinDist => inst.drivers().collect(),
                Problem::MinNum => inst.designated_drivers.iter().collect(),
            };
            let fast = enumerate_with(&ctx, &drivers, &riders, problem);
            let slow = enumerate_naive(&ctx, &drivers, &riders, problem);
            assert_eq!(edge_set(&fast), edge_set(&slow), "seed {seed} {problem}");
        }
    }
}

fn road(inst: &Instance, a: u32, b: u32) -> (u64, u64) {
    let net = &inst.network;
    let p = shortest_path(net, net.vertex(a).unwrap(), net.vertex(b).unwrap()).unwrap();
    (p.travel_seconds, p.distance_meters)
}

/// Every enumerated match re-checked from its route: stop order, driving
/// times, windows, time savings and incurred distance.
#[test]
fn every_match_honours_its_contract() {
    let mut checked = 0;
    for seed in 10..=13 {
        let inst = instance(14, seed);
        let h = enumerate_hypergraph(&inst, Problem::MinDist);
        for e in h.edges() {
            let m = e.detail.as_ref().expect("enumerated edges carry their route");
            let d = inst.driver(e.driver).unwrap();
            assert!(m.riders.len() <= d.capacity as usize);
            assert_eq!(m.route.first().unwrap().kind, StopKind::DriverOrigin);
            assert_eq!(m.route.last().unwrap().kind, StopKind::DriverDestination);
            assert_eq!(m.route.first().unwrap().location.vertex_id, d.origin.vertex_id);
            assert_eq!(m.route.last().unwrap().location.vertex_id, d.destination.vertex_id);
            let station = m
                .route
                .iter()
                .position(|s| s.kind == StopKind::Station)
                .expect("route visits a station");
            for (k, s) in m.route.iter().enumerate() {
                match (s.kind, d.match_type) {
                    (StopKind::Pickup(_), MatchType::FirstMile) => assert!(k < station),
                    (StopKind::Dropoff(_), MatchType::LastMile) => assert!(k > station),
                    (StopKind::Pickup(_) | StopKind::Dropoff(_), _) => {
                        panic!("wrong stop kind for {:?}", d.match_type)
                    }
                    _ => {}
                }
            }
            let (mut dist, mut drive) = (0, 0);
            for w in m.route.windows(2) {
                let (s, meters) = road(&inst, w[0].location.vertex_id, w[1].location.vertex_id);
                assert!(w[1].time - w[0].time >= s as i64, "edge {:?}", e.riders);
                dist += meters;
                drive += s as i64;
            }
            assert_eq!(dist, m.route_distance);
            assert_eq!(drive, m.route_duration);
            assert!(m.route.first().unwrap().time >= d.earliest_departure);
            assert!(m.route.last().unwrap().time <= d.latest_arrival);
            for s in &m.service {
                let r = inst.rider(s.rider).unwrap();
                assert!(s.pickup >= r.earliest_departure);
                assert!(s.arrive <= r.latest_arrival);
                let saved = r.transit_baseline - (s.arrive - r.earliest_departure);
                assert!(saved as f64 >= r.acceptance_threshold * r.transit_baseline as f64);
            }
            let expect = match d.kind {
                DriverKind::Designated => m.route_distance,
                DriverKind::Personal => {
                    let fp = road(&inst, d.origin.vertex_id, d.destination.vertex_id).1;
                    m.route_distance.saturating_sub(fp)
                }
            };
            assert_eq!(m.incurred_distance, expect);
            assert_eq!(e.weight, expect.max(1));
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn min_num_graph_uses_designated_drivers_with_unit_weights() {
    let inst = instance(10, 3);
    let h = enumerate_hypergraph(&inst, Problem::MinNum);
    assert!(h.edges().iter().all(|e| e.weight == 1));
    assert!(h
        .drivers()
        .iter()
        .all(|d| d.kind == DriverKind::Designated));
}
