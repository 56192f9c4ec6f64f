//! Solvability predicates relating designated drivers to riders.

use std::collections::HashMap;

use super::{DriverKind, Instance};
use crate::feasibility::Hypergraph;
use crate::solvers::matching::max_bipartite_matching;

/// Every rider can be served alone by a distinct designated driver, i.e. the
/// designated-driver/rider singleton edges admit a matching saturating the
/// riders.
pub fn check_assumption1(instance: &Instance, h: &Hypergraph) -> bool {
    let rider_pos: HashMap<_, _> = instance
        .riders
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id, i))
        .collect();
    let mut adj = vec![Vec::new(); instance.riders.len()];
    for (di, d) in instance.designated_drivers.iter().enumerate() {
        for e in h.edges_of_driver(d.id) {
            let edge = h.edge(*e);
            if edge.riders.len() == 1 {
                if let Some(&ri) = rider_pos.get(&edge.riders[0]) {
                    adj[ri].push(di);
                }
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let matched = max_bipartite_matching(&adj, instance.designated_drivers.len());
    matched.iter().all(Option::is_some)
}

/// `|Δ| = |R|` and every designated driver can serve every rider of its match
/// type alone.
pub fn check_assumption2(instance: &Instance, h: &Hypergraph) -> bool {
    if instance.designated_drivers.len() != instance.riders.len() {
        return false;
    }
    instance.designated_drivers.iter().all(|d| {
        instance
            .riders
            .iter()
            .filter(|r| r.match_type == d.match_type)
            .all(|r| h.find_edge(d.id, &[r.id]).is_some())
    })
}

/// [`check_assumption2`] read off the hypergraph alone: the designated
/// driver vertices are as many as the rider vertices and each has a
/// singleton edge to every rider of its match type.
pub fn check_assumption2_graph(h: &Hypergraph) -> bool {
    let designated: Vec<_> = h
        .drivers()
        .iter()
        .filter(|d| d.kind == DriverKind::Designated)
        .collect();
    designated.len() == h.riders().len()
        && designated.iter().all(|d| {
            h.riders()
                .iter()
                .filter(|r| r.match_type == d.match_type)
                .all(|r| h.find_edge(d.id, &[r.id]).is_some())
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{DriverVertex, HyperEdge, RiderVertex};
    use crate::model::fixtures::*;
    use crate::model::{DriverId, DriverKind, MatchType, RiderId};

    fn setup(n_drivers: u32, n_riders: u32) -> Instance {
        let mut inst = line_instance();
        let v = inst.network.vertices.clone();
        for i in 0..n_drivers {
            inst.designated_drivers.push(driver(
                10 + i,
                DriverKind::Designated,
                MatchType::FirstMile,
                v[0],
                v[0],
            ));
        }
        for i in 0..n_riders {
            inst.riders
                .push(rider(i, MatchType::FirstMile, v[1], v[5]));
        }
        inst
    }

    fn graph(inst: &Instance, pairs: &[(u32, u32)]) -> Hypergraph {
        let drivers = inst
            .designated_drivers
            .iter()
            .map(DriverVertex::from_driver)
            .collect();
        let riders = inst.riders.iter().map(RiderVertex::from_rider).collect();
        let edges = pairs
            .iter()
            .map(|&(d, r)| HyperEdge::new(DriverId(d), vec![RiderId(r)], 1))
            .collect();
        Hypergraph::new(drivers, riders, edges).unwrap()
    }

    #[test]
    fn complete_pairs_satisfy_both() {
        let inst = setup(2, 2);
        let h = graph(&inst, &[(10, 0), (10, 1), (11, 0), (11, 1)]);
        assert!(check_assumption2(&inst, &h));
        assert!(check_assumption1(&inst, &h));
        assert!(check_assumption2_graph(&h));
    }

    #[test]
    fn one_driver_short_fails_assumption2() {
        let inst = setup(1, 2);
        let h = graph(&inst, &[(10, 0), (10, 1)]);
        assert!(!check_assumption2(&inst, &h));
        assert!(!check_assumption1(&inst, &h));
        assert!(!check_assumption2_graph(&h));
    }

    #[test]
    fn rider_without_designated_edge_fails_assumption1() {
        let inst = setup(2, 2);
        let h = graph(&inst, &[(10, 0), (11, 0)]);
        assert!(!check_assumption1(&inst, &h));
    }

    #[test]
    fn assumption1_needs_distinct_drivers() {
        let inst = setup(2, 2);
        let h = graph(&inst, &[(10, 0), (10, 1)]);
        assert!(!check_assumption1(&inst, &h));
        let h = graph(&inst, &[(10, 0), (10, 1), (11, 1)]);
        assert!(check_assumption1(&inst, &h));
        assert!(!check_assumption2(&inst, &h));
    }
}
