use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::FeasibleMatch;
use crate::model::{Driver, DriverId, DriverKind, MatchType, Rider, RiderId, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DriverVertex {
    pub id: DriverId,
    pub kind: DriverKind,
    pub match_type: MatchType,
    pub capacity: u32,
}

impl DriverVertex {
    pub fn from_driver(d: &Driver) -> Self {
        Self {
            id: d.id,
            kind: d.kind,
            match_type: d.match_type,
            capacity: d.capacity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiderVertex {
    pub id: RiderId,
    pub match_type: MatchType,
}

impl RiderVertex {
    pub fn from_rider(r: &Rider) -> Self {
        Self {
            id: r.id,
            match_type: r.match_type,
        }
    }
}

/// A driver together with the set of riders it serves.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperEdge {
    pub driver: DriverId,
    /// Sorted, without duplicates.
    pub riders: Vec<RiderId>,
    pub weight: u64,
    pub station: Option<VertexId>,
    pub detail: Option<Arc<FeasibleMatch>>,
}

impl HyperEdge {
    pub fn new(driver: DriverId, mut riders: Vec<RiderId>, weight: u64) -> Self {
        riders.sort_unstable();
        riders.dedup();
        Self {
            driver,
            riders,
            weight,
            station: None,
            detail: None,
        }
    }

    pub fn from_match(m: FeasibleMatch, weight: u64) -> Self {
        Self {
            driver: m.driver,
            riders: m.riders.clone(),
            weight,
            station: Some(m.station.vertex_id),
            detail: Some(Arc::new(m)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HypergraphError {
    #[error("edge {0} has an empty rider set")]
    EmptyEdge(usize),
    #[error("edge {0} has weight 0; weights must be at least 1")]
    ZeroWeight(usize),
    #[error("edge {edge} refers to unknown driver {driver}")]
    UnknownDriver { edge: usize, driver: DriverId },
    #[error("edge {edge} refers to unknown rider {rider}")]
    UnknownRider { edge: usize, rider: RiderId },
    #[error("edge {edge} has {riders} riders but driver capacity is {capacity}")]
    OverCapacity {
        edge: usize,
        riders: usize,
        capacity: u32,
    },
    #[error("edge {0} duplicates an earlier (driver, riders) pair")]
    DuplicateEdge(usize),
    #[error("vertex id {0} listed twice")]
    DuplicateVertex(String),
    #[error("malformed hypergraph JSON: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypergraphStats {
    /// Largest driver capacity.
    pub lambda: u32,
    pub w_min: u64,
    pub w_max: u64,
    /// `w_max / w_min`, 1 for an edgeless graph.
    pub mu: f64,
    pub edges: usize,
}

/// Driver and rider vertices with feasible matches as hyperedges. Edge ids
/// are positions in [`Hypergraph::edges`].
#[derive(Debug, Clone)]
pub struct Hypergraph {
    drivers: Vec<DriverVertex>,
    riders: Vec<RiderVertex>,
    edges: Vec<HyperEdge>,
    driver_pos: HashMap<DriverId, usize>,
    rider_pos: HashMap<RiderId, usize>,
    driver_edges: Vec<Vec<usize>>,
    rider_edges: Vec<Vec<usize>>,
    lookup: HashMap<(DriverId, Vec<RiderId>), usize>,
}

#[derive(Serialize, Deserialize)]
struct EdgeDoc {
    driver: DriverId,
    riders: Vec<RiderId>,
    station: Option<VertexId>,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
struct HypergraphDoc {
    drivers: Vec<DriverVertex>,
    riders: Vec<RiderVertex>,
    edges: Vec<EdgeDoc>,
}

impl Hypergraph {
    pub fn new(
        drivers: Vec<DriverVertex>,
        riders: Vec<RiderVertex>,
        edges: Vec<HyperEdge>,
    ) -> Result<Self, HypergraphError> {
        let mut driver_pos = HashMap::new();
        for (i, d) in drivers.iter().enumerate() {
            if driver_pos.insert(d.id, i).is_some() {
                return Err(HypergraphError::DuplicateVertex(d.id.to_string()));
            }
        }
        let mut rider_pos = HashMap::new();
        for (i, r) in riders.iter().enumerate() {
            if rider_pos.insert(r.id, i).is_some() {
                return Err(HypergraphError::DuplicateVertex(r.id.to_string()));
            }
        }
        let mut driver_edges = vec![Vec::new(); drivers.len()];
        let mut rider_edges = vec![Vec::new(); riders.len()];
        let mut lookup = HashMap::new();
        let mut edges = edges;
        for (i, e) in edges.iter_mut().enumerate() {
            e.riders.sort_unstable();
            e.riders.dedup();
            if e.riders.is_empty() {
                return Err(HypergraphError::EmptyEdge(i));
            }
            if e.weight == 0 {
                return Err(HypergraphError::ZeroWeight(i));
            }
            let Some(&dp) = driver_pos.get(&e.driver) else {
                return Err(HypergraphError::UnknownDriver {
                    edge: i,
                    driver: e.driver,
                });
            };
            let cap = drivers[dp].capacity;
            if e.riders.len() > cap as usize {
                return Err(HypergraphError::OverCapacity {
                    edge: i,
                    riders: e.riders.len(),
                    capacity: cap,
                });
            }
            for r in &e.riders {
                let Some(&rp) = rider_pos.get(r) else {
                    return Err(HypergraphError::UnknownRider { edge: i, rider: *r });
                };
                rider_edges[rp].push(i);
            }
            driver_edges[dp].push(i);
            if lookup.insert((e.driver, e.riders.clone()), i).is_some() {
                return Err(HypergraphError::DuplicateEdge(i));
            }
        }
        Ok(Self {
            drivers,
            riders,
            edges,
            driver_pos,
            rider_pos,
            driver_edges,
            rider_edges,
            lookup,
        })
    }

    pub fn drivers(&self) -> &[DriverVertex] {
        &self.drivers
    }

    pub fn riders(&self) -> &[RiderVertex] {
        &self.riders
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &HyperEdge {
        &self.edges[id]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn driver(&self, id: DriverId) -> Option<&DriverVertex> {
        self.driver_pos.get(&id).map(|&i| &self.drivers[i])
    }

    pub fn rider(&self, id: RiderId) -> Option<&RiderVertex> {
        self.rider_pos.get(&id).map(|&i| &self.riders[i])
    }

    /// Incidence list E(d), ascending edge id.
    pub fn edges_of_driver(&self, id: DriverId) -> &[usize] {
        self.driver_pos
            .get(&id)
            .map(|&i| self.driver_edges[i].as_slice())
            .unwrap_or(&[])
    }

    /// Incidence list E(r), ascending edge id.
    pub fn edges_of_rider(&self, id: RiderId) -> &[usize] {
        self.rider_pos
            .get(&id)
            .map(|&i| self.rider_edges[i].as_slice())
            .unwrap_or(&[])
    }

    /// Edge with exactly this driver and rider set, if present.
    pub fn find_edge(&self, driver: DriverId, riders: &[RiderId]) -> Option<usize> {
        let mut key = riders.to_vec();
        key.sort_unstable();
        key.dedup();
        self.lookup.get(&(driver, key)).copied()
    }

    pub fn stats(&self) -> HypergraphStats {
        let lambda = self.drivers.iter().map(|d| d.capacity).max().unwrap_or(0);
        let w_min = self.edges.iter().map(|e| e.weight).min().unwrap_or(0);
        let w_max = self.edges.iter().map(|e| e.weight).max().unwrap_or(0);
        let mu = if w_min == 0 {
            1.0
        } else {
            w_max as f64 / w_min as f64
        };
        HypergraphStats {
            lambda,
            w_min,
            w_max,
            mu,
            edges: self.edges.len(),
        }
    }

    /// First edge with a non-empty proper rider subset missing from the
    /// graph, together with that subset.
    pub fn closure_violation(&self) -> Option<(usize, Vec<RiderId>)> {
        for (i, e) in self.edges.iter().enumerate() {
            let k = e.riders.len();
            for mask in 1..(1u32 << k) - 1 {
                let sub: Vec<RiderId> = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| e.riders[b])
                    .collect();
                if self.find_edge(e.driver, &sub).is_none() {
                    return Some((i, sub));
                }
            }
        }
        None
    }

    pub fn is_downward_closed(&self) -> bool {
        self.closure_violation().is_none()
    }

    /// First pair `(sub, sup)` of edges with the same driver, nested rider
    /// sets and `w(sub) > w(sup)`.
    pub fn monotonicity_violation(&self) -> Option<(usize, usize)> {
        for (i, e) in self.edges.iter().enumerate() {
            let k = e.riders.len();
            for mask in 1..(1u32 << k) - 1 {
                let sub: Vec<RiderId> = (0..k)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| e.riders[b])
                    .collect();
                if let Some(j) = self.find_edge(e.driver, &sub) {
                    if self.edges[j].weight > e.weight {
                        return Some((j, i));
                    }
                }
            }
        }
        None
    }

    /// Same structure with every weight set to 1.
    pub fn with_unit_weights(&self) -> Hypergraph {
        let mut h = self.clone();
        for e in &mut h.edges {
            e.weight = 1;
        }
        h
    }

    /// Sub-hypergraph on the given drivers and riders, keeping only edges
    /// entirely inside them. Edge order is preserved.
    pub fn restrict(&self, drivers: &[DriverId], riders: &[RiderId]) -> Hypergraph {
        let ds: std::collections::HashSet<_> = drivers.iter().collect();
        let rs: std::collections::HashSet<_> = riders.iter().collect();
        let dv = self
            .drivers
            .iter()
            .filter(|d| ds.contains(&d.id))
            .cloned()
            .collect();
        let rv = self
            .riders
            .iter()
            .filter(|r| rs.contains(&r.id))
            .cloned()
            .collect();
        let ev = self
            .edges
            .iter()
            .filter(|e| ds.contains(&e.driver) && e.riders.iter().all(|r| rs.contains(r)))
            .cloned()
            .collect();
        Hypergraph::new(dv, rv, ev).expect("restriction of a valid hypergraph is valid")
    }

    /// Union of hypergraphs over disjoint vertex sets, edges concatenated in
    /// argument order.
    pub fn disjoint_union<'a>(
        parts: impl IntoIterator<Item = &'a Hypergraph>,
    ) -> Result<Hypergraph, HypergraphError> {
        let mut dv = Vec::new();
        let mut rv = Vec::new();
        let mut ev = Vec::new();
        for h in parts {
            dv.extend(h.drivers.iter().cloned());
            rv.extend(h.riders.iter().cloned());
            ev.extend(h.edges.iter().cloned());
        }
        Hypergraph::new(dv, rv, ev)
    }

    pub fn to_json(&self) -> String {
        let doc = HypergraphDoc {
            drivers: self.drivers.clone(),
            riders: self.riders.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    driver: e.driver,
                    riders: e.riders.clone(),
                    station: e.station,
                    weight: e.weight,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("hypergraph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Hypergraph, HypergraphError> {
        let doc: HypergraphDoc =
            serde_json::from_str(text).map_err(|e| HypergraphError::Json(e.to_string()))?;
        let edges = doc
            .edges
            .into_iter()
            .map(|e| {
                let mut he = HyperEdge::new(e.driver, e.riders, e.weight);
                he.station = e.station;
                he
            })
            .collect();
        Hypergraph::new(doc.drivers, doc.riders, edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(id: u32, cap: u32) -> DriverVertex {
        DriverVertex {
            id: DriverId(id),
            kind: DriverKind::Designated,
            match_type: MatchType::FirstMile,
            capacity: cap,
        }
    }

    fn rv(id: u32) -> RiderVertex {
        RiderVertex {
            id: RiderId(id),
            match_type: MatchType::FirstMile,
        }
    }

    fn e(d: u32, rs: &[u32], w: u64) -> HyperEdge {
        HyperEdge::new(DriverId(d), rs.iter().map(|&r| RiderId(r)).collect(), w)
    }

    #[test]
    fn incidence_and_lookup() {
        let h = Hypergraph::new(
            vec![dv(1, 2), dv(2, 1)],
            vec![rv(1), rv(2)],
            vec![e(1, &[2, 1], 4), e(1, &[1], 3), e(2, &[2], 5)],
        )
        .unwrap();
        assert_eq!(h.edges_of_driver(DriverId(1)), &[0, 1]);
        assert_eq!(h.edges_of_rider(RiderId(2)), &[0, 2]);
        assert_eq!(h.find_edge(DriverId(1), &[RiderId(1), RiderId(2)]), Some(0));
        assert_eq!(h.find_edge(DriverId(2), &[RiderId(1)]), None);
        let s = h.stats();
        assert_eq!((s.lambda, s.w_min, s.w_max), (2, 3, 5));
        assert!((s.mu - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_edges() {
        let err = |edges| Hypergraph::new(vec![dv(1, 1)], vec![rv(1), rv(2)], edges).unwrap_err();
        assert_eq!(err(vec![e(1, &[1], 0)]), HypergraphError::ZeroWeight(0));
        assert_eq!(err(vec![e(1, &[], 1)]), HypergraphError::EmptyEdge(0));
        assert!(matches!(
            err(vec![e(1, &[1, 2], 1)]),
            HypergraphError::OverCapacity { .. }
        ));
        assert_eq!(
            err(vec![e(1, &[1], 1), e(1, &[1], 2)]),
            HypergraphError::DuplicateEdge(1)
        );
        assert!(matches!(
            err(vec![e(3, &[1], 1)]),
            HypergraphError::UnknownDriver { .. }
        ));
    }

    #[test]
    fn json_round_trip() {
        let h = Hypergraph::new(
            vec![dv(1, 2)],
            vec![rv(1), rv(2)],
            vec![e(1, &[1], 3), e(1, &[1, 2], 4)],
        )
        .unwrap();
        let text = h.to_json();
        assert!(text.contains("\"edges\""));
        let back = Hypergraph::from_json(&text).unwrap();
        assert_eq!(back.edges(), h.edges());
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn restrict_keeps_inner_edges() {
        let h = Hypergraph::new(
            vec![dv(1, 2), dv(2, 2)],
            vec![rv(1), rv(2)],
            vec![e(1, &[1], 3), e(1, &[1, 2], 4), e(2, &[2], 1)],
        )
        .unwrap();
        let sub = h.restrict(&[DriverId(1)], &[RiderId(1)]);
        assert_eq!(sub.num_edges(), 1);
        assert_eq!(sub.edge(0).weight, 3);
    }
}
