use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::feasibility::{DriverVertex, HyperEdge, Hypergraph, RiderVertex};
use crate::model::{DriverId, DriverKind, MatchType, Problem, RiderId};

/// Shape of a random downward-closed hypergraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomGraphConfig {
    pub riders: usize,
    pub personal: usize,
    /// Designated drivers; ignored when `assumption2` is set, which uses
    /// one per rider.
    pub designated: usize,
    /// Capacities are drawn from `1..=lambda`; at least one driver gets
    /// exactly `lambda`.
    pub lambda: u32,
    /// Maximal rider sets drawn per driver.
    pub seeds_per_driver: usize,
    /// Per-rider weight increments are drawn from `1..=max_step`.
    pub max_step: u64,
    /// Every designated driver can serve every rider alone, with
    /// `|Δ| = |R|`.
    pub assumption2: bool,
    pub problem: Problem,
}

impl Default for RandomGraphConfig {
    fn default() -> Self {
        Self {
            riders: 8,
            personal: 3,
            designated: 8,
            lambda: 3,
            seeds_per_driver: 2,
            max_step: 5,
            assumption2: true,
            problem: Problem::MinDist,
        }
    }
}

/// Random hypergraph on FM drivers and riders. For every driver a few
/// random rider sets up to its capacity are drawn and closed under
/// non-empty subsets. A set's weight is the driver's base cost plus the
/// sum of its riders' increments, so weights grow along nested sets and
/// are at least 1. MinNum graphs use unit weights.
pub fn random_hypergraph(cfg: &RandomGraphConfig, rng: &mut impl Rng) -> Hypergraph {
    let n_designated = if cfg.assumption2 {
        cfg.riders
    } else {
        cfg.designated
    };
    let lambda = cfg.lambda.max(1);
    let mut drivers = Vec::new();
    for i in 0..cfg.personal + n_designated {
        let kind = if i < cfg.personal {
            DriverKind::Personal
        } else {
            DriverKind::Designated
        };
        drivers.push(DriverVertex {
            id: DriverId(i as u32 + 1),
            kind,
            match_type: MatchType::FirstMile,
            capacity: if i == 0 { lambda } else { rng.gen_range(1..=lambda) },
        });
    }
    let riders: Vec<RiderVertex> = (1..=cfg.riders as u32)
        .map(|id| RiderVertex {
            id: RiderId(id),
            match_type: MatchType::FirstMile,
        })
        .collect();
    let rider_ids: Vec<RiderId> = riders.iter().map(|r| r.id).collect();

    let mut edges: Vec<HyperEdge> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let step = cfg.max_step.max(1);
    for d in &drivers {
        let base: u64 = rng.gen_range(0..=step);
        let inc: Vec<u64> = (0..cfg.riders).map(|_| rng.gen_range(1..=step)).collect();
        let weight = |rs: &[RiderId]| -> u64 {
            match cfg.problem {
                Problem::MinNum => 1,
                Problem::MinDist => base + rs.iter().map(|r| inc[r.0 as usize - 1]).sum::<u64>(),
            }
        };
        let mut sets: Vec<Vec<RiderId>> = Vec::new();
        if cfg.assumption2 && d.kind == DriverKind::Designated {
            sets.extend(rider_ids.iter().map(|&r| vec![r]));
        }
        for _ in 0..cfg.seeds_per_driver {
            let k = rng.gen_range(1..=d.capacity as usize).min(rider_ids.len());
            let mut s: Vec<RiderId> = rider_ids.choose_multiple(rng, k).copied().collect();
            s.sort_unstable();
            sets.push(s);
        }
        for s in sets {
            for mask in 1..(1u32 << s.len()) {
                let sub: Vec<RiderId> = (0..s.len())
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| s[b])
                    .collect();
                if seen.insert((d.id, sub.clone())) {
                    let w = weight(&sub);
                    edges.push(HyperEdge::new(d.id, sub, w));
                }
            }
        }
    }
    Hypergraph::new(drivers, riders, edges).expect("random graph is well formed")
}
