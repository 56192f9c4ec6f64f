use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::GenError;
use crate::feasibility::{DriverVertex, HyperEdge, Hypergraph, RiderVertex};
use crate::model::{DriverId, DriverKind, MatchType, Problem, RiderId};

/// A 3-dimensional matching instance with `|A| = 2q` and `|B| = |C| = q`.
/// Elements are arbitrary labels, distinct across the three sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThreeDM {
    pub q: usize,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    #[serde(rename = "B")]
    pub b: Vec<u32>,
    #[serde(rename = "C")]
    pub c: Vec<u32>,
    #[serde(rename = "F")]
    pub f: Vec<(u32, u32, u32)>,
    pub omega: u64,
}

impl ThreeDM {
    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: &str| Err(GenError::InvalidConfig(m.to_string()));
        if self.a.len() != 2 * self.q || self.b.len() != self.q || self.c.len() != self.q {
            return bad("set sizes must be |A| = 2q and |B| = |C| = q");
        }
        let mut all: Vec<u32> = self.a.iter().chain(&self.b).chain(&self.c).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return bad("A, B and C must be disjoint sets");
        }
        if self.omega < 2 {
            return bad("omega must be at least 2");
        }
        for &(x, y, z) in &self.f {
            if !self.a.contains(&x) || !self.b.contains(&y) || !self.c.contains(&z) {
                return bad("every triple must lie in A × B × C");
            }
        }
        Ok(())
    }

    fn pos(set: &[u32], x: u32) -> usize {
        set.iter().position(|&y| y == x).expect("validated triple")
    }

    /// Driver id of element `a` of `A`: its position plus one.
    pub fn driver_of(&self, a: u32) -> DriverId {
        DriverId(Self::pos(&self.a, a) as u32 + 1)
    }

    /// Rider ids: `B` takes `1..=q`, `C` takes `q+1..=2q`.
    pub fn rider_of_b(&self, b: u32) -> RiderId {
        RiderId(Self::pos(&self.b, b) as u32 + 1)
    }

    pub fn rider_of_c(&self, c: u32) -> RiderId {
        RiderId((self.q + Self::pos(&self.c, c)) as u32 + 1)
    }
}

/// Reduction hypergraph: drivers are `A` with capacity 2, riders are
/// `B ∪ C`. Every triple yields `{a,b,c}`, `{a,b}` and `{a,c}` of weight 2;
/// every remaining pair of a driver with a rider gets weight `ω`. For
/// [`Problem::MinNum`] all weights are 1.
pub fn gen_3dm_hypergraph(tdm: &ThreeDM, problem: Problem) -> Result<Hypergraph, GenError> {
    tdm.validate()?;
    let drivers = tdm
        .a
        .iter()
        .map(|&a| DriverVertex {
            id: tdm.driver_of(a),
            kind: DriverKind::Designated,
            match_type: MatchType::FirstMile,
            capacity: 2,
        })
        .collect();
    let rider_ids: Vec<RiderId> = tdm
        .b
        .iter()
        .map(|&b| tdm.rider_of_b(b))
        .chain(tdm.c.iter().map(|&c| tdm.rider_of_c(c)))
        .collect();
    let riders = rider_ids
        .iter()
        .map(|&id| RiderVertex {
            id,
            match_type: MatchType::FirstMile,
        })
        .collect();

    let mut edges: BTreeMap<(DriverId, Vec<RiderId>), u64> = BTreeMap::new();
    let mut order = Vec::new();
    let mut add = |d: DriverId, mut rs: Vec<RiderId>, w: u64| {
        rs.sort_unstable();
        if !edges.contains_key(&(d, rs.clone())) {
            edges.insert((d, rs.clone()), w);
            order.push((d, rs));
        }
    };
    for &(a, b, c) in &tdm.f {
        let (d, rb, rc) = (tdm.driver_of(a), tdm.rider_of_b(b), tdm.rider_of_c(c));
        add(d, vec![rb, rc], 2);
        add(d, vec![rb], 2);
        add(d, vec![rc], 2);
    }
    for &a in &tdm.a {
        for &r in &rider_ids {
            add(tdm.driver_of(a), vec![r], tdm.omega);
        }
    }
    let unit = problem == Problem::MinNum;
    let edges = order
        .into_iter()
        .map(|k| {
            let w = if unit { 1 } else { edges[&k] };
            HyperEdge::new(k.0, k.1, w)
        })
        .collect();
    Hypergraph::new(drivers, riders, edges)
        .map_err(|e| GenError::InvalidConfig(format!("reduction produced an invalid graph: {e}")))
}

/// Size of a maximum set of pairwise disjoint triples, by exhaustive
/// search.
pub fn brute_force_3dm(tdm: &ThreeDM) -> usize {
    fn go(f: &[(u32, u32, u32)], used: &mut Vec<u32>, best: &mut usize, depth: usize) {
        *best = (*best).max(depth);
        if depth + f.len() <= *best {
            return;
        }
        for (i, &(a, b, c)) in f.iter().enumerate() {
            if used.contains(&a) || used.contains(&b) || used.contains(&c) {
                continue;
            }
            used.extend([a, b, c]);
            go(&f[i + 1..], used, best, depth + 1);
            used.truncate(used.len() - 3);
        }
    }
    let mut f = tdm.f.clone();
    f.sort_unstable();
    f.dedup();
    let mut best = 0;
    go(&f, &mut Vec::new(), &mut best, 0);
    best
}

/// Random instance with labels `A = 0..2q`, `B = 2q..3q`, `C = 3q..4q` and
/// `n_triples` distinct triples drawn uniformly (fewer when `A × B × C`
/// is smaller).
pub fn random_3dm(q: usize, n_triples: usize, omega: u64, rng: &mut impl Rng) -> ThreeDM {
    let q32 = q as u32;
    let a: Vec<u32> = (0..2 * q32).collect();
    let b: Vec<u32> = (2 * q32..3 * q32).collect();
    let c: Vec<u32> = (3 * q32..4 * q32).collect();
    let mut all = Vec::with_capacity(2 * q * q * q);
    for &x in &a {
        for &y in &b {
            for &z in &c {
                all.push((x, y, z));
            }
        }
    }
    let mut f: Vec<_> = all
        .choose_multiple(rng, n_triples.min(all.len()))
        .copied()
        .collect();
    f.sort_unstable();
    ThreeDM {
        q,
        a,
        b,
        c,
        f,
        omega,
    }
}
