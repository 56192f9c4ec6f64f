//! Construction phase: bin agents by cell and sector, then grow one cluster
//! around each dominating rider of the bin's interval graph.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    bearing, sector_of, window_or_clamped, Agent, Cell, Cluster, ClusterConfig, ClusterError,
    ClusterSet, Grid, IntervalWindow,
};
use crate::model::{DriverId, Instance, Location, MatchType, RiderId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Member {
    Rider(RiderId),
    Driver(DriverId),
}

type BinKey = (MatchType, Cell, u8);

#[derive(Default)]
struct Bin {
    riders: Vec<(RiderId, IntervalWindow)>,
    drivers: Vec<(DriverId, IntervalWindow)>,
}

/// Bin key of an agent: FM agents by origin cell and destination sector,
/// LM agents by destination cell and origin sector.
fn key_of(
    grid: &Grid,
    mt: MatchType,
    origin: &Location,
    dest: &Location,
) -> Result<BinKey, ClusterError> {
    let (home, away) = match mt {
        MatchType::FirstMile => (origin, dest),
        MatchType::LastMile => (dest, origin),
    };
    let c = grid.locate(home)?;
    let t = grid.locate(away)?;
    Ok((mt, c, sector_of(c, t, bearing(home, away))))
}

/// Phase I clusters of the personal drivers and riders. Designated drivers
/// are left out; see [`super::allocate_designated`].
pub fn build_clusters_phase1(
    instance: &Instance,
    cfg: &ClusterConfig,
) -> Result<ClusterSet, ClusterError> {
    let grid = Grid::covering(&instance.network, cfg.m1, cfg.m2)?;
    let mut bins: BTreeMap<BinKey, Bin> = BTreeMap::new();
    for r in &instance.riders {
        let k = key_of(&grid, r.match_type, &r.origin, &r.destination)?;
        bins.entry(k)
            .or_default()
            .riders
            .push((r.id, window_or_clamped(Agent::Rider(r))));
    }
    for d in &instance.personal_drivers {
        let k = key_of(&grid, d.match_type, &d.origin, &d.destination)?;
        bins.entry(k)
            .or_default()
            .drivers
            .push((d.id, window_or_clamped(Agent::Driver(d))));
    }
    let bins: Vec<(BinKey, Bin)> = bins.into_iter().collect();
    let per_bin: Vec<Vec<Cluster>> = bins
        .par_iter()
        .map(|((mt, cell, sector), bin)| {
            cluster_bin(bin)
                .into_iter()
                .map(|members| {
                    let mut c = Cluster {
                        id: 0,
                        match_type: *mt,
                        origin_cell: *cell,
                        dest_sector: *sector,
                        riders: Vec::new(),
                        personal: Vec::new(),
                        designated: Vec::new(),
                        isolated: false,
                    };
                    for m in members {
                        match m {
                            Member::Rider(r) => c.riders.push(r),
                            Member::Driver(d) => c.personal.push(d),
                        }
                    }
                    c
                })
                .collect()
        })
        .collect();
    let mut cs = ClusterSet {
        grid,
        clusters: per_bin.into_iter().flatten().collect(),
    };
    cs.renumber();
    Ok(cs)
}

/// Greedy interval domination: scanning by window end, every rider not yet
/// overlapped by a chosen dominator becomes one. Returns indices into
/// `riders`.
fn dominators(riders: &[(RiderId, IntervalWindow)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..riders.len()).collect();
    order.sort_by_key(|&i| (riders[i].1.b, riders[i].1.a, riders[i].0));
    let mut dominated = vec![false; riders.len()];
    let mut out = Vec::new();
    for &i in &order {
        if dominated[i] {
            continue;
        }
        out.push(i);
        for (j, r) in riders.iter().enumerate() {
            if r.1.overlaps(&riders[i].1) {
                dominated[j] = true;
            }
        }
    }
    out
}

/// Member lists of the clusters of one bin.
fn cluster_bin(bin: &Bin) -> Vec<Vec<Member>> {
    let doms = dominators(&bin.riders);
    let is_dom: Vec<bool> = {
        let mut v = vec![false; bin.riders.len()];
        for &i in &doms {
            v[i] = true;
        }
        v
    };
    // V side: non-dominating riders, then drivers
    let mut vs: Vec<(Member, IntervalWindow)> = bin
        .riders
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_dom[*i])
        .map(|(_, r)| (Member::Rider(r.0), r.1))
        .collect();
    vs.extend(bin.drivers.iter().map(|d| (Member::Driver(d.0), d.1)));

    let u_win: Vec<IntervalWindow> = doms.iter().map(|&i| bin.riders[i].1).collect();
    let v_adj: Vec<Vec<usize>> = vs
        .iter()
        .map(|(_, w)| (0..u_win.len()).filter(|&u| u_win[u].overlaps(w)).collect())
        .collect();
    let mut u_adj: Vec<Vec<usize>> = vec![Vec::new(); u_win.len()];
    for (v, us) in v_adj.iter().enumerate() {
        for &u in us {
            u_adj[u].push(v);
        }
    }

    let mut clusters: Vec<Vec<Member>> = doms
        .iter()
        .map(|&i| vec![Member::Rider(bin.riders[i].0)])
        .collect();
    let mut u_deg: Vec<usize> = u_adj.iter().map(Vec::len).collect();
    let mut placed = vec![false; vs.len()];

    let place = |v: usize,
                     u: usize,
                     clusters: &mut Vec<Vec<Member>>,
                     u_deg: &mut Vec<usize>,
                     placed: &mut Vec<bool>| {
        placed[v] = true;
        clusters[u].push(vs[v].0);
        for &w in &v_adj[v] {
            u_deg[w] -= 1;
        }
    };

    for v in 0..vs.len() {
        if v_adj[v].len() == 1 {
            let u = v_adj[v][0];
            place(v, u, &mut clusters, &mut u_deg, &mut placed);
        }
    }
    loop {
        let pick = (0..doms.len())
            .filter(|&u| u_deg[u] > 0)
            .min_by_key(|&u| (clusters_riders(&clusters[u]), u_deg[u], u));
        let Some(u) = pick else { break };
        let v = u_adj[u]
            .iter()
            .copied()
            .filter(|&v| !placed[v])
            .min_by_key(|&v| (v_adj[v].len(), v))
            .expect("positive degree leaves an unplaced neighbour");
        place(v, u, &mut clusters, &mut u_deg, &mut placed);
    }
    for v in 0..vs.len() {
        if !placed[v] {
            debug_assert!(v_adj[v].is_empty());
            clusters.push(vec![vs[v].0]);
        }
    }
    clusters
}

fn clusters_riders(members: &[Member]) -> usize {
    members
        .iter()
        .filter(|m| matches!(m, Member::Rider(_)))
        .count()
}
