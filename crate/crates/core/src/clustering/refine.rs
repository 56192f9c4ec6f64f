//! Refinement phase: merge small clusters, balance the rider/driver ratio,
//! split large clusters.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use super::{cells_adjacent, window_or_clamped, Agent, Cluster, ClusterConfig, ClusterSet, IntervalWindow};
use crate::model::{DriverId, Instance, RiderId};

pub(super) struct Windows {
    riders: HashMap<RiderId, IntervalWindow>,
    drivers: HashMap<DriverId, IntervalWindow>,
}

impl Windows {
    pub(super) fn of(instance: &Instance) -> Self {
        Self {
            riders: instance
                .riders
                .iter()
                .map(|r| (r.id, window_or_clamped(Agent::Rider(r))))
                .collect(),
            drivers: instance
                .personal_drivers
                .iter()
                .map(|d| (d.id, window_or_clamped(Agent::Driver(d))))
                .collect(),
        }
    }

    fn mean<'a>(ws: impl Iterator<Item = &'a IntervalWindow>) -> Option<(f64, f64)> {
        let (mut a, mut b, mut n) = (0.0, 0.0, 0usize);
        for w in ws {
            a += w.a as f64;
            b += w.b as f64;
            n += 1;
        }
        (n > 0).then(|| (a / n as f64, b / n as f64))
    }

    fn rider_mean(&self, c: &Cluster) -> Option<(f64, f64)> {
        Self::mean(c.riders.iter().map(|r| &self.riders[r]))
    }

    fn driver_mean(&self, c: &Cluster) -> Option<(f64, f64)> {
        Self::mean(c.personal.iter().map(|d| &self.drivers[d]))
    }

    fn rider_start(&self, r: RiderId) -> i64 {
        self.riders[&r].a
    }

    fn driver_start(&self, d: DriverId) -> i64 {
        self.drivers[&d].a
    }
}

fn overlap(x: Option<(f64, f64)>, y: Option<(f64, f64)>) -> bool {
    match (x, y) {
        (Some(x), Some(y)) => x.0 <= y.1 && y.0 <= x.1,
        _ => false,
    }
}

/// Same match type and destination sector, adjacent origin cells, and the
/// mean driver window of one overlaps the mean rider window of the other.
fn adjacent(w: &Windows, c: &Cluster, d: &Cluster) -> bool {
    c.match_type == d.match_type
        && c.dest_sector == d.dest_sector
        && cells_adjacent(c.origin_cell, d.origin_cell)
        && (overlap(w.driver_mean(c), w.rider_mean(d)) || overlap(w.rider_mean(c), w.driver_mean(d)))
}

/// Cluster graph with contraction. Edges join every pair in which at least
/// one endpoint is `marked` and the clusters are adjacent.
struct MergeGraph {
    adj: Vec<BTreeSet<usize>>,
    alive: Vec<bool>,
}

impl MergeGraph {
    fn new(w: &Windows, cl: &[Cluster], marked: &BTreeSet<usize>) -> Self {
        let n = cl.len();
        let mut adj = vec![BTreeSet::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if (marked.contains(&i) || marked.contains(&j)) && adjacent(w, &cl[i], &cl[j]) {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Self {
            adj,
            alive: vec![true; n],
        }
    }

    fn neighbours(&self, c: usize) -> Vec<usize> {
        self.adj[c].iter().copied().filter(|&x| self.alive[x]).collect()
    }

    /// Moves `c` into `t` and contracts the two vertices into `t`.
    fn merge(&mut self, cl: &mut [Cluster], c: usize, t: usize) {
        let (riders, personal) = (
            std::mem::take(&mut cl[c].riders),
            std::mem::take(&mut cl[c].personal),
        );
        cl[t].riders.extend(riders);
        cl[t].personal.extend(personal);
        cl[t].normalize();
        self.alive[c] = false;
        let ns = std::mem::take(&mut self.adj[c]);
        for x in ns {
            self.adj[x].remove(&c);
            if x != t {
                self.adj[x].insert(t);
                self.adj[t].insert(x);
            }
        }
    }
}

/// Merges clusters below `s_min`, smallest first, each into its smallest
/// adjacent cluster. Clusters left without a neighbour are flagged
/// isolated.
pub(super) fn merge_small(cl: &mut Vec<Cluster>, w: &Windows, s_min: usize) {
    let mut small: BTreeSet<usize> = (0..cl.len()).filter(|&i| cl[i].size() < s_min).collect();
    let mut g = MergeGraph::new(w, cl, &small);
    while let Some(&c) = small.iter().min_by_key(|&&i| (cl[i].size(), cl[i].id)) {
        small.remove(&c);
        let Some(t) = g
            .neighbours(c)
            .into_iter()
            .min_by_key(|&i| (cl[i].size(), cl[i].id))
        else {
            cl[c].isolated = true;
            continue;
        };
        g.merge(cl, c, t);
        if small.contains(&t) && cl[t].size() >= s_min {
            small.remove(&t);
        }
    }
    retain_alive(cl, &g.alive);
}

fn retain_alive(cl: &mut Vec<Cluster>, alive: &[bool]) {
    let mut k = 0;
    cl.retain(|_| {
        k += 1;
        alive[k - 1]
    });
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Low,
    High,
}

fn side(riders: usize, drivers: usize, cfg: &ClusterConfig, ratio: f64) -> Option<Side> {
    if drivers == 0 {
        return Some(Side::High);
    }
    let r = riders as f64 / drivers as f64;
    if r < cfg.tau1 {
        Some(Side::Low)
    } else if r > cfg.tau2 * ratio {
        Some(Side::High)
    } else {
        None
    }
}

fn f_value(riders: usize, drivers: usize, s: Side) -> f64 {
    let (num, den) = match s {
        Side::Low => (drivers, riders),
        Side::High => (riders, drivers),
    };
    if den == 0 {
        f64::INFINITY
    } else {
        num as f64 / den as f64
    }
}

/// Imbalance value `f_C` of a cluster with the given member counts, or
/// `None` when the cluster is balanced. `ratio` is `|R| / |Γ|` over the
/// whole instance.
pub fn imbalance(riders: usize, drivers: usize, cfg: &ClusterConfig, ratio: f64) -> Option<f64> {
    side(riders, drivers, cfg, ratio).map(|s| f_value(riders, drivers, s))
}

fn desc(a: f64, b: f64) -> Ordering {
    b.partial_cmp(&a).unwrap_or(Ordering::Equal)
}

/// Merges imbalanced clusters, most imbalanced first, into the adjacent
/// cluster that lowers their imbalance most: the most imbalanced cluster of
/// the opposite side if any, otherwise the neighbour giving the smallest
/// merged value.
pub(super) fn balance(cl: &mut Vec<Cluster>, w: &Windows, cfg: &ClusterConfig, s_min: usize) {
    let total_r: usize = cl.iter().map(|c| c.riders.len()).sum();
    let total_g: usize = cl.iter().map(|c| c.personal.len()).sum();
    if total_g == 0 {
        return;
    }
    let ratio = total_r as f64 / total_g as f64;
    let state = |c: &Cluster| side(c.riders.len(), c.personal.len(), cfg, ratio);
    let fv = |c: &Cluster, s: Side| f_value(c.riders.len(), c.personal.len(), s);

    let mut imb: BTreeSet<usize> = (0..cl.len()).filter(|&i| state(&cl[i]).is_some()).collect();
    let mut g = MergeGraph::new(w, cl, &imb);
    loop {
        let Some(c) = imb
            .iter()
            .copied()
            .min_by(|&a, &b| {
                let fa = fv(&cl[a], state(&cl[a]).expect("member of C_imb"));
                let fb = fv(&cl[b], state(&cl[b]).expect("member of C_imb"));
                desc(fa, fb).then(cl[a].id.cmp(&cl[b].id))
            })
        else {
            break;
        };
        imb.remove(&c);
        let Some(sc) = state(&cl[c]) else { continue };
        let ns = g.neighbours(c);
        let opposite = ns
            .iter()
            .copied()
            .filter(|&i| imb.contains(&i))
            .filter_map(|i| state(&cl[i]).filter(|&s| s != sc).map(|s| (i, fv(&cl[i], s))))
            .min_by(|a, b| desc(a.1, b.1).then(cl[a.0].id.cmp(&cl[b.0].id)))
            .map(|(i, _)| i);
        let target = opposite.or_else(|| {
            ns.iter()
                .copied()
                .map(|i| {
                    let r = cl[c].riders.len() + cl[i].riders.len();
                    let d = cl[c].personal.len() + cl[i].personal.len();
                    (i, f_value(r, d, sc))
                })
                .min_by(|a, b| desc(b.1, a.1).then(cl[a.0].id.cmp(&cl[b.0].id)))
                .map(|(i, _)| i)
        });
        let Some(t) = target else { continue };
        let keep_flag = cl[t].isolated;
        g.merge(cl, c, t);
        cl[t].isolated = keep_flag && cl[t].size() < s_min;
        if imb.contains(&t) && state(&cl[t]).is_none() {
            imb.remove(&t);
        }
    }
    retain_alive(cl, &g.alive);
}

/// Splits every cluster above `s_max` into `ceil(|C| / s_max)` parts.
/// Riders, then drivers, each sorted by window start, are dealt round
/// robin so part sizes differ by at most one and keep the rider/driver
/// ratio.
pub(super) fn split_large(cl: &mut Vec<Cluster>, w: &Windows, s_max: usize) {
    let mut out = Vec::with_capacity(cl.len());
    for c in cl.drain(..) {
        if c.size() <= s_max {
            out.push(c);
            continue;
        }
        let z = c.size().div_ceil(s_max);
        let mut parts: Vec<Cluster> = (0..z)
            .map(|_| Cluster {
                riders: Vec::new(),
                personal: Vec::new(),
                designated: Vec::new(),
                isolated: false,
                ..c.clone()
            })
            .collect();
        let mut riders = c.riders.clone();
        riders.sort_by_key(|&r| (w.rider_start(r), r));
        let mut drivers = c.personal.clone();
        drivers.sort_by_key(|&d| (w.driver_start(d), d));
        let mut k = 0;
        for r in riders {
            parts[k % z].riders.push(r);
            k += 1;
        }
        for d in drivers {
            parts[k % z].personal.push(d);
            k += 1;
        }
        for p in &mut parts {
            p.normalize();
        }
        out.extend(parts);
    }
    *cl = out;
}

/// Phase II: merge, balance, split. Cluster ids are renumbered in output
/// order.
pub fn refine_clusters(cs: ClusterSet, cfg: &ClusterConfig, instance: &Instance) -> ClusterSet {
    let w = Windows::of(instance);
    let mut cl = cs.clusters;
    merge_small(&mut cl, &w, cfg.s_min);
    balance(&mut cl, &w, cfg, cfg.s_min);
    split_large(&mut cl, &w, cfg.s_max);
    let mut out = ClusterSet {
        grid: cs.grid,
        clusters: cl,
    };
    out.renumber();
    out
}
