//! Depth-first branch and bound over riders.
//!
//! Connected components of the hypergraph are solved separately. At every
//! node the uncovered rider with the fewest usable edges is branched on
//! (lowest index on ties). Two lower bounds prune the search: every
//! uncovered rider is charged the smallest per-rider share `w(e) / |R(e)|`
//! among usable edges, and a Lagrangian bound prices the rider-cover
//! constraints with multipliers refined by subgradient steps, warm-started
//! from the parent node. The Lagrangian solution is also rounded into
//! complete assignments to tighten the incumbent, and children are tried
//! in ascending reduced cost.

use std::time::{Duration, Instant};

use super::{edge_cost, uncoverable, AssignmentSolution, Problem, SolveError, Status};
use crate::feasibility::Hypergraph;

/// Subgradient iterations at the root and at every other node.
const ROOT_ITERS: usize = 300;
const NODE_ITERS: usize = 30;
const EPS: f64 = 1e-6;

struct LocalEdge {
    id: usize,
    driver: usize,
    riders: Vec<usize>,
    cost: u64,
    share: f64,
}

struct Search<'a> {
    edges: &'a [LocalEdge],
    by_rider: Vec<Vec<usize>>,
    n_drivers: usize,
    covered: Vec<bool>,
    used: Vec<bool>,
    chosen: Vec<usize>,
    cost: u64,
    best: Option<(u64, Vec<usize>)>,
    /// Rider multipliers, carried from parent to child.
    mult: Vec<f64>,
    deadline: Option<Instant>,
    nodes: u64,
    timed_out: bool,
}

/// Outcome of the Lagrangian phase at one node.
enum Dual {
    /// The bound reaches the incumbent.
    Pruned,
    /// The relaxed solution was a valid completion, hence optimal below
    /// this node.
    Solved,
    /// Reduced costs of the usable edges.
    Open(Vec<f64>),
}

impl Search<'_> {
    fn usable(&self, e: &LocalEdge) -> bool {
        !self.used[e.driver] && e.riders.iter().all(|&r| !self.covered[r])
    }

    fn prunes(&self, bound: f64) -> bool {
        self.best
            .as_ref()
            .is_some_and(|(b, _)| (bound - EPS).ceil() >= *b as f64)
    }

    fn offer(&mut self, cost: u64, extra: &[usize]) {
        if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
            let mut ids = self.chosen.clone();
            ids.extend(extra.iter().map(|&i| self.edges[i].id));
            self.best = Some((cost, ids));
        }
    }

    /// Relaxed problem over `usable`: every free driver takes its edge of
    /// least reduced cost if negative. Returns the dual value, the picked
    /// edges and the reduced costs.
    fn relax(&self, usable: &[usize], pick: &mut [Option<(f64, usize)>]) -> (f64, Vec<f64>) {
        pick.iter_mut().for_each(|p| *p = None);
        let mut rc = Vec::with_capacity(usable.len());
        for (k, &i) in usable.iter().enumerate() {
            let e = &self.edges[i];
            let r = e.cost as f64 - e.riders.iter().map(|&x| self.mult[x]).sum::<f64>();
            rc.push(r);
            if r < pick[e.driver].map_or(0.0, |p| p.0) {
                pick[e.driver] = Some((r, k));
            }
        }
        let mut v = self.cost as f64;
        for (r, &c) in self.covered.iter().enumerate() {
            if !c {
                v += self.mult[r];
            }
        }
        v += pick.iter().flatten().map(|p| p.0).sum::<f64>();
        (v, rc)
    }

    fn lagrangian(&mut self, usable: &[usize], iters: usize) -> Dual {
        let n = self.covered.len();
        let mut pick = vec![None; self.n_drivers];
        let mut grad = vec![0.0; n];
        let mut best_v = f64::NEG_INFINITY;
        let mut best_mult = self.mult.clone();
        let mut step = 1.0;
        let mut stall = 0;
        for _ in 0..iters.max(1) {
            let (v, _) = self.relax(usable, &mut pick);
            if v > best_v + EPS {
                best_v = v;
                best_mult.copy_from_slice(&self.mult);
                stall = 0;
            } else {
                stall += 1;
                if stall >= 5 {
                    step /= 2.0;
                    stall = 0;
                }
            }
            if self.prunes(best_v) {
                return Dual::Pruned;
            }
            for (r, g) in grad.iter_mut().enumerate() {
                *g = if self.covered[r] { 0.0 } else { 1.0 };
            }
            let mut extra = Vec::new();
            let mut cost = self.cost;
            for &(_, k) in pick.iter().flatten() {
                let e = &self.edges[usable[k]];
                for &r in &e.riders {
                    grad[r] -= 1.0;
                }
                extra.push(usable[k]);
                cost += e.cost;
            }
            let norm: f64 = grad.iter().map(|g| g * g).sum();
            if norm == 0.0 {
                self.offer(cost, &extra);
                return Dual::Solved;
            }
            let target = match &self.best {
                Some((b, _)) => *b as f64,
                None => v.abs() * 1.05 + 1.0,
            };
            let t = step * (target - v).max(1.0) / norm;
            for (m, g) in self.mult.iter_mut().zip(&grad) {
                *m += t * g;
            }
        }
        self.mult.copy_from_slice(&best_mult);
        let (v, rc) = self.relax(usable, &mut pick);
        self.round(usable, &rc, &pick);
        if self.prunes(v.max(best_v)) {
            return Dual::Pruned;
        }
        Dual::Open(rc)
    }

    /// Completes the node greedily: first the relaxed solution's edges in
    /// ascending reduced cost, then for each rider still open the usable
    /// edge of least reduced cost.
    fn round(&mut self, usable: &[usize], rc: &[f64], pick: &[Option<(f64, usize)>]) {
        let mut covered = self.covered.clone();
        let mut used = self.used.clone();
        let mut extra = Vec::new();
        let mut cost = self.cost;
        let mut take = |k: usize, covered: &mut Vec<bool>, used: &mut Vec<bool>| {
            let e = &self.edges[usable[k]];
            if used[e.driver] || e.riders.iter().any(|&r| covered[r]) {
                return;
            }
            used[e.driver] = true;
            for &r in &e.riders {
                covered[r] = true;
            }
            extra.push(usable[k]);
            cost += e.cost;
        };
        let mut first: Vec<(f64, usize)> = pick.iter().flatten().copied().collect();
        first.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (_, k) in first {
            take(k, &mut covered, &mut used);
        }
        let mut order: Vec<usize> = (0..usable.len()).collect();
        order.sort_by(|&a, &b| rc[a].total_cmp(&rc[b]).then(a.cmp(&b)));
        for k in order {
            take(k, &mut covered, &mut used);
        }
        if covered.iter().all(|&c| c) {
            self.offer(cost, &extra);
        }
    }

    fn dfs(&mut self, depth: usize) {
        if self.timed_out {
            return;
        }
        self.nodes += 1;
        if let Some(dl) = self.deadline {
            if self.nodes % 64 == 0 && Instant::now() >= dl {
                self.timed_out = true;
                return;
            }
        }
        let mut bound = self.cost as f64;
        // (usable edges, rider)
        let mut branch: Option<(usize, usize)> = None;
        for r in 0..self.covered.len() {
            if self.covered[r] {
                continue;
            }
            let mut n = 0;
            let mut cheapest = f64::INFINITY;
            for &i in &self.by_rider[r] {
                let e = &self.edges[i];
                if self.usable(e) {
                    n += 1;
                    cheapest = cheapest.min(e.share);
                }
            }
            if n == 0 {
                return;
            }
            if branch.is_none_or(|(m, _)| n < m) {
                branch = Some((n, r));
            }
            bound += cheapest;
        }
        let Some((_, r)) = branch else {
            self.offer(self.cost, &[]);
            return;
        };
        if self.prunes(bound) {
            return;
        }
        let usable: Vec<usize> = (0..self.edges.len())
            .filter(|&i| self.usable(&self.edges[i]))
            .collect();
        let iters = if depth == 0 { ROOT_ITERS } else { NODE_ITERS };
        let rc = match self.lagrangian(&usable, iters) {
            Dual::Pruned | Dual::Solved => return,
            Dual::Open(rc) => rc,
        };
        let mut children: Vec<(f64, usize)> = usable
            .iter()
            .zip(&rc)
            .filter(|(&i, _)| self.edges[i].riders.contains(&r))
            .map(|(&i, &c)| (c, i))
            .collect();
        children.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(self.edges[a.1].cost.cmp(&self.edges[b.1].cost))
                .then(a.1.cmp(&b.1))
        });
        let saved = self.mult.clone();
        for (_, i) in children {
            let e = &self.edges[i];
            self.used[e.driver] = true;
            for &x in &e.riders {
                self.covered[x] = true;
            }
            self.cost += e.cost;
            self.chosen.push(e.id);
            self.dfs(depth + 1);
            self.chosen.pop();
            let e = &self.edges[i];
            self.cost -= e.cost;
            for &x in &e.riders {
                self.covered[x] = false;
            }
            self.used[e.driver] = false;
            self.mult.copy_from_slice(&saved);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Cheaper of the weight-first and share-first greedy scans, if either
/// covers every rider.
fn greedy_seed(edges: &[LocalEdge], n_riders: usize, n_drivers: usize) -> Option<(u64, Vec<usize>)> {
    let mut by_cost: Vec<usize> = (0..edges.len()).collect();
    by_cost.sort_by_key(|&i| (edges[i].cost, edges[i].id));
    let mut by_share = by_cost.clone();
    by_share.sort_by(|&a, &b| {
        let (ea, eb) = (&edges[a], &edges[b]);
        (ea.cost as u128 * eb.riders.len() as u128)
            .cmp(&(eb.cost as u128 * ea.riders.len() as u128))
            .then(ea.id.cmp(&eb.id))
    });
    let mut best: Option<(u64, Vec<usize>)> = None;
    for order in [by_cost, by_share] {
        let mut covered = vec![false; n_riders];
        let mut used = vec![false; n_drivers];
        let mut n = 0;
        let mut cost = 0;
        let mut chosen = Vec::new();
        for i in order {
            let e = &edges[i];
            if used[e.driver] || e.riders.iter().any(|&r| covered[r]) {
                continue;
            }
            used[e.driver] = true;
            for &r in &e.riders {
                covered[r] = true;
            }
            n += e.riders.len();
            cost += e.cost;
            chosen.push(e.id);
        }
        if n == n_riders && best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, chosen));
        }
    }
    best
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut c = x;
    while parent[c] != r {
        let n = parent[c];
        parent[c] = r;
        c = n;
    }
    r
}

/// Optimal exact cover by disjoint edges, found combinatorially. With a
/// time limit the best complete assignment found so far is returned with
/// [`Status::TimeLimit`].
pub fn solve_branch_and_bound(
    h: &Hypergraph,
    problem: Problem,
    time_limit: Option<Duration>,
) -> Result<AssignmentSolution, SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    let deadline = time_limit.map(|d| Instant::now() + d);
    let nd = h.drivers().len();
    let mut rider_ids: Vec<_> = h.riders().iter().map(|r| r.id).collect();
    rider_ids.sort_unstable();
    let rider_idx: std::collections::HashMap<_, _> =
        rider_ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let driver_idx: std::collections::HashMap<_, _> = h
        .drivers()
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id, i))
        .collect();

    // vertices: drivers 0..nd, riders nd..
    let mut parent: Vec<usize> = (0..nd + rider_ids.len()).collect();
    for e in h.edges() {
        let a = find(&mut parent, driver_idx[&e.driver]);
        for r in &e.riders {
            let b = find(&mut parent, nd + rider_idx[r]);
            parent[b] = a;
        }
    }

    let mut chosen = Vec::new();
    let mut timed_out = false;
    let mut roots: Vec<usize> = Vec::new();
    let mut comp_riders: std::collections::HashMap<usize, Vec<usize>> = Default::default();
    for ri in 0..rider_ids.len() {
        let root = find(&mut parent, nd + ri);
        comp_riders
            .entry(root)
            .or_insert_with(|| {
                roots.push(root);
                Vec::new()
            })
            .push(ri);
    }
    for root in roots {
        let riders = &comp_riders[&root];
        let local_r: std::collections::HashMap<usize, usize> =
            riders.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut local_d = std::collections::HashMap::new();
        let mut edges = Vec::new();
        for (id, e) in h.edges().iter().enumerate() {
            let dg = driver_idx[&e.driver];
            if find(&mut parent, dg) != root {
                continue;
            }
            let next = local_d.len();
            let driver = *local_d.entry(dg).or_insert(next);
            let cost = edge_cost(problem, e);
            edges.push(LocalEdge {
                id,
                driver,
                riders: e.riders.iter().map(|r| local_r[&rider_idx[r]]).collect(),
                cost,
                share: cost as f64 / e.riders.len() as f64,
            });
        }
        let n_drivers = local_d.len();
        let mut by_rider = vec![Vec::new(); riders.len()];
        let mut mult = vec![f64::INFINITY; riders.len()];
        for (i, e) in edges.iter().enumerate() {
            for &r in &e.riders {
                by_rider[r].push(i);
                mult[r] = mult[r].min(e.share);
            }
        }
        let mut s = Search {
            edges: &edges,
            by_rider,
            n_drivers,
            covered: vec![false; riders.len()],
            used: vec![false; n_drivers],
            chosen: Vec::new(),
            cost: 0,
            best: greedy_seed(&edges, riders.len(), n_drivers),
            mult,
            deadline,
            nodes: 0,
            timed_out: false,
        };
        s.dfs(0);
        timed_out |= s.timed_out;
        match s.best {
            Some((_, ids)) => chosen.extend(ids),
            None if s.timed_out => return Err(SolveError::TimeLimitNoIncumbent),
            None => return Err(SolveError::NoCover),
        }
    }
    let status = if timed_out {
        Status::TimeLimit
    } else {
        Status::Optimal
    };
    Ok(AssignmentSolution::from_edges(h, problem, status, &chosen))
}
