use std::collections::HashMap;

use super::{edge_cost, uncoverable, AssignmentSolution, Problem, SolveError, Status};
use crate::feasibility::Hypergraph;

struct Walk<'a> {
    h: &'a Hypergraph,
    problem: Problem,
    drivers: Vec<usize>,
    riders: Vec<Vec<usize>>,
    /// Index of the last edge containing each rider.
    last: Vec<usize>,
    used_d: Vec<bool>,
    covered: Vec<bool>,
    n_covered: usize,
    picked: Vec<usize>,
    best: Option<(u64, Vec<usize>)>,
}

impl Walk<'_> {
    fn go(&mut self, i: usize, cost: u64) {
        if self.n_covered == self.covered.len() {
            if self.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                self.best = Some((cost, self.picked.clone()));
            }
            return;
        }
        if i == self.drivers.len() {
            return;
        }
        let (d, rs) = (self.drivers[i], self.riders[i].clone());
        if !self.used_d[d] && rs.iter().all(|&r| !self.covered[r]) {
            self.used_d[d] = true;
            for &r in &rs {
                self.covered[r] = true;
            }
            self.n_covered += rs.len();
            self.picked.push(i);
            self.go(i + 1, cost + edge_cost(self.problem, self.h.edge(i)));
            self.picked.pop();
            self.n_covered -= rs.len();
            for &r in &rs {
                self.covered[r] = false;
            }
            self.used_d[d] = false;
        }
        // leaving edge i out strands any still-uncovered rider it was the
        // last chance for
        if rs.iter().any(|&r| !self.covered[r] && self.last[r] == i) {
            return;
        }
        self.go(i + 1, cost);
    }
}

/// Exhaustive include/exclude search over edges. Exponential in the
/// number of edges; intended as a reference for small graphs (up to about
/// 24 edges).
pub fn brute_force_optimal(
    h: &Hypergraph,
    problem: Problem,
) -> Result<AssignmentSolution, SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    let rpos: HashMap<_, _> = h
        .riders()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id, i))
        .collect();
    let dpos: HashMap<_, _> = h
        .drivers()
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id, i))
        .collect();
    let mut last = vec![0; rpos.len()];
    let mut riders = Vec::new();
    let mut drivers = Vec::new();
    for (i, e) in h.edges().iter().enumerate() {
        let rs: Vec<usize> = e.riders.iter().map(|r| rpos[r]).collect();
        for &r in &rs {
            last[r] = i;
        }
        riders.push(rs);
        drivers.push(dpos[&e.driver]);
    }
    let mut w = Walk {
        h,
        problem,
        drivers,
        riders,
        last,
        used_d: vec![false; dpos.len()],
        covered: vec![false; rpos.len()],
        n_covered: 0,
        picked: Vec::new(),
        best: None,
    };
    w.go(0, 0);
    let (_, edges) = w.best.ok_or(SolveError::NoCover)?;
    Ok(AssignmentSolution::from_edges(
        h,
        problem,
        Status::Optimal,
        &edges,
    ))
}
