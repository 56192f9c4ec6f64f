use std::cmp::Ordering;
use std::collections::HashSet;

use super::{uncoverable, AssignmentSolution, Problem, SolveError, Status};
use crate::feasibility::Hypergraph;
use crate::model::{DriverKind, RiderId};

/// Scans edges in `order`, keeping each one disjoint from those already
/// kept. Stops as soon as every rider is covered when `full_cover` is set.
fn scan(h: &Hypergraph, order: &[usize], full_cover: bool) -> Vec<usize> {
    let mut used_d = HashSet::new();
    let mut used_r: HashSet<RiderId> = HashSet::new();
    let total = h.riders().len();
    let mut chosen = Vec::new();
    for &id in order {
        if full_cover && used_r.len() == total {
            break;
        }
        let e = h.edge(id);
        if used_d.contains(&e.driver) || e.riders.iter().any(|r| used_r.contains(r)) {
            continue;
        }
        used_d.insert(e.driver);
        used_r.extend(e.riders.iter().copied());
        chosen.push(id);
    }
    chosen
}

fn covers_all(h: &Hypergraph, chosen: &[usize]) -> bool {
    chosen.iter().map(|&i| h.edge(i).riders.len()).sum::<usize>() == h.riders().len()
}

/// Both greedy passes: minimum weight first, and minimum weight per rider
/// first. `None` marks a pass that got stuck.
pub fn greedy_min_dist_passes(
    h: &Hypergraph,
) -> (Option<AssignmentSolution>, Option<AssignmentSolution>) {
    let mut by_weight: Vec<usize> = (0..h.num_edges()).collect();
    by_weight.sort_by_key(|&i| (h.edge(i).weight, i));
    let mut by_ratio: Vec<usize> = (0..h.num_edges()).collect();
    by_ratio.sort_by(|&a, &b| {
        let (ea, eb) = (h.edge(a), h.edge(b));
        // w_a / |R_a| vs w_b / |R_b| without division
        let lhs = ea.weight as u128 * eb.riders.len() as u128;
        let rhs = eb.weight as u128 * ea.riders.len() as u128;
        lhs.cmp(&rhs).then(a.cmp(&b))
    });
    let run = |order: &[usize]| {
        let chosen = scan(h, order, true);
        covers_all(h, &chosen)
            .then(|| AssignmentSolution::from_edges(h, Problem::MinDist, Status::Feasible, &chosen))
    };
    (run(&by_weight), run(&by_ratio))
}

/// Better of the two greedy passes (the weight-first pass on ties).
pub fn greedy_min_dist(h: &Hypergraph) -> Result<AssignmentSolution, SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    match greedy_min_dist_passes(h) {
        (Some(a), Some(b)) => Ok(if b.objective < a.objective { b } else { a }),
        (Some(a), None) | (None, Some(a)) => Ok(a),
        (None, None) => Err(SolveError::NoCover),
    }
}

fn cardinality_order(h: &Hypergraph, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..h.num_edges()).filter(|&i| keep(i)).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (h.edge(a), h.edge(b));
        match eb.riders.len().cmp(&ea.riders.len()) {
            Ordering::Equal => (ea.weight, a).cmp(&(eb.weight, b)),
            o => o,
        }
    });
    order
}

/// Repeatedly takes a largest rider set (then lighter, then lower id).
pub fn greedy_min_num(h: &Hypergraph) -> Result<AssignmentSolution, SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    let chosen = scan(h, &cardinality_order(h, |_| true), true);
    if !covers_all(h, &chosen) {
        return Err(SolveError::NoCover);
    }
    Ok(AssignmentSolution::from_edges(
        h,
        Problem::MinNum,
        Status::Feasible,
        &chosen,
    ))
}

/// Riders served by personal drivers after a maximal greedy pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialAssignment {
    /// Edge ids, ascending.
    pub edges: Vec<usize>,
    pub served: Vec<RiderId>,
    pub unserved: Vec<RiderId>,
}

/// Greedy cardinality pass over personal-driver edges only. No remaining
/// personal edge is disjoint from the result.
pub fn assign_personal_maximal(h: &Hypergraph) -> PartialAssignment {
    let personal = |i: usize| {
        h.driver(h.edge(i).driver)
            .is_some_and(|d| d.kind == DriverKind::Personal)
    };
    let mut edges = scan(h, &cardinality_order(h, personal), false);
    edges.sort_unstable();
    let mut served: Vec<RiderId> = edges
        .iter()
        .flat_map(|&i| h.edge(i).riders.iter().copied())
        .collect();
    served.sort_unstable();
    let set: HashSet<RiderId> = served.iter().copied().collect();
    let mut unserved: Vec<RiderId> = h
        .riders()
        .iter()
        .map(|r| r.id)
        .filter(|r| !set.contains(r))
        .collect();
    unserved.sort_unstable();
    PartialAssignment {
        edges,
        served,
        unserved,
    }
}
