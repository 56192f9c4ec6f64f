//! Exact and approximate solvers choosing pairwise disjoint hyperedges that
//! cover every rider.

mod brute;
mod exact;
mod greedy;
mod local_search;
mod lp;
mod mip;
pub mod matching;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::feasibility::{HyperEdge, Hypergraph};
use crate::model::{DriverId, RiderId};

pub use crate::model::Problem;
pub use brute::brute_force_optimal;
pub use exact::solve_branch_and_bound;
pub use greedy::{
    assign_personal_maximal, greedy_min_dist, greedy_min_dist_passes, greedy_min_num,
    PartialAssignment,
};
pub use local_search::{local_search_ls, local_search_trace, LsTrace};
pub use lp::export_lp;
pub use mip::solve_exact;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Optimal => "optimal",
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::TimeLimit => "time_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("infeasible: rider {0} cannot be covered")]
    Infeasible(RiderId),
    #[error("infeasible: no complete assignment exists")]
    NoCover,
    #[error("time limit reached before any complete assignment was found")]
    TimeLimitNoIncumbent,
}

/// Chosen hyperedges (ids into the solved hypergraph) and the induced
/// rider-to-driver assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSolution {
    pub problem: Problem,
    pub objective: u64,
    pub status: Status,
    /// Ascending edge ids.
    pub edges: Vec<usize>,
    pub assignment: BTreeMap<RiderId, DriverId>,
}

/// Objective contribution of one edge.
pub fn edge_cost(problem: Problem, e: &HyperEdge) -> u64 {
    match problem {
        Problem::MinDist => e.weight,
        Problem::MinNum => 1,
    }
}

impl AssignmentSolution {
    pub fn from_edges(h: &Hypergraph, problem: Problem, status: Status, edges: &[usize]) -> Self {
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        let mut assignment = BTreeMap::new();
        let mut objective = 0;
        for &id in &edges {
            let e = h.edge(id);
            objective += edge_cost(problem, e);
            for r in &e.riders {
                assignment.insert(*r, e.driver);
            }
        }
        Self {
            problem,
            objective,
            status,
            edges,
            assignment,
        }
    }

    /// Number of distinct drivers used.
    pub fn drivers_used(&self) -> usize {
        self.edges.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serialization is infallible")
    }
}

/// Structural check: chosen edges are pairwise vertex disjoint, every rider
/// of `h` is covered exactly once and the stored objective and assignment
/// match the edges.
pub fn validate_solution(h: &Hypergraph, sol: &AssignmentSolution) -> Result<(), String> {
    let mut drivers = HashSet::new();
    let mut riders = HashSet::new();
    for &id in &sol.edges {
        if id >= h.num_edges() {
            return Err(format!("edge {id} does not exist"));
        }
        let e = h.edge(id);
        if !drivers.insert(e.driver) {
            return Err(format!("driver {} used twice", e.driver));
        }
        for r in &e.riders {
            if !riders.insert(*r) {
                return Err(format!("rider {r} covered twice"));
            }
        }
    }
    for r in h.riders() {
        if !riders.contains(&r.id) {
            return Err(format!("rider {} not covered", r.id));
        }
    }
    let expect = AssignmentSolution::from_edges(h, sol.problem, sol.status, &sol.edges);
    if expect.objective != sol.objective {
        return Err(format!(
            "objective {} does not match edge weights {}",
            sol.objective, expect.objective
        ));
    }
    if expect.assignment != sol.assignment {
        return Err("assignment does not match chosen edges".into());
    }
    Ok(())
}

/// Riders with no incident edge, ascending id.
pub(crate) fn uncoverable(h: &Hypergraph) -> Option<RiderId> {
    let mut ids: Vec<RiderId> = h
        .riders()
        .iter()
        .map(|r| r.id)
        .filter(|&r| h.edges_of_rider(r).is_empty())
        .collect();
    ids.sort_unstable();
    ids.first().copied()
}
