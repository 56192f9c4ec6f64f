//! One accumulation interval end to end: feasible matches, hypergraph,
//! solver, re-validation.
//!
//! For the fewest-drivers problem the interval is solved in two stages:
//! personal drivers first take as many riders as a maximal greedy pass
//! allows, then designated drivers cover the rest.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterConfig, ClusterError, ClusterSet};
use crate::feasibility::{enumerate_with, Hypergraph, MatchContext, RiderService};
use crate::model::{Driver, DriverId, DriverKind, Instance, Problem, Rider, RiderId, VertexId};
use crate::solvers::{
    assign_personal_maximal, greedy_min_dist, greedy_min_num, local_search_ls, solve_exact,
    validate_solution, AssignmentSolution, SolveError, Status,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Exact,
    Greedy,
    Ls,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Exact => "exact",
            Algo::Greedy => "greedy",
            Algo::Ls => "ls",
        })
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(Algo::Exact),
            "greedy" | "greedy_min_dist" | "greedy_min_num" => Ok(Algo::Greedy),
            "ls" => Ok(Algo::Ls),
            other => Err(format!("unknown algorithm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub problem: Problem,
    pub algo: Algo,
    pub time_limit: Option<Duration>,
}

impl SolveOptions {
    pub fn new(problem: Problem, algo: Algo) -> Self {
        Self {
            problem,
            algo,
            time_limit: None,
        }
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        if self.algo == Algo::Ls && self.problem != Problem::MinNum {
            return Err(PipelineError::Config(
                "local search solves the fewest-drivers problem only".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{source}{}", cluster.map(|c| format!(" (cluster {c})")).unwrap_or_default())]
    Infeasible {
        cluster: Option<u32>,
        #[source]
        source: SolveError,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("clustering failed: {0}")]
    Cluster(#[from] ClusterError),
    #[error("solution failed re-validation: {0}")]
    Validation(String),
}

/// A chosen hyperedge with the route details needed for reporting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChosenMatch {
    pub driver: DriverId,
    pub kind: DriverKind,
    pub riders: Vec<RiderId>,
    pub weight: u64,
    pub incurred_distance: u64,
    pub station: Option<VertexId>,
    pub service: Vec<RiderService>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub problem: Problem,
    pub algo: Algo,
    pub status: Status,
    /// Total weight for the distance problem, designated drivers used for
    /// the fewest-drivers problem.
    pub objective: u64,
    /// Sorted by driver id.
    pub matches: Vec<ChosenMatch>,
    #[serde(skip)]
    pub enum_time: Duration,
    #[serde(skip)]
    pub solve_time: Duration,
}

impl Outcome {
    pub fn assigned_personal(&self) -> usize {
        self.matches
            .iter()
            .filter(|m| m.kind == DriverKind::Personal)
            .count()
    }

    pub fn assigned_designated(&self) -> usize {
        self.matches.len() - self.assigned_personal()
    }

    /// Rider-to-driver assignment.
    pub fn assignment(&self) -> Vec<(RiderId, DriverId)> {
        let mut v: Vec<(RiderId, DriverId)> = self
            .matches
            .iter()
            .flat_map(|m| m.riders.iter().map(move |&r| (r, m.driver)))
            .collect();
        v.sort_unstable();
        v
    }

    /// Combines per-cluster outcomes. Times add up; the status is the
    /// weakest of the parts.
    pub fn merge(problem: Problem, algo: Algo, parts: Vec<Outcome>) -> Outcome {
        let mut out = Outcome {
            problem,
            algo,
            status: Status::Optimal,
            objective: 0,
            matches: Vec::new(),
            enum_time: Duration::ZERO,
            solve_time: Duration::ZERO,
        };
        for p in parts {
            out.status = weaker(out.status, p.status);
            out.objective += p.objective;
            out.matches.extend(p.matches);
            out.enum_time += p.enum_time;
            out.solve_time += p.solve_time;
        }
        out.matches.sort_by_key(|m| m.driver);
        out
    }
}

fn weaker(a: Status, b: Status) -> Status {
    let rank = |s: Status| match s {
        Status::Optimal => 0,
        Status::Feasible => 1,
        Status::TimeLimit => 2,
        Status::Infeasible => 3,
    };
    if rank(a) >= rank(b) {
        a
    } else {
        b
    }
}

/// Runs the chosen algorithm on `h`.
pub fn run_solver(
    h: &Hypergraph,
    problem: Problem,
    algo: Algo,
    time_limit: Option<Duration>,
) -> Result<AssignmentSolution, SolveError> {
    match (algo, problem) {
        (Algo::Exact, _) => solve_exact(h, problem, time_limit),
        (Algo::Greedy, Problem::MinDist) => greedy_min_dist(h),
        (Algo::Greedy, Problem::MinNum) => greedy_min_num(h),
        (Algo::Ls, _) => local_search_ls(h),
    }
}

fn chosen(h: &Hypergraph, edges: &[usize]) -> Vec<ChosenMatch> {
    edges
        .iter()
        .map(|&i| {
            let e = h.edge(i);
            let detail = e.detail.as_ref();
            ChosenMatch {
                driver: e.driver,
                kind: h.driver(e.driver).map(|d| d.kind).unwrap_or(DriverKind::Designated),
                riders: e.riders.clone(),
                weight: e.weight,
                incurred_distance: detail.map(|m| m.incurred_distance).unwrap_or(e.weight),
                station: e.station,
                service: detail.map(|m| m.service.clone()).unwrap_or_default(),
            }
        })
        .collect()
}

fn validate(h: &Hypergraph, sol: &AssignmentSolution) -> Result<(), PipelineError> {
    validate_solution(h, sol).map_err(PipelineError::Validation)
}

fn check_time_saving(ctx: &MatchContext, matches: &[ChosenMatch]) -> Result<(), PipelineError> {
    let inst = ctx.instance();
    for m in matches {
        for s in &m.service {
            let r = inst
                .rider(s.rider)
                .ok_or_else(|| PipelineError::Validation(format!("unknown rider {}", s.rider)))?;
            let saved = r.time_saved(s.arrive) as f64;
            if saved + 1e-9 < r.acceptance_threshold * r.transit_baseline as f64 {
                return Err(PipelineError::Validation(format!(
                    "rider {} saves only {saved} s",
                    r.id
                )));
            }
        }
    }
    Ok(())
}

/// Solves one group of agents against a shared match context.
pub fn solve_agents(
    ctx: &MatchContext,
    personal: &[&Driver],
    designated: &[&Driver],
    riders: &[&Rider],
    opts: &SolveOptions,
) -> Result<Outcome, PipelineError> {
    opts.check()?;
    let mut riders = riders.to_vec();
    riders.sort_by_key(|r| r.id);
    let mut outcome = Outcome {
        problem: opts.problem,
        algo: opts.algo,
        status: Status::Optimal,
        objective: 0,
        matches: Vec::new(),
        enum_time: Duration::ZERO,
        solve_time: Duration::ZERO,
    };
    let infeasible = |source| PipelineError::Infeasible {
        cluster: None,
        source,
    };
    match opts.problem {
        Problem::MinDist => {
            let mut drivers: Vec<&Driver> = personal.iter().chain(designated).copied().collect();
            drivers.sort_by_key(|d| d.id);
            let t = Instant::now();
            let h = enumerate_with(ctx, &drivers, &riders, Problem::MinDist);
            outcome.enum_time = t.elapsed();
            let t = Instant::now();
            let sol = run_solver(&h, Problem::MinDist, opts.algo, opts.time_limit)
                .map_err(infeasible)?;
            outcome.solve_time = t.elapsed();
            validate(&h, &sol)?;
            outcome.status = sol.status;
            outcome.objective = sol.objective;
            outcome.matches = chosen(&h, &sol.edges);
        }
        Problem::MinNum => {
            let mut personal = personal.to_vec();
            personal.sort_by_key(|d| d.id);
            let mut designated = designated.to_vec();
            designated.sort_by_key(|d| d.id);
            let t = Instant::now();
            let h1 = enumerate_with(ctx, &personal, &riders, Problem::MinDist);
            outcome.enum_time = t.elapsed();
            let t = Instant::now();
            let stage1 = assign_personal_maximal(&h1);
            outcome.solve_time = t.elapsed();
            let first = chosen(&h1, &stage1.edges);
            check_disjoint(&first)?;

            let open: HashSet<RiderId> = stage1.unserved.iter().copied().collect();
            let rest: Vec<&Rider> = riders
                .iter()
                .copied()
                .filter(|r| open.contains(&r.id))
                .collect();
            let t = Instant::now();
            let h2 = enumerate_with(ctx, &designated, &rest, Problem::MinNum);
            outcome.enum_time += t.elapsed();
            let t = Instant::now();
            let sol = run_solver(&h2, Problem::MinNum, opts.algo, opts.time_limit)
                .map_err(infeasible)?;
            outcome.solve_time += t.elapsed();
            validate(&h2, &sol)?;
            outcome.status = sol.status;
            outcome.objective = sol.objective;
            outcome.matches = first;
            outcome.matches.extend(chosen(&h2, &sol.edges));
        }
    }
    outcome.matches.sort_by_key(|m| m.driver);
    check_disjoint(&outcome.matches)?;
    check_time_saving(ctx, &outcome.matches)?;
    let covered: usize = outcome.matches.iter().map(|m| m.riders.len()).sum();
    if covered != riders.len() {
        return Err(PipelineError::Validation(format!(
            "{covered} of {} riders covered",
            riders.len()
        )));
    }
    Ok(outcome)
}

fn check_disjoint(matches: &[ChosenMatch]) -> Result<(), PipelineError> {
    let mut drivers = HashSet::new();
    let mut riders = HashSet::new();
    for m in matches {
        if !drivers.insert(m.driver) {
            return Err(PipelineError::Validation(format!("driver {} used twice", m.driver)));
        }
        for r in &m.riders {
            if !riders.insert(*r) {
                return Err(PipelineError::Validation(format!("rider {r} served twice")));
            }
        }
    }
    Ok(())
}

/// Result of one interval, with the clusters used if any.
#[derive(Debug, Clone)]
pub struct IntervalRun {
    pub outcome: Outcome,
    pub clusters: Option<ClusterSet>,
    /// Match-context construction (road trees, transit look-ups).
    pub context_time: Duration,
    pub total_time: Duration,
}

/// Solves a whole interval, optionally clustered.
pub fn run_interval(
    instance: &Instance,
    opts: &SolveOptions,
    cluster: Option<&ClusterConfig>,
) -> Result<IntervalRun, PipelineError> {
    opts.check()?;
    let start = Instant::now();
    let t = Instant::now();
    let ctx = MatchContext::new(instance);
    let context_time = t.elapsed();
    let (outcome, clusters) = match cluster {
        None => {
            let personal: Vec<&Driver> = instance.personal_drivers.iter().collect();
            let designated: Vec<&Driver> = instance.designated_drivers.iter().collect();
            let riders: Vec<&Rider> = instance.riders.iter().collect();
            (
                solve_agents(&ctx, &personal, &designated, &riders, opts)?,
                None,
            )
        }
        Some(cfg) => {
            let cs = crate::clustering::build_clusters(instance, cfg)?;
            let out = crate::clustering::solve_with_clusters(&ctx, &cs, opts)?;
            (out, Some(cs))
        }
    };
    Ok(IntervalRun {
        outcome,
        clusters,
        context_time,
        total_time: start.elapsed(),
    })
}
