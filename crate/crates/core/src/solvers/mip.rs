//! Exact solver backed by the HiGHS MIP solver.
//!
//! One binary column per edge, a `≤ 1` row per driver and an `= 1` row per
//! rider. Objective values are integral, so a zero relative gap and a
//! sub-unit absolute gap prove optimality.

use std::collections::HashMap;
use std::num::NonZeroU32;
use std::time::Duration;

use highs::{ColProblem, HighsModelStatus, Sense};

use super::{edge_cost, uncoverable, AssignmentSolution, Problem, SolveError, Status};
use crate::feasibility::Hypergraph;
use crate::model::DriverId;

/// Optimal exact cover by disjoint edges. With a time limit the best
/// incumbent is returned with [`Status::TimeLimit`].
pub fn solve_exact(
    h: &Hypergraph,
    problem: Problem,
    limit: Option<Duration>,
) -> Result<AssignmentSolution, SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    if h.riders().is_empty() {
        return Ok(AssignmentSolution::from_edges(h, problem, Status::Optimal, &[]));
    }

    let mut pb = ColProblem::default();
    let rider_rows: HashMap<_, _> = h
        .riders()
        .iter()
        .map(|r| (r.id, pb.add_row(1.0..=1.0)))
        .collect();
    let mut driver_rows: HashMap<DriverId, _> = HashMap::new();
    for d in h.drivers() {
        if h.edges_of_driver(d.id).len() > 1 {
            driver_rows.insert(d.id, pb.add_row(..=1.0));
        }
    }
    for e in h.edges() {
        let mut coefs: Vec<_> = e.riders.iter().map(|r| (rider_rows[r], 1.0)).collect();
        if let Some(&row) = driver_rows.get(&e.driver) {
            coefs.push((row, 1.0));
        }
        pb.add_integer_column(edge_cost(problem, e) as f64, 0..=1, coefs);
    }

    let mut model = pb.optimise(Sense::Minimise);
    model.make_quiet();
    model.set_threads(NonZeroU32::MIN);
    model.set_option("mip_rel_gap", 0.0);
    model.set_option("mip_abs_gap", 0.5);
    if let Some(t) = limit {
        model.set_option("time_limit", t.as_secs_f64());
    }
    let solved = model.solve();
    let status = match solved.status() {
        HighsModelStatus::Optimal => Status::Optimal,
        HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => {
            return Err(SolveError::NoCover)
        }
        _ => Status::TimeLimit,
    };
    let picked: Vec<usize> = solved
        .get_solution()
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.5)
        .map(|(i, _)| i)
        .collect();
    let sol = AssignmentSolution::from_edges(h, problem, status, &picked);
    if super::validate_solution(h, &sol).is_err() {
        return Err(match status {
            Status::Optimal => SolveError::NoCover,
            _ => SolveError::TimeLimitNoIncumbent,
        });
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::super::testkit::graph;
    use super::super::{brute_force_optimal, solve_branch_and_bound};
    use super::*;
    use crate::model::RiderId;

    #[test]
    fn picks_cheaper_split() {
        let h = graph(
            3,
            3,
            &[(1, &[1, 2, 3], 20), (2, &[1, 2], 6), (3, &[3], 3), (1, &[3], 2)],
            &[],
        );
        let s = solve_exact(&h, Problem::MinDist, None).unwrap();
        assert_eq!((s.objective, s.status), (8, Status::Optimal));
        let n = solve_exact(&h, Problem::MinNum, None).unwrap();
        assert_eq!(n.objective, 1);
    }

    #[test]
    fn infeasibility_is_reported() {
        let h = graph(1, 2, &[(1, &[1], 1)], &[]);
        assert_eq!(
            solve_exact(&h, Problem::MinDist, None),
            Err(SolveError::Infeasible(RiderId(2)))
        );
        let h = graph(1, 2, &[(1, &[1], 1), (1, &[2], 1)], &[]);
        assert_eq!(solve_exact(&h, Problem::MinDist, None), Err(SolveError::NoCover));
    }

    #[test]
    fn empty_graph_is_optimal() {
        let h = graph(2, 0, &[], &[]);
        let s = solve_exact(&h, Problem::MinDist, None).unwrap();
        assert_eq!((s.objective, s.edges.len()), (0, 0));
    }

    #[test]
    fn agrees_with_other_exact_methods() {
        use crate::gen::{random_hypergraph, RandomGraphConfig};
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..40 {
            let cfg = RandomGraphConfig {
                riders: 2 + i % 5,
                personal: 2,
                assumption2: i % 3 != 0,
                ..RandomGraphConfig::default()
            };
            let h = random_hypergraph(&cfg, &mut rng);
            let a = solve_exact(&h, Problem::MinDist, None).map(|s| s.objective);
            let b = solve_branch_and_bound(&h, Problem::MinDist, None).map(|s| s.objective);
            assert_eq!(a.is_ok(), b.is_ok(), "graph {i}");
            assert_eq!(a.clone().ok(), b.ok(), "graph {i}");
            if h.num_edges() <= 24 {
                let c = brute_force_optimal(&h, Problem::MinDist).map(|s| s.objective);
                assert_eq!(a.ok(), c.ok(), "graph {i}");
            }
        }
    }
}
