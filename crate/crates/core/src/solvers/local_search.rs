//! Local search for the fewest drivers.
//!
//! Starts from a maximum matching of single-rider edges, then repeatedly
//! takes a single-rider edge `e` of the solution and tries to dissolve it:
//!
//! * merge: another solution driver has an edge covering its own riders
//!   plus `R(e)`;
//! * swap-merge: the riders of `e` and of one other solution edge `e'` are
//!   split between two further solution drivers.
//!
//! Every applied move lowers the number of drivers used.

use std::collections::{BTreeSet, HashMap};

use super::matching::max_bipartite_matching;
use super::{uncoverable, AssignmentSolution, Problem, SolveError, Status};
use crate::feasibility::Hypergraph;
use crate::model::RiderId;

/// Solution sizes along the run: the initial matching first, then one entry
/// per applied move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LsTrace {
    pub sizes: Vec<usize>,
    /// `(removed, added)` edge ids per move.
    pub moves: Vec<(Vec<usize>, Vec<usize>)>,
}

impl LsTrace {
    pub fn initial(&self) -> usize {
        self.sizes[0]
    }

    pub fn last(&self) -> usize {
        *self.sizes.last().expect("trace is never empty")
    }
}

fn initial_matching(h: &Hypergraph) -> Result<BTreeSet<usize>, SolveError> {
    let mut riders: Vec<RiderId> = h.riders().iter().map(|r| r.id).collect();
    riders.sort_unstable();
    let mut drivers: Vec<_> = h.drivers().iter().map(|d| d.id).collect();
    drivers.sort_unstable();
    let dpos: HashMap<_, _> = drivers.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let mut adj = Vec::with_capacity(riders.len());
    let mut via = Vec::with_capacity(riders.len());
    for r in &riders {
        let mut opts: Vec<(usize, usize)> = h
            .edges_of_rider(*r)
            .iter()
            .filter(|&&i| h.edge(i).riders.len() == 1)
            .map(|&i| (dpos[&h.edge(i).driver], i))
            .collect();
        opts.sort_unstable();
        adj.push(opts.iter().map(|o| o.0).collect::<Vec<_>>());
        via.push(opts);
    }
    let matched = max_bipartite_matching(&adj, drivers.len());
    let mut m = BTreeSet::new();
    for (ri, partner) in matched.iter().enumerate() {
        let Some(d) = partner else {
            return Err(SolveError::NoCover);
        };
        let (_, e) = via[ri].iter().find(|o| o.0 == *d).expect("matched pair");
        m.insert(*e);
    }
    Ok(m)
}

fn union(a: &[RiderId], b: &[RiderId]) -> Vec<RiderId> {
    let mut u: Vec<RiderId> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

/// Edge of `of`'s driver covering `R(of) ∪ extra`.
fn absorb(h: &Hypergraph, of: usize, extra: &[RiderId]) -> Option<usize> {
    let e = h.edge(of);
    h.find_edge(e.driver, &union(&e.riders, extra))
}

fn improvement(h: &Hypergraph, m: &BTreeSet<usize>, e: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let re = &h.edge(e).riders;
    for &e2 in m {
        if e2 == e {
            continue;
        }
        if let Some(e3) = absorb(h, e2, re) {
            return Some((vec![e, e2], vec![e3]));
        }
    }
    for &e1 in m {
        if e1 == e {
            continue;
        }
        let u = union(re, &h.edge(e1).riders);
        let full = (1u32 << u.len()) - 1;
        // per non-trivial subset, solution edges able to take it
        let mut takers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); full as usize + 1];
        for mask in 1..full {
            let subset: Vec<RiderId> = (0..u.len())
                .filter(|&k| mask & (1 << k) != 0)
                .map(|k| u[k])
                .collect();
            for &a in m {
                if a == e || a == e1 {
                    continue;
                }
                if let Some(na) = absorb(h, a, &subset) {
                    takers[mask as usize].push((a, na));
                }
            }
        }
        for mask in 1..full {
            for &(a, na) in &takers[mask as usize] {
                for &(b, nb) in &takers[(full ^ mask) as usize] {
                    if a != b {
                        return Some((vec![e, e1, a, b], vec![na, nb]));
                    }
                }
            }
        }
    }
    None
}

/// Local search returning the final solution and the size trace.
pub fn local_search_trace(h: &Hypergraph) -> Result<(AssignmentSolution, LsTrace), SolveError> {
    if let Some(r) = uncoverable(h) {
        return Err(SolveError::Infeasible(r));
    }
    let mut m = initial_matching(h)?;
    let mut trace = LsTrace {
        sizes: vec![m.len()],
        moves: Vec::new(),
    };
    'outer: loop {
        let singles: Vec<usize> = m
            .iter()
            .copied()
            .filter(|&i| h.edge(i).riders.len() == 1)
            .collect();
        for e in singles {
            if let Some((removed, added)) = improvement(h, &m, e) {
                for x in &removed {
                    m.remove(x);
                }
                m.extend(added.iter().copied());
                trace.sizes.push(m.len());
                trace.moves.push((removed, added));
                continue 'outer;
            }
        }
        break;
    }
    let edges: Vec<usize> = m.into_iter().collect();
    Ok((
        AssignmentSolution::from_edges(h, Problem::MinNum, Status::Feasible, &edges),
        trace,
    ))
}

pub fn local_search_ls(h: &Hypergraph) -> Result<AssignmentSolution, SolveError> {
    local_search_trace(h).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::super::testkit::graph;
    use super::super::validate_solution;
    use super::*;

    #[test]
    fn merge_two_singletons() {
        let h = graph(
            2,
            2,
            &[(1, &[1], 1), (2, &[2], 1), (1, &[1, 2], 1), (1, &[2], 1)],
            &[],
        );
        let (s, t) = local_search_trace(&h).unwrap();
        assert_eq!(t.sizes, vec![2, 1]);
        assert_eq!(s.objective, 1);
        assert_eq!(s.edges, vec![2]);
        validate_solution(&h, &s).unwrap();
    }

    #[test]
    fn no_multi_rider_edges_keeps_matching() {
        let h = graph(3, 2, &[(1, &[1], 1), (2, &[2], 1), (3, &[1], 1)], &[]);
        let (s, t) = local_search_trace(&h).unwrap();
        assert_eq!(t.sizes, vec![2]);
        assert_eq!(s.edges, vec![0, 1]);
    }

    #[test]
    fn swap_merge_splits_two_edges() {
        // After r2 merges into d1, r3 cannot join any single driver, but
        // d1's riders plus r3 can be split between d4 and d5. The graph is
        // deliberately not downward closed ({d4,r3,r4} is missing).
        let h = graph(
            5,
            5,
            &[
                (1, &[1], 1),
                (2, &[2], 1),
                (3, &[3], 1),
                (4, &[4], 1),
                (5, &[5], 1),
                (1, &[1, 2], 1),
                (4, &[1, 3, 4], 1),
                (5, &[2, 5], 1),
            ],
            &[],
        );
        let (s, t) = local_search_trace(&h).unwrap();
        assert_eq!(t.sizes, vec![5, 4, 2]);
        assert_eq!(t.moves[0], (vec![1, 0], vec![5]));
        assert_eq!(t.moves[1], (vec![2, 5, 4, 3], vec![7, 6]));
        assert_eq!(s.edges, vec![6, 7]);
        validate_solution(&h, &s).unwrap();
    }

    #[test]
    fn infeasible_without_singletons() {
        let h = graph(1, 2, &[(1, &[1, 2], 1), (1, &[1], 1), (1, &[2], 1)], &[]);
        assert_eq!(local_search_ls(&h), Err(SolveError::NoCover));
    }
}
