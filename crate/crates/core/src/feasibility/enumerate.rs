use std::collections::HashSet;

use rayon::prelude::*;

use super::{DriverVertex, FeasibleMatch, HyperEdge, Hypergraph, MatchContext, RiderVertex};
use crate::model::{Driver, Instance, Problem, Rider};

fn weight(problem: Problem, m: &FeasibleMatch) -> u64 {
    match problem {
        Problem::MinDist => m.incurred_distance.max(1),
        Problem::MinNum => 1,
    }
}

/// Level-wise enumeration for one driver: a `k`-set is only tested when all
/// of its `(k-1)`-subsets are feasible. Output is ordered by size, then
/// lexicographically by rider position.
fn enumerate_driver(ctx: &MatchContext, d: &Driver, riders: &[&Rider]) -> Vec<FeasibleMatch> {
    let cands: Vec<&Rider> = riders
        .iter()
        .copied()
        .filter(|r| r.match_type == d.match_type)
        .collect();
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = Vec::new();
    for (i, r) in cands.iter().enumerate() {
        if let Some(m) = ctx.check(d, &[r]) {
            out.push(m);
            level.push(vec![i]);
        }
    }
    let mut k = 1;
    while !level.is_empty() && k < d.capacity as usize {
        let known: HashSet<&[usize]> = level.iter().map(|s| s.as_slice()).collect();
        let mut next = Vec::new();
        for (a, x) in level.iter().enumerate() {
            for y in &level[a + 1..] {
                if x[..k - 1] != y[..k - 1] {
                    break;
                }
                let mut cand = x.clone();
                cand.push(y[k - 1]);
                let closed = (0..cand.len() - 2).all(|skip| {
                    let sub: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    known.contains(sub.as_slice())
                });
                if !closed {
                    continue;
                }
                let rs: Vec<&Rider> = cand.iter().map(|&i| cands[i]).collect();
                if let Some(m) = ctx.check(d, &rs) {
                    out.push(m);
                    next.push(cand);
                }
            }
        }
        level = next;
        k += 1;
    }
    out
}

fn assemble(
    drivers: &[&Driver],
    riders: &[&Rider],
    per_driver: Vec<Vec<FeasibleMatch>>,
    problem: Problem,
) -> Hypergraph {
    let dv = drivers.iter().map(|d| DriverVertex::from_driver(d)).collect();
    let rv = riders.iter().map(|r| RiderVertex::from_rider(r)).collect();
    let edges = per_driver
        .into_iter()
        .flatten()
        .map(|m| {
            let w = weight(problem, &m);
            HyperEdge::from_match(m, w)
        })
        .collect();
    Hypergraph::new(dv, rv, edges).expect("enumerated matches form a valid hypergraph")
}

/// Hypergraph of all feasible matches between the given agents.
///
/// Riders must be listed in ascending id order for edges to come out in
/// canonical order.
pub fn enumerate_with(
    ctx: &MatchContext,
    drivers: &[&Driver],
    riders: &[&Rider],
    problem: Problem,
) -> Hypergraph {
    let per_driver: Vec<Vec<FeasibleMatch>> = drivers
        .par_iter()
        .map(|d| enumerate_driver(ctx, d, riders))
        .collect();
    assemble(drivers, riders, per_driver, problem)
}

/// Hypergraph for the whole instance. For [`Problem::MinNum`] only designated
/// drivers take part.
pub fn enumerate_hypergraph(instance: &Instance, problem: Problem) -> Hypergraph {
    let ctx = MatchContext::new(instance);
    let drivers: Vec<&Driver> = match problem {
        Problem::MinDist => instance.drivers().collect(),
        Problem::MinNum => instance.designated_drivers.iter().collect(),
    };
    let mut riders: Vec<&Rider> = instance.riders.iter().collect();
    riders.sort_by_key(|r| r.id);
    enumerate_with(&ctx, &drivers, &riders, problem)
}

/// Tests every rider subset up to capacity without pruning. Reference for
/// [`enumerate_with`]; exponential in the number of riders.
pub fn enumerate_naive(
    ctx: &MatchContext,
    drivers: &[&Driver],
    riders: &[&Rider],
    problem: Problem,
) -> Hypergraph {
    let per_driver = drivers
        .iter()
        .map(|d| {
            let cands: Vec<&Rider> = riders
                .iter()
                .copied()
                .filter(|r| r.match_type == d.match_type)
                .collect();
            let mut out = Vec::new();
            for k in 1..=(d.capacity as usize).min(cands.len()) {
                for combo in combinations(cands.len(), k) {
                    let rs: Vec<&Rider> = combo.iter().map(|&i| cands[i]).collect();
                    if let Some(m) = ctx.check(d, &rs) {
                        out.push(m);
                    }
                }
            }
            out
        })
        .collect();
    assemble(drivers, riders, per_driver, problem)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
