//! CPLEX LP text for the set-packing model: one binary `x_<edge>` per
//! hyperedge, at most one edge per driver, exactly one per rider.

use std::fmt::Write;

use super::{edge_cost, Problem};
use crate::feasibility::Hypergraph;

const TERMS_PER_LINE: usize = 8;

fn push_terms(out: &mut String, terms: &[String]) {
    for (k, t) in terms.iter().enumerate() {
        if k > 0 {
            if k % TERMS_PER_LINE == 0 {
                out.push_str("\n   ");
            }
            out.push_str(" + ");
        }
        out.push_str(t);
    }
}

pub fn export_lp(h: &Hypergraph, problem: Problem) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {problem}: {} drivers, {} riders, {} edges",
        h.drivers().len(),
        h.riders().len(),
        h.num_edges()
    );
    out.push_str("Minimize\n obj: ");
    if h.num_edges() == 0 {
        out.push('0');
    } else {
        let terms: Vec<String> = h
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| format!("{} x_{i}", edge_cost(problem, e)))
            .collect();
        push_terms(&mut out, &terms);
    }
    out.push_str("\nSubject To\n");

    let mut drivers: Vec<_> = h.drivers().iter().map(|d| d.id).collect();
    drivers.sort_unstable();
    for d in drivers {
        let edges = h.edges_of_driver(d);
        if edges.is_empty() {
            continue;
        }
        let terms: Vec<String> = edges.iter().map(|i| format!("x_{i}")).collect();
        let _ = write!(out, " d_{}: ", d.0);
        push_terms(&mut out, &terms);
        out.push_str(" <= 1\n");
    }
    let mut riders: Vec<_> = h.riders().iter().map(|r| r.id).collect();
    riders.sort_unstable();
    for r in riders {
        let edges = h.edges_of_rider(r);
        if edges.is_empty() {
            let _ = writeln!(out, "\\ rider {} has no incident edge; model is infeasible", r.0);
            continue;
        }
        let terms: Vec<String> = edges.iter().map(|i| format!("x_{i}")).collect();
        let _ = write!(out, " r_{}: ", r.0);
        push_terms(&mut out, &terms);
        out.push_str(" = 1\n");
    }
    out.push_str("Binary\n");
    for i in 0..h.num_edges() {
        let _ = writeln!(out, " x_{i}");
    }
    out.push_str("End\n");
    out
}
