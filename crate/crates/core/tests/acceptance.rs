//! End-to-end acceptance checks. Each check prints one PASS/FAIL line; the
//! process exits non-zero when any check fails.

use std::collections::HashSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use feeder::clustering::{
    build_clusters, build_clusters_phase1, refine_clusters, AllocationMode,
    ClusterConfig,
};
use feeder::feasibility::{enumerate_hypergraph, enumerate_with, Hypergraph, MatchContext};
use feeder::gen::{
    brute_force_3dm, gen_3dm_hypergraph, gen_interval_instance, random_3dm, random_hypergraph,
    GenConfig, RandomGraphConfig, ThreeDM,
};
use feeder::model::{check_assumption2_graph, Driver, Instance, Rider};
use feeder::pipeline::{run_interval, Algo, Outcome, SolveOptions};
use feeder::solvers::{
    brute_force_optimal, greedy_min_dist, greedy_min_num, local_search_trace, solve_exact,
};
use feeder::Problem;

type Check = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gen_cfg(riders: u32, seed: u64) -> GenConfig {
    GenConfig {
        riders,
        seed,
        ..GenConfig::default()
    }
}

/// Random 3DM instance; every other one has a perfect matching planted.
fn tdm_sweep(i: u64) -> ThreeDM {
    let mut r = rng(1000 + i);
    let q = 1 + (i as usize % 4);
    let n = r.gen_range(1..=2 * q);
    let mut t = random_3dm(q, n, r.gen_range(2..=5), &mut r);
    if i % 2 == 0 {
        let mut a = t.a.clone();
        let mut c = t.c.clone();
        a.shuffle(&mut r);
        c.shuffle(&mut r);
        for k in 0..q {
            t.f.push((a[k], t.b[k], c[k]));
        }
        t.f.sort_unstable();
        t.f.dedup();
    }
    t
}

fn lemma(problem: Problem) -> Check {
    let start = Instant::now();
    let (mut yes, n) = (0, 120);
    for i in 0..n {
        let t = tdm_sweep(i);
        let q = t.q as u64;
        let h = gen_3dm_hypergraph(&t, problem).map_err(|e| e.to_string())?;
        let obj = solve_exact(&h, problem, None)
            .map_err(|e| format!("instance {i}: {e}"))?
            .objective;
        let target = match problem {
            Problem::MinDist => 2 * q,
            Problem::MinNum => q,
        };
        let perfect = brute_force_3dm(&t) == t.q;
        if (obj == target) != perfect {
            return Err(format!("instance {i}: objective {obj}, perfect matching {perfect}"));
        }
        yes += perfect as usize;
    }
    let el = start.elapsed();
    if el > Duration::from_secs(60) {
        return Err(format!("took {el:?}"));
    }
    Ok(format!("{n} instances, {yes} with a perfect matching, {el:.2?}"))
}

fn small_graph(r: &mut ChaCha8Rng, problem: Problem) -> Hypergraph {
    loop {
        let cfg = RandomGraphConfig {
            riders: r.gen_range(1..=6),
            personal: r.gen_range(0..=2),
            designated: r.gen_range(1..=3),
            lambda: r.gen_range(1..=3),
            seeds_per_driver: r.gen_range(1..=2),
            max_step: 6,
            assumption2: r.gen_bool(0.3),
            problem,
        };
        let h = random_hypergraph(&cfg, r);
        if h.num_edges() <= 24 {
            return h;
        }
    }
}

fn exact_vs_oracle() -> Check {
    let start = Instant::now();
    let mut r = rng(7);
    let (n, mut infeasible) = (500, 0);
    for i in 0..n {
        for problem in [Problem::MinDist, Problem::MinNum] {
            let h = small_graph(&mut r, problem);
            let a = solve_exact(&h, problem, None).map(|s| s.objective);
            let b = brute_force_optimal(&h, problem).map(|s| s.objective);
            if a.is_err() != b.is_err() || a.as_ref().ok() != b.as_ref().ok() {
                return Err(format!("graph {i} ({problem}): exact {a:?}, brute force {b:?}"));
            }
            infeasible += a.is_err() as usize;
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(120) {
        return Err(format!("took {el:?}"));
    }
    Ok(format!("{n} graphs per problem, {infeasible} infeasible, {el:.2?}"))
}

fn assumption2_graph(i: u64, problem: Problem) -> Hypergraph {
    let mut r = rng(5000 + i);
    let cfg = RandomGraphConfig {
        riders: r.gen_range(2..=7),
        personal: if problem == Problem::MinNum { 0 } else { r.gen_range(0..=3) },
        lambda: 2 + (i % 2) as u32,
        seeds_per_driver: r.gen_range(1..=3),
        max_step: r.gen_range(1..=8),
        assumption2: true,
        problem,
        ..RandomGraphConfig::default()
    };
    random_hypergraph(&cfg, &mut r)
}

fn theorem3() -> Check {
    let (n, mut worst) = (220, 0.0f64);
    for i in 0..n {
        let h = assumption2_graph(i, Problem::MinDist);
        if !check_assumption2_graph(&h) {
            return Err(format!("graph {i} violates Assumption 2"));
        }
        let st = h.stats();
        let (l, mu) = (st.lambda as f64, st.mu);
        let g = greedy_min_dist(&h).map_err(|e| format!("graph {i}: {e}"))?.objective as f64;
        let opt = solve_exact(&h, Problem::MinDist, None)
            .map_err(|e| format!("graph {i}: {e}"))?
            .objective as f64;
        let bound = (l * l * mu + l) / (l + 1.0);
        if g > bound * opt + 1e-9 {
            return Err(format!("graph {i}: greedy {g} > {bound:.3} × {opt}"));
        }
        worst = worst.max(g / opt / bound);
    }
    Ok(format!("{n} graphs, worst ratio / bound = {worst:.3}"))
}

fn theorem4() -> Check {
    let (n, mut worst) = (220, 0.0f64);
    for i in 0..n {
        let h = assumption2_graph(i, Problem::MinNum);
        if !check_assumption2_graph(&h) {
            return Err(format!("graph {i} violates Assumption 2"));
        }
        let l = h.stats().lambda as f64;
        let g = greedy_min_num(&h).map_err(|e| format!("graph {i}: {e}"))?.edges.len() as f64;
        let opt = solve_exact(&h, Problem::MinNum, None)
            .map_err(|e| format!("graph {i}: {e}"))?
            .edges
            .len() as f64;
        let bound = (l + 2.0) / 2.0;
        if g > bound * opt + 1e-9 {
            return Err(format!("graph {i}: greedy {g} > {bound:.3} × {opt}"));
        }
        worst = worst.max(g / opt / bound);
    }
    Ok(format!("{n} graphs, worst ratio / bound = {worst:.3}"))
}

fn instances(n: u64, riders: u32, base_seed: u64) -> Vec<Instance> {
    (0..n)
        .map(|i| {
            gen_interval_instance(&gen_cfg(riders, base_seed + i), 6 * 3600 + 1800 * i as i64)
                .expect("generation succeeds")
        })
        .collect()
}

fn observation1(insts: &[Instance]) -> Check {
    let mut edges = 0;
    for (i, inst) in insts.iter().enumerate() {
        for problem in [Problem::MinDist, Problem::MinNum] {
            let h = enumerate_hypergraph(inst, problem);
            if let Some((e, sub)) = h.closure_violation() {
                return Err(format!("instance {i}: edge {e} lacks subset {sub:?}"));
            }
            if problem == Problem::MinDist {
                if let Some((a, b)) = h.monotonicity_violation() {
                    return Err(format!("instance {i}: w(e{a}) > w(e{b}) for nested edges"));
                }
            }
            edges += h.num_edges();
        }
    }
    Ok(format!("{} instances, {edges} edges scanned", insts.len()))
}

/// Independent re-check of an outcome: drivers used once, every rider
/// served exactly once, windows honoured and enough time saved.
fn recheck(inst: &Instance, out: &Outcome) -> Result<(), String> {
    let mut drivers = HashSet::new();
    let mut riders = HashSet::new();
    for m in &out.matches {
        if !drivers.insert(m.driver) {
            return Err(format!("driver {} used twice", m.driver));
        }
        if inst.driver(m.driver).is_none() {
            return Err(format!("unknown driver {}", m.driver));
        }
        if m.service.len() != m.riders.len() {
            return Err(format!("driver {} lacks service details", m.driver));
        }
        for s in &m.service {
            let r = inst.rider(s.rider).ok_or(format!("unknown rider {}", s.rider))?;
            if !riders.insert(r.id) {
                return Err(format!("rider {} served twice", r.id));
            }
            let saved = r.transit_baseline - (s.arrive - r.earliest_departure);
            if (saved as f64) < r.acceptance_threshold * r.transit_baseline as f64 {
                return Err(format!("rider {} saves {saved} s of {}", r.id, r.transit_baseline));
            }
            if s.pickup < r.earliest_departure || s.arrive > r.latest_arrival {
                return Err(format!("rider {} served outside its window", r.id));
            }
        }
    }
    if riders.len() != inst.riders.len() {
        return Err(format!("{} of {} riders served", riders.len(), inst.riders.len()));
    }
    Ok(())
}

fn feasibility_contracts(insts: &[Instance]) -> Check {
    let runs = [
        (Problem::MinDist, Algo::Exact),
        (Problem::MinDist, Algo::Greedy),
        (Problem::MinNum, Algo::Exact),
        (Problem::MinNum, Algo::Greedy),
        (Problem::MinNum, Algo::Ls),
    ];
    let cluster = ClusterConfig::default();
    let (mut checked, mut infeasible) = (0, 0);
    for (i, inst) in insts.iter().enumerate() {
        for (p, a) in runs {
            for c in [None, Some(&cluster)] {
                match run_interval(inst, &SolveOptions::new(p, a), c) {
                    Ok(run) => {
                        recheck(inst, &run.outcome)
                            .map_err(|e| format!("instance {i} {p}/{a}: {e}"))?;
                        checked += 1;
                    }
                    Err(_) if c.is_some() => infeasible += 1,
                    Err(e) => return Err(format!("instance {i} {p}/{a}: {e}")),
                }
            }
        }
    }
    let mut r = rng(99);
    for i in 0..300 {
        let problem = if i % 2 == 0 { Problem::MinDist } else { Problem::MinNum };
        let h = small_graph(&mut r, problem);
        let sols = [
            solve_exact(&h, problem, None),
            greedy_min_dist(&h),
            greedy_min_num(&h),
            local_search_trace(&h).map(|x| x.0),
        ];
        for s in sols.into_iter().flatten() {
            let mut ds = HashSet::new();
            let mut rs = HashSet::new();
            for &e in &s.edges {
                let e = h.edge(e);
                if !ds.insert(e.driver) || !e.riders.iter().all(|r| rs.insert(*r)) {
                    return Err(format!("graph {i}: overlapping edges"));
                }
            }
            if rs.len() != h.riders().len() {
                return Err(format!("graph {i}: incomplete cover"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} solutions re-validated, {infeasible} clustered runs infeasible"
    ))
}

fn ls_monotonicity() -> Check {
    let (n, mut moves) = (150, 0);
    let mut r = rng(31);
    for i in 0..n {
        let cfg = RandomGraphConfig {
            riders: r.gen_range(3..=9),
            personal: 0,
            designated: r.gen_range(3..=9),
            lambda: r.gen_range(2..=3),
            seeds_per_driver: r.gen_range(1..=4),
            assumption2: r.gen_bool(0.5),
            problem: Problem::MinNum,
            ..RandomGraphConfig::default()
        };
        let h = random_hypergraph(&cfg, &mut r);
        let (sol, trace) = match local_search_trace(&h) {
            Ok(x) => x,
            Err(_) => continue,
        };
        if trace.sizes.windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("graph {i}: sizes {:?}", trace.sizes));
        }
        if trace.last() > trace.initial() || sol.edges.len() != trace.last() {
            return Err(format!("graph {i}: final {} vs initial {}", sol.edges.len(), trace.initial()));
        }
        moves += trace.moves.len();
    }
    Ok(format!("{n} graphs, {moves} improving moves"))
}

fn clustering_soundness() -> Check {
    let cfg = ClusterConfig::default();
    let servable = ClusterConfig {
        allocation: AllocationMode::Servable,
        ..ClusterConfig::default()
    };
    // partition and size bounds
    for (i, inst) in instances(20, 40, 300).iter().enumerate() {
        let p1 = build_clusters_phase1(inst, &cfg).map_err(|e| e.to_string())?;
        let mut seen_r = HashSet::new();
        let mut seen_p = HashSet::new();
        for c in &p1.clusters {
            if !c.riders.iter().all(|r| seen_r.insert(*r))
                || !c.personal.iter().all(|d| seen_p.insert(*d))
            {
                return Err(format!("instance {i}: phase 1 clusters overlap"));
            }
        }
        if seen_r.len() != inst.riders.len() || seen_p.len() != inst.personal_drivers.len() {
            return Err(format!("instance {i}: phase 1 misses agents"));
        }
        let refined = refine_clusters(p1, &cfg, inst);
        for c in &refined.clusters {
            if c.size() > cfg.s_max || (c.size() < cfg.s_min && !c.isolated) {
                return Err(format!("instance {i}: cluster {} has size {}", c.id, c.size()));
            }
        }
    }
    // paired objectives
    let (mut pairs, mut infeasible) = (0, [0, 0]);
    let opts = SolveOptions::new(Problem::MinDist, Algo::Exact);
    for (i, inst) in instances(50, 24, 400).iter().enumerate() {
        let plain = run_interval(inst, &opts, None)
            .map_err(|e| format!("instance {i}: {e}"))?
            .outcome
            .objective;
        for (k, c) in [&cfg, &servable].into_iter().enumerate() {
            match run_interval(inst, &opts, Some(c)) {
                Ok(run) if run.outcome.objective < plain => {
                    return Err(format!(
                        "instance {i}: clustered {} < unclustered {plain}",
                        run.outcome.objective
                    ))
                }
                Ok(_) => pairs += 1,
                Err(_) => infeasible[k] += 1,
            }
        }
    }
    // enumeration time at scale
    let inst = gen_interval_instance(&gen_cfg(220, 77), 7 * 3600).map_err(|e| e.to_string())?;
    let ctx = MatchContext::new(&inst);
    let cs = build_clusters(&inst, &cfg).map_err(|e| e.to_string())?;
    let t = Instant::now();
    let all: Vec<&Driver> = inst.drivers().collect();
    let mut riders: Vec<&Rider> = inst.riders.iter().collect();
    riders.sort_by_key(|r| r.id);
    let full = enumerate_with(&ctx, &all, &riders, Problem::MinDist);
    let plain_t = t.elapsed();
    let t = Instant::now();
    let mut parts = 0;
    for c in &cs.clusters {
        let ds: Vec<&Driver> = c
            .personal
            .iter()
            .chain(&c.designated)
            .filter_map(|&d| inst.driver(d))
            .collect();
        let rs: Vec<&Rider> = c.riders.iter().filter_map(|&r| inst.rider(r)).collect();
        parts += enumerate_with(&ctx, &ds, &rs, Problem::MinDist).num_edges();
    }
    let clustered_t = t.elapsed();
    if pairs < 50 {
        return Err(format!("only {pairs} feasible paired runs"));
    }
    if clustered_t >= plain_t {
        return Err(format!("clustered enumeration {clustered_t:?} >= {plain_t:?}"));
    }
    Ok(format!(
        "{pairs} feasible paired runs (infeasible clustered runs: {} distance allocation, {} servable allocation); enumeration {} riders: {clustered_t:.2?} ({parts} edges) vs {plain_t:.2?} ({} edges)",
        infeasible[0],
        infeasible[1],
        inst.riders.len(),
        full.num_edges()
    ))
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_feeder");
    let run = |extra: &[&str]| -> Result<Vec<u8>, String> {
        let out = Command::new(bin)
            .args(["bench", "--seed", "11", "--riders", "20", "--intervals", "2", "--no-timings"])
            .args(extra)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(String::from_utf8_lossy(&out.stderr).into_owned());
        }
        Ok(out.stdout)
    };
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("cluster.json");
    std::fs::write(&cfg, r#"{"cluster": {"allocation": "servable"}}"#).map_err(|e| e.to_string())?;
    let cfg = cfg.to_str().ok_or("temp path is not UTF-8")?;
    let mut variants = 0;
    for extra in [
        &[][..],
        &["--cluster", "--config", cfg][..],
        &["--problem", "minnum", "--algo", "ls"][..],
    ] {
        let (a, b) = (run(extra)?, run(extra)?);
        if a != b {
            return Err(format!("reports differ for {extra:?}"));
        }
        variants += 1;
    }
    Ok(format!("{variants} flag sets reproduced byte for byte"))
}

fn desk_scale() -> Check {
    let start = Instant::now();
    let inst = gen_interval_instance(&gen_cfg(100, 2024), 7 * 3600).map_err(|e| e.to_string())?;
    let run = run_interval(&inst, &SolveOptions::new(Problem::MinDist, Algo::Exact), None)
        .map_err(|e| e.to_string())?;
    recheck(&inst, &run.outcome)?;
    let el = start.elapsed();
    if el > Duration::from_secs(300) {
        return Err(format!("took {el:?}"));
    }
    Ok(format!(
        "{} riders, {} personal, {} designated: objective {} ({}) in {el:.2?}",
        inst.riders.len(),
        inst.personal_drivers.len(),
        inst.designated_drivers.len(),
        run.outcome.objective,
        run.outcome.status
    ))
}

fn main() {
    let generated = instances(50, 14, 100);
    let checks: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("3dm equivalence, distance", Box::new(|| lemma(Problem::MinDist))),
        ("3dm equivalence, unit weights", Box::new(|| lemma(Problem::MinNum))),
        ("exact vs brute force", Box::new(exact_vs_oracle)),
        ("greedy distance ratio", Box::new(theorem3)),
        ("greedy driver-count ratio", Box::new(theorem4)),
        ("downward closure and monotone weights", Box::new(|| observation1(&generated))),
        ("feasibility contracts", Box::new(|| feasibility_contracts(&generated[..10]))),
        ("local search monotonicity", Box::new(ls_monotonicity)),
        ("clustering soundness", Box::new(clustering_soundness)),
        ("report determinism", Box::new(determinism)),
        ("desk-scale end to end", Box::new(desk_scale)),
    ];
    let mut failed = 0;
    for (name, f) in &checks {
        match f() {
            Ok(msg) => println!("PASS  {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {name}: {msg}");
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
