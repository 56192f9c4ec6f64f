use std::path::Path;
use std::process::{Command, Output};

use feeder::feasibility::enumerate_hypergraph;
use feeder::gen::{gen_interval_instance, GenConfig};
use feeder::model::Instance;
use feeder::pipeline::{run_interval, Algo, SolveOptions};
use feeder::report::CSV_HEADER;
use feeder::solvers::{assign_personal_maximal, brute_force_optimal};
use feeder::Problem;

fn feeder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_feeder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    feeder(args).status.code().expect("exit code")
}

fn small(riders: u32) -> Instance {
    let cfg = GenConfig {
        riders,
        seed: 5,
        ..GenConfig::default()
    };
    gen_interval_instance(&cfg, 6 * 3600).unwrap()
}

fn store(dir: &Path, name: &str, inst: &Instance) -> String {
    let p = dir.join(name);
    inst.store(&p).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["solve", "--bogus"]), 3);
    assert_eq!(code(&["solve", "--riders", "6", "--problem", "mindist", "--algo", "ls"]), 3);
    assert_eq!(code(&["solve", "--riders", "6", "--time-limit", "-1"]), 3);

    let bad = d.join("bad.json");
    std::fs::write(&bad, "{\"gen\": {\"riders\": \"many\"}}").unwrap();
    assert_eq!(code(&["solve", "--config", bad.to_str().unwrap()]), 3);
    let unknown = d.join("unknown.json");
    std::fs::write(&unknown, "{\"solver\": {}}").unwrap();
    assert_eq!(code(&["solve", "--config", unknown.to_str().unwrap()]), 3);

    let missing = d.join("missing.json");
    assert_eq!(code(&["solve", "--config", missing.to_str().unwrap()]), 4);
    assert_eq!(code(&["solve", "--instance", missing.to_str().unwrap()]), 4);
    let out = d.join("no/such/dir/report.csv");
    assert_eq!(code(&["solve", "--riders", "6", "--out", out.to_str().unwrap()]), 4);

    let mut inst = small(5);
    inst.designated_drivers.clear();
    inst.personal_drivers.clear();
    let path = store(d, "stranded.json", &inst);
    let o = feeder(&["solve", "--instance", &path]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("infeasible"));
}

#[test]
fn subcommands_write_their_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let inst = d.join("inst.json");
    let inst_s = inst.to_str().unwrap();
    assert_eq!(code(&["generate", "--riders", "6", "--seed", "2", "--out", inst_s]), 0);
    let loaded = Instance::load(&inst).unwrap();
    assert_eq!(loaded.riders.len(), 6);

    let o = feeder(&["solve", "--instance", inst_s]);
    assert!(o.status.success());
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 3);

    let o = feeder(&["solve", "--instance", inst_s, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["aggregate"]["objective"].as_u64().unwrap() > 0);

    let o = feeder(&["match", "--instance", inst_s]);
    let h: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(h.is_object());
    let o = feeder(&["export-lp", "--instance", inst_s]);
    let lp = String::from_utf8(o.stdout).unwrap();
    assert!(lp.contains("Minimize") && lp.ends_with("End\n"));
    let o = feeder(&["cluster", "--instance", inst_s]);
    assert!(o.status.success());
    let o = feeder(&["bench", "--riders", "6", "--intervals", "2", "--no-timings"]);
    let csv = String::from_utf8(o.stdout).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().last().unwrap().starts_with("all,"));
}

#[test]
fn small_exact_run_matches_brute_force() {
    let inst = small(5);
    let run = run_interval(&inst, &SolveOptions::new(Problem::MinDist, Algo::Exact), None).unwrap();
    let h = enumerate_hypergraph(&inst, Problem::MinDist);
    let brute = brute_force_optimal(&h, Problem::MinDist).unwrap();
    assert_eq!(run.outcome.objective, brute.objective);
}

#[test]
fn min_num_counts_both_stages() {
    let inst = small(12);
    let run = run_interval(&inst, &SolveOptions::new(Problem::MinNum, Algo::Exact), None).unwrap();
    let out = &run.outcome;
    let h = enumerate_hypergraph(&inst, Problem::MinDist);
    let stage1 = assign_personal_maximal(&h);
    assert_eq!(out.assigned_personal(), stage1.edges.len());
    assert_eq!(
        out.matches.len(),
        out.assigned_personal() + out.assigned_designated()
    );
    assert_eq!(out.objective as usize, out.assigned_designated());
}
