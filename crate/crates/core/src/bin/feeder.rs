use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use feeder::clustering::{build_clusters, ClusterConfig, ClusterError};
use feeder::feasibility::enumerate_hypergraph;
use feeder::gen::{gen_interval_instance, GenConfig, GenError};
use feeder::model::{Instance, InstanceIoError, Problem, Seconds};
use feeder::pipeline::{Algo, PipelineError, SolveOptions};
use feeder::report::run_pipeline;
use feeder::solvers::export_lp;

/// First-mile / last-mile rideshare matching.
#[derive(Parser)]
#[command(name = "feeder", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate one interval instance as JSON.
    Generate(Common),
    /// Enumerate feasible matches and write the hypergraph as JSON.
    Match(Solve),
    /// Solve one interval and report its metrics.
    Solve(Solve),
    /// Generate and solve consecutive intervals.
    Bench(Bench),
    /// Write the integer program of an instance in LP format.
    ExportLp(Solve),
    /// Cluster an instance and write the clusters as JSON.
    Cluster(Solve),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON file with optional `gen` and `cluster` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Riders per interval, overriding the config.
    #[arg(long)]
    riders: Option<u32>,
    /// Start of the (first) interval, seconds on the absolute clock.
    #[arg(long, default_value_t = 6 * 3600)]
    start: Seconds,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct Solve {
    #[command(flatten)]
    common: Common,
    /// Instance JSON; generated from the config when absent.
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long, default_value = "mindist")]
    problem: Problem,
    #[arg(long, default_value = "exact")]
    algo: Algo,
    /// Solve each cluster separately.
    #[arg(long)]
    cluster: bool,
    /// Per-solve time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Report zero for every timing column.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Args, Clone)]
struct Bench {
    #[command(flatten)]
    solve: Solve,
    #[arg(long, default_value_t = 4)]
    intervals: u32,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    gen: GenConfig,
    cluster: ClusterConfig,
}

#[derive(Debug)]
enum Fail {
    Infeasible(String),
    Config(String),
    Io(String),
    Other(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Other(_) => 1,
            Fail::Infeasible(_) => 2,
            Fail::Config(_) => 3,
            Fail::Io(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Infeasible(m) | Fail::Config(m) | Fail::Io(m) | Fail::Other(m) => m,
        }
    }
}

impl From<PipelineError> for Fail {
    fn from(e: PipelineError) -> Self {
        let m = e.to_string();
        match e {
            PipelineError::Infeasible { .. } => Fail::Infeasible(m),
            PipelineError::Config(_) | PipelineError::Cluster(_) => Fail::Config(m),
            PipelineError::Validation(_) => Fail::Other(m),
        }
    }
}

impl From<GenError> for Fail {
    fn from(e: GenError) -> Self {
        Fail::Config(e.to_string())
    }
}

impl From<ClusterError> for Fail {
    fn from(e: ClusterError) -> Self {
        Fail::Config(e.to_string())
    }
}

impl From<InstanceIoError> for Fail {
    fn from(e: InstanceIoError) -> Self {
        match e {
            InstanceIoError::Io { .. } => Fail::Io(e.to_string()),
            InstanceIoError::Json(_) => Fail::Config(e.to_string()),
        }
    }
}

fn load_config(c: &Common) -> Result<FileConfig, Fail> {
    let mut cfg = match &c.config {
        None => FileConfig::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Fail::Io(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Fail::Config(format!("bad config {}: {e}", p.display())))?
        }
    };
    if let Some(s) = c.seed {
        cfg.gen.seed = s;
    }
    if let Some(r) = c.riders {
        cfg.gen.riders = r;
    }
    cfg.gen.validate()?;
    Ok(cfg)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
        Some(p) => write_file(p, text),
    }
}

fn write_file(p: &Path, text: &str) -> Result<(), Fail> {
    std::fs::write(p, text).map_err(|e| Fail::Io(format!("cannot write {}: {e}", p.display())))
}

fn instance_for(s: &Solve, cfg: &FileConfig) -> Result<Instance, Fail> {
    match &s.instance {
        Some(p) => Ok(Instance::load(p)?),
        None => Ok(gen_interval_instance(&cfg.gen, s.common.start)?),
    }
}

fn options(s: &Solve) -> Result<SolveOptions, Fail> {
    let mut opts = SolveOptions::new(s.problem, s.algo);
    if let Some(t) = s.time_limit {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Fail::Config("--time-limit must be a positive number of seconds".into()));
        }
        opts.time_limit = Some(Duration::from_secs_f64(t));
    }
    opts.check()?;
    Ok(opts)
}

fn report(
    s: &Solve,
    cfg: &FileConfig,
    intervals: &[(String, Instance)],
) -> Result<(), Fail> {
    let opts = options(s)?;
    let cluster = s.cluster.then_some(&cfg.cluster);
    let mut rep = run_pipeline(intervals, &opts, cluster)?;
    if s.no_timings {
        rep.zero_timings();
    }
    let text = match s.format {
        Format::Csv => rep.to_csv(),
        Format::Json => rep.to_json(),
    };
    write_out(&s.common.out, &text)
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Generate(c) => {
            let cfg = load_config(&c)?;
            let inst = gen_interval_instance(&cfg.gen, c.start)?;
            write_out(&c.out, &inst.to_json())
        }
        Cmd::Match(s) => {
            let cfg = load_config(&s.common)?;
            let inst = instance_for(&s, &cfg)?;
            let h = enumerate_hypergraph(&inst, s.problem);
            write_out(&s.common.out, &h.to_json())
        }
        Cmd::ExportLp(s) => {
            let cfg = load_config(&s.common)?;
            let inst = instance_for(&s, &cfg)?;
            let h = enumerate_hypergraph(&inst, s.problem);
            write_out(&s.common.out, &export_lp(&h, s.problem))
        }
        Cmd::Cluster(s) => {
            let cfg = load_config(&s.common)?;
            let inst = instance_for(&s, &cfg)?;
            let cs = build_clusters(&inst, &cfg.cluster)?;
            write_out(&s.common.out, &cs.to_json())
        }
        Cmd::Solve(s) => {
            let cfg = load_config(&s.common)?;
            let inst = instance_for(&s, &cfg)?;
            let label = inst.interval.0.to_string();
            report(&s, &cfg, &[(label, inst)])
        }
        Cmd::Bench(b) => {
            let s = &b.solve;
            if s.instance.is_some() {
                return Err(Fail::Config("bench generates its own intervals; drop --instance".into()));
            }
            if b.intervals == 0 {
                return Err(Fail::Config("--intervals must be positive".into()));
            }
            let cfg = load_config(&s.common)?;
            let mut intervals = Vec::new();
            for i in 0..b.intervals {
                let t_a = s.common.start + i as Seconds * cfg.gen.interval_s;
                intervals.push((t_a.to_string(), gen_interval_instance(&cfg.gen, t_a)?));
            }
            report(s, &cfg, &intervals)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("feeder: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
