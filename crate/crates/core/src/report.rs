//! Per-interval and aggregate metrics of solved intervals, as CSV or JSON.

use std::time::Duration;

use serde::Serialize;

use crate::model::{Instance, Problem};
use crate::clustering::ClusterConfig;
use crate::pipeline::{run_interval, Algo, IntervalRun, PipelineError, SolveOptions};
use crate::solvers::Status;

pub const CSV_HEADER: &str = "interval,algo,clustered,problem,objective,assigned_total,\
assigned_personal,assigned_designated,time_saved_total_s,time_saved_avg_s,enum_ms,solve_ms,total_ms";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalMetrics {
    /// Interval label, `all` for the aggregate row.
    pub interval: String,
    pub algo: Algo,
    pub clustered: bool,
    pub problem: Problem,
    pub objective: u64,
    pub assigned_total: usize,
    pub assigned_personal: usize,
    pub assigned_designated: usize,
    pub time_saved_total_s: i64,
    pub time_saved_avg_s: f64,
    pub enum_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
    pub riders_served: usize,
    /// Sum over assigned drivers, meters.
    pub incurred_distance_m: u64,
    pub status: Status,
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    interval: &'a str,
    algo: Algo,
    clustered: bool,
    problem: String,
    objective: u64,
    assigned_total: usize,
    assigned_personal: usize,
    assigned_designated: usize,
    time_saved_total_s: i64,
    time_saved_avg_s: String,
    enum_ms: String,
    solve_ms: String,
    total_ms: String,
}

fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

fn avg(total: i64, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        total as f64 / n as f64
    }
}

impl IntervalMetrics {
    /// Metrics of one solved interval. Enumeration time includes building
    /// the shared match context.
    pub fn from_run(label: impl Into<String>, instance: &Instance, run: &IntervalRun) -> Self {
        let out = &run.outcome;
        let mut saved = 0;
        let mut served = 0;
        for m in &out.matches {
            for s in &m.service {
                if let Some(r) = instance.rider(s.rider) {
                    saved += r.time_saved(s.arrive);
                    served += 1;
                }
            }
        }
        Self {
            interval: label.into(),
            algo: out.algo,
            clustered: run.clusters.is_some(),
            problem: out.problem,
            objective: out.objective,
            assigned_total: out.matches.len(),
            assigned_personal: out.assigned_personal(),
            assigned_designated: out.assigned_designated(),
            time_saved_total_s: saved,
            time_saved_avg_s: avg(saved, served),
            enum_ms: ms(run.context_time + out.enum_time),
            solve_ms: ms(out.solve_time),
            total_ms: ms(run.total_time),
            riders_served: served,
            incurred_distance_m: out.matches.iter().map(|m| m.incurred_distance).sum(),
            status: out.status,
        }
    }

    fn csv_row(&self) -> CsvRow<'_> {
        CsvRow {
            interval: &self.interval,
            algo: self.algo,
            clustered: self.clustered,
            problem: self.problem.to_string(),
            objective: self.objective,
            assigned_total: self.assigned_total,
            assigned_personal: self.assigned_personal,
            assigned_designated: self.assigned_designated,
            time_saved_total_s: self.time_saved_total_s,
            time_saved_avg_s: format!("{:.3}", self.time_saved_avg_s),
            enum_ms: format!("{:.3}", self.enum_ms),
            solve_ms: format!("{:.3}", self.solve_ms),
            total_ms: format!("{:.3}", self.total_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub intervals: Vec<IntervalMetrics>,
    pub aggregate: IntervalMetrics,
}

impl MetricsReport {
    /// Builds the report; the aggregate sums counts, times and savings, and
    /// averages savings over all served riders. `rows` must not be empty.
    pub fn new(rows: Vec<IntervalMetrics>) -> Self {
        let first = rows.first().expect("at least one interval");
        let mut agg = IntervalMetrics {
            interval: "all".into(),
            objective: 0,
            assigned_total: 0,
            assigned_personal: 0,
            assigned_designated: 0,
            time_saved_total_s: 0,
            time_saved_avg_s: 0.0,
            enum_ms: 0.0,
            solve_ms: 0.0,
            total_ms: 0.0,
            riders_served: 0,
            incurred_distance_m: 0,
            ..first.clone()
        };
        for r in &rows {
            agg.objective += r.objective;
            agg.assigned_total += r.assigned_total;
            agg.assigned_personal += r.assigned_personal;
            agg.assigned_designated += r.assigned_designated;
            agg.time_saved_total_s += r.time_saved_total_s;
            agg.enum_ms += r.enum_ms;
            agg.solve_ms += r.solve_ms;
            agg.total_ms += r.total_ms;
            agg.riders_served += r.riders_served;
            agg.incurred_distance_m += r.incurred_distance_m;
            if r.status != Status::Optimal {
                agg.status = r.status;
            }
        }
        agg.time_saved_avg_s = avg(agg.time_saved_total_s, agg.riders_served);
        Self {
            intervals: rows,
            aggregate: agg,
        }
    }

    /// Sets every timing column to zero so that reports of identical runs
    /// compare byte for byte.
    pub fn zero_timings(&mut self) {
        for r in self.intervals.iter_mut().chain(std::iter::once(&mut self.aggregate)) {
            r.enum_ms = 0.0;
            r.solve_ms = 0.0;
            r.total_ms = 0.0;
        }
    }

    /// Interval rows followed by the aggregate row.
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        for r in self.intervals.iter().chain(std::iter::once(&self.aggregate)) {
            w.serialize(r.csv_row()).expect("in-memory CSV write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory CSV flush"))
            .expect("CSV output is UTF-8");
        format!("{CSV_HEADER}\n{body}")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Solves the labelled intervals one after another and reports them.
pub fn run_pipeline(
    intervals: &[(String, Instance)],
    opts: &SolveOptions,
    cluster: Option<&ClusterConfig>,
) -> Result<MetricsReport, PipelineError> {
    if intervals.is_empty() {
        return Err(PipelineError::Config("no intervals to solve".into()));
    }
    let mut rows = Vec::with_capacity(intervals.len());
    for (label, inst) in intervals {
        let run = run_interval(inst, opts, cluster)?;
        rows.push(IntervalMetrics::from_run(label.clone(), inst, &run));
    }
    Ok(MetricsReport::new(rows))
}
