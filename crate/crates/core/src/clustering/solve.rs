use rayon::prelude::*;

use super::{
    allocate_designated, build_clusters_phase1, refine_clusters, ClusterConfig, ClusterError,
    ClusterSet,
};
use crate::feasibility::MatchContext;
use crate::model::{Driver, DriverId, Instance, Rider, RiderId};
use crate::pipeline::{solve_agents, Outcome, PipelineError, SolveOptions};

/// Phase I, phase II and designated-driver allocation. Allocation is
/// skipped when the instance has no designated drivers.
pub fn build_clusters(instance: &Instance, cfg: &ClusterConfig) -> Result<ClusterSet, ClusterError> {
    cfg.validate(instance.riders.len(), instance.personal_drivers.len())?;
    let cs = build_clusters_phase1(instance, cfg)?;
    let cs = refine_clusters(cs, cfg, instance);
    if instance.designated_drivers.is_empty() {
        return Ok(cs);
    }
    allocate_designated(cs, instance, cfg.allocation)
}

/// Solves every cluster independently and in parallel, then unions the
/// outcomes. The first infeasible cluster by id is reported.
pub fn solve_with_clusters(
    ctx: &MatchContext,
    cs: &ClusterSet,
    opts: &SolveOptions,
) -> Result<Outcome, PipelineError> {
    let inst = ctx.instance();
    let drivers = |ids: &[DriverId]| -> Vec<&Driver> {
        ids.iter()
            .map(|&id| ctx.driver_by_id(id).expect("cluster member exists"))
            .collect()
    };
    let riders = |ids: &[RiderId]| -> Vec<&Rider> {
        ids.iter()
            .map(|&id| inst.rider(id).expect("cluster member exists"))
            .collect()
    };
    let parts: Vec<Result<Outcome, PipelineError>> = cs
        .clusters
        .par_iter()
        .map(|c| {
            solve_agents(
                ctx,
                &drivers(&c.personal),
                &drivers(&c.designated),
                &riders(&c.riders),
                opts,
            )
            .map_err(|e| match e {
                PipelineError::Infeasible { source, .. } => PipelineError::Infeasible {
                    cluster: Some(c.id),
                    source,
                },
                other => other,
            })
        })
        .collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Outcome::merge(opts.problem, opts.algo, parts))
}

/// Clusters the instance and solves each cluster on its own.
pub fn solve_clustered(
    instance: &Instance,
    cfg: &ClusterConfig,
    opts: &SolveOptions,
) -> Result<(Outcome, ClusterSet), PipelineError> {
    opts.check()?;
    let cs = build_clusters(instance, cfg)?;
    let ctx = MatchContext::new(instance);
    let out = solve_with_clusters(&ctx, &cs, opts)?;
    Ok((out, cs))
}
