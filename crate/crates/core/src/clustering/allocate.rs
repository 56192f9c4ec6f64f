//! Pairing designated drivers with riders and attaching each driver to its
//! rider's cluster.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{ClusterError, ClusterSet};
use crate::feasibility::MatchContext;
use crate::model::{Driver, DriverId, Instance, MatchType, Rider, RiderId};
use crate::solvers::matching::min_cost_assignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AllocationMode {
    /// Each driver, by ascending id, takes the nearest unpaired rider.
    Greedy,
    /// Minimum total distance perfect matching.
    Exact,
    /// Minimum total distance perfect matching among pairs where the
    /// driver can serve the rider alone; other pairs are used only when no
    /// such perfect matching exists.
    Servable,
}

/// Pairing distance: origins for first mile, destinations for last mile.
/// Pairs of different match types sort after every same-type pair.
fn distance(d: &Driver, r: &Rider) -> (bool, f64) {
    let dist = match d.match_type {
        MatchType::FirstMile => d.origin.euclid(&r.origin),
        MatchType::LastMile => d.destination.euclid(&r.destination),
    };
    (d.match_type != r.match_type, dist)
}

/// One rider per designated driver.
pub fn pair_designated(
    instance: &Instance,
    mode: AllocationMode,
) -> Result<Vec<(DriverId, RiderId)>, ClusterError> {
    let mut drivers: Vec<&Driver> = instance.designated_drivers.iter().collect();
    let mut riders: Vec<&Rider> = instance.riders.iter().collect();
    if drivers.len() != riders.len() {
        return Err(ClusterError::CardinalityMismatch {
            drivers: drivers.len(),
            riders: riders.len(),
        });
    }
    drivers.sort_by_key(|d| d.id);
    riders.sort_by_key(|r| r.id);
    match mode {
        AllocationMode::Greedy => {
            let mut taken = vec![false; riders.len()];
            let mut out = Vec::with_capacity(drivers.len());
            for d in drivers {
                let j = (0..riders.len())
                    .filter(|&j| !taken[j])
                    .min_by(|&a, &b| {
                        let (xa, da) = distance(d, riders[a]);
                        let (xb, db) = distance(d, riders[b]);
                        xa.cmp(&xb).then(da.total_cmp(&db)).then(a.cmp(&b))
                    })
                    .expect("as many riders as drivers");
                taken[j] = true;
                out.push((d.id, riders[j].id));
            }
            Ok(out)
        }
        AllocationMode::Exact | AllocationMode::Servable => {
            const CROSS: i64 = 1 << 40;
            const UNSERVABLE: i64 = 1 << 50;
            let ctx = (mode == AllocationMode::Servable).then(|| MatchContext::new(instance));
            let cost: Vec<Vec<i64>> = drivers
                .iter()
                .map(|d| {
                    riders
                        .iter()
                        .map(|r| {
                            let (cross, dist) = distance(d, r);
                            let alone = ctx.as_ref().is_none_or(|c| c.check(d, &[*r]).is_some());
                            (dist * 1000.0).round() as i64
                                + if cross { CROSS } else { 0 }
                                + if alone { 0 } else { UNSERVABLE }
                        })
                        .collect()
                })
                .collect();
            let cols = min_cost_assignment(&cost);
            Ok(drivers
                .iter()
                .zip(cols)
                .map(|(d, j)| (d.id, riders[j].id))
                .collect())
        }
    }
}

/// Places every designated driver in the cluster of the rider it is paired
/// with.
pub fn allocate_designated(
    mut cs: ClusterSet,
    instance: &Instance,
    mode: AllocationMode,
) -> Result<ClusterSet, ClusterError> {
    let pairs = pair_designated(instance, mode)?;
    let home: HashMap<RiderId, usize> = cs
        .clusters
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.riders.iter().map(move |&r| (r, i)))
        .collect();
    for c in &mut cs.clusters {
        c.designated.clear();
    }
    for (d, r) in pairs {
        let i = home[&r];
        cs.clusters[i].designated.push(d);
    }
    for c in &mut cs.clusters {
        c.designated.sort_unstable();
    }
    Ok(cs)
}
