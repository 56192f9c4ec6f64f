use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{gen_network, gen_stations, gen_timetable, GenConfig, GenError, MAX_REJECTIONS, MINUTE};
use crate::feasibility::MatchContext;
use crate::model::{
    Driver, DriverId, DriverKind, Instance, Location, MatchType, Rider, RiderId, Seconds,
};
use crate::routing::{RoadGraph, TransitIndex};

const THETA: f64 = 0.3;
const MIN_TRANSIT: Seconds = 30 * MINUTE;
const DESIGNATED_CAPACITY: u32 = 3;
/// Designated-driver placements tried per rider before the rider is
/// rejected.
const PLACEMENT_TRIES: usize = 20;

struct Zones {
    side: u32,
    grid: u32,
    members: Vec<Vec<Location>>,
    departure: WeightedIndex<f64>,
    arrival: WeightedIndex<f64>,
}

impl Zones {
    fn new(cfg: &GenConfig, vertices: &[Location]) -> Result<Self, GenError> {
        let side = cfg.zone_side;
        let mut members = vec![Vec::new(); (side * side) as usize];
        let zones = Zones {
            side,
            grid: cfg.grid_side,
            members: Vec::new(),
            departure: WeightedIndex::new(&cfg.departure_weights)
                .map_err(|e| GenError::InvalidConfig(e.to_string()))?,
            arrival: WeightedIndex::new(&cfg.arrival_weights)
                .map_err(|e| GenError::InvalidConfig(e.to_string()))?,
        };
        for v in vertices {
            members[zones.zone_of(v)].push(*v);
        }
        Ok(Zones { members, ..zones })
    }

    fn zone_of(&self, v: &Location) -> usize {
        let (i, j) = (v.vertex_id % self.grid, v.vertex_id / self.grid);
        ((j * self.side / self.grid) * self.side + i * self.side / self.grid) as usize
    }

    fn pick_in(&self, zone: usize, rng: &mut impl Rng) -> Location {
        let m = &self.members[zone];
        m[rng.gen_range(0..m.len())]
    }

    fn departure(&self, rng: &mut impl Rng) -> Location {
        let z = self.departure.sample(rng);
        self.pick_in(z, rng)
    }

    fn arrival(&self, rng: &mut impl Rng) -> Location {
        let z = self.arrival.sample(rng);
        self.pick_in(z, rng)
    }
}

fn match_type(rng: &mut impl Rng) -> MatchType {
    if rng.gen_bool(0.5) {
        MatchType::FirstMile
    } else {
        MatchType::LastMile
    }
}

/// Window `[α, β]` with `α` uniform in `t_a + [lo, hi]` minutes and
/// `β − α` uniform in `[dlo, dhi]` minutes.
fn window(rng: &mut impl Rng, t_a: Seconds, lo: i64, hi: i64, dlo: i64, dhi: i64) -> (Seconds, Seconds) {
    let a = t_a + rng.gen_range(lo * MINUTE..=hi * MINUTE);
    (a, a + rng.gen_range(dlo * MINUTE..=dhi * MINUTE))
}

struct Builder {
    t_a: Seconds,
    zones: Zones,
    transit: TransitIndex,
    scratch: Instance,
}

impl Builder {
    /// A rider with a valid transit baseline together with a designated
    /// driver from the same zone able to serve it alone, or `None` when
    /// the candidate is rejected.
    fn rider(&mut self, rng: &mut impl Rng, id: u32, driver_id: u32) -> Option<(Rider, Driver)> {
        let mt = match_type(rng);
        let o = self.zones.departure(rng);
        let d = self.zones.arrival(rng);
        let (alpha, beta) = window(rng, self.t_a, 45, 75, 45, 90);
        if o.vertex_id == d.vertex_id {
            return None;
        }
        let j = self.transit.earliest_arrival(&o, &d, alpha).ok()?;
        if j.rides() == 0 || j.duration() < MIN_TRANSIT {
            return None;
        }
        let rider = Rider {
            id: RiderId(id),
            match_type: mt,
            origin: o,
            destination: d,
            earliest_departure: alpha,
            latest_arrival: beta,
            acceptance_threshold: THETA,
            transit_baseline: j.duration(),
        };
        let anchor = match mt {
            MatchType::FirstMile => o,
            MatchType::LastMile => d,
        };
        let zone = self.zones.zone_of(&anchor);
        for _ in 0..PLACEMENT_TRIES {
            let home = self.zones.pick_in(zone, rng);
            let (a, b) = window(rng, self.t_a, 30, 70, 45, 70);
            let driver = Driver {
                id: DriverId(driver_id),
                kind: DriverKind::Designated,
                match_type: mt,
                origin: home,
                destination: home,
                earliest_departure: a,
                latest_arrival: b,
                capacity: DESIGNATED_CAPACITY,
                detour_limit: 0,
            };
            if self.servable(&driver, &rider) {
                return Some((rider, driver));
            }
        }
        None
    }

    fn servable(&mut self, driver: &Driver, rider: &Rider) -> bool {
        self.scratch.designated_drivers = vec![driver.clone()];
        self.scratch.riders = vec![rider.clone()];
        let ctx = MatchContext::new(&self.scratch);
        ctx.check(driver, &[rider]).is_some()
    }
}

/// One interval of riders, personal drivers and designated drivers.
///
/// Riders are redrawn until their fastest transit journey uses at least
/// one trip, lasts 30 minutes or more and stays within the walking cap, and
/// until a designated driver placed in the same zone can serve them alone.
/// The road network and stations depend on the seed only; the timetable
/// starts at `t_a`.
pub fn gen_interval_instance(cfg: &GenConfig, t_a: Seconds) -> Result<Instance, GenError> {
    cfg.validate()?;
    let mut net_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let network = gen_network(cfg, &mut net_rng);
    let stations = gen_stations(cfg, &network);
    let timetable = gen_timetable(cfg, &stations, t_a);
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed ^ (t_a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));

    let zones = Zones::new(cfg, &network.vertices)?;
    let transit = TransitIndex::new(&timetable, &stations);
    let road = RoadGraph::new(&network);
    let scratch = Instance {
        network,
        timetable,
        stations,
        personal_drivers: Vec::new(),
        designated_drivers: Vec::new(),
        riders: Vec::new(),
        interval: (t_a, t_a + cfg.interval_s),
    };
    let mut b = Builder {
        t_a,
        zones,
        transit,
        scratch,
    };

    let n_personal = cfg.personal_drivers();
    let mut riders = Vec::with_capacity(cfg.riders as usize);
    let mut designated = Vec::with_capacity(cfg.riders as usize);
    for j in 1..=cfg.riders {
        let mut rejected = 0;
        loop {
            if rejected >= MAX_REJECTIONS {
                return Err(GenError::GenerationExhausted(rejected));
            }
            match b.rider(&mut rng, j, n_personal + j) {
                Some((r, d)) => {
                    riders.push(r);
                    designated.push(d);
                    break;
                }
                None => rejected += 1,
            }
        }
    }

    let mut personal = Vec::with_capacity(n_personal as usize);
    for i in 1..=n_personal {
        let mt = match_type(&mut rng);
        let (o, d) = loop {
            let o = b.zones.departure(&mut rng);
            let d = b.zones.arrival(&mut rng);
            if o.vertex_id != d.vertex_id {
                break (o, d);
            }
        };
        let (alpha, beta) = window(&mut rng, t_a, 30, 70, 45, 70);
        let capacity = rng.gen_range(2..=3);
        let fp = road
            .tree_from(o.vertex_id)
            .ok()
            .and_then(|t| road.leg(&t, d.vertex_id))
            .map(|(s, _)| s as Seconds)
            .unwrap_or(0);
        let floor = 20 * MINUTE;
        let z = if fp <= floor {
            floor
        } else {
            rng.gen_range(floor..=fp)
        };
        personal.push(Driver {
            id: DriverId(i),
            kind: DriverKind::Personal,
            match_type: mt,
            origin: o,
            destination: d,
            earliest_departure: alpha,
            latest_arrival: beta,
            capacity,
            detour_limit: z,
        });
    }

    let mut inst = b.scratch;
    inst.personal_drivers = personal;
    inst.designated_drivers = designated;
    inst.riders = riders;
    Ok(inst)
}
