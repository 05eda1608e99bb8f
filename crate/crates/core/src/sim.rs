//! Deterministic event-driven dispatch simulation.
//!
//! The simulator walks a dataset's requests in time order, maintains
//! per-driver availability, builds candidate sets, and delegates each
//! decision to the configured policy. Requests with no eligible driver wait
//! in a FIFO queue that is retried whenever a driver frees up; waits beyond
//! a cutoff become drops. Identical inputs produce identical results on
//! every platform: all randomness flows from one seeded generator and every
//! tie-break is total.

use alloc::collections::{BTreeMap, BinaryHeap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assign::{
    era_assign, nearest_assign, replay_assign, tora_assign, Candidate, CandidateSet, EraConfig,
    OfflineDriver, OfflineInstance, OfflineRequest,
};
use crate::dataset::Dataset;
use crate::fleet::{
    classify_vehicle, ClassThresholds, DriverState, DriverStatus, EmissionClass,
    EV_UNIT_EMISSION_G_PER_KM,
};
use crate::geo::{road_distance_km, GeoPoint, DEFAULT_DETOUR_FACTOR};
use crate::routing::{synth_route_triple_with, RouteOption, RoutePolicy, RouteSynthConfig, RouteTriple};
use crate::{Error, Result};

/// How each ride picks its driver.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Policy {
    /// Recorded driver from the dataset; availability limits do not apply.
    Replay,
    /// Closest eligible driver.
    Nearest,
    /// Threshold rule trading deadhead distance for deadhead emissions.
    Tora { phi: f64 },
    /// Assignments precomputed by the offline frontier search over the
    /// whole request sequence, then executed like a replay.
    EraOffline,
}

/// Simulation parameters; [`Default`] gives the documented baseline.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub policy: Policy,
    /// Reference emission rate (g/km) scaling the threshold rule.
    pub e0_g_per_km: f64,
    /// Speed assumed for deadhead legs when deriving waiting times, km/h.
    pub deadhead_speed_kmh: f64,
    /// Base speed for synthesized route durations, km/h.
    pub trip_speed_kmh: f64,
    /// Busy drivers whose job ends within this window count as candidates.
    pub availability_horizon_s: f64,
    /// Queued requests waiting longer than this are dropped.
    pub max_queue_wait_s: f64,
    pub routing_policy: RoutePolicy,
    /// Multiplier from great-circle to road distance.
    pub detour_factor: f64,
    pub thresholds: ClassThresholds,
    pub route_synth: RouteSynthConfig,
    pub era: EraConfig,
    /// Seeds route synthesis (and nothing else inside the simulator).
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            policy: Policy::Tora { phi: 1.0 },
            e0_g_per_km: EV_UNIT_EMISSION_G_PER_KM,
            deadhead_speed_kmh: 30.0,
            trip_speed_kmh: 40.0,
            availability_horizon_s: 600.0,
            max_queue_wait_s: 7200.0,
            routing_policy: RoutePolicy::Shortest,
            detour_factor: DEFAULT_DETOUR_FACTOR,
            thresholds: ClassThresholds::default(),
            route_synth: RouteSynthConfig::default(),
            era: EraConfig::default(),
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("e0_g_per_km", self.e0_g_per_km),
            ("deadhead_speed_kmh", self.deadhead_speed_kmh),
            ("trip_speed_kmh", self.trip_speed_kmh),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        let non_negative = [
            ("availability_horizon_s", self.availability_horizon_s),
            ("max_queue_wait_s", self.max_queue_wait_s),
        ];
        for (name, v) in non_negative {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        if !self.detour_factor.is_finite() || self.detour_factor < 1.0 {
            return Err(Error::InvalidDetourFactor(self.detour_factor));
        }
        if let Policy::Tora { phi } = self.policy {
            if !phi.is_finite() || phi < 0.0 {
                return Err(Error::OutOfRange {
                    name: "phi",
                    value: phi,
                });
            }
        }
        self.route_synth.validate()?;
        Ok(())
    }
}

/// What happened to one request; served and dropped requests both appear,
/// in dataset order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RideOutcome {
    pub ride_id: String,
    pub request_ts: i64,
    /// Serving driver's external id; empty for dropped requests.
    pub driver_id: String,
    /// Serving vehicle's emission class (meaningful when served).
    pub class: EmissionClass,
    pub deadhead_km: f64,
    pub deadhead_emission_g: f64,
    pub trip_emission_g: f64,
    /// Distance of the route option actually driven.
    pub trip_distance_km: f64,
    pub trip_duration_s: f64,
    pub unit_emission_g_per_km: f64,
    /// Request-to-pickup time; for drops, time waited before giving up.
    pub waiting_s: f64,
    /// Whether the serving driver was also the closest candidate. Forced
    /// assignments (replay, offline plans) count as closest by definition.
    pub chose_closest: bool,
    pub closest_deadhead_km: f64,
    pub closest_unit_emission_g_per_km: f64,
    pub dropped: bool,
}

/// Everything a simulation run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// One entry per dataset trip, in dataset order.
    pub outcomes: Vec<RideOutcome>,
    pub served: usize,
    pub dropped: usize,
    /// Drivers given an initial position (those with at least one recorded
    /// trip); only they participate in dispatch.
    pub drivers_placed: usize,
    /// Fleet entries never seen in the trip data, excluded from dispatch.
    pub drivers_unplaced: usize,
    /// Trips whose route triple was synthesized rather than supplied.
    pub synthesized_routes: usize,
    /// Replay only: mean absolute gap between simulated waits and the
    /// recorded request-to-pickup times, over trips that record them.
    pub replay_wait_mae_s: Option<f64>,
}

impl SimResult {
    /// Outcomes of requests that were actually served.
    pub fn served_outcomes(&self) -> impl Iterator<Item = &RideOutcome> {
        self.outcomes.iter().filter(|o| !o.dropped)
    }
}

/// Simulator events. Releases sort before arrivals at the same instant so
/// a freed driver is visible to a request arriving at that timestamp.
#[derive(Debug, Clone, Copy)]
enum EventKind {
    Release { driver: u32 },
    Arrival { trip: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time_s: f64,
    kind: EventKind,
    seq: u64,
}

impl Event {
    fn order_key(&self) -> (f64, u8, u64) {
        let k = match self.kind {
            EventKind::Release { .. } => 0,
            EventKind::Arrival { .. } => 1,
        };
        (self.time_s, k, self.seq)
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == core::cmp::Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Event {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        let (t1, k1, s1) = self.order_key();
        let (t2, k2, s2) = other.order_key();
        // Reversed: BinaryHeap is a max-heap and we pop earliest first.
        t2.total_cmp(&t1).then(k2.cmp(&k1)).then(s2.cmp(&s1))
    }
}

/// Builds the route triple for every trip, in dataset order.
///
/// Supplied triples (keyed by ride id) are taken as-is; the rest are
/// synthesized from one generator seeded by `cfg.seed`, so the table is a
/// pure function of `(dataset, cfg, overrides)` and identical across
/// policies and thresholds. Zero-length trips get a degenerate all-zero
/// triple.
pub fn build_route_table(
    ds: &Dataset,
    cfg: &SimConfig,
    overrides: Option<&BTreeMap<String, RouteTriple>>,
) -> Result<(Vec<RouteTriple>, usize)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Vec::with_capacity(ds.trips().len());
    let mut synthesized = 0;
    for t in ds.trips() {
        if let Some(found) = overrides.and_then(|m| m.get(&t.ride_id)) {
            found.validate()?;
            table.push(found.clone());
            continue;
        }
        let base = match t.trip_distance_km {
            Some(d) => d,
            None => road_distance_km(t.pickup, t.dropoff, cfg.detour_factor)?,
        };
        let triple = if base <= 0.0 {
            let zero = RouteOption {
                distance_km: 0.0,
                duration_s: 0.0,
                emission_distance_km: 0.0,
            };
            RouteTriple::new(zero, zero, zero)?
        } else {
            synthesized += 1;
            synth_route_triple_with(&cfg.route_synth, base, cfg.trip_speed_kmh, &mut rng)?
        };
        table.push(triple);
    }
    Ok((table, synthesized))
}

struct Roster {
    states: Vec<DriverState>,
    external_ids: Vec<String>,
    unplaced: usize,
}

/// Drivers in sorted-id order, each starting at the pickup of their first
/// recorded trip. Fleet entries without trips have no known position and
/// sit out.
fn build_roster(ds: &Dataset, thresholds: &ClassThresholds) -> Roster {
    let mut first_pickup: BTreeMap<&str, GeoPoint> = BTreeMap::new();
    for t in ds.trips() {
        first_pickup.entry(&t.driver_id).or_insert(t.pickup);
    }
    let mut states = Vec::new();
    let mut external_ids = Vec::new();
    let mut unplaced = 0;
    for (id, v) in ds.fleet() {
        match first_pickup.get(id.as_str()) {
            Some(&location) => {
                states.push(DriverState {
                    driver_id: states.len() as u32,
                    unit_emission_g_per_km: v.unit_emission_g_per_km,
                    class: classify_vehicle(v, thresholds),
                    location,
                    status: DriverStatus::Idle,
                });
                external_ids.push(id.clone());
            }
            None => unplaced += 1,
        }
    }
    Roster {
        states,
        external_ids,
        unplaced,
    }
}

/// Runs one simulation over a dataset.
///
/// `routes` optionally supplies real route triples by ride id; missing
/// entries are synthesized. Returns one outcome per trip plus run-level
/// diagnostics. Served plus dropped always equals the trip count.
pub fn run(
    ds: &Dataset,
    cfg: &SimConfig,
    routes: Option<&BTreeMap<String, RouteTriple>>,
) -> Result<SimResult> {
    cfg.validate()?;
    let trips = ds.trips();
    let (route_table, synthesized_routes) = build_route_table(ds, cfg, routes)?;
    let mut roster = build_roster(ds, &cfg.thresholds);

    // Map external driver id to roster index for forced assignments.
    let roster_index: BTreeMap<&str, u32> = roster
        .external_ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i as u32))
        .collect();

    // Forced per-trip drivers for replay and offline-plan policies.
    let forced: Option<Vec<u32>> = match cfg.policy {
        Policy::Replay => {
            let mut v = Vec::with_capacity(trips.len());
            for t in trips {
                let id = replay_assign(t)?;
                let ix = roster_index.get(id).copied().ok_or_else(|| {
                    Error::InvalidDataset(alloc::format!(
                        "recorded driver {id} has no initial position"
                    ))
                })?;
                v.push(ix);
            }
            Some(v)
        }
        Policy::EraOffline => {
            let requests: Vec<OfflineRequest> = trips
                .iter()
                .enumerate()
                .map(|(i, t)| OfflineRequest {
                    pickup: t.pickup,
                    dropoff: t.dropoff,
                    trip_emission_km: route_table[i]
                        .select(cfg.routing_policy)
                        .emission_distance_km,
                })
                .collect();
            let drivers: Vec<OfflineDriver> = roster
                .states
                .iter()
                .map(|d| OfflineDriver {
                    start: d.location,
                    unit_emission_g_per_km: d.unit_emission_g_per_km,
                })
                .collect();
            if requests.is_empty() {
                Some(Vec::new())
            } else {
                let inst = OfflineInstance::new(requests, drivers, cfg.detour_factor)?;
                let outcome = era_assign(&inst, &cfg.era)?;
                Some(outcome.plan.rides.iter().map(|r| r.driver_id).collect())
            }
        }
        Policy::Nearest | Policy::Tora { .. } => None,
    };

    let mut events: BinaryHeap<Event> = BinaryHeap::with_capacity(trips.len() * 2);
    let mut seq: u64 = 0;
    for (i, t) in trips.iter().enumerate() {
        events.push(Event {
            time_s: t.request_ts as f64,
            kind: EventKind::Arrival { trip: i },
            seq,
        });
        seq += 1;
    }

    let mut outcomes: Vec<Option<RideOutcome>> = core::iter::repeat_with(|| None)
        .take(trips.len())
        .collect();
    let mut queue: VecDeque<usize> = VecDeque::new();
    let mut last_event_s: f64 = 0.0;

    // Serves `trip` with roster driver `driver_ix` at simulation time `now`.
    let serve = |trip_ix: usize,
                 driver_ix: u32,
                 now: f64,
                 chose_closest: bool,
                 closest_dh: f64,
                 closest_em: f64,
                 roster: &mut Roster,
                 events: &mut BinaryHeap<Event>,
                 seq: &mut u64,
                 outcomes: &mut Vec<Option<RideOutcome>>|
     -> Result<()> {
        let t = &trips[trip_ix];
        let d = &mut roster.states[driver_ix as usize];
        let delay_s = d.remaining_busy_s(now);
        let origin = d.dispatch_origin();
        let deadhead_km = road_distance_km(origin, t.pickup, cfg.detour_factor)?;
        let deadhead_s = deadhead_km / cfg.deadhead_speed_kmh * 3600.0;
        let waiting_s = (now - t.request_ts as f64) + delay_s + deadhead_s;
        let option = route_table[trip_ix].select(cfg.routing_policy);
        let busy_until = now + delay_s + deadhead_s + option.duration_s;
        d.status = DriverStatus::Busy {
            until_s: busy_until,
            dropoff: t.dropoff,
        };
        events.push(Event {
            time_s: busy_until,
            kind: EventKind::Release { driver: driver_ix },
            seq: *seq,
        });
        *seq += 1;
        let (chose_closest, closest_dh, closest_em) = if chose_closest {
            (true, deadhead_km, d.unit_emission_g_per_km)
        } else {
            (false, closest_dh, closest_em)
        };
        outcomes[trip_ix] = Some(RideOutcome {
            ride_id: t.ride_id.clone(),
            request_ts: t.request_ts,
            driver_id: roster.external_ids[driver_ix as usize].clone(),
            class: d.class,
            deadhead_km,
            deadhead_emission_g: deadhead_km * d.unit_emission_g_per_km,
            trip_emission_g: option.emission_distance_km * d.unit_emission_g_per_km,
            trip_distance_km: option.distance_km,
            trip_duration_s: option.duration_s,
            unit_emission_g_per_km: d.unit_emission_g_per_km,
            waiting_s,
            chose_closest,
            closest_deadhead_km: closest_dh,
            closest_unit_emission_g_per_km: closest_em,
            dropped: false,
        });
        Ok(())
    };

    // Builds the candidate set for `trip` at time `now`.
    let candidate_set = |trip_ix: usize, now: f64, roster: &Roster| -> Result<CandidateSet> {
        let t = &trips[trip_ix];
        let mut cands = Vec::new();
        for d in &roster.states {
            let delay_s = match d.status {
                DriverStatus::Idle => 0.0,
                DriverStatus::Busy { until_s, .. } => {
                    let remaining = until_s - now;
                    if remaining > cfg.availability_horizon_s {
                        continue;
                    }
                    remaining.max(0.0)
                }
            };
            let deadhead_km = road_distance_km(d.dispatch_origin(), t.pickup, cfg.detour_factor)?;
            cands.push(Candidate {
                driver_id: d.driver_id,
                deadhead_km,
                unit_emission_g_per_km: d.unit_emission_g_per_km,
                delay_s,
            });
        }
        Ok(CandidateSet {
            request_id: trip_ix as u64,
            candidates: cands,
        })
    };

    // Decide-and-serve for free policies; returns false if no candidates.
    let try_dispatch = |trip_ix: usize,
                        now: f64,
                        roster: &mut Roster,
                        events: &mut BinaryHeap<Event>,
                        seq: &mut u64,
                        outcomes: &mut Vec<Option<RideOutcome>>|
     -> Result<bool> {
        let cs = candidate_set(trip_ix, now, roster)?;
        if cs.candidates.is_empty() {
            return Ok(false);
        }
        let chosen = match cfg.policy {
            Policy::Nearest => nearest_assign(&cs)?,
            Policy::Tora { phi } => tora_assign(&cs, phi, cfg.e0_g_per_km)?,
            Policy::Replay | Policy::EraOffline => unreachable!("forced policies skip dispatch"),
        };
        let closest_id = nearest_assign(&cs)?;
        let closest = cs
            .candidates
            .iter()
            .find(|c| c.driver_id == closest_id)
            .expect("closest comes from this set");
        serve(
            trip_ix,
            chosen,
            now,
            chosen == closest_id,
            closest.deadhead_km,
            closest.unit_emission_g_per_km,
            roster,
            events,
            seq,
            outcomes,
        )?;
        Ok(true)
    };

    while let Some(ev) = events.pop() {
        last_event_s = ev.time_s;
        match ev.kind {
            EventKind::Arrival { trip } => {
                let now = ev.time_s;
                if let Some(forced_map) = &forced {
                    let driver_ix = forced_map[trip];
                    serve(
                        trip, driver_ix, now, true, 0.0, 0.0, &mut roster, &mut events, &mut seq,
                        &mut outcomes,
                    )?;
                } else if !try_dispatch(trip, now, &mut roster, &mut events, &mut seq, &mut outcomes)? {
                    queue.push_back(trip);
                }
            }
            EventKind::Release { driver } => {
                let now = ev.time_s;
                let d = &mut roster.states[driver as usize];
                if let DriverStatus::Busy { dropoff, .. } = d.status {
                    d.location = dropoff;
                }
                d.status = DriverStatus::Idle;
                // Retry the queue head-first; stop at the first request
                // that still has no eligible driver.
                while let Some(&trip_ix) = queue.front() {
                    let waited = now - trips[trip_ix].request_ts as f64;
                    if waited > cfg.max_queue_wait_s {
                        queue.pop_front();
                        outcomes[trip_ix] = Some(dropped_outcome(&trips[trip_ix], waited));
                        continue;
                    }
                    if try_dispatch(trip_ix, now, &mut roster, &mut events, &mut seq, &mut outcomes)? {
                        queue.pop_front();
                    } else {
                        break;
                    }
                }
            }
        }
    }

    // Anything still queued never saw an eligible driver; count it dropped.
    while let Some(trip_ix) = queue.pop_front() {
        let waited = (last_event_s - trips[trip_ix].request_ts as f64).max(0.0);
        outcomes[trip_ix] = Some(dropped_outcome(&trips[trip_ix], waited));
    }

    let outcomes: Vec<RideOutcome> = outcomes
        .into_iter()
        .map(|o| o.expect("every trip gets an outcome"))
        .collect();
    let served = outcomes.iter().filter(|o| !o.dropped).count();
    let dropped = outcomes.len() - served;

    let replay_wait_mae_s = if cfg.policy == Policy::Replay {
        let mut total = 0.0;
        let mut n = 0usize;
        for (t, o) in trips.iter().zip(&outcomes) {
            if let Some(reached) = t.reached_ts {
                total += (o.waiting_s - (reached - t.request_ts) as f64).abs();
                n += 1;
            }
        }
        (n > 0).then(|| total / n as f64)
    } else {
        None
    };

    Ok(SimResult {
        outcomes,
        served,
        dropped,
        drivers_placed: roster.states.len(),
        drivers_unplaced: roster.unplaced,
        synthesized_routes,
        replay_wait_mae_s,
    })
}

fn dropped_outcome(t: &crate::dataset::TripRecord, waited_s: f64) -> RideOutcome {
    RideOutcome {
        ride_id: t.ride_id.clone(),
        request_ts: t.request_ts,
        driver_id: String::new(),
        class: EmissionClass::Standard,
        deadhead_km: 0.0,
        deadhead_emission_g: 0.0,
        trip_emission_g: 0.0,
        trip_distance_km: 0.0,
        trip_duration_s: 0.0,
        unit_emission_g_per_km: 0.0,
        waiting_s: waited_s,
        chose_closest: false,
        closest_deadhead_km: 0.0,
        closest_unit_emission_g_per_km: 0.0,
        dropped: true,
    }
}

/// Runs the threshold policy once per value in `phis`, sharing the dataset
/// and route synthesis. Results are keyed by the given order; permuting the
/// list permutes the output identically.
pub fn sweep_phi(
    ds: &Dataset,
    cfg: &SimConfig,
    phis: &[f64],
    routes: Option<&BTreeMap<String, RouteTriple>>,
) -> Result<Vec<(f64, SimResult)>> {
    let mut out = Vec::with_capacity(phis.len());
    for &phi in phis {
        let mut c = cfg.clone();
        c.policy = Policy::Tora { phi };
        out.push((phi, run(ds, &c, routes)?));
    }
    Ok(out)
}
