//! Driver-to-ride assignment.
//!
//! Two families live here. The online rules ([`tora_assign`],
//! [`nearest_assign`], [`replay_assign`]) decide one ride at a time from a
//! snapshot of candidate drivers. The offline search ([`era_assign`]) sees a
//! whole request sequence up front and walks a frontier of partial
//! assignments ranked by exact prefix deadhead emissions plus an admissible
//! lower bound on the remainder; [`brute_force_optimal`] and
//! [`nearest_sequence`] provide reference points for it.
//!
//! The objective throughout is total grams emitted: for every ride, trip
//! emissions plus deadhead emissions of the driver sent to it.

use alloc::vec;
use alloc::vec::Vec;

use crate::geo::{road_distance_km, GeoPoint};
use crate::{Error, Result};

/// Hard ceiling on assignments enumerated by [`brute_force_optimal`].
pub const BRUTE_FORCE_GUARD: f64 = 1e7;

/// One driver considered for one ride.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    /// Dense driver index; ties in the rules break toward lower ids.
    pub driver_id: u32,
    /// Road distance from the driver's dispatch origin to the pickup.
    pub deadhead_km: f64,
    pub unit_emission_g_per_km: f64,
    /// Seconds until the driver finishes their current job; zero if idle.
    pub delay_s: f64,
}

impl Candidate {
    /// Grams the driver would emit covering the deadhead leg.
    pub fn deadhead_emission_g(&self) -> f64 {
        self.unit_emission_g_per_km * self.deadhead_km
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("deadhead_km", self.deadhead_km),
            ("unit_emission_g_per_km", self.unit_emission_g_per_km),
            ("delay_s", self.delay_s),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        Ok(())
    }
}

/// The candidates available for one ride request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateSet {
    pub request_id: u64,
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    /// Field checks plus driver-id uniqueness.
    pub fn validate(&self) -> Result<()> {
        for c in &self.candidates {
            c.validate()?;
        }
        let mut ids: Vec<u32> = self.candidates.iter().map(|c| c.driver_id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig(alloc::format!(
                "duplicate driver ids in candidate set {}",
                self.request_id
            )));
        }
        Ok(())
    }
}

/// Closest candidate; ties break toward lower unit emission, then lower id.
fn closest(cands: &[Candidate]) -> Option<&Candidate> {
    cands.iter().min_by(|a, b| {
        a.deadhead_km
            .total_cmp(&b.deadhead_km)
            .then(a.unit_emission_g_per_km.total_cmp(&b.unit_emission_g_per_km))
            .then(a.driver_id.cmp(&b.driver_id))
    })
}

fn e2d_value(m: &Candidate, c: &Candidate) -> f64 {
    (c.deadhead_emission_g() - m.deadhead_emission_g()) / (m.deadhead_km - c.deadhead_km)
}

/// Emission-to-distance trade-off of replacing closest candidate `c` with a
/// strictly farther candidate `m`: deadhead grams saved per extra deadhead
/// kilometre driven. Positive when `m` pollutes less overall; errors unless
/// `m` is strictly farther than `c`.
pub fn e2d(m: &Candidate, c: &Candidate) -> Result<f64> {
    if m.deadhead_km <= c.deadhead_km {
        return Err(Error::RatioUndefined {
            candidate_km: m.deadhead_km,
            closest_km: c.deadhead_km,
        });
    }
    Ok(e2d_value(m, c))
}

/// Threshold-based online rule.
///
/// Picks the closest candidate `c`, then looks for the strictly farther
/// candidate `m` with the best emission-to-distance trade-off (ties toward
/// smaller deadhead, then lower id). `m` replaces `c` exactly when
/// `phi * e0 < e2d(m, c)`, so `phi` prices how many grams per extra
/// kilometre a detour must save: small values trade distance for emissions
/// aggressively, large values collapse to nearest-driver dispatch. A
/// replacement always has strictly lower deadhead emissions than `c`.
pub fn tora_assign(cs: &CandidateSet, phi: f64, e0: f64) -> Result<u32> {
    if !phi.is_finite() || phi < 0.0 {
        return Err(Error::OutOfRange {
            name: "phi",
            value: phi,
        });
    }
    if !e0.is_finite() || e0 <= 0.0 {
        return Err(Error::OutOfRange {
            name: "e0",
            value: e0,
        });
    }
    let c = closest(&cs.candidates).ok_or(Error::NoCandidates)?;
    let mut best: Option<(&Candidate, f64)> = None;
    for m in &cs.candidates {
        if m.deadhead_km <= c.deadhead_km {
            continue;
        }
        let score = e2d_value(m, c);
        let better = match best {
            None => true,
            Some((bm, bs)) => {
                score > bs
                    || (score == bs
                        && (m.deadhead_km < bm.deadhead_km
                            || (m.deadhead_km == bm.deadhead_km && m.driver_id < bm.driver_id)))
            }
        };
        if better {
            best = Some((m, score));
        }
    }
    match best {
        Some((m, score)) if phi * e0 < score => Ok(m.driver_id),
        _ => Ok(c.driver_id),
    }
}

/// Nearest-driver dispatch: the closest candidate wins outright.
pub fn nearest_assign(cs: &CandidateSet) -> Result<u32> {
    closest(&cs.candidates)
        .map(|c| c.driver_id)
        .ok_or(Error::NoCandidates)
}

/// Replays the recorded assignment: returns the driver on the trip record.
pub fn replay_assign(trip: &crate::dataset::TripRecord) -> Result<&str> {
    if trip.driver_id.is_empty() {
        return Err(Error::MissingDriver {
            ride_id: trip.ride_id.clone(),
        });
    }
    Ok(&trip.driver_id)
}

/// One ride's share of an [`AssignmentPlan`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RideAssignment {
    pub request_id: u64,
    pub driver_id: u32,
    pub deadhead_km: f64,
    pub deadhead_emission_g: f64,
    pub trip_emission_g: f64,
    pub waiting_s: f64,
}

/// A driver for every request, with per-ride cost bookkeeping.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssignmentPlan {
    /// In request order.
    pub rides: Vec<RideAssignment>,
}

impl AssignmentPlan {
    /// Total grams: per-ride deadhead plus trip emissions, summed in
    /// request order. Keep the accumulation order in sync with the offline
    /// searches, which compare objectives bit-for-bit.
    pub fn objective_g(&self) -> f64 {
        let mut total = 0.0;
        for r in &self.rides {
            total += r.deadhead_emission_g;
            total += r.trip_emission_g;
        }
        total
    }

    pub fn driver_for(&self, request_id: u64) -> Option<u32> {
        self.rides
            .iter()
            .find(|r| r.request_id == request_id)
            .map(|r| r.driver_id)
    }
}

/// Checked objective: errors unless the plan covers requests `0..expected`
/// exactly once each, in order.
pub fn erap_objective(plan: &AssignmentPlan, expected_requests: usize) -> Result<f64> {
    if plan.rides.len() != expected_requests
        || plan
            .rides
            .iter()
            .enumerate()
            .any(|(i, r)| r.request_id != i as u64)
    {
        return Err(Error::IncompletePlan {
            assigned: plan.rides.len(),
            expected: expected_requests,
        });
    }
    Ok(plan.objective_g())
}

/// A request as the offline searches see it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfflineRequest {
    pub pickup: GeoPoint,
    pub dropoff: GeoPoint,
    /// Distance-equivalent emission cost of the trip itself; multiplied by
    /// the serving driver's unit emission.
    pub trip_emission_km: f64,
}

/// A driver as the offline searches see it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfflineDriver {
    pub start: GeoPoint,
    pub unit_emission_g_per_km: f64,
}

/// A full offline problem: ordered requests, a fleet, and a road-distance
/// detour factor. Validated on construction so the searches can assume
/// well-formed data.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineInstance {
    requests: Vec<OfflineRequest>,
    drivers: Vec<OfflineDriver>,
    detour_factor: f64,
}

impl OfflineInstance {
    pub fn new(
        requests: Vec<OfflineRequest>,
        drivers: Vec<OfflineDriver>,
        detour_factor: f64,
    ) -> Result<Self> {
        if !detour_factor.is_finite() || detour_factor < 1.0 {
            return Err(Error::InvalidDetourFactor(detour_factor));
        }
        if drivers.is_empty() && !requests.is_empty() {
            return Err(Error::NoCandidates);
        }
        for r in &requests {
            r.pickup.validate()?;
            r.dropoff.validate()?;
            if !r.trip_emission_km.is_finite() || r.trip_emission_km < 0.0 {
                return Err(Error::OutOfRange {
                    name: "trip_emission_km",
                    value: r.trip_emission_km,
                });
            }
        }
        for d in &drivers {
            d.start.validate()?;
            if !d.unit_emission_g_per_km.is_finite() || d.unit_emission_g_per_km < 0.0 {
                return Err(Error::OutOfRange {
                    name: "unit_emission_g_per_km",
                    value: d.unit_emission_g_per_km,
                });
            }
        }
        Ok(OfflineInstance {
            requests,
            drivers,
            detour_factor,
        })
    }

    pub fn requests(&self) -> &[OfflineRequest] {
        &self.requests
    }

    pub fn drivers(&self) -> &[OfflineDriver] {
        &self.drivers
    }

    pub fn detour_factor(&self) -> f64 {
        self.detour_factor
    }

    fn dist(&self, a: GeoPoint, b: GeoPoint) -> f64 {
        road_distance_km(a, b, self.detour_factor).expect("validated at construction")
    }

    /// Deadhead lower bound for request `n`: the cheapest way any driver
    /// could possibly reach its pickup, from any initial position or any
    /// earlier dropoff, priced at the cleanest unit emission in the fleet.
    fn request_lower_bound_g(&self, n: usize) -> f64 {
        let e_min = self
            .drivers
            .iter()
            .map(|d| d.unit_emission_g_per_km)
            .fold(f64::INFINITY, f64::min);
        let pickup = self.requests[n].pickup;
        let mut best = f64::INFINITY;
        for d in &self.drivers {
            best = best.min(self.dist(d.start, pickup));
        }
        for r in &self.requests[..n] {
            best = best.min(self.dist(r.dropoff, pickup));
        }
        if best.is_finite() {
            best * e_min
        } else {
            0.0
        }
    }
}

/// A prefix of requests already assigned to drivers, with running cost.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialAssignment {
    assigned: Vec<u32>,
    /// Current dispatch origin per driver.
    positions: Vec<GeoPoint>,
    prefix_deadhead_g: f64,
    prefix_trip_g: f64,
}

impl PartialAssignment {
    /// The empty prefix: all drivers at their starts, nothing assigned.
    pub fn root(inst: &OfflineInstance) -> Self {
        PartialAssignment {
            assigned: Vec::new(),
            positions: inst.drivers.iter().map(|d| d.start).collect(),
            prefix_deadhead_g: 0.0,
            prefix_trip_g: 0.0,
        }
    }

    /// Replays a driver sequence for requests `0..drivers.len()`.
    pub fn from_prefix(inst: &OfflineInstance, drivers: &[u32]) -> Result<Self> {
        if drivers.len() > inst.requests.len() {
            return Err(Error::IncompletePlan {
                assigned: drivers.len(),
                expected: inst.requests.len(),
            });
        }
        let mut pa = PartialAssignment::root(inst);
        for &m in drivers {
            pa = pa.child(inst, m)?;
        }
        Ok(pa)
    }

    /// Extends the prefix by assigning the next request to `driver`.
    pub fn child(&self, inst: &OfflineInstance, driver: u32) -> Result<Self> {
        let n = self.assigned.len();
        if n >= inst.requests.len() {
            return Err(Error::IncompletePlan {
                assigned: n + 1,
                expected: inst.requests.len(),
            });
        }
        let m = driver as usize;
        if m >= inst.drivers.len() {
            return Err(Error::NoCandidates);
        }
        let req = &inst.requests[n];
        let em = inst.drivers[m].unit_emission_g_per_km;
        let deadhead_g = inst.dist(self.positions[m], req.pickup) * em;
        let mut next = self.clone();
        next.assigned.push(driver);
        next.positions[m] = req.dropoff;
        next.prefix_deadhead_g += deadhead_g;
        next.prefix_trip_g += req.trip_emission_km * em;
        Ok(next)
    }

    pub fn assigned(&self) -> &[u32] {
        &self.assigned
    }

    pub fn depth(&self) -> usize {
        self.assigned.len()
    }

    /// Exact deadhead grams spent on the assigned prefix.
    pub fn prefix_deadhead_g(&self) -> f64 {
        self.prefix_deadhead_g
    }

    /// Exact trip grams incurred by the assigned prefix.
    pub fn prefix_trip_g(&self) -> f64 {
        self.prefix_trip_g
    }
}

/// Optimistic estimate of total deadhead emissions for any completion of a
/// partial assignment: exact prefix deadhead grams plus, for every
/// unassigned request, the cheapest conceivable approach priced at the
/// fleet's cleanest rate. Never exceeds the full objective of any
/// completion, because trip emissions and real approach legs only add cost.
pub fn emission_h(inst: &OfflineInstance, partial: &PartialAssignment) -> f64 {
    let mut h = partial.prefix_deadhead_g;
    for n in partial.depth()..inst.requests.len() {
        h += inst.request_lower_bound_g(n);
    }
    h
}

/// Outcome of [`era_assign`].
#[derive(Debug, Clone, PartialEq)]
pub struct EraOutcome {
    pub plan: AssignmentPlan,
    /// True when the frontier cap forced pruning beyond heuristic ties;
    /// results may then be further from optimal than usual.
    pub frontier_capped: bool,
}

/// Knobs for [`era_assign`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EraConfig {
    /// Children whose heuristic value is within this relative distance of
    /// the best child survive to the next round.
    pub epsilon_rel: f64,
    /// Maximum frontier size; the worst heuristic values are pruned first.
    pub frontier_cap: usize,
}

impl Default for EraConfig {
    fn default() -> Self {
        EraConfig {
            epsilon_rel: 1e-9,
            frontier_cap: 10_000,
        }
    }
}

impl EraConfig {
    fn validate(&self) -> Result<()> {
        if !self.epsilon_rel.is_finite() || self.epsilon_rel < 0.0 {
            return Err(Error::InvalidConfig(alloc::format!(
                "epsilon_rel must be finite and non-negative, got {}",
                self.epsilon_rel
            )));
        }
        if self.frontier_cap == 0 {
            return Err(Error::InvalidConfig(
                alloc::string::String::from("frontier_cap must be at least 1"),
            ));
        }
        Ok(())
    }
}

/// Builds the plan for a complete driver sequence, recomputing every leg.
///
/// All offline searches report through this one function so their
/// objectives share an identical accumulation order and compare exactly.
fn build_plan(inst: &OfflineInstance, assigned: &[u32]) -> AssignmentPlan {
    let mut positions: Vec<GeoPoint> = inst.drivers.iter().map(|d| d.start).collect();
    let mut rides = Vec::with_capacity(assigned.len());
    for (n, &m) in assigned.iter().enumerate() {
        let req = &inst.requests[n];
        let em = inst.drivers[m as usize].unit_emission_g_per_km;
        let deadhead_km = inst.dist(positions[m as usize], req.pickup);
        rides.push(RideAssignment {
            request_id: n as u64,
            driver_id: m,
            deadhead_km,
            deadhead_emission_g: deadhead_km * em,
            trip_emission_g: req.trip_emission_km * em,
            waiting_s: 0.0,
        });
        positions[m as usize] = req.dropoff;
    }
    AssignmentPlan { rides }
}

fn era_search(
    inst: &OfflineInstance,
    cfg: &EraConfig,
    mut trace: Option<&mut Vec<PartialAssignment>>,
) -> Result<EraOutcome> {
    cfg.validate()?;
    let n_req = inst.requests.len();
    let n_drv = inst.drivers.len();

    // The per-request lower bounds do not depend on the prefix, so the tail
    // sums can be shared by every node at the same depth.
    let lb: Vec<f64> = (0..n_req).map(|n| inst.request_lower_bound_g(n)).collect();
    let mut lb_tail = vec![0.0; n_req + 1];
    for n in (0..n_req).rev() {
        lb_tail[n] = lb[n] + lb_tail[n + 1];
    }

    let mut frontier = vec![PartialAssignment::root(inst)];
    if let Some(t) = &mut trace {
        t.push(frontier[0].clone());
    }
    let mut capped = false;

    for n in 0..n_req {
        let req = &inst.requests[n];
        // Score all children lazily; only survivors get materialized.
        // Generation order (parent first, driver second) is lexicographic
        // over the resulting driver sequences, which the stable sort below
        // preserves among equal scores.
        let mut scored: Vec<(usize, u32, f64)> = Vec::with_capacity(frontier.len() * n_drv);
        for (pi, parent) in frontier.iter().enumerate() {
            for m in 0..n_drv {
                let em = inst.drivers[m].unit_emission_g_per_km;
                let step_g = inst.dist(parent.positions[m], req.pickup) * em;
                let h = parent.prefix_deadhead_g + step_g + lb_tail[n + 1];
                scored.push((pi, m as u32, h));
            }
        }
        let h_min = scored
            .iter()
            .map(|&(_, _, h)| h)
            .fold(f64::INFINITY, f64::min);
        let keep_bound = h_min * (1.0 + cfg.epsilon_rel);
        scored.retain(|&(_, _, h)| h <= keep_bound);
        if scored.len() > cfg.frontier_cap {
            capped = true;
            scored.sort_by(|a, b| a.2.total_cmp(&b.2));
            scored.truncate(cfg.frontier_cap);
        }
        let mut next = Vec::with_capacity(scored.len());
        for (pi, m, _) in scored {
            next.push(frontier[pi].child(inst, m)?);
        }
        frontier = next;
        if let Some(t) = &mut trace {
            t.extend(frontier.iter().cloned());
        }
    }

    // Tie-break the surviving completions on the exact objective, treating
    // values within epsilon as equal and preferring the lexicographically
    // smallest driver sequence among them.
    let objectives: Vec<f64> = frontier
        .iter()
        .map(|node| build_plan(inst, &node.assigned).objective_g())
        .collect();
    let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let tie_bound = if best.is_finite() {
        best * (1.0 + cfg.epsilon_rel)
    } else {
        best
    };
    let winner = frontier
        .iter()
        .zip(&objectives)
        .filter(|&(_, &obj)| obj <= tie_bound)
        .map(|(node, _)| node)
        .min_by(|a, b| a.assigned.cmp(&b.assigned))
        .expect("frontier is never empty");

    Ok(EraOutcome {
        plan: build_plan(inst, &winner.assigned),
        frontier_capped: capped,
    })
}

/// Offline frontier search.
///
/// Processes requests in order; at each one, expands every frontier node
/// with every driver and keeps the children whose [`emission_h`] value ties
/// the best within `epsilon_rel`. The final winner is the completion with
/// the least exact objective, ties going to the lexicographically smallest
/// driver sequence. With an admissible heuristic and ties kept, this
/// recovers the optimum on instances whose trip emissions do not steer the
/// choice; in general it is a strong upper bound computed in polynomial
/// time per request.
pub fn era_assign(inst: &OfflineInstance, cfg: &EraConfig) -> Result<EraOutcome> {
    era_search(inst, cfg, None)
}

/// [`era_assign`] plus every frontier node it kept, root included, for
/// auditing the heuristic against completions.
pub fn era_assign_traced(
    inst: &OfflineInstance,
    cfg: &EraConfig,
) -> Result<(EraOutcome, Vec<PartialAssignment>)> {
    let mut trace = Vec::new();
    let outcome = era_search(inst, cfg, Some(&mut trace))?;
    Ok((outcome, trace))
}

/// Exhaustive minimum over all driver sequences.
///
/// Depth-first in lexicographic order with strict improvement, so the
/// reported plan is the lexicographically smallest optimum. Refuses
/// instances with more than [`BRUTE_FORCE_GUARD`] assignments.
pub fn brute_force_optimal(inst: &OfflineInstance) -> Result<AssignmentPlan> {
    let n_req = inst.requests.len();
    let n_drv = inst.drivers.len();
    let combinations = if n_req == 0 {
        1.0
    } else {
        crate::math::powi(n_drv as f64, n_req as i32)
    };
    if combinations > BRUTE_FORCE_GUARD {
        return Err(Error::InstanceTooLarge {
            combinations,
            limit: BRUTE_FORCE_GUARD,
        });
    }

    struct Dfs<'a> {
        inst: &'a OfflineInstance,
        assigned: Vec<u32>,
        positions: Vec<GeoPoint>,
        best_obj: f64,
        best_assigned: Vec<u32>,
    }

    impl Dfs<'_> {
        fn go(&mut self, n: usize, obj: f64) {
            if n == self.inst.requests.len() {
                // Strict improvement keeps the first (lexicographically
                // smallest) optimum found.
                if obj < self.best_obj {
                    self.best_obj = obj;
                    self.best_assigned = self.assigned.clone();
                }
                return;
            }
            let req = self.inst.requests[n];
            for m in 0..self.inst.drivers.len() {
                let em = self.inst.drivers[m].unit_emission_g_per_km;
                // Accumulate in the same order as AssignmentPlan::objective_g
                // so leaf objectives compare exactly with reported plans.
                let mut next = obj;
                next += self.inst.dist(self.positions[m], req.pickup) * em;
                next += req.trip_emission_km * em;
                let prev = self.positions[m];
                self.positions[m] = req.dropoff;
                self.assigned.push(m as u32);
                self.go(n + 1, next);
                self.assigned.pop();
                self.positions[m] = prev;
            }
        }
    }

    let mut dfs = Dfs {
        inst,
        assigned: Vec::with_capacity(n_req),
        positions: inst.drivers.iter().map(|d| d.start).collect(),
        best_obj: f64::INFINITY,
        best_assigned: Vec::new(),
    };
    if n_req == 0 {
        return Ok(AssignmentPlan::default());
    }
    dfs.go(0, 0.0);
    Ok(build_plan(inst, &dfs.best_assigned))
}

/// Greedy nearest-driver baseline over a whole request sequence: each
/// request goes to the driver currently closest to its pickup (ties toward
/// lower unit emission, then lower index).
pub fn nearest_sequence(inst: &OfflineInstance) -> Result<AssignmentPlan> {
    let n_req = inst.requests.len();
    if n_req == 0 {
        return Ok(AssignmentPlan::default());
    }
    let mut positions: Vec<GeoPoint> = inst.drivers.iter().map(|d| d.start).collect();
    let mut assigned = Vec::with_capacity(n_req);
    for req in &inst.requests {
        let m = (0..inst.drivers.len())
            .min_by(|&a, &b| {
                let da = inst.dist(positions[a], req.pickup);
                let db = inst.dist(positions[b], req.pickup);
                da.total_cmp(&db)
                    .then(
                        inst.drivers[a]
                            .unit_emission_g_per_km
                            .total_cmp(&inst.drivers[b].unit_emission_g_per_km),
                    )
                    .then(a.cmp(&b))
            })
            .ok_or(Error::NoCandidates)?;
        positions[m] = req.dropoff;
        assigned.push(m as u32);
    }
    Ok(build_plan(inst, &assigned))
}
