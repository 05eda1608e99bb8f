//! Per-trip route alternatives and their synthesis.
//!
//! Real routing engines return several routes per origin/destination pair;
//! here every trip carries a triple of options (shortest distance, fastest,
//! most fuel-efficient) with enforced dominance: the shortest option has the
//! least distance, the fastest the least duration, and the fuel-efficient
//! the least emission distance. Synthetic triples inflate a base route by
//! small random fractions bounded per trip-length category.

use alloc::format;
use alloc::string::String;

use rand::Rng;

use crate::fleet::VehicleProfile;
use crate::geo::KM_PER_MILE;
use crate::{Error, Result};

/// Trip length category, judged on the shortest route's distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TripCategory {
    /// Under one mile.
    Short,
    /// One to ten miles inclusive.
    Medium,
    /// Over ten miles.
    Long,
}

impl TripCategory {
    /// Categorizes by the shortest-route distance.
    pub fn from_shortest_km(distance_km: f64) -> Self {
        let miles = distance_km / KM_PER_MILE;
        if miles < 1.0 {
            TripCategory::Short
        } else if miles <= 10.0 {
            TripCategory::Medium
        } else {
            TripCategory::Long
        }
    }
}

/// One routable alternative for a trip.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RouteOption {
    pub distance_km: f64,
    pub duration_s: f64,
    /// Distance-equivalent emission cost: multiplying by a vehicle's unit
    /// emission yields grams for driving this route. Congestion and stops
    /// push it above the geometric distance; smooth roads below.
    pub emission_distance_km: f64,
}

impl RouteOption {
    /// Non-negative figures, with the emission distance within
    /// [0.8, 1.5] times the geometric distance.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidRoute(msg));
        if !self.distance_km.is_finite() || self.distance_km < 0.0 {
            return bad(format!("distance_km {}", self.distance_km));
        }
        if !self.duration_s.is_finite() || self.duration_s < 0.0 {
            return bad(format!("duration_s {}", self.duration_s));
        }
        if !self.emission_distance_km.is_finite()
            || self.emission_distance_km < 0.8 * self.distance_km
            || self.emission_distance_km > 1.5 * self.distance_km
        {
            return bad(format!(
                "emission_distance_km {} outside [0.8, 1.5] x distance {}",
                self.emission_distance_km, self.distance_km
            ));
        }
        Ok(())
    }
}

/// Which of the three route options a policy drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RoutePolicy {
    #[default]
    Shortest,
    Fastest,
    FuelEfficient,
}

/// The three route alternatives offered for one trip.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RouteTriple {
    pub shortest: RouteOption,
    pub fastest: RouteOption,
    pub fuel_efficient: RouteOption,
    pub category: TripCategory,
}

impl RouteTriple {
    /// Builds a triple, deriving the category and checking dominance.
    pub fn new(shortest: RouteOption, fastest: RouteOption, fuel_efficient: RouteOption) -> Result<Self> {
        let t = RouteTriple {
            category: TripCategory::from_shortest_km(shortest.distance_km),
            shortest,
            fastest,
            fuel_efficient,
        };
        t.validate()?;
        Ok(t)
    }

    /// Re-checks every option and the dominance invariants.
    pub fn validate(&self) -> Result<()> {
        self.shortest.validate()?;
        self.fastest.validate()?;
        self.fuel_efficient.validate()?;
        let bad = |msg: &str| Err(Error::InvalidRoute(String::from(msg)));
        if self.shortest.distance_km > self.fastest.distance_km
            || self.shortest.distance_km > self.fuel_efficient.distance_km
        {
            return bad("shortest option does not have the least distance");
        }
        if self.fastest.duration_s > self.shortest.duration_s
            || self.fastest.duration_s > self.fuel_efficient.duration_s
        {
            return bad("fastest option does not have the least duration");
        }
        if self.fuel_efficient.emission_distance_km > self.shortest.emission_distance_km
            || self.fuel_efficient.emission_distance_km > self.fastest.emission_distance_km
        {
            return bad("fuel-efficient option does not have the least emission distance");
        }
        if self.category != TripCategory::from_shortest_km(self.shortest.distance_km) {
            return bad("category does not match the shortest distance");
        }
        Ok(())
    }

    pub fn select(&self, policy: RoutePolicy) -> &RouteOption {
        match policy {
            RoutePolicy::Shortest => &self.shortest,
            RoutePolicy::Fastest => &self.fastest,
            RoutePolicy::FuelEfficient => &self.fuel_efficient,
        }
    }
}

/// Upper bounds on how much the synthesized alternatives may deviate from
/// the base route, as fractions. Closed bounds admit the cap itself; open
/// bounds stay strictly under it.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InflationCaps {
    /// Fastest route extra distance over shortest, closed.
    pub fastest_distance: f64,
    /// Fastest route extra emission distance over fuel-efficient, closed.
    pub fastest_emission: f64,
    /// Shortest route extra duration over fastest, closed.
    pub shortest_duration: f64,
    /// Shortest route extra emission distance over fuel-efficient, closed.
    pub shortest_emission: f64,
    /// Fuel-efficient route extra distance over shortest, open.
    pub efficient_distance: f64,
    /// Fuel-efficient route extra duration over fastest, open.
    pub efficient_duration: f64,
}

impl Default for InflationCaps {
    fn default() -> Self {
        InflationCaps {
            fastest_distance: 0.075,
            fastest_emission: 0.04,
            shortest_duration: 0.06,
            shortest_emission: 0.04,
            efficient_distance: 0.01,
            efficient_duration: 0.025,
        }
    }
}

impl InflationCaps {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("fastest_distance", self.fastest_distance),
            ("fastest_emission", self.fastest_emission),
            ("shortest_duration", self.shortest_duration),
            ("shortest_emission", self.shortest_emission),
            ("efficient_distance", self.efficient_distance),
            ("efficient_duration", self.efficient_duration),
        ] {
            if !v.is_finite() || v <= 0.0 || v > 1.0 {
                return Err(Error::InvalidConfig(format!(
                    "inflation cap {name} must be in (0, 1], got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Synthesis knobs: per-category caps plus the emission-distance factor
/// applied to the base route.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RouteSynthConfig {
    pub short: InflationCaps,
    pub medium: InflationCaps,
    pub long: InflationCaps,
    /// Base emission distance is the base distance times a draw from this
    /// range; must stay within the [0.8, 1.5] validity band.
    pub emission_factor_range: (f64, f64),
}

impl Default for RouteSynthConfig {
    fn default() -> Self {
        RouteSynthConfig {
            short: InflationCaps::default(),
            medium: InflationCaps::default(),
            long: InflationCaps::default(),
            emission_factor_range: (0.9, 1.2),
        }
    }
}

impl RouteSynthConfig {
    pub fn validate(&self) -> Result<()> {
        self.short.validate()?;
        self.medium.validate()?;
        self.long.validate()?;
        let (lo, hi) = self.emission_factor_range;
        // Keep a margin so inflated options stay inside the validity band.
        if !(lo.is_finite() && hi.is_finite() && 0.8 <= lo && lo <= hi && hi <= 1.4) {
            return Err(Error::InvalidConfig(format!(
                "emission_factor_range ({lo}, {hi}) must satisfy 0.8 <= lo <= hi <= 1.4"
            )));
        }
        Ok(())
    }

    pub fn caps_for(&self, category: TripCategory) -> &InflationCaps {
        match category {
            TripCategory::Short => &self.short,
            TripCategory::Medium => &self.medium,
            TripCategory::Long => &self.long,
        }
    }
}

/// Draw in (0, cap]: the cap is attainable, zero is not.
fn frac_closed<R: Rng + ?Sized>(rng: &mut R, cap: f64) -> f64 {
    cap * (1.0 - rng.random::<f64>())
}

/// Draw in (0, cap): both endpoints excluded.
fn frac_open<R: Rng + ?Sized>(rng: &mut R, cap: f64) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return cap * u;
        }
    }
}

/// Synthesizes a route triple with the default caps; see
/// [`synth_route_triple_with`].
pub fn synth_route_triple<R: Rng + ?Sized>(
    base_distance_km: f64,
    base_speed_kmh: f64,
    rng: &mut R,
) -> Result<RouteTriple> {
    synth_route_triple_with(&RouteSynthConfig::default(), base_distance_km, base_speed_kmh, rng)
}

/// Synthesizes a route triple around a base route.
///
/// The shortest option takes the base distance; the fastest takes the base
/// duration (base distance at base speed); the fuel-efficient takes the
/// base emission distance. Every other figure is inflated by a draw bounded
/// by the caps for the trip's category, so the dominance invariants hold by
/// construction. Draw order is fixed, making output a pure function of
/// `(config, base, speed, rng state)`.
pub fn synth_route_triple_with<R: Rng + ?Sized>(
    cfg: &RouteSynthConfig,
    base_distance_km: f64,
    base_speed_kmh: f64,
    rng: &mut R,
) -> Result<RouteTriple> {
    cfg.validate()?;
    if !base_distance_km.is_finite() || base_distance_km <= 0.0 {
        return Err(Error::OutOfRange {
            name: "base_distance_km",
            value: base_distance_km,
        });
    }
    if !base_speed_kmh.is_finite() || base_speed_kmh <= 0.0 {
        return Err(Error::OutOfRange {
            name: "base_speed_kmh",
            value: base_speed_kmh,
        });
    }
    let caps = cfg.caps_for(TripCategory::from_shortest_km(base_distance_km));
    let base_duration_s = base_distance_km / base_speed_kmh * 3600.0;

    let fast_dist = frac_closed(rng, caps.fastest_distance);
    let fast_em = frac_closed(rng, caps.fastest_emission);
    let short_dur = frac_closed(rng, caps.shortest_duration);
    let short_em = frac_closed(rng, caps.shortest_emission);
    let eff_dist = frac_open(rng, caps.efficient_distance);
    let eff_dur = frac_open(rng, caps.efficient_duration);
    let (lo, hi) = cfg.emission_factor_range;
    let factor = if lo == hi { lo } else { rng.random_range(lo..hi) };
    let base_emission_km = base_distance_km * factor;

    let shortest = RouteOption {
        distance_km: base_distance_km,
        duration_s: base_duration_s * (1.0 + short_dur),
        emission_distance_km: base_emission_km * (1.0 + short_em),
    };
    let fastest = RouteOption {
        distance_km: base_distance_km * (1.0 + fast_dist),
        duration_s: base_duration_s,
        emission_distance_km: base_emission_km * (1.0 + fast_em),
    };
    let fuel_efficient = RouteOption {
        distance_km: base_distance_km * (1.0 + eff_dist),
        duration_s: base_duration_s * (1.0 + eff_dur),
        emission_distance_km: base_emission_km,
    };
    RouteTriple::new(shortest, fastest, fuel_efficient)
}

/// Checks a triple against inflation caps (used to audit synthesized data;
/// loaded real-world triples need not satisfy caps, only
/// [`RouteTriple::validate`]).
pub fn check_inflation_caps(t: &RouteTriple, caps: &InflationCaps) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidRoute(msg));
    let s = &t.shortest;
    let f = &t.fastest;
    let e = &t.fuel_efficient;
    if f.distance_km > s.distance_km * (1.0 + caps.fastest_distance) {
        return bad(format!(
            "fastest distance {} exceeds cap over shortest {}",
            f.distance_km, s.distance_km
        ));
    }
    if f.emission_distance_km > e.emission_distance_km * (1.0 + caps.fastest_emission) {
        return bad(format!(
            "fastest emission distance {} exceeds cap over fuel-efficient {}",
            f.emission_distance_km, e.emission_distance_km
        ));
    }
    if s.duration_s > f.duration_s * (1.0 + caps.shortest_duration) {
        return bad(format!(
            "shortest duration {} exceeds cap over fastest {}",
            s.duration_s, f.duration_s
        ));
    }
    if s.emission_distance_km > e.emission_distance_km * (1.0 + caps.shortest_emission) {
        return bad(format!(
            "shortest emission distance {} exceeds cap over fuel-efficient {}",
            s.emission_distance_km, e.emission_distance_km
        ));
    }
    if e.distance_km >= s.distance_km * (1.0 + caps.efficient_distance) {
        return bad(format!(
            "fuel-efficient distance {} not strictly under cap over shortest {}",
            e.distance_km, s.distance_km
        ));
    }
    if e.duration_s >= f.duration_s * (1.0 + caps.efficient_duration) {
        return bad(format!(
            "fuel-efficient duration {} not strictly under cap over fastest {}",
            e.duration_s, f.duration_s
        ));
    }
    Ok(())
}

/// Grams emitted by a vehicle driving a route option.
pub fn trip_emissions_g(v: &VehicleProfile, r: &RouteOption) -> f64 {
    v.unit_emission_g_per_km * r.emission_distance_km
}
