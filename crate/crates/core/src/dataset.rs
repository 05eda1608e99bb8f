//! Trip datasets: validated ride records plus the fleet serving them,
//! synthetic dataset generation, and EV fleet conversion.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fleet::{
    classify_vehicle, emission_to_fuel_l_per_100km, ClassThresholds, EmissionClass, Powertrain,
    VehicleProfile,
};
use crate::geo::{offset_km, GeoPoint};
use crate::math;
use crate::{Error, Result};

/// One ride request, possibly with its recorded service times.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TripRecord {
    pub ride_id: String,
    /// Request time as unix seconds.
    pub request_ts: i64,
    pub pickup: GeoPoint,
    pub dropoff: GeoPoint,
    /// Driver who served the ride in the source data.
    pub driver_id: String,
    pub vehicle_make: String,
    pub vehicle_model: String,
    pub vehicle_year: u16,
    /// Recorded odometer distance, when the source provides one.
    pub trip_distance_km: Option<f64>,
    /// When the driver reached the rider, unix seconds.
    pub reached_ts: Option<i64>,
    /// When the ride completed, unix seconds.
    pub completed_ts: Option<i64>,
}

impl TripRecord {
    /// Field-level checks: ids present, coordinates valid, times ordered.
    pub fn validate(&self) -> Result<()> {
        if self.ride_id.is_empty() {
            return Err(Error::InvalidDataset("empty ride_id".to_string()));
        }
        self.pickup.validate()?;
        self.dropoff.validate()?;
        if self.driver_id.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "trip {} has an empty driver_id",
                self.ride_id
            )));
        }
        if let Some(d) = self.trip_distance_km {
            if !d.is_finite() || d < 0.0 {
                return Err(Error::OutOfRange {
                    name: "trip_distance_km",
                    value: d,
                });
            }
        }
        let reached = self.reached_ts.unwrap_or(self.request_ts);
        if reached < self.request_ts {
            return Err(Error::InvalidDataset(format!(
                "trip {}: reached_ts precedes request_ts",
                self.ride_id
            )));
        }
        if let Some(done) = self.completed_ts {
            if done < reached {
                return Err(Error::InvalidDataset(format!(
                    "trip {}: completed_ts precedes reached_ts",
                    self.ride_id
                )));
            }
        }
        Ok(())
    }
}

/// A validated set of trips together with the fleet that serves them.
///
/// Trips are kept sorted by `(request_ts, ride_id)` and every recorded
/// driver has a profile in the fleet; both are enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    trips: Vec<TripRecord>,
    fleet: BTreeMap<String, VehicleProfile>,
}

impl Dataset {
    /// Builds a dataset, sorting trips and checking every invariant.
    pub fn new(
        mut trips: Vec<TripRecord>,
        fleet: BTreeMap<String, VehicleProfile>,
    ) -> Result<Self> {
        for t in &trips {
            t.validate()?;
            if !fleet.contains_key(&t.driver_id) {
                return Err(Error::InvalidDataset(format!(
                    "trip {} references driver {} missing from the fleet",
                    t.ride_id, t.driver_id
                )));
            }
        }
        for (id, v) in &fleet {
            if id.is_empty() {
                return Err(Error::InvalidDataset("empty driver_id in fleet".to_string()));
            }
            v.validate()?;
        }
        let mut seen = BTreeSet::new();
        for t in &trips {
            if !seen.insert(t.ride_id.clone()) {
                return Err(Error::InvalidDataset(format!(
                    "duplicate ride_id {}",
                    t.ride_id
                )));
            }
        }
        trips.sort_by(|a, b| {
            (a.request_ts, a.ride_id.as_str()).cmp(&(b.request_ts, b.ride_id.as_str()))
        });
        Ok(Dataset { trips, fleet })
    }

    /// Trips in `(request_ts, ride_id)` order.
    pub fn trips(&self) -> &[TripRecord] {
        &self.trips
    }

    pub fn fleet(&self) -> &BTreeMap<String, VehicleProfile> {
        &self.fleet
    }

    /// First and last request timestamps, if any trips exist.
    pub fn time_window(&self) -> Option<(i64, i64)> {
        match (self.trips.first(), self.trips.last()) {
            (Some(a), Some(b)) => Some((a.request_ts, b.request_ts)),
            _ => None,
        }
    }

    /// Fraction of fleet vehicles classified as LEV; zero for an empty fleet.
    pub fn lev_share(&self, t: &ClassThresholds) -> f64 {
        if self.fleet.is_empty() {
            return 0.0;
        }
        let lev = self
            .fleet
            .values()
            .filter(|v| classify_vehicle(v, t) == EmissionClass::Lev)
            .count();
        lev as f64 / self.fleet.len() as f64
    }
}

/// Converts a seeded random sample of non-LEV vehicles to EVs.
///
/// Exactly `round(fraction * |non-LEV vehicles|)` vehicles flip; trips are
/// untouched. The sample is drawn with a splittable generator over the
/// sorted driver ids, so equal seeds give equal conversions on any platform.
pub fn inject_evs(
    ds: &Dataset,
    fraction: f64,
    seed: u64,
    thresholds: &ClassThresholds,
) -> Result<Dataset> {
    if !fraction.is_finite() || !(0.0..=1.0).contains(&fraction) {
        return Err(Error::OutOfRange {
            name: "ev_fraction",
            value: fraction,
        });
    }
    let mut non_lev: Vec<&String> = ds
        .fleet
        .iter()
        .filter(|(_, v)| classify_vehicle(v, thresholds) != EmissionClass::Lev)
        .map(|(id, _)| id)
        .collect();
    let k = math::round(fraction * non_lev.len() as f64) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Partial Fisher-Yates: after i swaps the first i entries are the sample.
    let n = non_lev.len();
    for i in 0..k.min(n) {
        let j = rng.random_range(i..n);
        non_lev.swap(i, j);
    }
    let chosen: BTreeSet<&String> = non_lev.iter().take(k).copied().collect();
    let fleet = ds
        .fleet
        .iter()
        .map(|(id, v)| {
            let v = if chosen.contains(id) { v.to_ev() } else { v.clone() };
            (id.clone(), v)
        })
        .collect();
    Dataset::new(ds.trips.clone(), fleet)
}

/// Knobs for [`gen_synthetic`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthConfig {
    pub drivers: usize,
    pub requests: usize,
    /// Side length of the square service area, km.
    pub extent_km: f64,
    /// Centre of the service area.
    pub anchor: GeoPoint,
    /// Mean request arrival rate; interarrivals are exponential.
    pub requests_per_hour: f64,
    /// Unix timestamp of the first arrival draw.
    pub start_ts: i64,
    /// Target share of LEV vehicles in the fleet.
    pub lev_fraction: f64,
    /// Unit-emission range for LEV vehicles, g/km; must sit below the
    /// default LEV threshold.
    pub lev_emission_range: (f64, f64),
    /// Unit-emission range for the rest of the fleet, g/km; must sit at or
    /// above the default LEV threshold.
    pub nonlev_emission_range: (f64, f64),
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            drivers: 50,
            requests: 500,
            extent_km: 20.0,
            anchor: GeoPoint {
                lat: 30.2672,
                lon: -97.7431,
            },
            requests_per_hour: 600.0,
            start_ts: 1_480_550_400,
            lev_fraction: 0.10,
            lev_emission_range: (95.0, 134.0),
            nonlev_emission_range: (150.0, 340.0),
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        let cfg_err = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.requests > 0 && self.drivers == 0 {
            return cfg_err("requests without drivers");
        }
        if !self.extent_km.is_finite() || self.extent_km <= 0.0 {
            return cfg_err("extent_km must be positive");
        }
        self.anchor.validate()?;
        if !self.requests_per_hour.is_finite() || self.requests_per_hour <= 0.0 {
            return cfg_err("requests_per_hour must be positive");
        }
        if !self.lev_fraction.is_finite() || !(0.0..=1.0).contains(&self.lev_fraction) {
            return cfg_err("lev_fraction must be in [0, 1]");
        }
        let (ll, lh) = self.lev_emission_range;
        let (nl, nh) = self.nonlev_emission_range;
        if !(ll.is_finite() && lh.is_finite() && 0.0 < ll && ll <= lh) {
            return cfg_err("lev_emission_range must be a positive, ordered interval");
        }
        if !(nl.is_finite() && nh.is_finite() && 0.0 < nl && nl <= nh) {
            return cfg_err("nonlev_emission_range must be a positive, ordered interval");
        }
        if lh >= crate::fleet::DEFAULT_LEV_THRESHOLD_G_PER_KM {
            return cfg_err("lev_emission_range crosses the LEV threshold");
        }
        if nl < crate::fleet::DEFAULT_LEV_THRESHOLD_G_PER_KM {
            return cfg_err("nonlev_emission_range crosses the LEV threshold");
        }
        Ok(())
    }
}

const SYNTH_MAKES: [&str; 4] = ["aster", "briar", "cobalt", "dune"];
const SYNTH_MODELS: [&str; 4] = ["s", "lx", "gt", "tour"];

/// Generates a synthetic dataset: a mixed-emission fleet and exponential
/// arrivals uniformly placed over a square service area.
///
/// Fully determined by `(cfg, seed)`. The fleet LEV count is
/// `round(lev_fraction * drivers)` under the default class thresholds.
pub fn gen_synthetic(cfg: &SynthConfig, seed: u64) -> Result<Dataset> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Fleet: decide which drivers get LEV vehicles, then draw profiles.
    let lev_count = math::round(cfg.lev_fraction * cfg.drivers as f64) as usize;
    let mut is_lev: Vec<bool> = (0..cfg.drivers).map(|i| i < lev_count).collect();
    for i in (1..is_lev.len()).rev() {
        let j = rng.random_range(0..=i);
        is_lev.swap(i, j);
    }
    let mut fleet = BTreeMap::new();
    for (i, lev) in is_lev.iter().enumerate() {
        let (lo, hi) = if *lev {
            cfg.lev_emission_range
        } else {
            cfg.nonlev_emission_range
        };
        let unit = if lo == hi { lo } else { rng.random_range(lo..hi) };
        let year = 2008 + rng.random_range(0..14) as u16;
        let make = SYNTH_MAKES[rng.random_range(0..SYNTH_MAKES.len())];
        let model = SYNTH_MODELS[rng.random_range(0..SYNTH_MODELS.len())];
        let profile = VehicleProfile {
            make: make.to_string(),
            model: model.to_string(),
            year,
            powertrain: Powertrain::Ice,
            unit_emission_g_per_km: unit,
            fuel_l_per_100km: Some(emission_to_fuel_l_per_100km(unit)),
            energy_eff_kwh_per_km: None,
        };
        fleet.insert(format!("d{i:05}"), profile);
    }

    // Trips: exponential interarrivals, uniform endpoints, random recorded driver.
    let mean_gap_s = 3600.0 / cfg.requests_per_hour;
    let half = cfg.extent_km / 2.0;
    let uniform_point = |rng: &mut ChaCha8Rng| -> Result<GeoPoint> {
        let east = rng.random_range(-half..half);
        let north = rng.random_range(-half..half);
        offset_km(cfg.anchor, east, north)
    };
    let mut t = cfg.start_ts as f64;
    let mut trips = Vec::with_capacity(cfg.requests);
    for i in 0..cfg.requests {
        let u: f64 = rng.random();
        t += -mean_gap_s * math::ln(1.0 - u);
        let pickup = uniform_point(&mut rng)?;
        let dropoff = uniform_point(&mut rng)?;
        let driver_ix = rng.random_range(0..cfg.drivers);
        let driver_id = format!("d{driver_ix:05}");
        let v = &fleet[&driver_id];
        trips.push(TripRecord {
            ride_id: format!("r{i:06}"),
            request_ts: math::round(t) as i64,
            pickup,
            dropoff,
            driver_id,
            vehicle_make: v.make.clone(),
            vehicle_model: v.model.clone(),
            vehicle_year: v.year,
            trip_distance_km: None,
            reached_ts: None,
            completed_ts: None,
        });
    }
    Dataset::new(trips, fleet)
}
