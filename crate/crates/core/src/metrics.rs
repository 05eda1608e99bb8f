//! Aggregate emission, waiting-time and per-class equity metrics over
//! simulation results.

use crate::fleet::EmissionClass;
use crate::sim::{RideOutcome, SimResult};
use crate::{Error, Result};

/// Run-level totals. Waiting statistics cover served rides only.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub served: usize,
    pub dropped: usize,
    pub deadhead_km: f64,
    pub deadhead_g: f64,
    pub trip_g: f64,
    pub total_g: f64,
    pub mean_wait_s: f64,
    pub max_wait_s: f64,
}

/// Totals and waiting statistics for a run.
pub fn summarize(r: &SimResult) -> Summary {
    let mut s = Summary {
        served: r.served,
        dropped: r.dropped,
        deadhead_km: 0.0,
        deadhead_g: 0.0,
        trip_g: 0.0,
        total_g: 0.0,
        mean_wait_s: 0.0,
        max_wait_s: 0.0,
    };
    let mut wait_total = 0.0;
    for o in r.served_outcomes() {
        s.deadhead_km += o.deadhead_km;
        s.deadhead_g += o.deadhead_emission_g;
        s.trip_g += o.trip_emission_g;
        wait_total += o.waiting_s;
        s.max_wait_s = s.max_wait_s.max(o.waiting_s);
    }
    s.total_g = s.deadhead_g + s.trip_g;
    if s.served > 0 {
        s.mean_wait_s = wait_total / s.served as f64;
    }
    s
}

/// Relative changes of a candidate run against a baseline run.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Deltas {
    /// Percent of baseline deadhead grams saved; positive is better.
    pub deadhead_reduction_pct: f64,
    /// Percent of baseline total grams saved; positive is better.
    pub total_reduction_pct: f64,
    /// Percent change in mean waiting; positive means waiting longer.
    pub waiting_change_pct: f64,
}

/// Compares a candidate against a baseline; errors when a baseline figure
/// is zero and the relative change would be undefined.
pub fn compare(candidate: &Summary, baseline: &Summary) -> Result<Deltas> {
    if baseline.deadhead_g <= 0.0 {
        return Err(Error::ZeroBaseline("deadhead_g"));
    }
    if baseline.total_g <= 0.0 {
        return Err(Error::ZeroBaseline("total_g"));
    }
    if baseline.mean_wait_s <= 0.0 {
        return Err(Error::ZeroBaseline("mean_wait_s"));
    }
    Ok(Deltas {
        deadhead_reduction_pct: (1.0 - candidate.deadhead_g / baseline.deadhead_g) * 100.0,
        total_reduction_pct: (1.0 - candidate.total_g / baseline.total_g) * 100.0,
        waiting_change_pct: (candidate.mean_wait_s / baseline.mean_wait_s - 1.0) * 100.0,
    })
}

/// How deadhead-to-trip ratios are aggregated per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum RatioMethod {
    /// Mean over per-ride deadhead/trip ratios.
    #[default]
    MeanOfRatios,
    /// Total deadhead distance over total trip distance.
    RatioOfSums,
}

/// Per-class slice of an [`EquityReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassEquity {
    /// Served rides taken by this class.
    pub rides: usize,
    /// Share of all served rides; the three classes sum to one.
    pub ride_fraction: f64,
    /// Deadhead-to-trip distance ratio under the chosen method; zero when
    /// no ride qualifies.
    pub deadhead_to_trip: f64,
    /// Rides with zero trip distance: counted in `rides` and the fraction
    /// but excluded from the ratio.
    pub zero_trip_excluded: usize,
}

/// How the work and its deadhead burden split across emission classes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquityReport {
    pub lev: ClassEquity,
    pub hev: ClassEquity,
    pub standard: ClassEquity,
    pub method: RatioMethod,
}

fn class_slice<'a>(
    outcomes: impl Iterator<Item = &'a RideOutcome>,
    served_total: usize,
    method: RatioMethod,
) -> ClassEquity {
    let mut rides = 0usize;
    let mut excluded = 0usize;
    let mut ratio_sum = 0.0;
    let mut dh_sum = 0.0;
    let mut trip_sum = 0.0;
    for o in outcomes {
        rides += 1;
        if o.trip_distance_km > 0.0 {
            ratio_sum += o.deadhead_km / o.trip_distance_km;
            dh_sum += o.deadhead_km;
            trip_sum += o.trip_distance_km;
        } else {
            excluded += 1;
        }
    }
    let qualifying = rides - excluded;
    let deadhead_to_trip = match method {
        RatioMethod::MeanOfRatios => {
            if qualifying > 0 {
                ratio_sum / qualifying as f64
            } else {
                0.0
            }
        }
        RatioMethod::RatioOfSums => {
            if trip_sum > 0.0 {
                dh_sum / trip_sum
            } else {
                0.0
            }
        }
    };
    ClassEquity {
        rides,
        ride_fraction: if served_total > 0 {
            rides as f64 / served_total as f64
        } else {
            0.0
        },
        deadhead_to_trip,
        zero_trip_excluded: excluded,
    }
}

/// Splits served rides by the serving vehicle's class and reports each
/// class's ride share and deadhead-to-trip burden.
pub fn equity(r: &SimResult, method: RatioMethod) -> EquityReport {
    let of = |class: EmissionClass| {
        class_slice(
            r.served_outcomes().filter(move |o| o.class == class),
            r.served,
            method,
        )
    };
    EquityReport {
        lev: of(EmissionClass::Lev),
        hev: of(EmissionClass::Hev),
        standard: of(EmissionClass::Standard),
        method,
    }
}
