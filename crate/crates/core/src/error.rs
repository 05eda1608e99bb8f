use alloc::string::String;
use thiserror::Error;

/// Error type shared by all modules in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Latitude outside [-90, 90], longitude outside [-180, 180], or NaN.
    #[error("invalid coordinate: lat {lat}, lon {lon}")]
    InvalidCoordinate { lat: f64, lon: f64 },
    /// Road distances inflate geodesic distances; a factor below 1 would deflate them.
    #[error("detour factor must be finite and >= 1, got {0}")]
    InvalidDetourFactor(f64),
    /// A quantity that must be positive (or non-negative) was not.
    #[error("{name} out of range: {value}")]
    OutOfRange { name: &'static str, value: f64 },
    /// Emission-to-distance ratio is only defined for a strictly farther candidate.
    #[error(
        "emission-to-distance ratio undefined: candidate deadhead {candidate_km} km \
         is not strictly farther than the closest {closest_km} km"
    )]
    RatioUndefined { candidate_km: f64, closest_km: f64 },
    /// An assignment was requested from an empty candidate set.
    #[error("no candidate drivers")]
    NoCandidates,
    /// Replay assignment needs the recorded driver on the trip record.
    #[error("trip {ride_id} has no recorded driver")]
    MissingDriver { ride_id: String },
    /// A route option or route triple violates its bounds.
    #[error("invalid route: {0}")]
    InvalidRoute(String),
    /// Exhaustive search was asked for an instance beyond the safety guard.
    #[error("exhaustive search over {combinations:.3e} assignments exceeds the {limit:.0e} guard")]
    InstanceTooLarge { combinations: f64, limit: f64 },
    /// An objective was requested for a plan that does not cover every request.
    #[error("assignment plan covers {assigned} of {expected} requests")]
    IncompletePlan { assigned: usize, expected: usize },
    /// A configuration value failed validation.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A dataset-level invariant (ordering, fleet coverage, id uniqueness) failed.
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    /// Relative deltas are undefined against a zero baseline.
    #[error("baseline {0} is zero; relative delta undefined")]
    ZeroBaseline(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
