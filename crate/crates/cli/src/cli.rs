//! Command-line argument definitions.
//!
//! Flags are declared optional so a `key=value` config file can fill them
//! in; [`crate::settings`] merges the two with command-line precedence.
//! Range checks run at parse time where possible so a bad value fails as
//! a usage error before any file is touched.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use greenride_core::metrics::RatioMethod;
use greenride_core::routing::RoutePolicy;

#[derive(Debug, Parser)]
#[command(
    name = "greenride",
    version,
    about = "Emission-aware ride assignment: dataset tooling, simulation, sweeps, and oracle checks",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one assignment policy over a trip dataset and write reports.
    Simulate(SimulateArgs),
    /// Run the threshold policy over a grid of phi values and EV levels.
    Sweep(SweepArgs),
    /// Compare the offline search against exact optima on small instances.
    Oracle(OracleArgs),
    /// Convert a random share of the fleet to battery-electric vehicles.
    InjectEv(InjectEvArgs),
    /// Generate a synthetic trip dataset.
    GenSynth(GenSynthArgs),
    /// Annotate a trips CSV with resolved emission figures and classes.
    Augment(AugmentArgs),
    /// Synthesize route alternatives for every trip in a dataset.
    RoutesGen(RoutesGenArgs),
    /// Validate a route-triples CSV and report per-row acceptance.
    RoutesCheck(RoutesCheckArgs),
}

/// Assignment policy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    /// Recorded driver from the dataset.
    Replay,
    /// Closest eligible driver.
    Nearest,
    /// Threshold rule trading deadhead distance for emissions.
    Tora,
    /// Offline frontier search over the whole request sequence.
    EraOffline,
}

/// Route option selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoutingArg {
    Shortest,
    Fastest,
    FuelEfficient,
}

impl From<RoutingArg> for RoutePolicy {
    fn from(r: RoutingArg) -> Self {
        match r {
            RoutingArg::Shortest => RoutePolicy::Shortest,
            RoutingArg::Fastest => RoutePolicy::Fastest,
            RoutingArg::FuelEfficient => RoutePolicy::FuelEfficient,
        }
    }
}

/// Per-class ratio aggregation selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioArg {
    MeanOfRatios,
    RatioOfSums,
}

impl From<RatioArg> for RatioMethod {
    fn from(r: RatioArg) -> Self {
        match r {
            RatioArg::MeanOfRatios => RatioMethod::MeanOfRatios,
            RatioArg::RatioOfSums => RatioMethod::RatioOfSums,
        }
    }
}

macro_rules! value_enum_from_str {
    ($ty:ty) => {
        impl std::str::FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, String> {
                <$ty as ValueEnum>::from_str(s, true)
            }
        }
    };
}
value_enum_from_str!(PolicyArg);
value_enum_from_str!(RoutingArg);
value_enum_from_str!(RatioArg);

/// Input files for commands that read a full trip dataset.
#[derive(Debug, Clone, Args)]
pub struct DataOpts {
    /// Trips CSV file.
    #[arg(long)]
    pub trips: Option<PathBuf>,
    /// Vehicle emission reference table CSV.
    #[arg(long)]
    pub emissions: Option<PathBuf>,
    /// Column mapping file with canonical=source lines.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// Precomputed route triples CSV.
    #[arg(long)]
    pub routes: Option<PathBuf>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Input files for dataset tooling that does not use routes.
#[derive(Debug, Clone, Args)]
pub struct TripIoOpts {
    /// Trips CSV file.
    #[arg(long)]
    pub trips: Option<PathBuf>,
    /// Vehicle emission reference table CSV.
    #[arg(long)]
    pub emissions: Option<PathBuf>,
    /// Column mapping file with canonical=source lines.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Simulation parameters shared by simulate and sweep.
#[derive(Debug, Clone, Args)]
pub struct SimOpts {
    /// Assignment policy [default: tora].
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
    /// Replacement threshold of the tora policy [default: 1].
    #[arg(long, value_parser = non_negative, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Reference emission rate scaling the threshold, g/km [default: 63.35].
    #[arg(long, value_parser = positive)]
    pub e0: Option<f64>,
    /// Unit emission below which a vehicle is low-emission, g/km
    /// [default: 135].
    #[arg(long, value_parser = positive)]
    pub lev_threshold: Option<f64>,
    /// Fuel consumption at or above which a vehicle is high-emission,
    /// L/100km [default: 11.7].
    #[arg(long, value_parser = positive)]
    pub hev_threshold: Option<f64>,
    /// Fraction of non-LEV vehicles converted to EVs before the run
    /// [default: 0].
    #[arg(long, value_parser = unit_fraction)]
    pub ev_fraction: Option<f64>,
    /// Busy drivers freeing up within this window are candidates, seconds
    /// [default: 600].
    #[arg(long, value_parser = non_negative)]
    pub horizon_s: Option<f64>,
    /// Deadhead driving speed, km/h [default: 30].
    #[arg(long, value_parser = positive)]
    pub speed_kmh: Option<f64>,
    /// Base speed for synthesized route durations, km/h [default: 40].
    #[arg(long, value_parser = positive)]
    pub trip_speed_kmh: Option<f64>,
    /// Queued requests waiting longer than this are dropped, seconds
    /// [default: 7200].
    #[arg(long, value_parser = non_negative)]
    pub max_queue_wait_s: Option<f64>,
    /// Multiplier from great-circle to road distance [default: 1.3].
    #[arg(long, value_parser = detour)]
    pub detour: Option<f64>,
    /// Route option driven for each trip [default: shortest].
    #[arg(long, value_enum)]
    pub routing: Option<RoutingArg>,
    /// Seed for all randomness in the run [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// How per-class deadhead-to-trip ratios are aggregated
    /// [default: mean-of-ratios].
    #[arg(long, value_enum)]
    pub ratio_method: Option<RatioArg>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub sim: SimOpts,
    /// Directory receiving summary.json and rides.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub sim: SimOpts,
    /// Comma-separated threshold values to sweep.
    #[arg(long, value_delimiter = ',', value_parser = non_negative, allow_hyphen_values = true)]
    pub phis: Option<Vec<f64>>,
    /// Comma-separated EV adoption fractions to sweep [default: 0].
    #[arg(long, value_delimiter = ',', value_parser = unit_fraction)]
    pub ev_fractions: Option<Vec<f64>>,
    /// Concurrent sweep cells [default: available cores].
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Directory receiving sweep.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Number of random instances to check [default: 200].
    #[arg(long)]
    pub instances: Option<usize>,
    /// Smallest request count per instance [default: 3].
    #[arg(long)]
    pub min_requests: Option<usize>,
    /// Largest request count per instance [default: 6].
    #[arg(long)]
    pub max_requests: Option<usize>,
    /// Smallest fleet size per instance [default: 2].
    #[arg(long)]
    pub min_drivers: Option<usize>,
    /// Largest fleet size per instance [default: 3].
    #[arg(long)]
    pub max_drivers: Option<usize>,
    /// Multiplier from great-circle to road distance [default: 1.3].
    #[arg(long, value_parser = detour)]
    pub detour: Option<f64>,
    /// Seed for instance generation [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory receiving oracle.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct InjectEvArgs {
    #[command(flatten)]
    pub data: TripIoOpts,
    /// Fraction of non-LEV vehicles to convert.
    #[arg(long, value_parser = unit_fraction)]
    pub ev_fraction: Option<f64>,
    /// Unit emission below which a vehicle is low-emission, g/km
    /// [default: 135].
    #[arg(long, value_parser = positive)]
    pub lev_threshold: Option<f64>,
    /// Fuel consumption at or above which a vehicle is high-emission,
    /// L/100km [default: 11.7].
    #[arg(long, value_parser = positive)]
    pub hev_threshold: Option<f64>,
    /// Seed selecting which vehicles convert [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output trips CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenSynthArgs {
    /// Fleet size [default: 50].
    #[arg(long)]
    pub drivers: Option<usize>,
    /// Number of ride requests [default: 500].
    #[arg(long)]
    pub requests: Option<usize>,
    /// Side length of the square service area, km [default: 20].
    #[arg(long, value_parser = positive)]
    pub extent_km: Option<f64>,
    /// Mean request arrival rate per hour [default: 600].
    #[arg(long, value_parser = positive)]
    pub rate_per_hour: Option<f64>,
    /// Share of the fleet given low-emission vehicles [default: 0.1].
    #[arg(long, value_parser = unit_fraction)]
    pub lev_fraction: Option<f64>,
    /// Unix timestamp of the first arrival [default: 1480550400].
    #[arg(long, allow_hyphen_values = true)]
    pub start_ts: Option<i64>,
    /// Seed for fleet and arrival generation [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output trips CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[command(flatten)]
    pub data: TripIoOpts,
    /// Unit emission below which a vehicle is low-emission, g/km
    /// [default: 135].
    #[arg(long, value_parser = positive)]
    pub lev_threshold: Option<f64>,
    /// Fuel consumption at or above which a vehicle is high-emission,
    /// L/100km [default: 11.7].
    #[arg(long, value_parser = positive)]
    pub hev_threshold: Option<f64>,
    /// Output trips CSV file with emission columns appended.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoutesGenArgs {
    #[command(flatten)]
    pub data: TripIoOpts,
    /// Base speed for synthesized route durations, km/h [default: 40].
    #[arg(long, value_parser = positive)]
    pub trip_speed_kmh: Option<f64>,
    /// Multiplier from great-circle to road distance [default: 1.3].
    #[arg(long, value_parser = detour)]
    pub detour: Option<f64>,
    /// Seed for route synthesis [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output routes CSV file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RoutesCheckArgs {
    /// Route triples CSV to validate.
    #[arg(long)]
    pub routes: Option<PathBuf>,
    /// key=value config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses a finite float that is zero or more.
fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be zero or more, got {v}"))
    }
}

/// Parses a finite float that is strictly positive.
fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

/// Parses a finite float in [0, 1].
fn unit_fraction(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must be between 0 and 1, got {v}"))
    }
}

/// Parses a finite detour factor of at least 1.
fn detour(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("must be at least 1, got {v}"))
    }
}
