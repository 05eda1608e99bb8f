//! Subcommand implementations and the plumbing they share: config-file
//! loading, input resolution, and simulation settings.

mod data;
mod oracle;
mod routes;
mod simulate;
mod sweep;

pub use data::{cmd_augment, cmd_gen_synth, cmd_inject_ev};
pub use oracle::cmd_oracle;
pub use routes::{cmd_routes_check, cmd_routes_gen};
pub use simulate::cmd_simulate;
pub use sweep::cmd_sweep;

use std::path::{Path, PathBuf};

use greenride_core::dataset::Dataset;
use greenride_core::fleet::{
    ClassThresholds, DEFAULT_HEV_THRESHOLD_L_PER_100KM, DEFAULT_LEV_THRESHOLD_G_PER_KM,
    EV_UNIT_EMISSION_G_PER_KM,
};
use greenride_core::metrics::RatioMethod;
use greenride_core::sim::{Policy, SimConfig};

use crate::cli::{PolicyArg, SimOpts};
use crate::error::{CliError, Result};
use crate::ingest::{
    load_column_map, load_trips, load_vehicle_emissions, ColumnMap, RowIssue, TripLoad,
};
use crate::manifest::{DataWindow, DatasetStats, RunManifest};
use crate::settings::{
    load_config, require_detour, require_non_negative, require_positive, require_unit_fraction,
    ConfigFile, Resolver,
};

pub(crate) fn usage(msg: &str) -> CliError {
    CliError::Usage(msg.to_string())
}

/// Loads the file named by `--config`, when given.
pub(crate) fn load_file_config(path: &Option<PathBuf>) -> Result<Option<ConfigFile>> {
    match path {
        Some(p) => Ok(Some(load_config(p)?)),
        None => Ok(None),
    }
}

/// Resolved input files of a dataset-reading command.
pub(crate) struct DataFiles {
    pub trips: PathBuf,
    pub emissions: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub routes: Option<PathBuf>,
}

/// A loaded dataset plus the diagnostics its loaders produced.
pub(crate) struct LoadedTrips {
    pub load: TripLoad,
    pub emission_warnings: Vec<String>,
    pub emission_rejected: Vec<RowIssue>,
}

impl DataFiles {
    pub fn resolve(
        trips: Option<PathBuf>,
        emissions: Option<PathBuf>,
        map: Option<PathBuf>,
        routes: Option<PathBuf>,
        r: &Resolver<'_>,
    ) -> Result<Self> {
        let trips = r
            .path(trips, "trips")
            .ok_or_else(|| usage("--trips is required"))?;
        Ok(DataFiles {
            trips,
            emissions: r.path(emissions, "emissions"),
            map: r.path(map, "map"),
            routes: r.path(routes, "routes"),
        })
    }

    /// Loads the trips file, with the emission table and column map when
    /// configured.
    pub fn load(&self) -> Result<LoadedTrips> {
        let map = match &self.map {
            Some(p) => load_column_map(p)?,
            None => ColumnMap::default(),
        };
        let (table, emission_warnings, emission_rejected) = match &self.emissions {
            Some(p) => {
                let e = load_vehicle_emissions(p)?;
                (Some(e.table), e.warnings, e.rejected)
            }
            None => (None, Vec::new(), Vec::new()),
        };
        let load = load_trips(&self.trips, &map, table.as_ref())?;
        Ok(LoadedTrips {
            load,
            emission_warnings,
            emission_rejected,
        })
    }

    /// Digests every configured input into the manifest.
    pub fn add_to_manifest(
        &self,
        m: &mut RunManifest,
        config: &Option<PathBuf>,
    ) -> Result<()> {
        m.add_input("trips", &self.trips)?;
        for (role, path) in [
            ("emissions", &self.emissions),
            ("map", &self.map),
            ("routes", &self.routes),
            ("config", config),
        ] {
            if let Some(p) = path {
                m.add_input(role, p)?;
            }
        }
        Ok(())
    }
}

/// Prints loader warnings and a capped list of skipped rows to stderr.
pub(crate) fn report_loaded(loaded: &LoadedTrips) {
    for w in &loaded.emission_warnings {
        eprintln!("warning: {w}");
    }
    for w in &loaded.load.warnings {
        eprintln!("warning: {w}");
    }
    report_rejects("emissions", &loaded.emission_rejected);
    report_rejects("trips", &loaded.load.rejected);
}

/// Prints up to 20 row rejections for one input file.
pub(crate) fn report_rejects(what: &str, rejected: &[RowIssue]) {
    const MAX_LISTED: usize = 20;
    for issue in rejected.iter().take(MAX_LISTED) {
        eprintln!("{what}: skipped {issue}");
    }
    if rejected.len() > MAX_LISTED {
        eprintln!("{what}: ... and {} more", rejected.len() - MAX_LISTED);
    }
}

pub(crate) fn dataset_stats(load: &TripLoad) -> DatasetStats {
    DatasetStats {
        trips: load.dataset.trips().len(),
        drivers: load.dataset.fleet().len(),
        rows_accepted: load.accepted,
        rows_rejected: load.rejected.len(),
    }
}

pub(crate) fn window_of(ds: &Dataset) -> Option<DataWindow> {
    ds.time_window().map(|(start_ts, end_ts)| DataWindow { start_ts, end_ts })
}

pub(crate) fn resolve_thresholds(
    r: &Resolver<'_>,
    lev_cli: Option<f64>,
    hev_cli: Option<f64>,
) -> Result<ClassThresholds> {
    let lev = require_positive(
        "lev-threshold",
        r.flag(lev_cli, "lev-threshold", DEFAULT_LEV_THRESHOLD_G_PER_KM)?,
    )?;
    let hev = require_positive(
        "hev-threshold",
        r.flag(hev_cli, "hev-threshold", DEFAULT_HEV_THRESHOLD_L_PER_100KM)?,
    )?;
    Ok(ClassThresholds::new(lev, hev)?)
}

/// Everything simulate and sweep need beyond the core [`SimConfig`].
pub(crate) struct SimSettings {
    pub cfg: SimConfig,
    pub seed: u64,
    pub ev_fraction: f64,
    pub ratio_method: RatioMethod,
    /// Threshold value for the rides.csv phi column; present only when
    /// the run uses the threshold policy.
    pub phi_column: Option<f64>,
}

impl SimSettings {
    /// Resolved-configuration snapshot embedded in manifests.
    pub fn config_json(&self) -> serde_json::Value {
        serde_json::json!({
            "sim": self.cfg,
            "ev_fraction": self.ev_fraction,
            "ratio_method": self.ratio_method,
        })
    }
}

/// Merges simulation flags with the config file and defaults.
pub(crate) fn resolve_sim(opts: &SimOpts, r: &Resolver<'_>) -> Result<SimSettings> {
    let policy_arg = r.flag(opts.policy, "policy", PolicyArg::Tora)?;
    let phi = require_non_negative("phi", r.flag(opts.phi, "phi", 1.0)?)?;
    let e0 = require_positive("e0", r.flag(opts.e0, "e0", EV_UNIT_EMISSION_G_PER_KM)?)?;
    let thresholds = resolve_thresholds(r, opts.lev_threshold, opts.hev_threshold)?;
    let ev_fraction = require_unit_fraction(
        "ev-fraction",
        r.flag(opts.ev_fraction, "ev-fraction", 0.0)?,
    )?;
    let horizon = require_non_negative("horizon-s", r.flag(opts.horizon_s, "horizon-s", 600.0)?)?;
    let speed = require_positive("speed-kmh", r.flag(opts.speed_kmh, "speed-kmh", 30.0)?)?;
    let trip_speed = require_positive(
        "trip-speed-kmh",
        r.flag(opts.trip_speed_kmh, "trip-speed-kmh", 40.0)?,
    )?;
    let max_queue_wait = require_non_negative(
        "max-queue-wait-s",
        r.flag(opts.max_queue_wait_s, "max-queue-wait-s", 7200.0)?,
    )?;
    let detour = require_detour("detour", r.flag(opts.detour, "detour", 1.3)?)?;
    let routing = r.flag(opts.routing, "routing", crate::cli::RoutingArg::Shortest)?;
    let seed = r.flag(opts.seed, "seed", 0u64)?;
    let ratio_method = r
        .flag(opts.ratio_method, "ratio-method", crate::cli::RatioArg::MeanOfRatios)?
        .into();

    let (policy, phi_column) = match policy_arg {
        PolicyArg::Replay => (Policy::Replay, None),
        PolicyArg::Nearest => (Policy::Nearest, None),
        PolicyArg::Tora => (Policy::Tora { phi }, Some(phi)),
        PolicyArg::EraOffline => (Policy::EraOffline, None),
    };
    let cfg = SimConfig {
        policy,
        e0_g_per_km: e0,
        deadhead_speed_kmh: speed,
        trip_speed_kmh: trip_speed,
        availability_horizon_s: horizon,
        max_queue_wait_s: max_queue_wait,
        routing_policy: routing.into(),
        detour_factor: detour,
        thresholds,
        seed,
        ..SimConfig::default()
    };
    cfg.validate()?;
    Ok(SimSettings {
        cfg,
        seed,
        ev_fraction,
        ratio_method,
        phi_column,
    })
}

/// Ensures the report directory exists.
pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}
