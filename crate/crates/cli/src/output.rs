//! Report writers: trips, rides, sweep and route CSVs plus JSON documents.
//!
//! Every file starts with a `# manifest=` comment line so any report can
//! be traced back to its inputs; the loaders in [`crate::ingest`] skip it
//! transparently. Floats are written with the shortest representation
//! that parses back to the same value, which keeps round-trips lossless
//! and reruns byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use greenride_core::dataset::Dataset;
use greenride_core::fleet::{EmissionClass, Powertrain};
use greenride_core::routing::{RouteOption, RouteTriple};
use greenride_core::sim::SimResult;

use crate::error::{CliError, Result};
use crate::ingest::{EmissionSource, OPTIONAL_TRIP_COLUMNS, REQUIRED_TRIP_COLUMNS, ROUTE_COLUMNS};
use crate::manifest::RunManifest;

/// Stable lowercase name of an emission class.
pub fn class_name(c: EmissionClass) -> &'static str {
    match c {
        EmissionClass::Lev => "lev",
        EmissionClass::Hev => "hev",
        EmissionClass::Standard => "standard",
    }
}

fn opt_num<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-driver columns appended by the augment command.
pub struct TripCsvExtras<'a> {
    pub classes: &'a BTreeMap<String, EmissionClass>,
    pub sources: &'a BTreeMap<String, EmissionSource>,
}

/// Writes a dataset as a trips CSV in the extended schema.
///
/// The canonical columns round-trip [`crate::ingest::load_trips`] exactly;
/// the extended columns carry each driver's resolved vehicle profile so no
/// emission table is needed to reload the file.
pub fn write_trips_csv(
    path: &Path,
    ds: &Dataset,
    manifest: &RunManifest,
    extras: Option<&TripCsvExtras<'_>>,
) -> Result<()> {
    let mut w = csv_writer(path, manifest)?;
    let mut header: Vec<&str> = REQUIRED_TRIP_COLUMNS
        .iter()
        .chain(OPTIONAL_TRIP_COLUMNS.iter())
        .copied()
        .collect();
    if extras.is_some() {
        header.push("emission_class");
        header.push("emission_source");
    }
    w.write_record(&header).map_err(|e| csv_io(path, e))?;

    for t in ds.trips() {
        let v = &ds.fleet()[&t.driver_id];
        let powertrain = match v.powertrain {
            Powertrain::Ice => "ice",
            Powertrain::Ev => "ev",
        };
        let mut record = vec![
            t.ride_id.clone(),
            t.request_ts.to_string(),
            t.pickup.lat.to_string(),
            t.pickup.lon.to_string(),
            t.dropoff.lat.to_string(),
            t.dropoff.lon.to_string(),
            t.driver_id.clone(),
            t.vehicle_make.clone(),
            t.vehicle_model.clone(),
            t.vehicle_year.to_string(),
            opt_num(t.trip_distance_km),
            opt_num(t.reached_ts),
            opt_num(t.completed_ts),
            powertrain.to_string(),
            v.unit_emission_g_per_km.to_string(),
            opt_num(v.fuel_l_per_100km),
            opt_num(v.energy_eff_kwh_per_km),
        ];
        if let Some(x) = extras {
            record.push(class_name(x.classes[&t.driver_id]).to_string());
            record.push(x.sources[&t.driver_id].to_string());
        }
        w.write_record(&record).map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// Writes the per-ride event log of one simulation run.
///
/// `phi` fills the phi column when the run used the threshold policy;
/// other policies leave it empty. Dropped requests keep their waiting
/// time and leave driver and class columns empty.
pub fn write_rides_csv(
    path: &Path,
    result: &SimResult,
    phi: Option<f64>,
    manifest: &RunManifest,
) -> Result<()> {
    let mut w = csv_writer(path, manifest)?;
    w.write_record([
        "ride_id",
        "driver_id",
        "phi",
        "deadhead_km",
        "deadhead_g",
        "trip_g",
        "waiting_s",
        "class",
        "dropped",
    ])
    .map_err(|e| csv_io(path, e))?;
    let phi_cell = opt_num(phi);
    for o in &result.outcomes {
        let class = if o.dropped { "" } else { class_name(o.class) };
        w.write_record([
            o.ride_id.as_str(),
            o.driver_id.as_str(),
            phi_cell.as_str(),
            &o.deadhead_km.to_string(),
            &o.deadhead_emission_g.to_string(),
            &o.trip_emission_g.to_string(),
            &o.waiting_s.to_string(),
            class,
            if o.dropped { "true" } else { "false" },
        ])
        .map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// One row of the sweep report: a `(phi, fleet)` cell and its metrics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub phi: f64,
    /// Measured LEV share of the fleet the cell ran against.
    pub lev_fraction: f64,
    pub deadhead_g: f64,
    pub total_g: f64,
    pub mean_wait_s: f64,
    pub max_wait_s: f64,
    pub lev_ride_frac: f64,
    pub hev_ride_frac: f64,
    pub lev_dh_trip: f64,
    pub hev_dh_trip: f64,
}

/// Writes the sweep table, one row per `(phi, fleet)` cell in input order.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow], manifest: &RunManifest) -> Result<()> {
    let mut w = csv_writer(path, manifest)?;
    w.write_record([
        "phi",
        "lev_fraction",
        "deadhead_g",
        "total_g",
        "mean_wait_s",
        "max_wait_s",
        "lev_ride_frac",
        "hev_ride_frac",
        "lev_dh_trip",
        "hev_dh_trip",
    ])
    .map_err(|e| csv_io(path, e))?;
    for r in rows {
        w.write_record([
            r.phi.to_string(),
            r.lev_fraction.to_string(),
            r.deadhead_g.to_string(),
            r.total_g.to_string(),
            r.mean_wait_s.to_string(),
            r.max_wait_s.to_string(),
            r.lev_ride_frac.to_string(),
            r.hev_ride_frac.to_string(),
            r.lev_dh_trip.to_string(),
            r.hev_dh_trip.to_string(),
        ])
        .map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// Writes route triples keyed by ride id, preserving the given order.
pub fn write_routes_csv(
    path: &Path,
    routes: &[(String, RouteTriple)],
    manifest: &RunManifest,
) -> Result<()> {
    let mut w = csv_writer(path, manifest)?;
    w.write_record(ROUTE_COLUMNS).map_err(|e| csv_io(path, e))?;
    let cells = |o: &RouteOption| {
        [
            o.distance_km.to_string(),
            o.duration_s.to_string(),
            o.emission_distance_km.to_string(),
        ]
    };
    for (ride_id, t) in routes {
        let mut record = vec![ride_id.clone()];
        record.extend(cells(&t.shortest));
        record.extend(cells(&t.fastest));
        record.extend(cells(&t.fuel_efficient));
        w.write_record(&record).map_err(|e| csv_io(path, e))?;
    }
    finish(w, path)
}

/// Writes a pretty-printed JSON document with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn csv_writer(path: &Path, manifest: &RunManifest) -> Result<csv::Writer<fs::File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
    }
    let mut file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    writeln!(file, "{}", manifest.to_comment_line()).map_err(|e| CliError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

fn finish(w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.into_inner()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?
        .sync_all()
        .map_err(|e| CliError::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}
