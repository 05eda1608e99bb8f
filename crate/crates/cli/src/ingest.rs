//! CSV loaders for trip datasets, vehicle emission tables, route triples,
//! and column-mapping files.
//!
//! Loaders skip malformed rows instead of failing the whole file: every
//! rejected row is reported with its line number and reason, and callers
//! decide whether a non-empty rejection list matters. Lines starting with
//! `#` (including the manifest line our own writers emit) are comments.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use greenride_core::dataset::{Dataset, TripRecord};
use greenride_core::fleet::{
    Powertrain, VehicleProfile, EV_ENERGY_EFF_KWH_PER_KM, EV_UNIT_EMISSION_G_PER_KM,
};
use greenride_core::geo::GeoPoint;
use greenride_core::routing::{RouteOption, RouteTriple};

use crate::error::{CliError, Result};

/// Columns a trips CSV must provide (directly or through a column map).
pub const REQUIRED_TRIP_COLUMNS: [&str; 10] = [
    "ride_id",
    "request_ts",
    "pickup_lat",
    "pickup_lon",
    "dropoff_lat",
    "dropoff_lon",
    "driver_id",
    "vehicle_make",
    "vehicle_model",
    "vehicle_year",
];

/// Columns a trips CSV may provide; empty cells mean "not recorded".
pub const OPTIONAL_TRIP_COLUMNS: [&str; 7] = [
    "trip_distance_km",
    "reached_ts",
    "completed_ts",
    "powertrain",
    "unit_emission_g_per_km",
    "fuel_l_per_100km",
    "energy_eff_kwh_per_km",
];

/// Column order of the routes CSV; one row per ride, three options each.
pub const ROUTE_COLUMNS: [&str; 10] = [
    "ride_id",
    "s_dist_km",
    "s_dur_s",
    "s_em_km",
    "f_dist_km",
    "f_dur_s",
    "f_em_km",
    "e_dist_km",
    "e_dur_s",
    "e_em_km",
];

/// One skipped input row and why it was skipped.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RowIssue {
    /// 1-based line number in the source file.
    pub line: u64,
    pub reason: String,
}

impl fmt::Display for RowIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

/// Maps canonical column names to the headers a source file actually uses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColumnMap {
    entries: BTreeMap<String, String>,
}

impl ColumnMap {
    /// Source header to look for when resolving a canonical column.
    pub fn source_for<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.entries
            .get(canonical)
            .map(String::as_str)
            .unwrap_or(canonical)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parses a `canonical=source_header` mapping file. Blank lines and `#`
/// comments are ignored; unknown canonical names are an error.
pub fn load_column_map(path: &Path) -> Result<ColumnMap> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let known: BTreeSet<&str> = REQUIRED_TRIP_COLUMNS
        .iter()
        .chain(OPTIONAL_TRIP_COLUMNS.iter())
        .copied()
        .collect();
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::parse(path, format!("line {}: expected key=value", i + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !known.contains(key) {
            return Err(CliError::parse(
                path,
                format!("line {}: unknown column name {key:?}", i + 1),
            ));
        }
        if value.is_empty() {
            return Err(CliError::parse(
                path,
                format!("line {}: empty source header for {key:?}", i + 1),
            ));
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::parse(
                path,
                format!("line {}: duplicate mapping for {key:?}", i + 1),
            ));
        }
    }
    Ok(ColumnMap { entries })
}

/// Reference emission figures for one vehicle type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionEntry {
    pub co2_g_per_km: f64,
    pub fuel_l_per_100km: Option<f64>,
}

/// Vehicle emission lookup keyed by case-folded `(make, model, year)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmissionTable {
    entries: BTreeMap<(String, String, u16), EmissionEntry>,
}

fn fold_key(make: &str, model: &str, year: u16) -> (String, String, u16) {
    (
        make.trim().to_lowercase(),
        model.trim().to_lowercase(),
        year,
    )
}

impl EmissionTable {
    pub fn get(&self, make: &str, model: &str, year: u16) -> Option<&EmissionEntry> {
        self.entries.get(&fold_key(make, model, year))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A loaded emission table plus per-row diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmissionLoad {
    pub table: EmissionTable,
    /// Rows that contributed to the table (before duplicate averaging).
    pub accepted: usize,
    pub rejected: Vec<RowIssue>,
    pub warnings: Vec<String>,
}

/// Relative spread of duplicate emission figures that triggers a warning.
const DUPLICATE_SPREAD_WARN: f64 = 0.20;

/// Loads a `make,model,year,co2_g_per_km,fuel_l_per_100km` table.
///
/// Keys are matched case-insensitively with surrounding whitespace
/// ignored. Rows sharing a key are averaged; when their emission figures
/// spread by more than 20% of the smallest, a warning is recorded and the
/// mean is still used.
pub fn load_vehicle_emissions(path: &Path) -> Result<EmissionLoad> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut load = EmissionLoad::default();
    if is_blank_csv(&text) {
        return Ok(load);
    }
    let mut reader = csv_reader(&text);
    let header = resolve_header(
        path,
        reader.headers().map_err(|e| csv_header_error(path, e))?,
        &["make", "model", "year", "co2_g_per_km"],
        &["fuel_l_per_100km"],
        &ColumnMap::default(),
    )?;

    let mut groups: BTreeMap<(String, String, u16), Vec<EmissionEntry>> = BTreeMap::new();
    for (line, record) in read_rows(&mut reader, &mut load.rejected) {
        let row = Row {
            record: &record,
            header: &header,
        };
        let parsed = (|| -> std::result::Result<_, String> {
            let make = row.required_str("make")?;
            let model = row.required_str("model")?;
            let year: u16 = row.required_parsed("year")?;
            let co2: f64 = row.required_parsed("co2_g_per_km")?;
            if !co2.is_finite() || co2 <= 0.0 {
                return Err(format!("co2_g_per_km out of range: {co2}"));
            }
            let fuel: Option<f64> = row.optional_parsed("fuel_l_per_100km")?;
            if let Some(f) = fuel {
                if !f.is_finite() || f <= 0.0 {
                    return Err(format!("fuel_l_per_100km out of range: {f}"));
                }
            }
            Ok((
                fold_key(&make, &model, year),
                EmissionEntry {
                    co2_g_per_km: co2,
                    fuel_l_per_100km: fuel,
                },
            ))
        })();
        match parsed {
            Ok((key, entry)) => {
                groups.entry(key).or_default().push(entry);
                load.accepted += 1;
            }
            Err(reason) => load.rejected.push(RowIssue { line, reason }),
        }
    }

    for (key, entries) in groups {
        let n = entries.len() as f64;
        let co2_mean = entries.iter().map(|e| e.co2_g_per_km).sum::<f64>() / n;
        let fuels: Vec<f64> = entries.iter().filter_map(|e| e.fuel_l_per_100km).collect();
        let fuel_mean = if fuels.is_empty() {
            None
        } else {
            Some(fuels.iter().sum::<f64>() / fuels.len() as f64)
        };
        if entries.len() > 1 {
            let min = entries.iter().map(|e| e.co2_g_per_km).fold(f64::INFINITY, f64::min);
            let max = entries
                .iter()
                .map(|e| e.co2_g_per_km)
                .fold(f64::NEG_INFINITY, f64::max);
            if (max - min) / min > DUPLICATE_SPREAD_WARN {
                load.warnings.push(format!(
                    "{} {} {}: {} emission figures spread more than 20% \
                     ({min} to {max} g/km); using the mean {co2_mean}",
                    key.0,
                    key.1,
                    key.2,
                    entries.len(),
                ));
            }
        }
        load.table.entries.insert(
            key,
            EmissionEntry {
                co2_g_per_km: co2_mean,
                fuel_l_per_100km: fuel_mean,
            },
        );
    }
    Ok(load)
}

/// Where a vehicle's unit emission figure came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmissionSource {
    /// Explicit `unit_emission_g_per_km` column in the trips file.
    Column,
    /// Case-folded lookup in the vehicle emission table.
    Table,
    /// Median of the vehicles that did have a source.
    Median,
    /// Battery-electric default figures.
    EvDefault,
}

impl fmt::Display for EmissionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EmissionSource::Column => "column",
            EmissionSource::Table => "table",
            EmissionSource::Median => "median",
            EmissionSource::EvDefault => "ev-default",
        };
        f.write_str(s)
    }
}

/// A loaded trip dataset plus everything worth telling the user about it.
#[derive(Debug, Clone, PartialEq)]
pub struct TripLoad {
    pub dataset: Dataset,
    pub accepted: usize,
    pub rejected: Vec<RowIssue>,
    pub warnings: Vec<String>,
    /// Per-driver provenance of the unit emission figure.
    pub sources: BTreeMap<String, EmissionSource>,
}

/// Vehicle fields of the first accepted row mentioning a driver.
struct SeenVehicle {
    make: String,
    model: String,
    year: u16,
    powertrain: Option<Powertrain>,
    unit_emission: Option<f64>,
    fuel: Option<f64>,
    energy_eff: Option<f64>,
}

/// Loads a trips CSV into a validated dataset.
///
/// Malformed rows are skipped and reported; an empty or header-only file
/// yields an empty dataset. Each driver's vehicle profile comes from the
/// first accepted row mentioning them, with the unit emission resolved in
/// order: explicit column, emission-table lookup, fleet median. A fleet
/// with no source at all for any vehicle is an error.
pub fn load_trips(
    path: &Path,
    map: &ColumnMap,
    emissions: Option<&EmissionTable>,
) -> Result<TripLoad> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if is_blank_csv(&text) {
        return Ok(TripLoad {
            dataset: Dataset::new(Vec::new(), BTreeMap::new())?,
            accepted: 0,
            rejected: Vec::new(),
            warnings: Vec::new(),
            sources: BTreeMap::new(),
        });
    }
    let mut reader = csv_reader(&text);
    let header = resolve_header(
        path,
        reader.headers().map_err(|e| csv_header_error(path, e))?,
        &REQUIRED_TRIP_COLUMNS,
        &OPTIONAL_TRIP_COLUMNS,
        map,
    )?;

    let mut rejected = Vec::new();
    let mut warnings = Vec::new();
    let mut trips: Vec<TripRecord> = Vec::new();
    let mut seen_rides: BTreeSet<String> = BTreeSet::new();
    let mut vehicles: BTreeMap<String, SeenVehicle> = BTreeMap::new();
    let mut vehicle_conflicts = 0usize;

    for (line, record) in read_rows(&mut reader, &mut rejected) {
        let row = Row {
            record: &record,
            header: &header,
        };
        let parsed = parse_trip_row(&row);
        let (trip, vehicle) = match parsed {
            Ok(v) => v,
            Err(reason) => {
                rejected.push(RowIssue { line, reason });
                continue;
            }
        };
        if !seen_rides.insert(trip.ride_id.clone()) {
            rejected.push(RowIssue {
                line,
                reason: format!("duplicate ride_id {:?}", trip.ride_id),
            });
            continue;
        }
        match vehicles.get(&trip.driver_id) {
            None => {
                vehicles.insert(trip.driver_id.clone(), vehicle);
            }
            Some(first) => {
                if first.make != vehicle.make
                    || first.model != vehicle.model
                    || first.year != vehicle.year
                {
                    vehicle_conflicts += 1;
                }
            }
        }
        trips.push(trip);
    }
    if vehicle_conflicts > 0 {
        warnings.push(format!(
            "{vehicle_conflicts} rows disagree with the first-seen vehicle \
             of their driver; first row wins"
        ));
    }

    let (fleet, sources, fleet_warnings) = resolve_fleet(vehicles, emissions)?;
    warnings.extend(fleet_warnings);

    let accepted = trips.len();
    let dataset = Dataset::new(trips, fleet)?;
    Ok(TripLoad {
        dataset,
        accepted,
        rejected,
        warnings,
        sources,
    })
}

fn parse_trip_row(row: &Row<'_>) -> std::result::Result<(TripRecord, SeenVehicle), String> {
    let ride_id = row.required_str("ride_id")?;
    let request_ts: i64 = row.required_parsed("request_ts")?;
    let pickup = GeoPoint {
        lat: row.required_parsed("pickup_lat")?,
        lon: row.required_parsed("pickup_lon")?,
    };
    let dropoff = GeoPoint {
        lat: row.required_parsed("dropoff_lat")?,
        lon: row.required_parsed("dropoff_lon")?,
    };
    let driver_id = row.required_str("driver_id")?;
    let make = row.required_str("vehicle_make")?;
    let model = row.required_str("vehicle_model")?;
    let year: u16 = row.required_parsed("vehicle_year")?;
    let trip_distance_km: Option<f64> = row.optional_parsed("trip_distance_km")?;
    let reached_ts: Option<i64> = row.optional_parsed("reached_ts")?;
    let completed_ts: Option<i64> = row.optional_parsed("completed_ts")?;

    let powertrain = match row.optional_str("powertrain") {
        None => None,
        Some(s) => match s.to_lowercase().as_str() {
            "ice" => Some(Powertrain::Ice),
            "ev" => Some(Powertrain::Ev),
            other => return Err(format!("unknown powertrain {other:?}")),
        },
    };
    let unit_emission: Option<f64> = row.optional_parsed("unit_emission_g_per_km")?;
    if let Some(u) = unit_emission {
        if !u.is_finite() || u < 0.0 {
            return Err(format!("unit_emission_g_per_km out of range: {u}"));
        }
    }
    let fuel: Option<f64> = row.optional_parsed("fuel_l_per_100km")?;
    let energy_eff: Option<f64> = row.optional_parsed("energy_eff_kwh_per_km")?;

    let trip = TripRecord {
        ride_id,
        request_ts,
        pickup,
        dropoff,
        driver_id,
        vehicle_make: make.clone(),
        vehicle_model: model.clone(),
        vehicle_year: year,
        trip_distance_km,
        reached_ts,
        completed_ts,
    };
    trip.validate().map_err(|e| e.to_string())?;
    let vehicle = SeenVehicle {
        make,
        model,
        year,
        powertrain,
        unit_emission,
        fuel,
        energy_eff,
    };
    Ok((trip, vehicle))
}

/// Turns first-seen vehicle rows into validated profiles, resolving unit
/// emissions from the explicit column, the lookup table, or the fleet
/// median, in that order.
type ResolvedFleet = (
    BTreeMap<String, VehicleProfile>,
    BTreeMap<String, EmissionSource>,
    Vec<String>,
);

fn resolve_fleet(
    vehicles: BTreeMap<String, SeenVehicle>,
    emissions: Option<&EmissionTable>,
) -> Result<ResolvedFleet> {
    let mut fleet = BTreeMap::new();
    let mut sources = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut resolved_units: Vec<f64> = Vec::new();

    for (driver_id, v) in vehicles {
        if v.powertrain == Some(Powertrain::Ev) {
            let unit = v.unit_emission.unwrap_or(EV_UNIT_EMISSION_G_PER_KM);
            let source = if v.unit_emission.is_some() {
                EmissionSource::Column
            } else {
                EmissionSource::EvDefault
            };
            fleet.insert(
                driver_id.clone(),
                VehicleProfile {
                    make: v.make,
                    model: v.model,
                    year: v.year,
                    powertrain: Powertrain::Ev,
                    unit_emission_g_per_km: unit,
                    fuel_l_per_100km: None,
                    energy_eff_kwh_per_km: Some(
                        v.energy_eff.unwrap_or(EV_ENERGY_EFF_KWH_PER_KM),
                    ),
                },
            );
            sources.insert(driver_id, source);
            resolved_units.push(unit);
            continue;
        }

        let table_entry = emissions.and_then(|t| t.get(&v.make, &v.model, v.year));
        let (unit, source) = match (v.unit_emission, table_entry) {
            (Some(u), _) => (Some(u), EmissionSource::Column),
            (None, Some(e)) => (Some(e.co2_g_per_km), EmissionSource::Table),
            (None, None) => (None, EmissionSource::Median),
        };
        let fuel = v
            .fuel
            .or_else(|| table_entry.and_then(|e| e.fuel_l_per_100km));
        fleet.insert(
            driver_id.clone(),
            VehicleProfile {
                make: v.make,
                model: v.model,
                year: v.year,
                powertrain: Powertrain::Ice,
                unit_emission_g_per_km: unit.unwrap_or(0.0),
                fuel_l_per_100km: fuel,
                energy_eff_kwh_per_km: v.energy_eff,
            },
        );
        sources.insert(driver_id.clone(), source);
        match unit {
            Some(u) => resolved_units.push(u),
            None => pending.push(driver_id),
        }
    }

    if !pending.is_empty() {
        if resolved_units.is_empty() {
            return Err(CliError::Data(
                "no emission source for any vehicle; provide an emission table \
                 or a unit_emission_g_per_km column"
                    .to_string(),
            ));
        }
        let median = median_of(&mut resolved_units);
        for driver_id in &pending {
            fleet
                .get_mut(driver_id)
                .expect("pending drivers were inserted above")
                .unit_emission_g_per_km = median;
        }
        warnings.push(format!(
            "{} vehicles have no emission source; assigned the fleet median \
             {median} g/km",
            pending.len()
        ));
    }
    Ok((fleet, sources, warnings))
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// A loaded route table plus per-row diagnostics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouteLoad {
    pub routes: BTreeMap<String, RouteTriple>,
    pub accepted: usize,
    pub rejected: Vec<RowIssue>,
}

/// Loads precomputed route triples keyed by ride id.
///
/// Rows failing the dominance or validity checks are skipped and
/// reported, as are duplicate ride ids.
pub fn load_route_triples(path: &Path) -> Result<RouteLoad> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut load = RouteLoad::default();
    if is_blank_csv(&text) {
        return Ok(load);
    }
    let mut reader = csv_reader(&text);
    let header = resolve_header(
        path,
        reader.headers().map_err(|e| csv_header_error(path, e))?,
        &ROUTE_COLUMNS,
        &[],
        &ColumnMap::default(),
    )?;

    for (line, record) in read_rows(&mut reader, &mut load.rejected) {
        let row = Row {
            record: &record,
            header: &header,
        };
        let parsed = (|| -> std::result::Result<_, String> {
            let ride_id = row.required_str("ride_id")?;
            let opt = |d: &str, t: &str, e: &str| -> std::result::Result<RouteOption, String> {
                Ok(RouteOption {
                    distance_km: row.required_parsed(d)?,
                    duration_s: row.required_parsed(t)?,
                    emission_distance_km: row.required_parsed(e)?,
                })
            };
            let triple = RouteTriple::new(
                opt("s_dist_km", "s_dur_s", "s_em_km")?,
                opt("f_dist_km", "f_dur_s", "f_em_km")?,
                opt("e_dist_km", "e_dur_s", "e_em_km")?,
            )
            .map_err(|e| e.to_string())?;
            Ok((ride_id, triple))
        })();
        match parsed {
            Ok((ride_id, triple)) => match load.routes.entry(ride_id) {
                Entry::Occupied(e) => load.rejected.push(RowIssue {
                    line,
                    reason: format!("duplicate ride_id {:?}", e.key()),
                }),
                Entry::Vacant(e) => {
                    e.insert(triple);
                    load.accepted += 1;
                }
            },
            Err(reason) => load.rejected.push(RowIssue { line, reason }),
        }
    }
    Ok(load)
}

/// True when the file has no content besides blanks and `#` comments.
fn is_blank_csv(text: &str) -> bool {
    text.lines()
        .all(|l| l.trim().is_empty() || l.trim_start().starts_with('#'))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn csv_header_error(path: &Path, e: csv::Error) -> CliError {
    CliError::parse(path, format!("cannot read header: {e}"))
}

/// Canonical column name to record index, resolved through the column map.
struct Header {
    index: BTreeMap<&'static str, usize>,
}

impl Header {
    fn get(&self, canonical: &str) -> Option<usize> {
        self.index.get(canonical).copied()
    }
}

fn resolve_header(
    path: &Path,
    headers: &csv::StringRecord,
    required: &[&'static str],
    optional: &[&'static str],
    map: &ColumnMap,
) -> Result<Header> {
    let position = |source: &str| headers.iter().position(|h| h == source);
    let mut index = BTreeMap::new();
    let mut missing = Vec::new();
    for &name in required {
        match position(map.source_for(name)) {
            Some(i) => {
                index.insert(name, i);
            }
            None => missing.push(map.source_for(name).to_string()),
        }
    }
    if !missing.is_empty() {
        return Err(CliError::parse(
            path,
            format!("missing required columns: {}", missing.join(", ")),
        ));
    }
    for &name in optional {
        if let Some(i) = position(map.source_for(name)) {
            index.insert(name, i);
        }
    }
    Ok(Header { index })
}

/// Reads every record with its line number, turning per-record CSV errors
/// (for example ragged rows) into rejections instead of aborting.
fn read_rows(
    reader: &mut csv::Reader<&[u8]>,
    rejected: &mut Vec<RowIssue>,
) -> Vec<(u64, csv::StringRecord)> {
    let mut rows = Vec::new();
    for r in reader.records() {
        match r {
            Ok(record) => {
                let line = record.position().map(|p| p.line()).unwrap_or(0);
                rows.push((line, record));
            }
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                rejected.push(RowIssue {
                    line,
                    reason: format!("unreadable row: {e}"),
                });
            }
        }
    }
    rows
}

/// One data row viewed through the resolved header.
struct Row<'a> {
    record: &'a csv::StringRecord,
    header: &'a Header,
}

impl Row<'_> {
    fn raw(&self, canonical: &str) -> Option<&str> {
        self.header
            .get(canonical)
            .and_then(|i| self.record.get(i))
    }

    /// Non-empty string field; empty or absent is an error.
    fn required_str(&self, canonical: &str) -> std::result::Result<String, String> {
        match self.raw(canonical) {
            Some(s) if !s.is_empty() => Ok(s.to_string()),
            _ => Err(format!("missing {canonical}")),
        }
    }

    /// Present-but-empty and absent both mean `None`.
    fn optional_str(&self, canonical: &str) -> Option<&str> {
        self.raw(canonical).filter(|s| !s.is_empty())
    }

    fn required_parsed<T: std::str::FromStr>(
        &self,
        canonical: &str,
    ) -> std::result::Result<T, String> {
        let s = self
            .raw(canonical)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing {canonical}"))?;
        s.parse()
            .map_err(|_| format!("cannot parse {canonical} from {s:?}"))
    }

    fn optional_parsed<T: std::str::FromStr>(
        &self,
        canonical: &str,
    ) -> std::result::Result<Option<T>, String> {
        match self.optional_str(canonical) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| format!("cannot parse {canonical} from {s:?}")),
        }
    }
}
