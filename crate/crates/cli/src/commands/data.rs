//! Dataset tooling subcommands: gen-synth, inject-ev, and augment.

use std::collections::BTreeMap;

use greenride_core::dataset::{gen_synthetic, inject_evs, SynthConfig};
use greenride_core::fleet::{classify_vehicle, EmissionClass, Powertrain};

use crate::cli::{AugmentArgs, GenSynthArgs, InjectEvArgs};
use crate::error::Result;
use crate::ingest::EmissionSource;
use crate::manifest::{DatasetStats, RunManifest};
use crate::output::{write_trips_csv, TripCsvExtras};
use crate::settings::{require_positive, require_unit_fraction, Resolver};

use super::{
    dataset_stats, load_file_config, report_loaded, resolve_thresholds, usage, window_of,
    DataFiles,
};

pub fn cmd_gen_synth(args: &GenSynthArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let defaults = SynthConfig::default();
    let synth = SynthConfig {
        drivers: r.flag(args.drivers, "drivers", defaults.drivers)?,
        requests: r.flag(args.requests, "requests", defaults.requests)?,
        extent_km: require_positive(
            "extent-km",
            r.flag(args.extent_km, "extent-km", defaults.extent_km)?,
        )?,
        requests_per_hour: require_positive(
            "rate-per-hour",
            r.flag(args.rate_per_hour, "rate-per-hour", defaults.requests_per_hour)?,
        )?,
        start_ts: r.flag(args.start_ts, "start-ts", defaults.start_ts)?,
        lev_fraction: require_unit_fraction(
            "lev-fraction",
            r.flag(args.lev_fraction, "lev-fraction", defaults.lev_fraction)?,
        )?,
        ..defaults
    };
    let seed = r.flag(args.seed, "seed", 0u64)?;
    let out = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;

    let ds = gen_synthetic(&synth, seed)?;
    let mut manifest = RunManifest::new("gen-synth", seed, serde_json::json!({ "synth": synth }));
    if let Some(p) = &args.config {
        manifest.add_input("config", p)?;
    }
    manifest.window = window_of(&ds);
    manifest.dataset = DatasetStats {
        trips: ds.trips().len(),
        drivers: ds.fleet().len(),
        rows_accepted: ds.trips().len(),
        rows_rejected: 0,
    };
    write_trips_csv(&out, &ds, &manifest, None)?;
    println!(
        "gen-synth: {} trips, {} drivers -> {}",
        ds.trips().len(),
        ds.fleet().len(),
        out.display()
    );
    Ok(())
}

pub fn cmd_inject_ev(args: &InjectEvArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.data.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let fraction = require_unit_fraction(
        "ev-fraction",
        r.opt_flag(args.ev_fraction, "ev-fraction")?
            .ok_or_else(|| usage("--ev-fraction is required"))?,
    )?;
    let thresholds = resolve_thresholds(&r, args.lev_threshold, args.hev_threshold)?;
    let seed = r.flag(args.seed, "seed", 0u64)?;
    let out = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;
    let files = DataFiles::resolve(
        args.data.trips.clone(),
        args.data.emissions.clone(),
        args.data.map.clone(),
        None,
        &r,
    )?;

    let loaded = files.load()?;
    report_loaded(&loaded);
    let evs_of = |ds: &greenride_core::dataset::Dataset| {
        ds.fleet()
            .values()
            .filter(|v| v.powertrain == Powertrain::Ev)
            .count()
    };
    let before = evs_of(&loaded.load.dataset);
    let injected = inject_evs(&loaded.load.dataset, fraction, seed, &thresholds)?;
    let converted = evs_of(&injected) - before;

    let mut manifest = RunManifest::new(
        "inject-ev",
        seed,
        serde_json::json!({
            "ev_fraction": fraction,
            "lev_threshold": thresholds.lev_g_per_km,
            "hev_threshold": thresholds.hev_l_per_100km,
        }),
    );
    files.add_to_manifest(&mut manifest, &args.data.config)?;
    manifest.window = window_of(&injected);
    manifest.dataset = dataset_stats(&loaded.load);
    write_trips_csv(&out, &injected, &manifest, None)?;
    println!(
        "inject-ev: {} of {} vehicles converted -> {}",
        converted,
        injected.fleet().len(),
        out.display()
    );
    Ok(())
}

pub fn cmd_augment(args: &AugmentArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.data.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let thresholds = resolve_thresholds(&r, args.lev_threshold, args.hev_threshold)?;
    let out = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;
    let files = DataFiles::resolve(
        args.data.trips.clone(),
        args.data.emissions.clone(),
        args.data.map.clone(),
        None,
        &r,
    )?;

    let loaded = files.load()?;
    report_loaded(&loaded);
    let ds = &loaded.load.dataset;
    let classes: BTreeMap<String, EmissionClass> = ds
        .fleet()
        .iter()
        .map(|(id, v)| (id.clone(), classify_vehicle(v, &thresholds)))
        .collect();

    let mut manifest = RunManifest::new(
        "augment",
        0,
        serde_json::json!({
            "lev_threshold": thresholds.lev_g_per_km,
            "hev_threshold": thresholds.hev_l_per_100km,
        }),
    );
    files.add_to_manifest(&mut manifest, &args.data.config)?;
    manifest.window = window_of(ds);
    manifest.dataset = dataset_stats(&loaded.load);
    write_trips_csv(
        &out,
        ds,
        &manifest,
        Some(&TripCsvExtras {
            classes: &classes,
            sources: &loaded.load.sources,
        }),
    )?;

    let count_class = |c: EmissionClass| classes.values().filter(|&&x| x == c).count();
    let count_source = |s: EmissionSource| {
        loaded
            .load
            .sources
            .values()
            .filter(|&&x| x == s)
            .count()
    };
    println!(
        "augment: {} trips, {} vehicles ({} lev, {} hev, {} standard; \
         emission figures: {} column, {} table, {} median, {} ev-default) -> {}",
        ds.trips().len(),
        classes.len(),
        count_class(EmissionClass::Lev),
        count_class(EmissionClass::Hev),
        count_class(EmissionClass::Standard),
        count_source(EmissionSource::Column),
        count_source(EmissionSource::Table),
        count_source(EmissionSource::Median),
        count_source(EmissionSource::EvDefault),
        out.display()
    );
    Ok(())
}
