//! Route tooling subcommands: routes-gen and routes-check.

use greenride_core::routing::RouteTriple;
use greenride_core::sim::{build_route_table, SimConfig};

use crate::cli::{RoutesCheckArgs, RoutesGenArgs};
use crate::error::{CliError, Result};
use crate::ingest::load_route_triples;
use crate::manifest::RunManifest;
use crate::output::write_routes_csv;
use crate::settings::{require_detour, require_positive, Resolver};

use super::{dataset_stats, load_file_config, report_loaded, usage, window_of, DataFiles};

pub fn cmd_routes_gen(args: &RoutesGenArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.data.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let trip_speed = require_positive(
        "trip-speed-kmh",
        r.flag(args.trip_speed_kmh, "trip-speed-kmh", 40.0)?,
    )?;
    let detour = require_detour("detour", r.flag(args.detour, "detour", 1.3)?)?;
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
    let ds = &loaded.load.dataset;
    let cfg = SimConfig {
        trip_speed_kmh: trip_speed,
        detour_factor: detour,
        seed,
        ..SimConfig::default()
    };
    let (table, _) = build_route_table(ds, &cfg, None)?;
    let pairs: Vec<(String, RouteTriple)> = ds
        .trips()
        .iter()
        .zip(table)
        .map(|(t, triple)| (t.ride_id.clone(), triple))
        .collect();

    let mut manifest = RunManifest::new(
        "routes-gen",
        seed,
        serde_json::json!({
            "trip_speed_kmh": trip_speed,
            "detour": detour,
            "route_synth": cfg.route_synth,
        }),
    );
    files.add_to_manifest(&mut manifest, &args.data.config)?;
    manifest.window = window_of(ds);
    manifest.dataset = dataset_stats(&loaded.load);
    write_routes_csv(&out, &pairs, &manifest)?;
    println!("routes-gen: {} triples -> {}", pairs.len(), out.display());
    Ok(())
}

pub fn cmd_routes_check(args: &RoutesCheckArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let path = r
        .path(args.routes.clone(), "routes")
        .ok_or_else(|| usage("--routes is required"))?;
    let load = load_route_triples(&path)?;
    for issue in &load.rejected {
        println!("reject {issue}");
    }
    println!(
        "routes: {} accepted, {} rejected",
        load.accepted,
        load.rejected.len()
    );
    if load.rejected.is_empty() {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "{} invalid route rows in {}",
            load.rejected.len(),
            path.display()
        )))
    }
}
