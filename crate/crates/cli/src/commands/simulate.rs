//! The simulate subcommand: one policy, one dataset, two reports.

use serde::Serialize;

use greenride_core::dataset::inject_evs;
use greenride_core::metrics::{equity, summarize, EquityReport, Summary};
use greenride_core::sim::run;

use crate::cli::SimulateArgs;
use crate::error::Result;
use crate::ingest::load_route_triples;
use crate::manifest::RunManifest;
use crate::output::{write_json, write_rides_csv};
use crate::settings::Resolver;

use super::{
    dataset_stats, ensure_dir, load_file_config, report_loaded, report_rejects, resolve_sim,
    usage, window_of, DataFiles,
};

/// Run-level diagnostics included in summary.json.
#[derive(Debug, Clone, Copy, Serialize)]
struct Diagnostics {
    drivers_placed: usize,
    drivers_unplaced: usize,
    synthesized_routes: usize,
    replay_wait_mae_s: Option<f64>,
    /// LEV share of the fleet the run actually used (after EV injection).
    fleet_lev_share: f64,
}

#[derive(Serialize)]
struct SummaryDoc<'a> {
    manifest: &'a RunManifest,
    summary: &'a Summary,
    equity: &'a EquityReport,
    diagnostics: Diagnostics,
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.data.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let settings = resolve_sim(&args.sim, &r)?;
    let out_dir = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;
    let files = DataFiles::resolve(
        args.data.trips.clone(),
        args.data.emissions.clone(),
        args.data.map.clone(),
        args.data.routes.clone(),
        &r,
    )?;

    let loaded = files.load()?;
    report_loaded(&loaded);
    let routes = match &files.routes {
        Some(p) => {
            let rl = load_route_triples(p)?;
            report_rejects("routes", &rl.rejected);
            Some(rl.routes)
        }
        None => None,
    };

    let mut ds = loaded.load.dataset.clone();
    if settings.ev_fraction > 0.0 {
        ds = inject_evs(&ds, settings.ev_fraction, settings.seed, &settings.cfg.thresholds)?;
    }

    let result = run(&ds, &settings.cfg, routes.as_ref())?;
    let summary = summarize(&result);
    let equity_report = equity(&result, settings.ratio_method);

    let mut manifest = RunManifest::new("simulate", settings.seed, settings.config_json());
    files.add_to_manifest(&mut manifest, &args.data.config)?;
    manifest.window = window_of(&ds);
    manifest.dataset = dataset_stats(&loaded.load);

    let doc = SummaryDoc {
        manifest: &manifest,
        summary: &summary,
        equity: &equity_report,
        diagnostics: Diagnostics {
            drivers_placed: result.drivers_placed,
            drivers_unplaced: result.drivers_unplaced,
            synthesized_routes: result.synthesized_routes,
            replay_wait_mae_s: result.replay_wait_mae_s,
            fleet_lev_share: ds.lev_share(&settings.cfg.thresholds),
        },
    };
    ensure_dir(&out_dir)?;
    write_json(&out_dir.join("summary.json"), &doc)?;
    write_rides_csv(
        &out_dir.join("rides.csv"),
        &result,
        settings.phi_column,
        &manifest,
    )?;

    println!(
        "simulate: {} served, {} dropped, deadhead {:.1} g, total {:.1} g, \
         mean wait {:.1} s -> {}",
        summary.served,
        summary.dropped,
        summary.deadhead_g,
        summary.total_g,
        summary.mean_wait_s,
        out_dir.display()
    );
    Ok(())
}
