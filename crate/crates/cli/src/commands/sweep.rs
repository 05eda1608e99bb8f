//! The sweep subcommand: the threshold policy over a grid of phi values
//! and EV adoption levels.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use greenride_core::dataset::{inject_evs, Dataset};
use greenride_core::metrics::{equity, summarize, RatioMethod};
use greenride_core::routing::RouteTriple;
use greenride_core::sim::{build_route_table, run, Policy, SimConfig};

use crate::cli::SweepArgs;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::{write_sweep_csv, SweepRow};
use crate::settings::{require_non_negative, require_unit_fraction, Resolver};

use super::{
    dataset_stats, ensure_dir, load_file_config, report_loaded, resolve_sim, usage, window_of,
    DataFiles,
};

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.data.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let settings = resolve_sim(&args.sim, &r)?;
    let out_dir = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;

    let phis = r
        .list_flag(args.phis.clone(), "phis")?
        .ok_or_else(|| usage("--phis is required (comma-separated threshold values)"))?;
    for &p in &phis {
        require_non_negative("phis", p)?;
    }
    let fractions = r
        .list_flag(args.ev_fractions.clone(), "ev-fractions")?
        .unwrap_or_else(|| vec![0.0]);
    for &f in &fractions {
        require_unit_fraction("ev-fractions", f)?;
    }
    let jobs = r.flag(args.jobs, "jobs", default_jobs())?;
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }

    let files = DataFiles::resolve(
        args.data.trips.clone(),
        args.data.emissions.clone(),
        args.data.map.clone(),
        args.data.routes.clone(),
        &r,
    )?;
    let loaded = files.load()?;
    report_loaded(&loaded);
    let base = &loaded.load.dataset;

    // The route table depends on the trips and the seed, not the fleet or
    // the policy, so one table serves every cell. Supplied routes win.
    let route_map: BTreeMap<String, RouteTriple> = {
        let supplied = match &files.routes {
            Some(p) => {
                let rl = crate::ingest::load_route_triples(p)?;
                super::report_rejects("routes", &rl.rejected);
                rl.routes
            }
            None => BTreeMap::new(),
        };
        let (table, _) = build_route_table(base, &settings.cfg, Some(&supplied))?;
        base.trips()
            .iter()
            .zip(table)
            .map(|(t, triple)| (t.ride_id.clone(), triple))
            .collect()
    };

    // One fleet per fraction; trips are shared.
    let mut fleets: Vec<(f64, Dataset, f64)> = Vec::with_capacity(fractions.len());
    for &f in &fractions {
        let ds = if f > 0.0 {
            inject_evs(base, f, settings.seed, &settings.cfg.thresholds)?
        } else {
            base.clone()
        };
        let share = ds.lev_share(&settings.cfg.thresholds);
        fleets.push((f, ds, share));
    }

    let cells: Vec<(usize, usize)> = (0..fractions.len())
        .flat_map(|fi| (0..phis.len()).map(move |pi| (fi, pi)))
        .collect();
    let results: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; cells.len()]);
    let first_error: Mutex<Option<CliError>> = Mutex::new(None);
    let next = AtomicUsize::new(0);

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(cells.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= cells.len() || first_error.lock().unwrap().is_some() {
                    break;
                }
                let (fi, pi) = cells[i];
                let (_, ds, share) = &fleets[fi];
                match run_cell(ds, *share, &settings.cfg, phis[pi], &route_map, settings.ratio_method) {
                    Ok(row) => results.lock().unwrap()[i] = Some(row),
                    Err(e) => {
                        let mut slot = first_error.lock().unwrap();
                        if slot.is_none() {
                            *slot = Some(e);
                        }
                        break;
                    }
                }
            });
        }
    });

    if let Some(e) = first_error.into_inner().unwrap() {
        return Err(e);
    }
    let rows: Vec<SweepRow> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect();

    let mut manifest = RunManifest::new("sweep", settings.seed, sweep_config_json(&settings, &phis, &fractions, jobs));
    files.add_to_manifest(&mut manifest, &args.data.config)?;
    manifest.window = window_of(base);
    manifest.dataset = dataset_stats(&loaded.load);

    ensure_dir(&out_dir)?;
    write_sweep_csv(&out_dir.join("sweep.csv"), &rows, &manifest)?;
    println!(
        "sweep: {} rows ({} phi values x {} fleets) -> {}",
        rows.len(),
        phis.len(),
        fractions.len(),
        out_dir.display()
    );
    Ok(())
}

fn sweep_config_json(
    settings: &super::SimSettings,
    phis: &[f64],
    fractions: &[f64],
    jobs: usize,
) -> serde_json::Value {
    serde_json::json!({
        "sim": settings.cfg,
        "phis": phis,
        "ev_fractions": fractions,
        "ratio_method": settings.ratio_method,
        "jobs": jobs,
    })
}

/// Runs one `(fleet, phi)` cell.
fn run_cell(
    ds: &Dataset,
    lev_share: f64,
    cfg: &SimConfig,
    phi: f64,
    routes: &BTreeMap<String, RouteTriple>,
    method: RatioMethod,
) -> Result<SweepRow> {
    let cell_cfg = SimConfig {
        policy: Policy::Tora { phi },
        ..cfg.clone()
    };
    let result = run(ds, &cell_cfg, Some(routes))?;
    let s = summarize(&result);
    let eq = equity(&result, method);
    Ok(SweepRow {
        phi,
        lev_fraction: lev_share,
        deadhead_g: s.deadhead_g,
        total_g: s.total_g,
        mean_wait_s: s.mean_wait_s,
        max_wait_s: s.max_wait_s,
        lev_ride_frac: eq.lev.ride_fraction,
        hev_ride_frac: eq.hev.ride_fraction,
        lev_dh_trip: eq.lev.deadhead_to_trip,
        hev_dh_trip: eq.hev.deadhead_to_trip,
    })
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
