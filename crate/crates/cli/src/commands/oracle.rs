//! The oracle subcommand: checks the offline frontier search against
//! exhaustive optima and the greedy baseline on small random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use greenride_core::assign::{
    brute_force_optimal, era_assign, erap_objective, nearest_sequence, EraConfig,
    OfflineDriver, OfflineInstance, OfflineRequest, BRUTE_FORCE_GUARD,
};
use greenride_core::geo::{offset_km, GeoPoint};

use crate::cli::OracleArgs;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::write_json;
use crate::settings::{require_detour, Resolver};

use super::{ensure_dir, load_file_config, usage};

/// One random instance and what the three solvers did with it.
#[derive(Debug, Clone, Copy, Serialize)]
struct InstanceReport {
    index: usize,
    requests: usize,
    drivers: usize,
    era_g: f64,
    optimal_g: f64,
    nearest_g: f64,
    /// How far the frontier search landed above the optimum, percent.
    gap_pct: f64,
    frontier_capped: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
struct OracleSummary {
    instances: usize,
    /// Instances where the frontier search reported a better objective
    /// than the exhaustive optimum. Always zero unless something is wrong.
    inversions: usize,
    mean_gap_pct: f64,
    max_gap_pct: f64,
    /// Instances where the frontier search was at least as good as the
    /// greedy nearest baseline.
    era_le_nearest: usize,
}

#[derive(Serialize)]
struct OracleDoc<'a> {
    manifest: &'a RunManifest,
    summary: OracleSummary,
    instances: &'a [InstanceReport],
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let file_cfg = load_file_config(&args.config)?;
    let r = Resolver::new(file_cfg.as_ref());
    let instances = r.flag(args.instances, "instances", 200usize)?;
    let min_requests = r.flag(args.min_requests, "min-requests", 3usize)?;
    let max_requests = r.flag(args.max_requests, "max-requests", 6usize)?;
    let min_drivers = r.flag(args.min_drivers, "min-drivers", 2usize)?;
    let max_drivers = r.flag(args.max_drivers, "max-drivers", 3usize)?;
    let detour = require_detour("detour", r.flag(args.detour, "detour", 1.3)?)?;
    let seed = r.flag(args.seed, "seed", 0u64)?;
    let out_dir = r
        .path(args.out.clone(), "out")
        .ok_or_else(|| usage("--out is required"))?;

    if min_requests == 0 || min_drivers == 0 {
        return Err(usage("instance sizes must be at least 1"));
    }
    if min_requests > max_requests || min_drivers > max_drivers {
        return Err(usage("min sizes must not exceed max sizes"));
    }
    if (max_drivers as f64).powi(max_requests as i32) > BRUTE_FORCE_GUARD {
        return Err(usage(
            "instance sizes too large for the exhaustive optimum; shrink \
             --max-requests or --max-drivers",
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::with_capacity(instances);
    for index in 0..instances {
        let n = rng.random_range(min_requests..=max_requests);
        let m = rng.random_range(min_drivers..=max_drivers);
        let inst = random_instance(&mut rng, n, m, detour)?;

        let era = era_assign(&inst, &EraConfig::default())?;
        let era_g = erap_objective(&era.plan, n)?;
        let optimal_g = erap_objective(&brute_force_optimal(&inst)?, n)?;
        let nearest_g = erap_objective(&nearest_sequence(&inst)?, n)?;
        reports.push(InstanceReport {
            index,
            requests: n,
            drivers: m,
            era_g,
            optimal_g,
            nearest_g,
            gap_pct: (era_g - optimal_g) / optimal_g * 100.0,
            frontier_capped: era.frontier_capped,
        });
    }

    let inversions = reports.iter().filter(|r| r.era_g < r.optimal_g).count();
    let era_le_nearest = reports.iter().filter(|r| r.era_g <= r.nearest_g).count();
    let mean_gap_pct = if reports.is_empty() {
        0.0
    } else {
        reports.iter().map(|r| r.gap_pct).sum::<f64>() / reports.len() as f64
    };
    let max_gap_pct = reports.iter().map(|r| r.gap_pct).fold(0.0, f64::max);
    let summary = OracleSummary {
        instances,
        inversions,
        mean_gap_pct,
        max_gap_pct,
        era_le_nearest,
    };

    let mut manifest = RunManifest::new(
        "oracle",
        seed,
        serde_json::json!({
            "instances": instances,
            "min_requests": min_requests,
            "max_requests": max_requests,
            "min_drivers": min_drivers,
            "max_drivers": max_drivers,
            "detour": detour,
        }),
    );
    if let Some(p) = &args.config {
        manifest.add_input("config", p)?;
    }

    ensure_dir(&out_dir)?;
    write_json(
        &out_dir.join("oracle.json"),
        &OracleDoc {
            manifest: &manifest,
            summary,
            instances: &reports,
        },
    )?;
    println!(
        "oracle: {} instances, {} inversions, mean gap {:.4}%, max gap {:.4}%, \
         era<=nearest in {}/{} -> {}",
        instances,
        inversions,
        mean_gap_pct,
        max_gap_pct,
        era_le_nearest,
        instances,
        out_dir.display()
    );
    if inversions > 0 {
        return Err(CliError::Data(format!(
            "{inversions} instances where the frontier search beat the \
             exhaustive optimum; this indicates an objective mismatch"
        )));
    }
    Ok(())
}

/// Uniform pickups, dropoffs and driver starts in a 20 km box, with unit
/// emissions spanning the low- to high-emission range.
fn random_instance(
    rng: &mut ChaCha8Rng,
    requests: usize,
    drivers: usize,
    detour: f64,
) -> Result<OfflineInstance> {
    let anchor = GeoPoint {
        lat: 30.2672,
        lon: -97.7431,
    };
    let point = |rng: &mut ChaCha8Rng| -> Result<GeoPoint> {
        Ok(offset_km(
            anchor,
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        )?)
    };
    let mut reqs = Vec::with_capacity(requests);
    for _ in 0..requests {
        reqs.push(OfflineRequest {
            pickup: point(rng)?,
            dropoff: point(rng)?,
            trip_emission_km: rng.random_range(0.5..8.0),
        });
    }
    let mut drvs = Vec::with_capacity(drivers);
    for _ in 0..drivers {
        drvs.push(OfflineDriver {
            start: point(rng)?,
            unit_emission_g_per_km: rng.random_range(60.0..340.0),
        });
    }
    Ok(OfflineInstance::new(reqs, drvs, detour)?)
}
