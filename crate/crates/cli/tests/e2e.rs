//! End-to-end tests that drive the compiled `greenride` binary the way a
//! user would: real argv, real files, checking exit codes and outputs.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_greenride");

fn greenride(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = greenride(args);
    assert!(
        out.status.success(),
        "command failed: {args:?}\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exited normally")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Generate a small synthetic dataset and return its path.
fn synth_trips(dir: &Path, requests: usize, seed: u64) -> PathBuf {
    let path = dir.join(format!("trips-{requests}-{seed}.csv"));
    run_ok(&[
        "gen-synth",
        "--drivers",
        "12",
        "--requests",
        &requests.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    path
}

fn read_json(path: &Path) -> Value {
    let text = fs::read_to_string(path).unwrap_or_else(|e| panic!("read {path:?}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parse {path:?}: {e}"))
}

/// Lines of a report CSV after the manifest comment and the header.
fn data_lines(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let first = lines.next().expect("manifest line");
    assert!(first.starts_with("# manifest="), "missing manifest comment");
    lines.next().expect("header line");
    lines.map(str::to_owned).collect()
}

#[test]
fn gen_synth_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = synth_trips(dir.path(), 40, 7);
    let b = dir.path().join("again.csv");
    run_ok(&[
        "gen-synth",
        "--drivers",
        "12",
        "--requests",
        "40",
        "--seed",
        "7",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = synth_trips(dir.path(), 40, 8);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn simulate_writes_summary_and_rides() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 80, 1);
    let out = dir.path().join("run");
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--policy",
        "tora",
        "--phi",
        "1",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);

    let doc = read_json(&out.join("summary.json"));
    assert_eq!(doc["manifest"]["tool"], "greenride");
    assert_eq!(doc["manifest"]["seed"], 7);
    assert_eq!(doc["manifest"]["command"], "simulate");
    let served = doc["summary"]["served"].as_u64().unwrap();
    let dropped = doc["summary"]["dropped"].as_u64().unwrap();
    assert_eq!(served + dropped, 80);
    assert!(doc["summary"]["total_g"].as_f64().unwrap() > 0.0);
    assert!(doc["equity"]["lev"]["rides"].is_number());
    assert!(doc["diagnostics"]["drivers_placed"].as_u64().unwrap() > 0);

    let rides = data_lines(&out.join("rides.csv"));
    assert_eq!(rides.len(), 80);
    // Served rows carry the phi used for the decision.
    assert!(rides[0].contains(",1,") || rides[0].ends_with(",true"));
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 60, 2);
    let args = |out: &Path| {
        vec![
            "simulate".to_string(),
            "--trips".to_string(),
            trips.to_str().unwrap().to_string(),
            "--ev-fraction".to_string(),
            "0.2".to_string(),
            "--seed".to_string(),
            "7".to_string(),
            "--out".to_string(),
            out.to_str().unwrap().to_string(),
        ]
    };
    let out1 = dir.path().join("r1");
    let out2 = dir.path().join("r2");
    for out in [&out1, &out2] {
        let argv: Vec<String> = args(out);
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        run_ok(&argv);
    }
    assert_eq!(
        fs::read(out1.join("summary.json")).unwrap(),
        fs::read(out2.join("summary.json")).unwrap()
    );
    assert_eq!(
        fs::read(out1.join("rides.csv")).unwrap(),
        fs::read(out2.join("rides.csv")).unwrap()
    );
}

#[test]
fn negative_phi_is_a_usage_error() {
    let out = greenride(&["simulate", "--trips", "x.csv", "--out", "y", "--phi", "-1"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("phi"));
}

#[test]
fn missing_trips_flag_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = greenride(&["simulate", "--out", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("trips"));
}

#[test]
fn nonexistent_trips_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let out = greenride(&[
        "simulate",
        "--trips",
        dir.path().join("absent.csv").to_str().unwrap(),
        "--out",
        dir.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn sweep_writes_one_row_per_grid_cell() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 60, 3);
    let out = dir.path().join("sweep");
    run_ok(&[
        "sweep",
        "--trips",
        trips.to_str().unwrap(),
        "--phis",
        "0.1,1,7.5",
        "--ev-fractions",
        "0,0.05,0.10,0.20",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = data_lines(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 12);

    // Same grid with the phi list permuted: identical rows, just reordered.
    let out2 = dir.path().join("sweep2");
    run_ok(&[
        "sweep",
        "--trips",
        trips.to_str().unwrap(),
        "--phis",
        "7.5,0.1,1",
        "--ev-fractions",
        "0,0.05,0.10,0.20",
        "--seed",
        "5",
        "--out",
        out2.to_str().unwrap(),
    ]);
    let mut sorted = rows.clone();
    sorted.sort();
    let mut sorted2 = data_lines(&out2.join("sweep.csv"));
    sorted2.sort();
    assert_eq!(sorted, sorted2);
}

#[test]
fn sweep_without_phis_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 20, 4);
    let out = greenride(&[
        "sweep",
        "--trips",
        trips.to_str().unwrap(),
        "--out",
        dir.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_of(&out).contains("phis"));

    let empty = greenride(&[
        "sweep",
        "--trips",
        trips.to_str().unwrap(),
        "--phis",
        "",
        "--out",
        dir.path().join("s2").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&empty), 2);
}

#[test]
fn oracle_reports_zero_inversions() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("oracle");
    let run = run_ok(&[
        "oracle",
        "--instances",
        "25",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout_of(&run).contains("inversions"));

    let doc = read_json(&out.join("oracle.json"));
    assert_eq!(doc["summary"]["instances"], 25);
    assert_eq!(doc["summary"]["inversions"], 0);
    let instances = doc["instances"].as_array().unwrap();
    assert_eq!(instances.len(), 25);
    for inst in instances {
        assert!(inst["gap_pct"].as_f64().unwrap() >= 0.0);
        assert!(inst["era_g"].as_f64().unwrap() >= inst["optimal_g"].as_f64().unwrap() - 1e-9);
    }
}

#[test]
fn oracle_single_request_instances_are_exact() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("oracle");
    run_ok(&[
        "oracle",
        "--instances",
        "6",
        "--min-requests",
        "1",
        "--max-requests",
        "1",
        "--min-drivers",
        "2",
        "--max-drivers",
        "2",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    let doc = read_json(&out.join("oracle.json"));
    for inst in doc["instances"].as_array().unwrap() {
        assert_eq!(inst["gap_pct"].as_f64().unwrap(), 0.0);
    }
    assert_eq!(doc["summary"]["max_gap_pct"].as_f64().unwrap(), 0.0);
}

#[test]
fn ev_injection_pipeline_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 50, 6);

    let injected = dir.path().join("injected.csv");
    let inject = run_ok(&[
        "inject-ev",
        "--trips",
        trips.to_str().unwrap(),
        "--ev-fraction",
        "0.5",
        "--seed",
        "9",
        "--out",
        injected.to_str().unwrap(),
    ]);
    assert!(stdout_of(&inject).contains("converted"));

    let augmented = dir.path().join("augmented.csv");
    run_ok(&[
        "augment",
        "--trips",
        injected.to_str().unwrap(),
        "--out",
        augmented.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(&augmented).unwrap();
    let header = text.lines().nth(1).unwrap();
    assert!(header.ends_with("emission_class,emission_source"));
    assert!(text.contains(",lev,"));

    // The annotated file still loads as a plain trips CSV.
    let out = dir.path().join("run");
    run_ok(&[
        "simulate",
        "--trips",
        augmented.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let doc = read_json(&out.join("summary.json"));
    let served = doc["summary"]["served"].as_u64().unwrap();
    let dropped = doc["summary"]["dropped"].as_u64().unwrap();
    assert_eq!(served + dropped, 50);
}

#[test]
fn routes_generate_then_validate() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 30, 5);
    let routes = dir.path().join("routes.csv");
    run_ok(&[
        "routes-gen",
        "--trips",
        trips.to_str().unwrap(),
        "--seed",
        "2",
        "--out",
        routes.to_str().unwrap(),
    ]);
    assert_eq!(data_lines(&routes).len(), 30);

    let check = run_ok(&["routes-check", "--routes", routes.to_str().unwrap()]);
    assert!(stdout_of(&check).contains("30 accepted, 0 rejected"));

    // Append a row whose fastest option is slower than its shortest.
    let mut file = fs::OpenOptions::new().append(true).open(&routes).unwrap();
    writeln!(file, "zzz,5,450,5,5,500,5,5,460,5.5").unwrap();
    drop(file);
    let bad = greenride(&["routes-check", "--routes", routes.to_str().unwrap()]);
    assert_eq!(exit_code(&bad), 1);
    assert!(stdout_of(&bad).contains("reject"));
    assert!(stdout_of(&bad).contains("30 accepted, 1 rejected"));
}

#[test]
fn simulate_accepts_pregenerated_routes() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 40, 8);
    let routes = dir.path().join("routes.csv");
    run_ok(&[
        "routes-gen",
        "--trips",
        trips.to_str().unwrap(),
        "--seed",
        "0",
        "--out",
        routes.to_str().unwrap(),
    ]);

    let with = dir.path().join("with");
    let without = dir.path().join("without");
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--routes",
        routes.to_str().unwrap(),
        "--seed",
        "0",
        "--out",
        with.to_str().unwrap(),
    ]);
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--seed",
        "0",
        "--out",
        without.to_str().unwrap(),
    ]);

    // Route synthesis is seeded identically, so supplying the file changes
    // nothing about the outcome, only the manifest inputs.
    let a = read_json(&with.join("summary.json"));
    let b = read_json(&without.join("summary.json"));
    assert_eq!(a["summary"], b["summary"]);
    assert_eq!(a["equity"], b["equity"]);
    assert_eq!(
        a["diagnostics"]["synthesized_routes"],
        serde_json::json!(0)
    );
    assert!(b["diagnostics"]["synthesized_routes"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_fills_flags_and_cli_wins() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 30, 9);
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "phi=2.5\nseed=4\n# comment line\n").unwrap();

    let out1 = dir.path().join("r1");
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out1.to_str().unwrap(),
    ]);
    let doc = read_json(&out1.join("summary.json"));
    assert_eq!(doc["manifest"]["seed"], 4);
    assert_eq!(doc["manifest"]["config"]["sim"]["policy"]["tora"]["phi"], 2.5);

    let out2 = dir.path().join("r2");
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--phi",
        "9",
        "--out",
        out2.to_str().unwrap(),
    ]);
    let doc2 = read_json(&out2.join("summary.json"));
    assert_eq!(doc2["manifest"]["config"]["sim"]["policy"]["tora"]["phi"], 9.0);

    let unknown = dir.path().join("bad.conf");
    fs::write(&unknown, "phy=2.5\n").unwrap();
    let bad = greenride(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--config",
        unknown.to_str().unwrap(),
        "--out",
        dir.path().join("r3").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&bad), 2);
    assert!(stderr_of(&bad).contains("phy"));
}

#[test]
fn column_map_renames_source_headers() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 20, 10);

    // Rewrite the header to foreign column names.
    let text = fs::read_to_string(&trips).unwrap();
    let renamed_text = text
        .replacen("ride_id", "id", 1)
        .replacen("driver_id", "driver", 1);
    let renamed = dir.path().join("renamed.csv");
    fs::write(&renamed, renamed_text).unwrap();

    // Without a map the required columns are missing.
    let out = greenride(&[
        "augment",
        "--trips",
        renamed.to_str().unwrap(),
        "--out",
        dir.path().join("a.csv").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);

    let map = dir.path().join("cols.map");
    fs::write(&map, "ride_id=id\ndriver_id=driver\n").unwrap();
    run_ok(&[
        "augment",
        "--trips",
        renamed.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
        "--out",
        dir.path().join("b.csv").to_str().unwrap(),
    ]);
}

#[test]
fn replay_policy_follows_recorded_drivers() {
    let dir = TempDir::new().unwrap();
    let trips = synth_trips(dir.path(), 40, 12);
    let out = dir.path().join("run");
    run_ok(&[
        "simulate",
        "--trips",
        trips.to_str().unwrap(),
        "--policy",
        "replay",
        "--out",
        out.to_str().unwrap(),
    ]);
    let doc = read_json(&out.join("summary.json"));
    let served = doc["summary"]["served"].as_u64().unwrap();
    let dropped = doc["summary"]["dropped"].as_u64().unwrap();
    assert_eq!(served + dropped, 40);
    assert!(served > 0);
}
