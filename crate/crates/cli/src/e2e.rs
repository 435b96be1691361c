//! End-to-end runs of the command surface, in process: `main_with` for exit
//! statuses, `run` for error text, explicit rayon pools for thread counts.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use fdmix::RawConfig;

use crate::{exit, load_config, main_with, Cli, SweepPlan};

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn golden(name: &str) -> String {
    fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

macro_rules! argv {
    ($($a:expr),* $(,)?) => {
        vec![OsString::from("fdmix"), $(OsString::from(&$a)),*]
    };
}

fn on_threads(threads: usize, argv: Vec<OsString>) -> i32 {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| main_with(argv))
}

/// Error text of a run that parses but fails.
fn error_text(argv: Vec<OsString>) -> String {
    let cli = Cli::try_parse_from(argv).unwrap();
    crate::commands::run(&cli).unwrap_err().to_string()
}

fn first_line(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    format!("{}\n", text.lines().next().unwrap())
}

/// A plan over a small grid that runs in seconds.
fn small_plan(dir: &Path, engines: &str, extra: &str) -> PathBuf {
    let plan = dir.join("small.plan");
    fs::write(
        &plan,
        format!(
            "config = {:?}\nout = {:?}\nseed = 5\nsamples = 300\nengines = [{engines}]\nrho_f = [0.0, 1.0]\n{extra}\n\
             [[antenna]]\nlabel = \"narrow\"\ntheta_b_deg = 35.0\ng_b_dbi = 15.0\n\n\
             [[antenna]]\nlabel = \"wide\"\ntheta_b_deg = 90.0\ng_b_dbi = 7.0\n",
            examples().join("table1.cfg"),
            dir.join("sweep.csv"),
        ),
    )
    .unwrap();
    plan
}

#[test]
fn evaluate_header_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ccdf.csv");
    let cfg = examples().join("table1.cfg");
    let argv = argv![
        "evaluate",
        "--engine",
        "all",
        "--samples",
        "50",
        "--y-grid",
        "-8,0",
        "--config",
        cfg,
        "--out",
        out
    ];
    assert_eq!(main_with(argv), exit::OK);
    assert_eq!(first_line(&out), golden("evaluate_header.csv"));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 4 * 2);
}

#[test]
fn analytic_evaluate_needs_no_seed_and_omits_mc_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ccdf.csv");
    let cfg = examples().join("table1.cfg");
    assert_eq!(
        main_with(argv![
            "evaluate", "--mode", "fd-dl", "--y-grid", "-8", "--config", cfg, "--out", out
        ]),
        exit::OK
    );
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "mode,y_db,analytic,analytic_error");
    let v: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 0.9306).abs() < 1e-3, "{v}");
}

#[test]
fn sweep_and_curve_headers_are_stable() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path(), "\"mc-model\"", "");
    assert_eq!(main_with(argv!["sweep", "--plan", plan]), exit::OK);
    let csv = dir.path().join("sweep.csv");
    assert_eq!(first_line(&csv), golden("sweep_header.csv"));
    assert_eq!(
        first_line(&dir.path().join("sweep_curves.csv")),
        golden("curves_header.csv")
    );
    // Two antennas × two mixes × one engine.
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.lines().skip(1).all(|l| l.contains(",ok,")));
}

#[test]
fn validate_header_is_stable_and_negative_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.csv");
    let (cfg, mc) = (examples().join("si60.cfg"), examples().join("si60_perturbed.cfg"));
    let argv = argv![
        "validate",
        "--samples",
        "20000",
        "--seed",
        "3",
        "--config",
        cfg,
        "--mc-config",
        mc,
        "--out",
        out
    ];
    assert_eq!(main_with(argv), exit::VALIDATION_FAILED);
    assert_eq!(first_line(&out), golden("validate_header.csv"));
    let report = fs::read_to_string(&out).unwrap();
    assert!(report.lines().any(|l| l.starts_with("fd-ul,") && l.ends_with(",false")));
    assert!(report.lines().any(|l| l.starts_with("hd-dl,") && l.ends_with(",true")));
}

#[test]
fn sweep_output_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let plan = small_plan(dir.path(), "\"mc-model\", \"mc-voronoi\"", "");
    let mut files = Vec::new();
    for threads in [1, 4] {
        let out = dir.path().join(format!("sweep-{threads}.csv"));
        assert_eq!(
            on_threads(threads, argv!["sweep", "--plan", plan, "--out", out]),
            exit::OK
        );
        files.push((
            fs::read(&out).unwrap(),
            fs::read(dir.path().join(format!("sweep-{threads}_curves.csv"))).unwrap(),
        ));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn evaluate_output_is_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = examples().join("table1_90deg.cfg");
    let mut outs = Vec::new();
    for threads in [1, 3, 3] {
        let out = dir.path().join("e.csv");
        let argv = argv![
            "evaluate",
            "--engine",
            "all",
            "--samples",
            "500",
            "--seed",
            "9",
            "--y-grid",
            "-20:40:5",
            "--config",
            cfg,
            "--out",
            out
        ];
        assert_eq!(on_threads(threads, argv), exit::OK);
        outs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[1], outs[2]);
}

#[test]
fn zero_samples_and_empty_grids_are_usage_errors() {
    let cfg = examples().join("table1.cfg");
    let cases: [&[&str]; 5] = [
        &["validate", "--samples", "0"],
        &["evaluate", "--engine", "mc-model", "--samples", "0"],
        &["evaluate", "--y-grid", ""],
        &["evaluate", "--y-grid", "10:0:1"],
        &["evaluate", "--engine", "montecarlo"],
    ];
    for case in cases {
        let mut argv = argv![];
        argv.extend(case.iter().map(OsString::from));
        argv.extend(argv!["--config", cfg].into_iter().skip(1));
        assert_eq!(main_with(argv), exit::USAGE, "{case:?}");
    }
    assert_eq!(main_with(argv!["frobnicate"]), exit::USAGE);
}

#[test]
fn bad_config_reports_the_key_path() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(examples().join("table1.cfg")).unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, text.replace("g_s_dbi = 0.0", "g_s_dbi = 20.0")).unwrap();
    assert_eq!(main_with(argv!["evaluate", "--config", bad]), exit::USAGE);
    let err = error_text(argv!["evaluate", "--config", bad]);
    assert!(err.contains("antenna.g_s_dbi") && err.contains("bad.cfg"), "{err}");

    fs::write(&bad, text.replace("[model]", "[model]\nbeta = 2.0")).unwrap();
    assert_eq!(main_with(argv!["evaluate", "--config", bad]), exit::USAGE);
    let err = error_text(argv!["evaluate", "--config", bad]);
    assert!(err.contains("beta"), "{err}");
}

#[test]
fn failed_rows_are_flagged_and_the_sweep_continues() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(examples().join("table1.cfg")).unwrap();
    let cfg = dir.path().join("nu0.cfg");
    // ν = 0 leaves uplink serving distances undefined, so the uplink fails.
    fs::write(&cfg, text.replace("nu = 1.25", "nu = 0.0")).unwrap();
    let plan = dir.path().join("p.plan");
    fs::write(
        &plan,
        format!(
            "config = {cfg:?}\nout = {:?}\nengines = [\"mc-model\"]\nsamples = 50\nrho_f = [0.5]\nthd_rho_d = [1.0]\n",
            dir.path().join("s.csv")
        ),
    )
    .unwrap();
    assert_eq!(main_with(argv!["sweep", "--plan", plan]), exit::USAGE);
    let rows: Vec<String> = fs::read_to_string(dir.path().join("s.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(String::from)
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].contains(",failed: "));
    // The downlink-only baseline has no uplink to fail on.
    assert!(rows[1].contains(",ok,"));
}

#[test]
fn plan_grid_counts() {
    let plan = SweepPlan::load(&examples().join("tradeoff.plan")).unwrap();
    let (raw, _) = load_config(&plan.config).unwrap();
    let points = plan.points(&raw).unwrap();
    assert_eq!(points.iter().filter(|p| p.series.label() == "mixed").count(), 12);
    assert_eq!(points.len(), 12 + 2 * 5);
    let mut empty = plan.clone();
    empty.rho_f.clear();
    assert!(empty.points(&raw).is_err());
    let mut bad = plan;
    bad.rho_f.push(1.5);
    assert!(bad.points(&raw).is_err());
}

#[test]
fn shipped_config_round_trips() {
    let (raw, _) = load_config(&examples().join("table1.cfg")).unwrap();
    assert_eq!(raw, RawConfig::table1());
    let canonical = raw.to_toml();
    let again = RawConfig::from_toml(&canonical).unwrap();
    assert_eq!(again.to_toml(), canonical);
}
