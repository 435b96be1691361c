use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fdmix::model::db_to_linear;
use fdmix::{Analytic, AntennaPattern, Direction, DuplexMix, RawConfig, Sampler, SystemParams};
use rayon::prelude::*;
use serde::Deserialize;

use crate::config::load_config;
use crate::engine::Engine;
use crate::error::{CliError, Result};
use crate::evaluate::{fmt, opt};

pub const SWEEP_COLUMNS_V1: [&str; 27] = [
    "antenna",
    "theta_b_deg",
    "g_b_dbi",
    "series",
    "rho_f",
    "rho_d",
    "rho_u",
    "engine",
    "samples",
    "seed",
    "status",
    "ase_dl_m2",
    "ase_dl_km2",
    "ase_dl_ci95_m2",
    "ase_dl_err_m2",
    "coverage_dl",
    "coverage_dl_ci95",
    "coverage_dl_err",
    "ase_ul_m2",
    "ase_ul_km2",
    "ase_ul_ci95_m2",
    "ase_ul_err_m2",
    "coverage_ul",
    "coverage_ul_ci95",
    "coverage_ul_err",
    "rate_dl",
    "rate_ul",
];

pub const CURVE_COLUMNS_V1: [&str; 9] = [
    "antenna",
    "engine",
    "direction",
    "series",
    "rho_f",
    "rho_d",
    "coverage",
    "ase_m2",
    "ase_km2",
];

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaPoint {
    pub label: String,
    pub theta_b_deg: f64,
    pub g_b_dbi: f64,
    #[serde(default)]
    pub g_s_dbi: f64,
}

/// A sweep description as written in a plan file. A relative `config`
/// resolves against the plan's directory, a relative `out` against the
/// working directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub config: PathBuf,
    pub out: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_engines")]
    pub engines: Vec<String>,
    /// FD fractions; the rest is split evenly between HD downlink and uplink.
    pub rho_f: Vec<f64>,
    /// Half-duplex-only baseline points, given as the downlink fraction.
    #[serde(default)]
    pub thd_rho_d: Vec<f64>,
    /// Antenna configurations; empty means the base config's antenna.
    #[serde(default)]
    pub antenna: Vec<AntennaPoint>,
}

fn default_seed() -> u64 {
    1
}
fn default_samples() -> usize {
    10_000
}
fn default_engines() -> Vec<String> {
    vec!["analytic".into()]
}

impl SweepPlan {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut plan: SweepPlan = toml::from_str(&text).map_err(|e| CliError::Config {
            location: path.display().to_string(),
            source: fdmix::Error::Config(e.to_string()),
        })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        plan.config = dir.join(&plan.config);
        Ok(plan)
    }

    pub fn engines(&self) -> Result<Vec<Engine>> {
        Engine::parse_selection(&self.engines)
    }

    /// Grid points in output order: per antenna, the mixed series then the
    /// half-duplex baseline.
    pub fn points(&self, base: &RawConfig) -> Result<Vec<SweepPoint>> {
        if self.rho_f.is_empty() {
            return Err(CliError::usage("plan: rho_f grid is empty"));
        }
        let antennas = if self.antenna.is_empty() {
            vec![AntennaPoint {
                label: "base".into(),
                theta_b_deg: base.antenna.theta_b_deg,
                g_b_dbi: base.antenna.g_b_dbi,
                g_s_dbi: base.antenna.g_s_dbi,
            }]
        } else {
            self.antenna.clone()
        };
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for ant in antennas {
            if !seen.insert(ant.label.clone()) {
                return Err(CliError::usage(format!(
                    "plan: duplicate antenna label `{}`",
                    ant.label
                )));
            }
            let pattern = AntennaPattern::new(
                ant.theta_b_deg.to_radians(),
                db_to_linear(ant.g_b_dbi),
                db_to_linear(ant.g_s_dbi),
            )
            .map_err(|e| CliError::usage(format!("plan: antenna `{}`: {e}", ant.label)))?;
            let mixes = self
                .rho_f
                .iter()
                .map(|&r| (Series::Mixed, DuplexMix::balanced(r)))
                .chain(
                    self.thd_rho_d
                        .iter()
                        .map(|&r| (Series::HalfDuplex, DuplexMix::half_duplex(r))),
                );
            for (series, mix) in mixes {
                let mix = mix.map_err(|e| CliError::usage(format!("plan: {e}")))?;
                out.push(SweepPoint {
                    antenna: ant.clone(),
                    pattern,
                    series,
                    mix,
                });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// FD share swept, HD remainder split evenly.
    Mixed,
    /// No FD cells.
    HalfDuplex,
}

impl Series {
    pub fn label(self) -> &'static str {
        match self {
            Series::Mixed => "mixed",
            Series::HalfDuplex => "thd",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub antenna: AntennaPoint,
    pub pattern: AntennaPattern,
    pub series: Series,
    pub mix: DuplexMix,
}

/// One direction's aggregate metrics. `ci95` fields are set for Monte Carlo
/// engines, `err` fields for the analytic engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionResult {
    pub rate: f64,
    pub ase: f64,
    pub coverage: f64,
    pub ase_ci95: Option<f64>,
    pub coverage_ci95: Option<f64>,
    pub ase_err: Option<f64>,
    pub coverage_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub engine: Engine,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// `None` for a direction no cell carries; the whole row is `Err` when
    /// evaluation failed.
    pub result: std::result::Result<[Option<DirectionResult>; 2], String>,
    pub non_convergence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

fn evaluate_point(
    params: &SystemParams,
    engine: Engine,
    samples: usize,
    seed: u64,
    threshold: f64,
) -> fdmix::Result<[Option<DirectionResult>; 2]> {
    let mut out = [None, None];
    match engine.fidelity() {
        None => {
            let a = Analytic::new(*params);
            for (slot, d) in out.iter_mut().zip(Direction::BOTH) {
                let (fd, hd) = d.modes();
                if fd.weight(params.mix()) + hd.weight(params.mix()) == 0.0 {
                    continue;
                }
                let rate = a.network_rate(d)?;
                let cov = a.coverage(d, threshold)?;
                let lambda = params.lambda_b();
                *slot = Some(DirectionResult {
                    rate: rate.value,
                    ase: rate.value * lambda,
                    coverage: cov.value,
                    ase_ci95: None,
                    coverage_ci95: None,
                    ase_err: Some(rate.error() * lambda),
                    coverage_err: Some(cov.error),
                });
            }
        }
        Some(fidelity) => {
            let m = Sampler::new(*params, fidelity).network_metrics(samples, seed, threshold)?;
            for (slot, d) in out.iter_mut().zip(Direction::BOTH) {
                *slot = m.direction(d).map(|x| DirectionResult {
                    rate: x.rate.value,
                    ase: x.ase.value,
                    coverage: x.coverage.value,
                    ase_ci95: Some(x.ase.ci95),
                    coverage_ci95: Some(x.coverage.ci95),
                    ase_err: None,
                    coverage_err: None,
                });
            }
        }
    }
    Ok(out)
}

/// Evaluates every (point, engine) pair. Pairs run concurrently; rows come
/// back in plan order. A failing pair is recorded in its row and the sweep
/// carries on.
pub fn run_sweep(plan: &SweepPlan, raw: &RawConfig, base: &SystemParams) -> Result<SweepResult> {
    let engines = plan.engines()?;
    if engines.iter().any(|e| e.fidelity().is_some()) && plan.samples == 0 {
        return Err(CliError::usage("plan: samples must be ≥ 1"));
    }
    let threshold = raw.coverage_threshold();
    let tasks: Vec<(SweepPoint, Engine)> = plan
        .points(raw)?
        .into_iter()
        .flat_map(|p| engines.iter().map(move |&e| (p.clone(), e)))
        .collect();
    let rows = tasks
        .into_par_iter()
        .map(|(point, engine)| {
            let params = base.with_antenna(point.pattern).with_mix(point.mix);
            let mc = engine.fidelity().is_some();
            let r = evaluate_point(&params, engine, plan.samples, plan.seed, threshold);
            SweepRow {
                samples: mc.then_some(plan.samples),
                seed: mc.then_some(plan.seed),
                non_convergence: matches!(&r, Err(e) if e.is_non_convergence()),
                result: r.map_err(|e| e.to_string()),
                point,
                engine,
            }
        })
        .collect();
    Ok(SweepResult { rows })
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.result.is_err()).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_COLUMNS_V1)?;
        for r in &self.rows {
            let p = &r.point;
            let mut rec = vec![
                p.antenna.label.clone(),
                fmt(p.antenna.theta_b_deg),
                fmt(p.antenna.g_b_dbi),
                p.series.label().to_string(),
                fmt(p.mix.rho_f()),
                fmt(p.mix.rho_d()),
                fmt(p.mix.rho_u()),
                r.engine.label().to_string(),
                r.samples.map(|n| n.to_string()).unwrap_or_default(),
                r.seed.map(|n| n.to_string()).unwrap_or_default(),
            ];
            let dirs = match &r.result {
                Ok(d) => {
                    rec.push("ok".into());
                    *d
                }
                Err(msg) => {
                    rec.push(format!("failed: {msg}"));
                    [None, None]
                }
            };
            for d in dirs {
                rec.extend([
                    opt(d.map(|x| x.ase)),
                    opt(d.map(|x| x.ase * 1e6)),
                    opt(d.and_then(|x| x.ase_ci95)),
                    opt(d.and_then(|x| x.ase_err)),
                    opt(d.map(|x| x.coverage)),
                    opt(d.and_then(|x| x.coverage_ci95)),
                    opt(d.and_then(|x| x.coverage_err)),
                ]);
            }
            rec.extend(dirs.map(|d| opt(d.map(|x| x.rate))));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io("<csv output>", e))?;
        Ok(())
    }

    /// Plot-ready (coverage, ASE) pairs: one curve per antenna, engine and
    /// direction, points in plan order.
    pub fn write_curves_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CURVE_COLUMNS_V1)?;
        let mut keys: Vec<(&str, Engine)> = Vec::new();
        for r in &self.rows {
            let k = (r.point.antenna.label.as_str(), r.engine);
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        for (label, engine) in keys {
            for (i, d) in Direction::BOTH.iter().enumerate() {
                for r in self
                    .rows
                    .iter()
                    .filter(|r| r.point.antenna.label == label && r.engine == engine)
                {
                    let Ok(dirs) = &r.result else { continue };
                    let Some(x) = dirs[i] else { continue };
                    w.write_record([
                        label.to_string(),
                        engine.label().to_string(),
                        d.label().to_string(),
                        r.point.series.label().to_string(),
                        fmt(r.point.mix.rho_f()),
                        fmt(r.point.mix.rho_d()),
                        fmt(x.coverage),
                        fmt(x.ase),
                        fmt(x.ase * 1e6),
                    ])?;
                }
            }
        }
        w.flush().map_err(|e| CliError::io("<csv output>", e))?;
        Ok(())
    }
}

/// `results.csv` → `results_curves.csv`.
pub fn curves_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    out.with_file_name(format!("{stem}_curves.csv"))
}

/// Loads the plan's base config and runs it.
pub fn run_plan(plan: &SweepPlan) -> Result<SweepResult> {
    let (raw, params) = load_config(&plan.config)?;
    run_sweep(plan, &raw, &params)
}
