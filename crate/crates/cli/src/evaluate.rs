use std::io::Write;

use fdmix::montecarlo::empirical_ccdf;
use fdmix::{Analytic, Direction, Mode, Sampler, SystemParams};

use crate::engine::Engine;
use crate::error::{CliError, Result};
use crate::grid::DbGrid;

/// Column set of CCDF tables, schema version 1. Engine columns not requested
/// are omitted; the order is fixed.
pub const CCDF_COLUMNS_V1: [&str; 6] = ["mode", "y_db", "analytic", "analytic_error", "mc_model", "mc_voronoi"];

#[derive(Debug, Clone, PartialEq)]
pub struct CcdfRow {
    pub mode: Mode,
    pub y_db: f64,
    /// `(value, quadrature error estimate)`.
    pub analytic: Option<(f64, f64)>,
    pub mc_model: Option<f64>,
    pub mc_voronoi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcdfTable {
    pub engines: Vec<Engine>,
    pub rows: Vec<CcdfRow>,
}

/// `P[γ > y]` of each mode on `grid` from each engine. Monte Carlo engines
/// draw the FD and HD modes of a direction from the same samples.
pub fn evaluate(
    params: &SystemParams,
    modes: &[Mode],
    engines: &[Engine],
    grid: &DbGrid,
    samples: usize,
    seed: u64,
) -> Result<CcdfTable> {
    if modes.is_empty() {
        return Err(CliError::usage("no mode selected"));
    }
    let ys = grid.linear();
    let mut rows: Vec<CcdfRow> = modes
        .iter()
        .flat_map(|&mode| {
            grid.db().iter().map(move |&y_db| CcdfRow {
                mode,
                y_db,
                analytic: None,
                mc_model: None,
                mc_voronoi: None,
            })
        })
        .collect();
    let n = ys.len();
    for &engine in engines {
        match engine.fidelity() {
            None => {
                let a = Analytic::new(*params);
                for (k, &mode) in modes.iter().enumerate() {
                    let est = a.ccdf_grid(mode, &ys)?;
                    for (row, e) in rows[k * n..(k + 1) * n].iter_mut().zip(est) {
                        row.analytic = Some((e.value, e.error));
                    }
                }
            }
            Some(fidelity) => {
                let sampler = Sampler::new(*params, fidelity);
                for direction in Direction::BOTH {
                    if !modes.iter().any(|m| m.direction() == direction) {
                        continue;
                    }
                    let (fd, hd) = sampler.sinr_pair(direction, samples, seed)?;
                    for batch in [fd, hd] {
                        let Some(k) = modes.iter().position(|&m| m == batch.mode) else {
                            continue;
                        };
                        let c = empirical_ccdf(&batch, &ys)?;
                        for (row, v) in rows[k * n..(k + 1) * n].iter_mut().zip(c) {
                            match engine {
                                Engine::McModel => row.mc_model = Some(v),
                                _ => row.mc_voronoi = Some(v),
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(CcdfTable {
        engines: engines.to_vec(),
        rows,
    })
}

impl CcdfTable {
    pub fn header(&self) -> Vec<&'static str> {
        let has = |e| self.engines.contains(&e);
        CCDF_COLUMNS_V1
            .into_iter()
            .filter(|c| match *c {
                "analytic" | "analytic_error" => has(Engine::Analytic),
                "mc_model" => has(Engine::McModel),
                "mc_voronoi" => has(Engine::McVoronoi),
                _ => true,
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let header = self.header();
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.mode.label().to_string(), fmt(r.y_db)];
            for c in &header[2..] {
                rec.push(match *c {
                    "analytic" => opt(r.analytic.map(|a| a.0)),
                    "analytic_error" => opt(r.analytic.map(|a| a.1)),
                    "mc_model" => opt(r.mc_model),
                    _ => opt(r.mc_voronoi),
                });
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| CliError::io("<csv output>", e))?;
        Ok(())
    }
}

/// Shortest round-trip decimal form; stable across runs and platforms.
pub(crate) fn fmt(x: f64) -> String {
    format!("{x}")
}

pub(crate) fn opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}
