use std::io::Write;

use fdmix::montecarlo::empirical_ccdf;
use fdmix::{Analytic, Direction, Fidelity, Mode, Sampler, SystemParams};

use crate::error::{CliError, Result};
use crate::evaluate::fmt;
use crate::grid::DbGrid;

/// Largest tolerated `|analytic − empirical|` CCDF deviation.
pub const BAND: f64 = 0.015;

pub const VALIDATE_COLUMNS_V1: [&str; 7] = [
    "mode",
    "max_abs_deviation",
    "at_y_db",
    "band",
    "samples",
    "seed",
    "pass",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCheck {
    pub mode: Mode,
    pub max_deviation: f64,
    pub at_db: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub samples: usize,
    pub seed: u64,
    pub band: f64,
    pub checks: Vec<ModeCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, mode: Mode) -> Option<&ModeCheck> {
        self.checks.iter().find(|c| c.mode == mode)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(VALIDATE_COLUMNS_V1)?;
        for c in &self.checks {
            w.write_record([
                c.mode.label().to_string(),
                fmt(c.max_deviation),
                fmt(c.at_db),
                fmt(self.band),
                self.samples.to_string(),
                self.seed.to_string(),
                c.pass.to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::io("<csv output>", e))?;
        Ok(())
    }

    /// One line per mode plus a verdict.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{:<6} max |analytic - mc| = {:.4} at {:>5} dB  {}\n",
                c.mode.label(),
                c.max_deviation,
                c.at_db,
                if c.pass { "PASS" } else { "FAIL" }
            ));
        }
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{verdict} (band {}, n = {}, seed = {})\n",
            self.band, self.samples, self.seed
        ));
        s
    }
}

/// Compares the analytic CCDFs of `analytic` against model-fidelity samples
/// drawn under `simulated` (normally the same parameters; a perturbed copy
/// serves as a negative control).
pub fn validate(
    analytic: &SystemParams,
    simulated: &SystemParams,
    grid: &DbGrid,
    samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    let ys = grid.linear();
    let a = Analytic::new(*analytic);
    let sampler = Sampler::new(*simulated, Fidelity::Model);
    let mut checks = Vec::new();
    for direction in Direction::BOTH {
        let (fd, hd) = sampler.sinr_pair(direction, samples, seed)?;
        for batch in [fd, hd] {
            let emp = empirical_ccdf(&batch, &ys)?;
            let an = a.ccdf_grid(batch.mode, &ys)?;
            let (mut worst, mut at) = (0.0, grid.db()[0]);
            for ((e, a), &db) in emp.iter().zip(&an).zip(grid.db()) {
                let d = (e - a.value).abs();
                if d > worst {
                    worst = d;
                    at = db;
                }
            }
            checks.push(ModeCheck {
                mode: batch.mode,
                max_deviation: worst,
                at_db: at,
                pass: worst <= BAND,
            });
        }
    }
    checks.sort_by_key(|c| Mode::ALL.iter().position(|&m| m == c.mode));
    Ok(ValidationReport {
        samples,
        seed,
        band: BAND,
        checks,
    })
}
