use crate::error::{CliError, Result};

/// SINR thresholds in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct DbGrid {
    db: Vec<f64>,
}

impl DbGrid {
    /// −20 to 40 dB in 1 dB steps.
    pub fn standard() -> Self {
        DbGrid::range(-20.0, 40.0, 1.0).expect("valid default grid")
    }

    /// Inclusive `start..=stop` in steps of `step`. Points are computed as
    /// `start + i·step`, so the grid does not drift.
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::usage("y grid bounds must be finite"));
        }
        if !(step > 0.0) {
            return Err(CliError::usage("y grid step must be positive"));
        }
        if stop < start {
            return Err(CliError::usage(format!("y grid is empty: stop {stop} < start {start}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        DbGrid::from_points((0..n).map(|i| start + i as f64 * step).collect())
    }

    pub fn from_points(db: Vec<f64>) -> Result<Self> {
        if db.is_empty() {
            return Err(CliError::usage("y grid is empty"));
        }
        if let Some(bad) = db.iter().find(|x| !x.is_finite()) {
            return Err(CliError::usage(format!("y grid point {bad} is not finite")));
        }
        Ok(DbGrid { db })
    }

    /// `start:stop:step` or a comma-separated list of dB values.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(CliError::usage("y grid is empty"));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("bad y grid value `{s}`")))
        };
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if parts.len() != 3 {
                return Err(CliError::usage("y grid range must be start:stop:step"));
            }
            return DbGrid::range(num(parts[0])?, num(parts[1])?, num(parts[2])?);
        }
        DbGrid::from_points(text.split(',').map(num).collect::<Result<_>>()?)
    }

    pub fn db(&self) -> &[f64] {
        &self.db
    }

    pub fn linear(&self) -> Vec<f64> {
        self.db.iter().map(|d| 10f64.powf(d / 10.0)).collect()
    }
}
