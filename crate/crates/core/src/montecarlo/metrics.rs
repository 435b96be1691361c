use crate::analytic::Direction;
use crate::error::{Error, Result};
use crate::montecarlo::rng::CompensatedSum;
use crate::montecarlo::sinr::Pair;
use crate::montecarlo::SinrSampleBatch;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Sample mean with the half-width of its 95% normal confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub value: f64,
    pub ci95: f64,
}

impl Stat {
    /// Mean and CI of `xs`, summed in order with compensation.
    pub fn from_samples(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        let mut s = CompensatedSum::default();
        xs.iter().for_each(|&x| s.add(x));
        let mean = s.value() / n;
        let mut v = CompensatedSum::default();
        xs.iter().for_each(|&x| v.add((x - mean) * (x - mean)));
        let var = if xs.len() > 1 { v.value() / (n - 1.0) } else { 0.0 };
        Stat {
            value: mean,
            ci95: Z95 * (var / n).sqrt(),
        }
    }

    fn scaled(self, k: f64) -> Stat {
        Stat {
            value: self.value * k,
            ci95: self.ci95 * k,
        }
    }
}

/// Direction-level Monte Carlo estimates. CIs account for the FD and HD
/// modes sharing random numbers: each statistic is the mean of the per-draw
/// mixture, not a mixture of independent means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionMetrics {
    /// bits/s/Hz
    pub rate: Stat,
    /// bits/s/Hz/m²
    pub ase: Stat,
    pub coverage: Stat,
}

/// Network metrics; `None` marks a direction no cell carries.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMetrics {
    pub downlink: Option<DirectionMetrics>,
    pub uplink: Option<DirectionMetrics>,
    pub samples: usize,
    pub warnings: Vec<String>,
}

impl NetworkMetrics {
    pub fn direction(&self, d: Direction) -> Option<&DirectionMetrics> {
        match d {
            Direction::Downlink => self.downlink.as_ref(),
            Direction::Uplink => self.uplink.as_ref(),
        }
    }

    pub fn ase_dl(&self) -> Option<Stat> {
        self.downlink.map(|m| m.ase)
    }
    pub fn ase_ul(&self) -> Option<Stat> {
        self.uplink.map(|m| m.ase)
    }
    pub fn coverage_dl(&self) -> Option<Stat> {
        self.downlink.map(|m| m.coverage)
    }
    pub fn coverage_ul(&self) -> Option<Stat> {
        self.uplink.map(|m| m.coverage)
    }
}

/// `(w_fd, w_hd)` are the cell fractions of the two modes; `pairs` are the
/// per-draw SINRs.
pub(crate) fn direction_metrics(
    pairs: &[Pair],
    w_fd: f64,
    w_hd: f64,
    lambda_b: f64,
    threshold: f64,
) -> DirectionMetrics {
    let total = w_fd + w_hd;
    let rates: Vec<f64> = pairs
        .iter()
        .map(|p| {
            let f = if w_fd > 0.0 { w_fd * (1.0 + p.fd).log2() } else { 0.0 };
            let h = if w_hd > 0.0 { w_hd * (1.0 + p.hd).log2() } else { 0.0 };
            f + h
        })
        .collect();
    let covered: Vec<f64> = pairs
        .iter()
        .map(|p| {
            let f = if p.fd > threshold { w_fd } else { 0.0 };
            let h = if p.hd > threshold { w_hd } else { 0.0 };
            (f + h) / total
        })
        .collect();
    let rate = Stat::from_samples(&rates);
    DirectionMetrics {
        rate,
        ase: rate.scaled(lambda_b),
        coverage: Stat::from_samples(&covered),
    }
}

/// Fraction of samples strictly above each threshold.
pub fn empirical_ccdf(batch: &SinrSampleBatch, y_grid: &[f64]) -> Result<Vec<f64>> {
    if batch.samples.is_empty() {
        return Err(Error::Domain("empirical CCDF of an empty batch".into()));
    }
    let mut sorted = batch.samples.clone();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(y_grid
        .iter()
        .map(|&y| {
            let at_or_below = sorted.partition_point(|&s| s <= y);
            (sorted.len() - at_or_below) as f64 / n
        })
        .collect())
}

/// Sample mean of `log2(1 + γ)`.
pub fn empirical_mean_rate(batch: &SinrSampleBatch) -> Stat {
    let rates: Vec<f64> = batch.samples.iter().map(|g| (1.0 + g).log2()).collect();
    Stat::from_samples(&rates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Mode;
    use crate::montecarlo::Fidelity;

    fn batch(samples: Vec<f64>) -> SinrSampleBatch {
        SinrSampleBatch {
            mode: Mode::FdDownlink,
            fidelity: Fidelity::Model,
            seed: 0,
            samples,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn ccdf_conventions() {
        let b = batch(vec![0.5, 2.0, 1.0]);
        assert_eq!(
            empirical_ccdf(&b, &[0.1, 0.5, 1.5, 3.0]).unwrap(),
            vec![1.0, 2.0 / 3.0, 1.0 / 3.0, 0.0]
        );
        let one = batch(vec![1.25]);
        assert_eq!(empirical_ccdf(&one, &[1.25]).unwrap(), vec![0.0]);
        assert!(empirical_ccdf(&batch(vec![]), &[1.0]).is_err());
    }

    #[test]
    fn stat_of_constant_has_zero_ci() {
        let s = Stat::from_samples(&[2.0; 10]);
        assert_eq!(s.value, 2.0);
        assert_eq!(s.ci95, 0.0);
    }

    #[test]
    fn fd_only_mix_reduces_to_fd_samples() {
        let pairs = [Pair { fd: 1.0, hd: 100.0 }, Pair { fd: 3.0, hd: 100.0 }];
        let m = direction_metrics(&pairs, 1.0, 0.0, 1e-3, 2.0);
        assert_eq!(m.rate.value, 1.5);
        assert_eq!(m.coverage.value, 0.5);
        assert!((m.ase.value - 1.5e-3).abs() < 1e-18);
    }
}
