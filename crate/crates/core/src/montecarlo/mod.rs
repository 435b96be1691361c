//! Monte Carlo oracle: samples Poisson networks and measures the SINR of a
//! tagged link at the window centre.
//!
//! Two fidelities are offered. [`Fidelity::Model`] reproduces each modelling
//! assumption behind the analytic expressions: serving distances drawn from
//! their assumed laws, interferer sets thinned independently, a single
//! alignment state shared by all interferers of one kind, and the uplink
//! acceptance rule `X_u > Z_u`. [`Fidelity::Voronoi`] instead places UEs in
//! actual Voronoi cells, steers beams at them and applies true geometry.
//!
//! Sample `i` of a run with master seed `s` is a pure function of `(s, i)`;
//! see the `rng` module for the stream-splitting rule. Samples are computed in
//! parallel and collected in index order.

mod metrics;
mod realization;
mod rng;
mod sinr;
mod voronoi;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

pub use metrics::{empirical_ccdf, empirical_mean_rate, DirectionMetrics, NetworkMetrics, Stat};
pub use realization::{
    BaseStation, BsMode, NetworkRealization, Serving, UeRole, UserEquipment, Window, DEFAULT_WINDOW_RADII,
    MIN_GUARD_RADII,
};
pub use sinr::MIN_DISTANCE_M;

use crate::analytic::{Direction, Mode};
use crate::error::{Error, Result};
use crate::model::SystemParams;
use sinr::{Engine, Pair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fidelity {
    Model,
    Voronoi,
}

impl Fidelity {
    pub fn label(self) -> &'static str {
        match self {
            Fidelity::Model => "model",
            Fidelity::Voronoi => "voronoi",
        }
    }
}

impl fmt::Display for Fidelity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "model" => Ok(Fidelity::Model),
            "voronoi" => Ok(Fidelity::Voronoi),
            _ => Err(Error::invalid(
                "fidelity",
                format!("unknown fidelity `{s}`, expected model or voronoi"),
            )),
        }
    }
}

/// SINR samples (linear) of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSampleBatch {
    pub mode: Mode,
    pub fidelity: Fidelity,
    pub seed: u64,
    pub samples: Vec<f64>,
    pub warnings: Vec<String>,
}

impl SinrSampleBatch {
    pub fn n(&self) -> usize {
        self.samples.len()
    }
}

/// Monte Carlo engine bound to one parameter set, fidelity and window.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    params: SystemParams,
    fidelity: Fidelity,
    window: Window,
}

impl Sampler {
    pub fn new(params: SystemParams, fidelity: Fidelity) -> Self {
        Sampler {
            window: Window::for_params(&params),
            params,
            fidelity,
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn fidelity(&self) -> Fidelity {
        self.fidelity
    }

    pub fn window(&self) -> Window {
        self.window
    }

    fn engine(&self, seed: u64) -> Engine<'_> {
        Engine {
            params: &self.params,
            window: self.window,
            seed,
        }
    }

    fn warnings(&self) -> Vec<String> {
        self.window.guard_warning(&self.params).into_iter().collect()
    }

    /// The network behind sample `sample` of a run seeded with `seed`.
    pub fn realization(&self, seed: u64, sample: u64) -> NetworkRealization {
        match self.fidelity {
            Fidelity::Model => realization::model_realization(&self.params, &self.window, seed, sample),
            Fidelity::Voronoi => self.engine(seed).voronoi_realization(sample),
        }
    }

    /// FD-cell and HD-cell SINR of `n` draws in `direction`.
    pub(crate) fn pairs(&self, direction: Direction, n: usize, seed: u64) -> Result<Vec<Pair>> {
        if n == 0 {
            return Err(Error::invalid("samples", "sample count must be ≥ 1"));
        }
        let engine = self.engine(seed);
        engine.check(direction)?;
        let one = |i: u64| match (self.fidelity, direction) {
            (Fidelity::Model, Direction::Downlink) => engine.model_downlink(i),
            (Fidelity::Model, Direction::Uplink) => engine.model_uplink(i),
            (Fidelity::Voronoi, Direction::Downlink) => engine.voronoi_downlink(i),
            (Fidelity::Voronoi, Direction::Uplink) => engine.voronoi_uplink(i),
        };
        Ok((0..n as u64).into_par_iter().map(one).collect())
    }

    /// `n` SINR samples of `mode`. The FD and HD modes of one direction are
    /// driven by the same draws for a given seed.
    pub fn sinr(&self, mode: Mode, n: usize, seed: u64) -> Result<SinrSampleBatch> {
        let fd = mode.is_full_duplex();
        let samples = self
            .pairs(mode.direction(), n, seed)?
            .into_iter()
            .map(|p| if fd { p.fd } else { p.hd })
            .collect();
        Ok(SinrSampleBatch {
            mode,
            fidelity: self.fidelity,
            seed,
            samples,
            warnings: self.warnings(),
        })
    }

    /// Both modes of `direction` from one set of draws: `(fd, hd)`.
    pub fn sinr_pair(&self, direction: Direction, n: usize, seed: u64) -> Result<(SinrSampleBatch, SinrSampleBatch)> {
        let pairs = self.pairs(direction, n, seed)?;
        let (fd_mode, hd_mode) = direction.modes();
        let batch = |mode, samples| SinrSampleBatch {
            mode,
            fidelity: self.fidelity,
            seed,
            samples,
            warnings: self.warnings(),
        };
        Ok((
            batch(fd_mode, pairs.iter().map(|p| p.fd).collect()),
            batch(hd_mode, pairs.iter().map(|p| p.hd).collect()),
        ))
    }

    /// ASE, mean rate and coverage of both directions at linear threshold
    /// `threshold`. Directions no cell carries are `None`.
    pub fn network_metrics(&self, n: usize, seed: u64, threshold: f64) -> Result<NetworkMetrics> {
        let mix = self.params.mix();
        let mut out = NetworkMetrics {
            downlink: None,
            uplink: None,
            samples: n,
            warnings: self.warnings(),
        };
        for direction in Direction::BOTH {
            let (fd, hd) = direction.modes();
            let (wf, wh) = (fd.weight(mix), hd.weight(mix));
            if wf + wh == 0.0 {
                continue;
            }
            let pairs = self.pairs(direction, n, seed)?;
            let m = metrics::direction_metrics(&pairs, wf, wh, self.params.lambda_b(), threshold);
            match direction {
                Direction::Downlink => out.downlink = Some(m),
                Direction::Uplink => out.uplink = Some(m),
            }
        }
        Ok(out)
    }
}

pub fn sample_realization(params: &SystemParams, window: Window, seed: u64, fidelity: Fidelity) -> NetworkRealization {
    Sampler::new(*params, fidelity).with_window(window).realization(seed, 0)
}

pub fn sample_sinr(
    mode: Mode,
    params: &SystemParams,
    n: usize,
    seed: u64,
    fidelity: Fidelity,
) -> Result<SinrSampleBatch> {
    Sampler::new(*params, fidelity).sinr(mode, n, seed)
}

pub fn empirical_network_metrics(
    params: &SystemParams,
    n: usize,
    seed: u64,
    fidelity: Fidelity,
    threshold: f64,
) -> Result<NetworkMetrics> {
    Sampler::new(*params, fidelity).network_metrics(n, seed, threshold)
}
