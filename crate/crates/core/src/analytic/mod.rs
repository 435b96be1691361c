//! Quadrature evaluation of the SINR CCDFs, mean rates, area spectral
//! efficiency and coverage of the mixed network.
//!
//! Conditioned on the serving distance `R`, Rayleigh fading on the serving
//! link turns each CCDF into `e^{−sN}` times Laplace transforms of the
//! interference evaluated at `s ∝ y·R^α`. Each Laplace factor is an
//! alignment-probability mixture of PGFL exponentials whose exponent is a
//! semi-infinite integral; the CCDF is the outer integral of their product
//! against the serving-distance density.

mod ccdf;
mod laplace;
mod rate;

use std::fmt;
use std::str::FromStr;

pub use ccdf::link_distance_pdf;
pub use rate::{mix_coverage, mix_rates, RateEstimate};

use crate::error::{Error, Result};
use crate::model::{DuplexMix, SystemParams};
use crate::quad::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Downlink,
    Uplink,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Downlink, Direction::Uplink];

    pub fn label(self) -> &'static str {
        match self {
            Direction::Downlink => "dl",
            Direction::Uplink => "ul",
        }
    }

    /// (FD mode, HD mode) of this direction.
    pub fn modes(self) -> (Mode, Mode) {
        match self {
            Direction::Downlink => (Mode::FdDownlink, Mode::HdDownlink),
            Direction::Uplink => (Mode::FdUplink, Mode::HdUplink),
        }
    }
}

/// Cell type of the tagged link and its direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    FdDownlink,
    FdUplink,
    HdDownlink,
    HdUplink,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::FdDownlink, Mode::FdUplink, Mode::HdDownlink, Mode::HdUplink];

    pub fn direction(self) -> Direction {
        match self {
            Mode::FdDownlink | Mode::HdDownlink => Direction::Downlink,
            Mode::FdUplink | Mode::HdUplink => Direction::Uplink,
        }
    }

    pub fn is_full_duplex(self) -> bool {
        matches!(self, Mode::FdDownlink | Mode::FdUplink)
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::FdDownlink => "fd-dl",
            Mode::FdUplink => "fd-ul",
            Mode::HdDownlink => "hd-dl",
            Mode::HdUplink => "hd-ul",
        }
    }

    /// Mixture weight of this cell type within its direction.
    pub fn weight(self, mix: &DuplexMix) -> f64 {
        match self {
            Mode::FdDownlink | Mode::FdUplink => mix.rho_f(),
            Mode::HdDownlink => mix.rho_d(),
            Mode::HdUplink => mix.rho_u(),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL.into_iter().find(|m| m.label() == s).ok_or_else(|| {
            Error::invalid(
                "mode",
                format!("unknown mode `{s}`, expected one of fd-dl, fd-ul, hd-dl, hd-ul"),
            )
        })
    }
}

/// One evaluation mode bound to its parameters.
///
/// Downlink modes use the UE noise `n0` and the nearest-BS distance density;
/// uplink modes use the BS noise `n1` and the ν-corrected density. The
/// serving link always carries the main-lobe gain.
#[derive(Debug, Clone, Copy)]
pub struct SinrContext<'a> {
    pub mode: Mode,
    pub params: &'a SystemParams,
}

impl<'a> SinrContext<'a> {
    pub fn new(mode: Mode, params: &'a SystemParams) -> Self {
        SinrContext { mode, params }
    }

    pub fn noise(&self) -> f64 {
        match self.mode.direction() {
            Direction::Downlink => self.params.n0(),
            Direction::Uplink => self.params.n1(),
        }
    }

    /// `s` such that `P[γ > y | r = R] = e^{−sN}·L(s)`.
    pub fn laplace_argument(&self, y: f64, r: f64) -> f64 {
        let p = self.params;
        let k1 = p.path_loss().k(crate::model::Link::BsUe);
        let a1 = p.path_loss().alpha(crate::model::Link::BsUe);
        let g_b = p.antenna().g_b();
        match self.mode.direction() {
            Direction::Downlink => p.mu() * y / (p.power().p_b() * g_b * k1) * r.powf(a1),
            Direction::Uplink => {
                let eps = p.power().epsilon();
                p.mu() * y / (p.power().p_u() * g_b) * k1.powf(eps - 1.0) * r.powf(a1 * (1.0 - eps))
            }
        }
    }

    pub fn serving_pdf(&self, r: f64) -> f64 {
        link_distance_pdf(self.mode.direction(), r, self.params)
    }
}

/// Analytic engine bound to one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct Analytic {
    params: SystemParams,
    inner: QuadratureSpec,
    outer: QuadratureSpec,
}

impl Analytic {
    pub fn new(params: SystemParams) -> Self {
        Analytic {
            params,
            inner: QuadratureSpec::LAPLACE,
            outer: QuadratureSpec::OUTER,
        }
    }

    /// `inner` drives the interference exponents, `outer` the serving-distance
    /// and rate integrals.
    pub fn with_tolerances(params: SystemParams, inner: QuadratureSpec, outer: QuadratureSpec) -> Self {
        Analytic { params, inner, outer }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn context(&self, mode: Mode) -> SinrContext<'_> {
        SinrContext::new(mode, &self.params)
    }
}
