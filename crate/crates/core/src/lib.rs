//! Coverage, SINR distributions and area spectral efficiency of cellular
//! networks that mix full-duplex and half-duplex cells, with two-level
//! directional antennas at the base stations.
//!
//! Two independent engines share the [`model`] types:
//!
//! * [`analytic`] evaluates the Laplace-functional expressions of the SINR
//!   CCDFs by adaptive quadrature ([`quad`]);
//! * [`montecarlo`] samples Poisson networks, either mirroring every modelling
//!   assumption of the analytic derivation or with true nearest-BS
//!   association on a Voronoi tessellation.

pub mod analytic;
pub mod error;
pub mod model;
pub mod montecarlo;
pub mod quad;

pub use analytic::{Analytic, Direction, Mode, SinrContext};
pub use error::{Error, Result};
pub use model::{
    build_system, AntennaPattern, DuplexMix, GainLevel, Link, PathLossModel, PowerConfig, RawConfig, SystemParams,
};
pub use montecarlo::{Fidelity, NetworkMetrics, Sampler, SinrSampleBatch, Window};
pub use quad::{Estimate, QuadratureSpec};
