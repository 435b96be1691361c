//! Domain types of the mixed-duplex network and the pointwise physical model
//! shared by the analytic and Monte Carlo engines.
//!
//! Everything here is in linear units (watts, radians, nodes/m²). The only
//! place that accepts dB-domain values is [`build_system`].

mod antenna;
mod channel;
mod config;

pub use antenna::{normalize_angle, AntennaPattern, GainLevel};
pub use channel::{self_interference_levels, Link, PathLossModel, PowerConfig};
pub use config::{
    build_system, db_to_linear, dbm_to_watts, linear_to_db, watts_to_dbm, AntennaSection, EvaluationSection,
    ModelSection, NetworkSection, NoiseSection, PathLossSection, PowerSection, RawConfig,
};

use crate::error::{Error, Result};

const MIX_TOLERANCE: f64 = 1e-12;

/// Fractions of base stations in FD, HD-downlink and HD-uplink mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuplexMix {
    rho_f: f64,
    rho_d: f64,
    rho_u: f64,
}

impl DuplexMix {
    pub fn new(rho_f: f64, rho_d: f64, rho_u: f64) -> Result<Self> {
        for (key, v) in [("rho_f", rho_f), ("rho_d", rho_d), ("rho_u", rho_u)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(
                    format!("network.{key}"),
                    format!("probability must lie in [0, 1], got {v}"),
                ));
            }
        }
        let sum = rho_f + rho_d + rho_u;
        if (sum - 1.0).abs() > MIX_TOLERANCE {
            return Err(Error::invalid(
                "network.rho_f",
                format!("rho_f + rho_d + rho_u must equal 1, got {sum}"),
            ));
        }
        Ok(DuplexMix { rho_f, rho_d, rho_u })
    }

    /// FD fraction `rho_f`, the remainder split evenly between HD downlink
    /// and HD uplink.
    pub fn balanced(rho_f: f64) -> Result<Self> {
        let rest = 0.5 * (1.0 - rho_f);
        DuplexMix::new(rho_f, rest, 1.0 - rho_f - rest)
    }

    /// Half-duplex-only TDD mix with downlink fraction `rho_d`.
    pub fn half_duplex(rho_d: f64) -> Result<Self> {
        DuplexMix::new(0.0, rho_d, 1.0 - rho_d)
    }

    pub fn rho_f(&self) -> f64 {
        self.rho_f
    }
    pub fn rho_d(&self) -> f64 {
        self.rho_d
    }
    pub fn rho_u(&self) -> f64 {
        self.rho_u
    }

    /// Fraction of BSs transmitting in the downlink (FD + HD-DL).
    pub fn downlink_active(&self) -> f64 {
        self.rho_f + self.rho_d
    }

    /// Fraction of cells with an uplink transmitter (FD + HD-UL).
    pub fn uplink_active(&self) -> f64 {
        self.rho_f + self.rho_u
    }
}

/// Full, validated, linear-unit parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda_b: f64,
    mix: DuplexMix,
    antenna: AntennaPattern,
    path_loss: PathLossModel,
    power: PowerConfig,
    mu: f64,
    n0: f64,
    n1: f64,
    nu: f64,
}

impl SystemParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda_b: f64,
        mix: DuplexMix,
        antenna: AntennaPattern,
        path_loss: PathLossModel,
        power: PowerConfig,
        mu: f64,
        n0: f64,
        n1: f64,
        nu: f64,
    ) -> Result<Self> {
        if !(lambda_b > 0.0) || !lambda_b.is_finite() {
            return Err(Error::invalid(
                "network.bs_density_per_m2",
                format!("density must be > 0, got {lambda_b}"),
            ));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::invalid("model.fading_rate", "must be > 0"));
        }
        if !(n0 >= 0.0) || !n0.is_finite() {
            return Err(Error::invalid("noise.n0", "UE noise power must be ≥ 0"));
        }
        if !(n1 >= 0.0) || !n1.is_finite() {
            return Err(Error::invalid("noise.n1", "BS noise power must be ≥ 0"));
        }
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::invalid("model.nu", "correction factor must be ≥ 0"));
        }
        Ok(SystemParams {
            lambda_b,
            mix,
            antenna,
            path_loss,
            power,
            mu,
            n0,
            n1,
            nu,
        })
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }
    pub fn mix(&self) -> &DuplexMix {
        &self.mix
    }
    pub fn antenna(&self) -> &AntennaPattern {
        &self.antenna
    }
    pub fn path_loss(&self) -> &PathLossModel {
        &self.path_loss
    }
    pub fn power(&self) -> &PowerConfig {
        &self.power
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn n0(&self) -> f64 {
        self.n0
    }
    pub fn n1(&self) -> f64 {
        self.n1
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `1/√(π λ_B)`, the radius of a disk holding one BS on average.
    pub fn mean_cell_radius(&self) -> f64 {
        1.0 / (std::f64::consts::PI * self.lambda_b).sqrt()
    }

    pub fn with_mix(mut self, mix: DuplexMix) -> Self {
        self.mix = mix;
        self
    }

    pub fn with_antenna(mut self, antenna: AntennaPattern) -> Self {
        self.antenna = antenna;
        self
    }

    pub fn with_power(mut self, power: PowerConfig) -> Self {
        self.power = power;
        self
    }

    pub fn with_lambda_b(self, lambda_b: f64) -> Result<Self> {
        SystemParams::new(
            lambda_b,
            self.mix,
            self.antenna,
            self.path_loss,
            self.power,
            self.mu,
            self.n0,
            self.n1,
            self.nu,
        )
    }

    pub fn with_noise(self, n0: f64, n1: f64) -> Result<Self> {
        SystemParams::new(
            self.lambda_b,
            self.mix,
            self.antenna,
            self.path_loss,
            self.power,
            self.mu,
            n0,
            n1,
            self.nu,
        )
    }

    pub fn with_nu(self, nu: f64) -> Result<Self> {
        SystemParams::new(
            self.lambda_b,
            self.mix,
            self.antenna,
            self.path_loss,
            self.power,
            self.mu,
            self.n0,
            self.n1,
            nu,
        )
    }
}
