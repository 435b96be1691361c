use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// One level of a discrete effective-gain distribution.
///
/// Also used for residual self-interference, where `gain` carries watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLevel {
    pub gain: f64,
    pub probability: f64,
}

impl GainLevel {
    pub fn new(gain: f64, probability: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&probability));
        GainLevel { gain, probability }
    }
}

/// Two-level (main lobe / side lobe) sector antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntennaPattern {
    theta_b: f64,
    g_b: f64,
    g_s: f64,
}

/// Wraps an angle into `(−π, π]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

impl AntennaPattern {
    /// `theta_b` in radians, gains linear.
    pub fn new(theta_b: f64, g_b: f64, g_s: f64) -> Result<Self> {
        if !(theta_b > 0.0 && theta_b < TAU) {
            return Err(Error::invalid(
                "antenna.theta_b",
                format!("main-lobe width must lie in (0, 2π), got {theta_b}"),
            ));
        }
        if !(g_s > 0.0) || !g_s.is_finite() {
            return Err(Error::invalid("antenna.g_s", "side-lobe gain must be > 0"));
        }
        if !(g_b >= g_s) || !g_b.is_finite() {
            return Err(Error::invalid(
                "antenna.g_b",
                format!("main-lobe gain {g_b} must be ≥ side-lobe gain {g_s}"),
            ));
        }
        Ok(AntennaPattern { theta_b, g_b, g_s })
    }

    /// Omnidirectional unit-gain pattern (used for the degenerate reductions).
    pub fn omni(theta_b: f64) -> Result<Self> {
        AntennaPattern::new(theta_b, 1.0, 1.0)
    }

    pub fn theta_b(&self) -> f64 {
        self.theta_b
    }

    pub fn theta_s(&self) -> f64 {
        TAU - self.theta_b
    }

    pub fn g_b(&self) -> f64 {
        self.g_b
    }

    pub fn g_s(&self) -> f64 {
        self.g_s
    }

    /// Probability that a uniformly oriented beam covers a fixed direction.
    pub fn main_lobe_fraction(&self) -> f64 {
        self.theta_b / TAU
    }

    /// Gain at angle `theta` off boresight. The lobe edge `|θ| = θ_B/2`
    /// belongs to the main lobe.
    pub fn gain(&self, theta: f64) -> f64 {
        if normalize_angle(theta).abs() <= 0.5 * self.theta_b {
            self.g_b
        } else {
            self.g_s
        }
    }

    /// Interfering BS transmit beam towards a victim UE.
    pub fn alignment_dd(&self) -> [GainLevel; 2] {
        let p = self.main_lobe_fraction();
        [GainLevel::new(self.g_b, p), GainLevel::new(self.g_s, 1.0 - p)]
    }

    /// Victim BS receive beam and interfering BS transmit beam, independent.
    pub fn alignment_du(&self) -> [GainLevel; 3] {
        let p = self.main_lobe_fraction();
        let q = 1.0 - p;
        [
            GainLevel::new(self.g_b * self.g_b, p * p),
            GainLevel::new(self.g_b * self.g_s, 2.0 * p * q),
            GainLevel::new(self.g_s * self.g_s, q * q),
        ]
    }

    /// Victim BS receive beam towards an omnidirectional interfering UE.
    pub fn alignment_uu(&self) -> [GainLevel; 2] {
        self.alignment_dd()
    }
}
