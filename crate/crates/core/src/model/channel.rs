use crate::error::{Error, Result};
use crate::model::antenna::{AntennaPattern, GainLevel};

/// Which pair of node types a link connects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Link {
    BsUe,
    UeUe,
    BsBs,
}

impl Link {
    fn index(self) -> usize {
        match self {
            Link::BsUe => 0,
            Link::UeUe => 1,
            Link::BsBs => 2,
        }
    }
}

/// `K_i · d^(−α_i)` path loss for the three link kinds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    k: [f64; 3],
    alpha: [f64; 3],
}

impl PathLossModel {
    pub fn new(k: [f64; 3], alpha: [f64; 3]) -> Result<Self> {
        for (i, &ki) in k.iter().enumerate() {
            if !(ki > 0.0) || !ki.is_finite() {
                return Err(Error::invalid(format!("path_loss.k{}", i + 1), "must be > 0"));
            }
        }
        for (i, &ai) in alpha.iter().enumerate() {
            if !(ai > 2.0) || !ai.is_finite() {
                return Err(Error::invalid(
                    format!("path_loss.alpha{}", i + 1),
                    format!("exponent must exceed 2 for the interference to be finite, got {ai}"),
                ));
            }
        }
        Ok(PathLossModel { k, alpha })
    }

    /// Same attenuation and exponent on every link.
    pub fn uniform(k: f64, alpha: f64) -> Result<Self> {
        PathLossModel::new([k; 3], [alpha; 3])
    }

    pub fn k(&self, link: Link) -> f64 {
        self.k[link.index()]
    }

    pub fn alpha(&self, link: Link) -> f64 {
        self.alpha[link.index()]
    }

    pub fn attenuation(&self, link: Link, d: f64) -> Result<f64> {
        if !(d > 0.0) {
            return Err(Error::Domain(format!("path loss needs d > 0, got {d}")));
        }
        Ok(self.attenuation_unchecked(link, d))
    }

    #[inline]
    pub(crate) fn attenuation_unchecked(&self, link: Link, d: f64) -> f64 {
        let i = link.index();
        self.k[i] * d.powf(-self.alpha[i])
    }
}

/// Transmit powers, uplink power control and self-interference suppression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    pub(crate) p_b: f64,
    pub(crate) p_u: f64,
    pub(crate) epsilon: f64,
    pub(crate) a_si: f64,
}

impl PowerConfig {
    /// `a_si` is the linear attenuation of the residual self-interference;
    /// `0` is accepted as the perfect-cancellation limit.
    pub fn new(p_b: f64, p_u: f64, epsilon: f64, a_si: f64) -> Result<Self> {
        if !(p_b > 0.0) || !p_b.is_finite() {
            return Err(Error::invalid("power.p_b", "must be > 0"));
        }
        if !(p_u > 0.0) || !p_u.is_finite() {
            return Err(Error::invalid("power.p_u", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::invalid("power.epsilon", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&a_si) {
            return Err(Error::invalid("power.a_si", "cancellation factor must lie in [0, 1]"));
        }
        Ok(PowerConfig {
            p_b,
            p_u,
            epsilon,
            a_si,
        })
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }
    pub fn p_u(&self) -> f64 {
        self.p_u
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn a_si(&self) -> f64 {
        self.a_si
    }

    /// Transmit power of an uplink UE at distance `r` from its serving BS
    /// under fractional power control.
    pub fn uplink_tx_power(&self, path_loss: &PathLossModel, r: f64) -> f64 {
        if self.epsilon == 0.0 {
            return self.p_u;
        }
        let k1 = path_loss.k(Link::BsUe);
        let a1 = path_loss.alpha(Link::BsUe);
        self.p_u * k1.powf(-self.epsilon) * r.powf(self.epsilon * a1)
    }
}

/// Residual self-interference levels (watts) over the four transmit/receive
/// orientation outcomes: (tx, rx) ∈ {aligned, off}². The two mixed outcomes
/// share the level `a·P_B·G_B·G_S` and are listed separately.
pub fn self_interference_levels(pattern: &AntennaPattern, power: &PowerConfig) -> [GainLevel; 4] {
    let p = pattern.main_lobe_fraction();
    let q = 1.0 - p;
    let base = power.a_si * power.p_b;
    let (gb, gs) = (pattern.g_b(), pattern.g_s());
    [
        GainLevel::new(base * gb * gb, p * p),
        GainLevel::new(base * gs * gb, q * p),
        GainLevel::new(base * gb * gs, p * q),
        GainLevel::new(base * gs * gs, q * q),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_loss() -> PathLossModel {
        PathLossModel::uniform(8.8e-4, 3.67).unwrap()
    }

    #[test]
    fn path_loss_values() {
        let m = table1_loss();
        assert_eq!(m.attenuation(Link::BsUe, 1.0).unwrap(), 8.8e-4);
        let at10 = m.attenuation(Link::UeUe, 10.0).unwrap();
        // 8.8e-4 · 10^(−3.67) = 8.8e-4 · 2.13796e-4
        assert!((at10 - 1.881e-7).abs() < 5e-11, "{at10}");
        assert!(m.attenuation(Link::BsBs, 0.0).is_err());
        assert!(m.attenuation(Link::BsBs, -1.0).is_err());
    }

    #[test]
    fn path_loss_decreasing() {
        let m = table1_loss();
        let mut last = f64::INFINITY;
        for i in 1..200 {
            let v = m.attenuation(Link::BsUe, i as f64 * 0.7).unwrap();
            assert!(v < last);
            last = v;
        }
    }

    #[test]
    fn rejects_shallow_exponent() {
        assert!(PathLossModel::uniform(1e-3, 2.0).is_err());
        assert!(PathLossModel::new([1e-3, 0.0, 1e-3], [3.0; 3]).is_err());
    }

    #[test]
    fn uplink_power_control() {
        let m = table1_loss();
        let p = PowerConfig::new(0.25, 0.2, 0.0, 1e-12).unwrap();
        assert_eq!(p.uplink_tx_power(&m, 37.0), 0.2);

        let full = PowerConfig::new(0.25, 0.2, 1.0, 1e-12).unwrap();
        // k1 · r^(−α1) = 1  ⇔  r = k1^(1/α1)
        let r = 8.8e-4_f64.powf(1.0 / 3.67);
        assert!((full.uplink_tx_power(&m, r) - 0.2).abs() < 1e-12);

        let half = PowerConfig::new(0.25, 0.2, 0.5, 1e-12).unwrap();
        assert!((half.uplink_tx_power(&m, 1.0) - 0.2 * 8.8e-4_f64.powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn self_interference_table1_90deg() {
        let pattern = AntennaPattern::new(90f64.to_radians(), 5.01, 1.0).unwrap();
        let power = PowerConfig::new(0.2512, 0.2, 0.0, 1e-12).unwrap();
        let levels = self_interference_levels(&pattern, &power);
        // 1e-12 · 0.2512 · 5.01² = 6.3052e-12
        assert!((levels[0].gain - 6.3052e-12).abs() < 1e-15);
        assert!((levels[0].probability - 1.0 / 16.0).abs() < 1e-15);
        let mixed: f64 = levels[1].probability + levels[2].probability;
        assert!((mixed - 6.0 / 16.0).abs() < 1e-15);
        let total: f64 = levels.iter().map(|l| l.probability).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_interference_degenerate() {
        let pattern = AntennaPattern::new(1.0, 5.0, 1.0).unwrap();
        let perfect = PowerConfig::new(0.25, 0.2, 0.0, 0.0).unwrap();
        assert!(self_interference_levels(&pattern, &perfect)
            .iter()
            .all(|l| l.gain == 0.0));

        let omni = AntennaPattern::omni(1.0).unwrap();
        let power = PowerConfig::new(0.25, 0.2, 0.0, 1e-12).unwrap();
        let levels = self_interference_levels(&omni, &power);
        assert!(levels.iter().all(|l| l.gain == 0.25e-12));
    }

    #[test]
    fn self_interference_mean_factorizes() {
        for d in [20.0_f64, 35.0, 90.0, 250.0] {
            let pattern = AntennaPattern::new(d.to_radians(), 31.62, 0.7).unwrap();
            let power = PowerConfig::new(0.2512, 0.2, 0.0, 3e-11).unwrap();
            let mean: f64 = self_interference_levels(&pattern, &power)
                .iter()
                .map(|l| l.gain * l.probability)
                .sum();
            let p = pattern.main_lobe_fraction();
            let g = p * pattern.g_b() + (1.0 - p) * pattern.g_s();
            let expected = power.a_si() * power.p_b() * g * g;
            assert!(((mean - expected) / expected).abs() < 1e-12);
        }
    }
}
