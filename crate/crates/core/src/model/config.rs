//! dB-domain configuration and its conversion into [`SystemParams`].
//!
//! Key names carry their unit. Powers are dBm, gains dBi, the self-
//! interference cancellation is an attenuation in dB, angles are degrees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AntennaPattern, DuplexMix, PathLossModel, PowerConfig, SystemParams};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w) + 30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub bs_density_per_m2: f64,
    pub rho_f: f64,
    pub rho_d: f64,
    pub rho_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaSection {
    pub theta_b_deg: f64,
    pub g_b_dbi: f64,
    pub g_s_dbi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLossSection {
    pub k1_linear: f64,
    pub k2_linear: f64,
    pub k3_linear: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub p_b_dbm: f64,
    pub p_u_dbm: f64,
    #[serde(default)]
    pub epsilon: f64,
    /// Attenuation of the residual self-interference; `inf` is perfect cancellation.
    pub si_cancellation_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    pub thermal_density_dbm_per_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_ue_db: f64,
    pub noise_figure_bs_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_mu")]
    pub fading_rate: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            fading_rate: default_mu(),
            nu: default_nu(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    #[serde(default = "default_threshold")]
    pub coverage_threshold_db: f64,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        EvaluationSection {
            coverage_threshold_db: default_threshold(),
        }
    }
}

fn default_mu() -> f64 {
    1.0
}
fn default_nu() -> f64 {
    1.25
}
fn default_threshold() -> f64 {
    -8.0
}

/// Configuration file contents, as written by a person.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub network: NetworkSection,
    pub antenna: AntennaSection,
    pub path_loss: PathLossSection,
    pub power: PowerSection,
    pub noise: NoiseSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Canonical text form; parsing it back yields an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("RawConfig serializes to TOML")
    }

    /// Baseline parameters (the shipped `table1.cfg`),
    /// with the 35°/15 dBi antenna and ρ_F = 0.4.
    pub fn table1() -> Self {
        RawConfig {
            network: NetworkSection {
                bs_density_per_m2: 1e-3,
                rho_f: 0.4,
                rho_d: 0.3,
                rho_u: 0.3,
            },
            antenna: AntennaSection {
                theta_b_deg: 35.0,
                g_b_dbi: 15.0,
                g_s_dbi: 0.0,
            },
            path_loss: PathLossSection {
                k1_linear: 8.8e-4,
                k2_linear: 8.8e-4,
                k3_linear: 8.8e-4,
                alpha1: 3.67,
                alpha2: 3.67,
                alpha3: 3.67,
            },
            power: PowerSection {
                p_b_dbm: 24.0,
                p_u_dbm: 23.0,
                epsilon: 0.0,
                si_cancellation_db: 120.0,
            },
            noise: NoiseSection {
                thermal_density_dbm_per_hz: -174.0,
                bandwidth_hz: 10e6,
                noise_figure_ue_db: 9.0,
                noise_figure_bs_db: 8.0,
            },
            model: ModelSection::default(),
            evaluation: EvaluationSection::default(),
        }
    }

    pub fn coverage_threshold(&self) -> f64 {
        db_to_linear(self.evaluation.coverage_threshold_db)
    }
}

fn rekey(err: Error, key: &str) -> Error {
    match err {
        Error::InvalidParameter { reason, .. } => Error::invalid(key, reason),
        other => other,
    }
}

/// Converts a dB-domain config into validated linear parameters.
pub fn build_system(raw: &RawConfig) -> Result<SystemParams> {
    let net = &raw.network;
    let mix = DuplexMix::new(net.rho_f, net.rho_d, net.rho_u)?;

    let ant = &raw.antenna;
    if !(ant.theta_b_deg > 0.0 && ant.theta_b_deg < 360.0) {
        return Err(Error::invalid(
            "antenna.theta_b_deg",
            format!("must lie in (0, 360), got {}", ant.theta_b_deg),
        ));
    }
    let g_b = db_to_linear(ant.g_b_dbi);
    let g_s = db_to_linear(ant.g_s_dbi);
    if g_s > g_b {
        return Err(Error::invalid(
            "antenna.g_s_dbi",
            format!(
                "side-lobe gain {} dBi exceeds main-lobe gain {} dBi",
                ant.g_s_dbi, ant.g_b_dbi
            ),
        ));
    }
    let antenna =
        AntennaPattern::new(ant.theta_b_deg.to_radians(), g_b, g_s).map_err(|e| rekey(e, "antenna.g_b_dbi"))?;

    let pl = &raw.path_loss;
    let path_loss = PathLossModel::new(
        [pl.k1_linear, pl.k2_linear, pl.k3_linear],
        [pl.alpha1, pl.alpha2, pl.alpha3],
    )
    .map_err(|e| match e {
        Error::InvalidParameter { key, reason } if key.starts_with("path_loss.k") => {
            Error::invalid(format!("{key}_linear"), reason)
        }
        other => other,
    })?;

    let pw = &raw.power;
    if pw.si_cancellation_db.is_nan() || pw.si_cancellation_db < 0.0 {
        return Err(Error::invalid("power.si_cancellation_db", "attenuation must be ≥ 0 dB"));
    }
    let a_si = db_to_linear(-pw.si_cancellation_db);
    let power = PowerConfig::new(dbm_to_watts(pw.p_b_dbm), dbm_to_watts(pw.p_u_dbm), pw.epsilon, a_si).map_err(
        |e| match e {
            Error::InvalidParameter { key, reason } => {
                let key = match key.as_str() {
                    "power.p_b" => "power.p_b_dbm".to_string(),
                    "power.p_u" => "power.p_u_dbm".to_string(),
                    "power.a_si" => "power.si_cancellation_db".to_string(),
                    _ => key,
                };
                Error::invalid(key, reason)
            }
            other => other,
        },
    )?;

    let nz = &raw.noise;
    if !(nz.bandwidth_hz > 0.0) {
        return Err(Error::invalid("noise.bandwidth_hz", "must be > 0"));
    }
    let thermal = dbm_to_watts(nz.thermal_density_dbm_per_hz) * nz.bandwidth_hz;
    let n0 = thermal * db_to_linear(nz.noise_figure_ue_db);
    let n1 = thermal * db_to_linear(nz.noise_figure_bs_db);

    SystemParams::new(
        net.bs_density_per_m2,
        mix,
        antenna,
        path_loss,
        power,
        raw.model.fading_rate,
        n0,
        n1,
        raw.model.nu,
    )
    .map_err(|e| match e {
        Error::InvalidParameter { key, reason } if key.starts_with("noise.n") => {
            Error::invalid("noise.thermal_density_dbm_per_hz", reason)
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key_of(e: Error) -> String {
        match e {
            Error::InvalidParameter { key, .. } => key,
            other => panic!("expected InvalidParameter, got {other:?}"),
        }
    }

    #[test]
    fn table1_conversions() {
        let p = build_system(&RawConfig::table1()).unwrap();
        assert!((p.power().p_b() - 0.251_188_6).abs() < 1e-6);
        assert_eq!(p.power().a_si(), 1e-12);
        // 10^(−20.4) · 10^7 · 10^(0.9) = 10^(−12.5)
        assert!((p.n0() - 3.162_277_66e-13).abs() < 1e-20, "{}", p.n0());
        assert!((p.n1() - 2.511_886_43e-13).abs() < 1e-20, "{}", p.n1());
        assert_eq!(p.mu(), 1.0);
        assert_eq!(p.nu(), 1.25);
        assert!((p.antenna().theta_b() - 35f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs_with_key_paths() {
        let mut raw = RawConfig::table1();
        raw.network.rho_u = 0.5;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "network.rho_f");

        let mut raw = RawConfig::table1();
        raw.network.bs_density_per_m2 = -1.0;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "network.bs_density_per_m2");

        let mut raw = RawConfig::table1();
        raw.path_loss.alpha2 = 2.0;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "path_loss.alpha2");

        let mut raw = RawConfig::table1();
        raw.path_loss.k3_linear = 0.0;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "path_loss.k3_linear");

        let mut raw = RawConfig::table1();
        raw.antenna.g_s_dbi = 16.0;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "antenna.g_s_dbi");

        let mut raw = RawConfig::table1();
        raw.antenna.theta_b_deg = 360.0;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "antenna.theta_b_deg");

        let mut raw = RawConfig::table1();
        raw.power.epsilon = 1.5;
        assert_eq!(key_of(build_system(&raw).unwrap_err()), "power.epsilon");
    }

    #[test]
    fn perfect_cancellation() {
        let mut raw = RawConfig::table1();
        raw.power.si_cancellation_db = f64::INFINITY;
        assert_eq!(build_system(&raw).unwrap().power().a_si(), 0.0);
    }

    #[test]
    fn toml_round_trip_is_idempotent() {
        let text = RawConfig::table1().to_toml();
        let parsed = RawConfig::from_toml(&text).unwrap();
        assert_eq!(parsed, RawConfig::table1());
        assert_eq!(parsed.to_toml(), text);
    }

    #[test]
    fn unknown_key_is_reported() {
        let text = RawConfig::table1().to_toml().replace("theta_b_deg", "theta_deg");
        match RawConfig::from_toml(&text).unwrap_err() {
            Error::Config(msg) => assert!(msg.contains("theta_deg"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn db_round_trip(
            p_b in -10.0f64..50.0,
            p_u in -10.0f64..40.0,
            g_b in 0.0f64..30.0,
            g_s_drop in 0.0f64..30.0,
            a in 0.0f64..200.0,
            nf_ue in 0.0f64..15.0,
            nf_bs in 0.0f64..15.0,
            bw in 1e5f64..1e9,
        ) {
            let mut raw = RawConfig::table1();
            raw.power.p_b_dbm = p_b;
            raw.power.p_u_dbm = p_u;
            raw.antenna.g_b_dbi = g_b;
            raw.antenna.g_s_dbi = g_b - g_s_drop;
            raw.power.si_cancellation_db = a;
            raw.noise.noise_figure_ue_db = nf_ue;
            raw.noise.noise_figure_bs_db = nf_bs;
            raw.noise.bandwidth_hz = bw;
            let p = build_system(&raw).unwrap();
            let tol = 1e-9;
            prop_assert!((watts_to_dbm(p.power().p_b()) - p_b).abs() < tol);
            prop_assert!((watts_to_dbm(p.power().p_u()) - p_u).abs() < tol);
            prop_assert!((linear_to_db(p.antenna().g_b()) - g_b).abs() < tol);
            prop_assert!((linear_to_db(p.antenna().g_s()) - (g_b - g_s_drop)).abs() < tol);
            prop_assert!((-linear_to_db(p.power().a_si()) - a).abs() < tol);
            let thermal_dbm = raw.noise.thermal_density_dbm_per_hz + linear_to_db(bw);
            prop_assert!((watts_to_dbm(p.n0()) - (thermal_dbm + nf_ue)).abs() < tol);
            prop_assert!((watts_to_dbm(p.n1()) - (thermal_dbm + nf_bs)).abs() < tol);
            prop_assert!((p.antenna().theta_b().to_degrees() - 35.0).abs() < tol);
        }
    }
}
