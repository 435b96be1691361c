use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::analytic::laplace::in_context;
use crate::analytic::{Analytic, Direction, Mode};
use crate::error::{Error, Result};
use crate::model::{self_interference_levels, GainLevel, Link, SystemParams};
use crate::quad::{integrate_to_infinity, try_integrate_to_infinity, Estimate, QuadratureSpec};

/// Serving-link distance density: nearest-BS Rayleigh density for the
/// downlink, its ν-scaled version for the uplink. Zero for negative `r`.
pub fn link_distance_pdf(direction: Direction, r: f64, params: &SystemParams) -> f64 {
    let lam = match direction {
        Direction::Downlink => params.lambda_b(),
        Direction::Uplink => params.nu() * params.lambda_b(),
    };
    if !(r >= 0.0) || !r.is_finite() || lam == 0.0 {
        return 0.0;
    }
    TAU * lam * r * (-PI * lam * r * r).exp()
}

/// `∫_x^∞ w/(1 + w^α) dw`.
fn unit_tail(alpha: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_to_infinity(|w| w / (1.0 + w.powf(alpha)), x, x.max(1.0), spec)
        .map(|e| e.value)
        .map_err(|e| in_context(e, "unit interference tail"))
}

/// How an interference exponent depends on the serving distance `r`.
///
/// With no power control, substituting `v = (c/μ)^(1/α)·w` turns every PGFL
/// exponent into `weight · r^power · T_α(x)`, where `T_α` is [`unit_tail`] and
/// `x = lower/(c/μ)^(1/α)`. When the lower limit is 0, or when it is `r` and
/// the exponents match, `x` does not depend on `r` and `T_α(x)` is computed
/// once per threshold.
#[derive(Debug, Clone, Copy)]
enum Exponent {
    Scaled {
        weight: f64,
        power: f64,
        tail: f64,
    },
    /// Lower limit `r` with `x = r^(1 − α1/α) / q^(1/α)`.
    ScaledFromR {
        weight: f64,
        power: f64,
        alpha: f64,
        q: f64,
        a1: f64,
    },
    UeToBs {
        gain: f64,
    },
}

struct Factor {
    levels: Vec<(f64, Exponent)>,
}

/// Conditional-CCDF ingredients of one `(mode, y)` pair.
struct Prepared {
    mode: Mode,
    y: f64,
    noise: f64,
    factors: Vec<Factor>,
    si: Option<[GainLevel; 4]>,
}

impl Analytic {
    fn prepare(&self, mode: Mode, y: f64) -> Result<Prepared> {
        let p = &self.params;
        let pl = p.path_loss();
        let mix = p.mix();
        let ant = p.antenna();
        let lam = p.lambda_b();
        let (k1, a1) = (pl.k(Link::BsUe), pl.alpha(Link::BsUe));
        let g_b = ant.g_b();
        let ctx = self.context(mode);
        if p.power().epsilon() > 0.0 {
            // Nested power-control integrals do not reduce; fall back per r.
            return Ok(Prepared {
                mode,
                y,
                noise: f64::NAN,
                factors: Vec::new(),
                si: None,
            });
        }
        let mut factors = Vec::new();
        {
            let tail = |alpha: f64, x: f64| unit_tail(alpha, x, &self.inner);
            match mode.direction() {
                Direction::Downlink => {
                    let d = mix.downlink_active() * lam;
                    if d > 0.0 {
                        let mut levels = Vec::new();
                        for l in ant.alignment_dd() {
                            if l.probability == 0.0 {
                                continue;
                            }
                            let ratio = y * l.gain / g_b;
                            let x = ratio.powf(-1.0 / a1);
                            levels.push((
                                l.probability,
                                Exponent::Scaled {
                                    weight: TAU * d * ratio.powf(2.0 / a1),
                                    power: 2.0,
                                    tail: tail(a1, x)?,
                                },
                            ));
                        }
                        factors.push(Factor { levels });
                    }
                    let u = mix.uplink_active() * lam;
                    if u > 0.0 {
                        let a2 = pl.alpha(Link::UeUe);
                        // c/μ = q · r^α1 on the UE→UE link
                        let q = y * pl.k(Link::UeUe) * p.power().p_u() / (p.power().p_b() * g_b * k1);
                        let weight = TAU * u * q.powf(2.0 / a2);
                        let power = 2.0 * a1 / a2;
                        let e = if mode.is_full_duplex() {
                            Exponent::Scaled {
                                weight,
                                power,
                                tail: tail(a2, 0.0)?,
                            }
                        } else if a1 == a2 {
                            Exponent::Scaled {
                                weight,
                                power,
                                tail: tail(a2, q.powf(-1.0 / a2))?,
                            }
                        } else {
                            Exponent::ScaledFromR {
                                weight,
                                power,
                                alpha: a2,
                                q,
                                a1,
                            }
                        };
                        factors.push(Factor { levels: vec![(1.0, e)] });
                    }
                }
                Direction::Uplink => {
                    let d = mix.downlink_active() * lam;
                    if d > 0.0 {
                        let a3 = pl.alpha(Link::BsBs);
                        let j = tail(a3, 0.0)?;
                        let mut levels = Vec::new();
                        for l in ant.alignment_du() {
                            if l.probability == 0.0 {
                                continue;
                            }
                            let q = y * l.gain * pl.k(Link::BsBs) * p.power().p_b() / (p.power().p_u() * g_b * k1);
                            levels.push((
                                l.probability,
                                Exponent::Scaled {
                                    weight: TAU * d * q.powf(2.0 / a3),
                                    power: 2.0 * a1 / a3,
                                    tail: j,
                                },
                            ));
                        }
                        factors.push(Factor { levels });
                    }
                    if mix.uplink_active() > 0.0 && p.nu() > 0.0 {
                        let levels = ant
                            .alignment_uu()
                            .iter()
                            .filter(|l| l.probability > 0.0)
                            .map(|l| (l.probability, Exponent::UeToBs { gain: l.gain }))
                            .collect();
                        factors.push(Factor { levels });
                    }
                }
            }
        }
        Ok(Prepared {
            mode,
            y,
            noise: ctx.noise(),
            factors,
            si: (mode == Mode::FdUplink).then(|| self_interference_levels(ant, p.power())),
        })
    }

    fn conditional_prepared(&self, prep: &Prepared, r: f64) -> Result<f64> {
        if prep.noise.is_nan() {
            return self.conditional_generic(prep.mode, prep.y, r);
        }
        let s = self.context(prep.mode).laplace_argument(prep.y, r);
        let mut value = (-s * prep.noise).exp();
        if value == 0.0 {
            return Ok(0.0);
        }
        for factor in &prep.factors {
            let mut acc = 0.0;
            for &(prob, e) in &factor.levels {
                let exponent = match e {
                    Exponent::Scaled { weight, power, tail } => weight * r.powf(power) * tail,
                    Exponent::ScaledFromR {
                        weight,
                        power,
                        alpha,
                        q,
                        a1,
                    } => {
                        let x = r.powf(1.0 - a1 / alpha) * q.powf(-1.0 / alpha);
                        weight * r.powf(power) * unit_tail(alpha, x, &self.inner)?
                    }
                    Exponent::UeToBs { gain } => self.ue_to_bs_exponent(s, gain)?,
                };
                acc += prob * (-exponent).exp();
            }
            value *= acc;
        }
        if let Some(levels) = &prep.si {
            value *= levels.iter().map(|l| l.probability * (-s * l.gain).exp()).sum::<f64>();
        }
        Ok(value)
    }

    /// The conditional CCDF assembled from the public Laplace transforms.
    fn conditional_generic(&self, mode: Mode, y: f64, r: f64) -> Result<f64> {
        let ctx = self.context(mode);
        let s = ctx.laplace_argument(y, r);
        let noise = (-s * ctx.noise()).exp();
        if noise == 0.0 {
            return Ok(0.0);
        }
        Ok(noise
            * match mode {
                Mode::FdDownlink => self.laplace_bs_to_ue(s, r)? * self.laplace_ue_to_ue_fd(s)?,
                Mode::HdDownlink => self.laplace_bs_to_ue(s, r)? * self.laplace_ue_to_ue_hd(s, r)?,
                Mode::FdUplink => {
                    self.laplace_bs_to_bs(s)? * self.laplace_ue_to_bs(s)? * self.laplace_self_interference(s)?
                }
                Mode::HdUplink => self.laplace_bs_to_bs(s)? * self.laplace_ue_to_bs(s)?,
            })
    }

    /// `P[γ > y | R = r]` for the tagged link of `mode`.
    pub fn conditional_ccdf(&self, mode: Mode, y: f64, r: f64) -> Result<f64> {
        check_threshold(y)?;
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("serving distance must be ≥ 0, got {r}")));
        }
        let prep = self.prepare(mode, y)?;
        self.conditional_prepared(&prep, r)
    }

    /// `P[γ > y]` for the tagged link of `mode`, `y` in linear units.
    pub fn ccdf(&self, mode: Mode, y: f64) -> Result<Estimate> {
        check_threshold(y)?;
        self.ccdf_unchecked(mode, y, &self.outer)
    }

    /// As [`Self::ccdf`] but also accepts `y = 0`.
    pub(super) fn ccdf_unchecked(&self, mode: Mode, y: f64, spec: &QuadratureSpec) -> Result<Estimate> {
        if y == 0.0 {
            return Ok(Estimate::exact(1.0));
        }
        if y == f64::INFINITY {
            return Ok(Estimate::exact(0.0));
        }
        let dir = mode.direction();
        let lam = match dir {
            Direction::Downlink => self.params.lambda_b(),
            Direction::Uplink => self.params.nu() * self.params.lambda_b(),
        };
        if lam == 0.0 {
            return Err(Error::Domain(
                "uplink serving-distance density is degenerate for ν = 0".into(),
            ));
        }
        let prep = self.prepare(mode, y)?;
        let est = try_integrate_to_infinity(
            |r| {
                let pdf = link_distance_pdf(dir, r, &self.params);
                if pdf == 0.0 {
                    return Ok(0.0);
                }
                Ok(self.conditional_prepared(&prep, r)? * pdf)
            },
            0.0,
            1.0 / (PI * lam).sqrt(),
            spec,
        )
        .map_err(|e| in_context(e, &format!("{mode} CCDF at y = {y:e}")))?;
        clamp_probability(est, mode, y)
    }

    /// CCDF on a grid of linear thresholds; points are evaluated in parallel
    /// and each is identical to a lone [`Self::ccdf`] call.
    pub fn ccdf_grid(&self, mode: Mode, ys: &[f64]) -> Result<Vec<Estimate>> {
        ys.par_iter().map(|&y| self.ccdf(mode, y)).collect()
    }
}

fn check_threshold(y: f64) -> Result<()> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("SINR threshold must be > 0, got {y}")));
    }
    Ok(())
}

fn clamp_probability(mut est: Estimate, mode: Mode, y: f64) -> Result<Estimate> {
    let slack = est.error + 1e-12;
    if est.value > 1.0 {
        if est.value - 1.0 > slack {
            return Err(Error::Domain(format!(
                "{mode} CCDF at y = {y:e} evaluated to {} (> 1 beyond tolerance)",
                est.value
            )));
        }
        est.value = 1.0;
    } else if est.value < 0.0 {
        if -est.value > slack {
            return Err(Error::Domain(format!(
                "{mode} CCDF at y = {y:e} evaluated to {} (< 0 beyond tolerance)",
                est.value
            )));
        }
        est.value = 0.0;
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_system, AntennaPattern, DuplexMix, PowerConfig, RawConfig};
    use crate::quad::integrate;

    fn params(theta_deg: f64, g_b_dbi: f64, rho_f: f64) -> SystemParams {
        let mut raw = RawConfig::table1();
        raw.antenna.theta_b_deg = theta_deg;
        raw.antenna.g_b_dbi = g_b_dbi;
        let p = build_system(&raw).unwrap();
        p.with_mix(DuplexMix::balanced(rho_f).unwrap())
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    fn grid() -> Vec<f64> {
        (-20..=40).map(|d| db(d as f64)).collect()
    }

    #[test]
    fn pdfs_normalize() {
        let p = params(35.0, 15.0, 0.4);
        for dir in Direction::BOTH {
            let est = integrate_to_infinity(
                |r| link_distance_pdf(dir, r, &p),
                0.0,
                p.mean_cell_radius(),
                &QuadratureSpec::OUTER,
            )
            .unwrap();
            assert!((est.value - 1.0).abs() < 1e-8, "{dir:?}: {}", est.value);
        }
        assert_eq!(link_distance_pdf(Direction::Downlink, -1.0, &p), 0.0);
    }

    #[test]
    fn downlink_pdf_mode_and_uplink_mean() {
        let p = params(35.0, 15.0, 0.4);
        let peak = 1.0 / (2.0 * PI * p.lambda_b()).sqrt();
        let f = |r| link_distance_pdf(Direction::Downlink, r, &p);
        assert!(f(peak) > f(peak * 0.99) && f(peak) > f(peak * 1.01));
        let mean = |dir| {
            integrate(
                |r| r * link_distance_pdf(dir, r, &p),
                0.0,
                500.0,
                &QuadratureSpec::OUTER,
            )
            .unwrap()
            .value
        };
        assert!(mean(Direction::Uplink) < mean(Direction::Downlink));
    }

    #[test]
    fn fast_path_matches_laplace_assembly() {
        for (theta, g) in [(35.0, 15.0), (90.0, 7.0)] {
            let a = Analytic::new(params(theta, g, 0.4));
            for mode in Mode::ALL {
                for y in [db(-8.0), db(5.0), db(20.0)] {
                    for r in [0.5, 5.0, 17.8, 40.0] {
                        let fast = a.conditional_ccdf(mode, y, r).unwrap();
                        let slow = a.conditional_generic(mode, y, r).unwrap();
                        assert!((fast - slow).abs() < 1e-6, "{mode} y={y} r={r}: {fast} vs {slow}");
                    }
                }
            }
        }
    }

    #[test]
    fn grid_bounded_monotone_and_dominated() {
        let a = Analytic::new(params(35.0, 15.0, 0.4));
        let ys = grid();
        let mut curves = Vec::new();
        for mode in Mode::ALL {
            let c: Vec<f64> = a.ccdf_grid(mode, &ys).unwrap().iter().map(|e| e.value).collect();
            for w in c.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "{mode} not monotone");
            }
            assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
            curves.push(c);
        }
        // ALL = [FdDownlink, FdUplink, HdDownlink, HdUplink]
        for (fd, hd) in curves[1].iter().zip(&curves[3]) {
            assert!(hd >= fd);
        }
    }

    #[test]
    fn grid_matches_sequential_bitwise() {
        let a = Analytic::new(params(90.0, 7.0, 0.4));
        let ys = [db(-8.0), db(0.0), db(12.0)];
        let par = a.ccdf_grid(Mode::HdDownlink, &ys).unwrap();
        for (y, e) in ys.iter().zip(par) {
            assert_eq!(a.ccdf(Mode::HdDownlink, *y).unwrap(), e);
        }
    }

    #[test]
    fn threshold_limits() {
        let a = Analytic::new(params(90.0, 7.0, 0.4));
        assert!(a.ccdf(Mode::FdDownlink, 0.0).is_err());
        assert!(a.ccdf(Mode::FdDownlink, -1.0).is_err());
        let near_zero = a.ccdf(Mode::FdDownlink, 1e-9).unwrap().value;
        assert!((near_zero - 1.0).abs() < 1e-4);
        assert_eq!(a.ccdf(Mode::FdDownlink, f64::INFINITY).unwrap().value, 0.0);
    }

    #[test]
    fn omni_degenerate_invariant_to_beamwidth() {
        let base = params(35.0, 15.0, 0.4);
        let ys = [db(-8.0), db(10.0)];
        let reference: Vec<Vec<f64>> = Mode::ALL
            .iter()
            .map(|&m| {
                let a = Analytic::new(base.with_antenna(AntennaPattern::omni(0.3).unwrap()));
                ys.iter().map(|&y| a.ccdf(m, y).unwrap().value).collect()
            })
            .collect();
        for theta in [1.0, 2.5, 5.5] {
            let a = Analytic::new(base.with_antenna(AntennaPattern::omni(theta).unwrap()));
            for (i, &m) in Mode::ALL.iter().enumerate() {
                for (j, &y) in ys.iter().enumerate() {
                    let v = a.ccdf(m, y).unwrap().value;
                    assert!((v - reference[i][j]).abs() < 1e-9, "{m} θ={theta}");
                }
            }
        }
    }

    #[test]
    fn perfect_cancellation_equates_uplink_modes() {
        let base = params(35.0, 15.0, 0.4);
        let power = PowerConfig::new(base.power().p_b(), base.power().p_u(), 0.0, 0.0).unwrap();
        let a = Analytic::new(base.with_power(power));
        let y = db(3.0);
        assert_eq!(
            a.ccdf(Mode::FdUplink, y).unwrap().value,
            a.ccdf(Mode::HdUplink, y).unwrap().value
        );
    }

    #[test]
    fn power_control_takes_generic_path() {
        let mut raw = RawConfig::table1();
        raw.power.epsilon = 0.5;
        let a = Analytic::new(build_system(&raw).unwrap());
        let lo = a.conditional_ccdf(Mode::FdUplink, db(-8.0), 15.0).unwrap();
        let hi = a.conditional_ccdf(Mode::FdUplink, db(5.0), 15.0).unwrap();
        assert!(lo > hi && hi > 0.0 && lo <= 1.0);
    }
}
