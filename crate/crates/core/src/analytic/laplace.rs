use std::f64::consts::{PI, TAU};

use crate::analytic::Analytic;
use crate::error::{Error, Result};
use crate::model::{self_interference_levels, GainLevel, Link};
use crate::quad::{integrate, integrate_to_infinity, try_integrate_to_infinity};

fn check_s(s: f64) -> Result<()> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "Laplace argument must be finite and ≥ 0, got {s}"
        )));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r >= 0.0) || r.is_nan() {
        return Err(Error::Domain(format!("distance must be ≥ 0, got {r}")));
    }
    Ok(())
}

fn mixture<F>(levels: &[GainLevel], mut exponent: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut acc = 0.0;
    for level in levels {
        if level.probability == 0.0 {
            continue;
        }
        acc += level.probability * (-exponent(level.gain)?).exp();
    }
    Ok(acc)
}

impl Analytic {
    /// `2π·density·∫_lower^∞ v / (1 + μ v^α / c) dv`, the PGFL exponent of a
    /// Rayleigh-faded PPP whose mean received power at distance `v` is
    /// `c·v^(−α)` per unit `s`.
    pub(super) fn pgfl_exponent(&self, density: f64, c: f64, alpha: f64, lower: f64) -> Result<f64> {
        if density == 0.0 || c == 0.0 {
            return Ok(0.0);
        }
        let mu = self.params.mu();
        let knee = (c / mu).powf(1.0 / alpha);
        let scale = knee.max(lower).max(1e-12);
        let pref = TAU * density;
        let est = integrate_to_infinity(|v| pref * v / (1.0 + mu * v.powf(alpha) / c), lower, scale, &self.inner)
            .map_err(|e| in_context(e, "interference exponent"))?;
        Ok(est.value)
    }

    /// `E_Z[x/(x+μ)]` with `Z` the ν-corrected serving distance of an
    /// interfering uplink UE, restricted to `Z < upper`.
    fn serving_distance_expectation<F>(&self, upper: f64, mut x_of_z: F) -> Result<f64>
    where
        F: FnMut(f64) -> f64,
    {
        let lam = self.params.nu() * self.params.lambda_b();
        if lam == 0.0 {
            return Err(Error::Domain(
                "power control needs ν > 0 (serving distance of interferers undefined)".into(),
            ));
        }
        let mu = self.params.mu();
        let mut integrand = |z: f64| {
            let pdf = TAU * lam * z * (-PI * lam * z * z).exp();
            if pdf == 0.0 {
                return 0.0;
            }
            let x = x_of_z(z);
            pdf * x / (x + mu)
        };
        // The density is below e^(−144) past 12 decay lengths; clipping keeps
        // the Kronrod nodes on the bump when `upper` is far out.
        let reach = 12.0 / (PI * lam).sqrt();
        let est = integrate(&mut integrand, 0.0, upper.min(reach), &self.inner);
        est.map(|e| e.value)
            .map_err(|e| in_context(e, "serving-distance expectation"))
    }

    /// UE→UE exponent, general power control, nested over `Z_u`.
    pub(super) fn ue_to_ue_exponent_nested(&self, s: f64, lower: f64) -> Result<f64> {
        let p = &self.params;
        let density = p.mix().uplink_active() * p.lambda_b();
        if density == 0.0 || s == 0.0 {
            return Ok(0.0);
        }
        let pl = p.path_loss();
        let eps = p.power().epsilon();
        let (k1, a1) = (pl.k(Link::BsUe), pl.alpha(Link::BsUe));
        let (k2, a2) = (pl.k(Link::UeUe), pl.alpha(Link::UeUe));
        let base = s * k2 * p.power().p_u() * k1.powf(-eps);
        let z_typ = p.mean_cell_radius() / p.nu().max(1e-12).sqrt();
        let knee = (base * z_typ.powf(eps * a1) / p.mu()).powf(1.0 / a2);
        let pref = TAU * density;
        try_integrate_to_infinity(
            |v| {
                let c = base * v.powf(-a2);
                let e = self.serving_distance_expectation(f64::INFINITY, |z| c * z.powf(eps * a1))?;
                Ok(pref * v * e)
            },
            lower,
            knee.max(lower).max(1e-12),
            &self.inner,
        )
        .map(|e| e.value)
        .map_err(|e| in_context(e, "UE-to-UE exponent"))
    }

    pub(super) fn ue_to_ue_exponent(&self, s: f64, lower: f64) -> Result<f64> {
        let p = &self.params;
        if p.power().epsilon() > 0.0 {
            return self.ue_to_ue_exponent_nested(s, lower);
        }
        let pl = p.path_loss();
        self.pgfl_exponent(
            p.mix().uplink_active() * p.lambda_b(),
            s * pl.k(Link::UeUe) * p.power().p_u(),
            pl.alpha(Link::UeUe),
            lower,
        )
    }

    /// Laplace transform of the downlink interference from FD and HD-DL base
    /// stations beyond the serving distance `r`, seen by a UE.
    pub fn laplace_bs_to_ue(&self, s: f64, r: f64) -> Result<f64> {
        check_s(s)?;
        check_r(r)?;
        let p = &self.params;
        if s == 0.0 || p.mix().downlink_active() == 0.0 {
            return Ok(1.0);
        }
        let density = p.mix().downlink_active() * p.lambda_b();
        let pl = p.path_loss();
        let c0 = s * pl.k(Link::BsUe) * p.power().p_b();
        mixture(&p.antenna().alignment_dd(), |gain| {
            self.pgfl_exponent(density, c0 * gain, pl.alpha(Link::BsUe), r)
        })
    }

    /// Laplace transform of the uplink-UE interference at a UE in an FD cell
    /// (own-cell uplink UE included, so integration starts at 0).
    pub fn laplace_ue_to_ue_fd(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        Ok((-self.ue_to_ue_exponent(s, 0.0)?).exp())
    }

    /// As [`Self::laplace_ue_to_ue_fd`] for a UE in an HD-DL cell: interfering
    /// uplink UEs are held beyond the serving distance `r`.
    pub fn laplace_ue_to_ue_hd(&self, s: f64, r: f64) -> Result<f64> {
        check_s(s)?;
        check_r(r)?;
        if r.is_infinite() {
            return Ok(1.0);
        }
        Ok((-self.ue_to_ue_exponent(s, r)?).exp())
    }

    /// Laplace transform of the BS→BS interference at a receiving BS.
    pub fn laplace_bs_to_bs(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        let p = &self.params;
        if s == 0.0 || p.mix().downlink_active() == 0.0 {
            return Ok(1.0);
        }
        let density = p.mix().downlink_active() * p.lambda_b();
        let pl = p.path_loss();
        let c0 = s * pl.k(Link::BsBs) * p.power().p_b();
        mixture(&p.antenna().alignment_du(), |gain| {
            self.pgfl_exponent(density, c0 * gain, pl.alpha(Link::BsBs), 0.0)
        })
    }

    pub(super) fn ue_to_bs_exponent_nested(&self, s: f64, gain: f64) -> Result<f64> {
        let p = &self.params;
        let density = p.mix().uplink_active() * p.lambda_b();
        if density == 0.0 || s == 0.0 {
            return Ok(0.0);
        }
        let pl = p.path_loss();
        let eps = p.power().epsilon();
        let (k1, a1) = (pl.k(Link::BsUe), pl.alpha(Link::BsUe));
        let base = s * gain * p.power().p_u() * k1.powf(1.0 - eps);
        let z_typ = p.mean_cell_radius() / p.nu().max(1e-12).sqrt();
        let knee = (base * z_typ.powf(eps * a1) / p.mu()).powf(1.0 / a1);
        let pref = TAU * density;
        try_integrate_to_infinity(
            |v| {
                let c = base * v.powf(-a1);
                let e = self.serving_distance_expectation(v, |z| c * z.powf(eps * a1))?;
                Ok(pref * v * e)
            },
            0.0,
            knee.max(z_typ).max(1e-12),
            &self.inner,
        )
        .map(|e| e.value)
        .map_err(|e| in_context(e, "UE-to-BS exponent"))
    }

    pub(super) fn ue_to_bs_exponent(&self, s: f64, gain: f64) -> Result<f64> {
        let p = &self.params;
        let density = p.mix().uplink_active() * p.lambda_b();
        let nu_lam = p.nu() * p.lambda_b();
        if density == 0.0 || s == 0.0 || nu_lam == 0.0 {
            return Ok(0.0);
        }
        if p.power().epsilon() > 0.0 {
            return self.ue_to_bs_exponent_nested(s, gain);
        }
        let mu = p.mu();
        let pl = p.path_loss();
        let alpha = pl.alpha(Link::BsUe);
        let c = s * gain * p.power().p_u() * pl.k(Link::BsUe);
        let knee = (c / mu).powf(1.0 / alpha);
        let decay = 1.0 / (PI * nu_lam).sqrt();
        let pref = TAU * density;
        integrate_to_infinity(
            |v| {
                let accepted = -(-PI * nu_lam * v * v).exp_m1();
                pref * v * accepted / (1.0 + mu * v.powf(alpha) / c)
            },
            0.0,
            knee.max(decay),
            &self.inner,
        )
        .map(|e| e.value)
        .map_err(|e| in_context(e, "UE-to-BS exponent"))
    }

    /// Laplace transform of the uplink-UE interference at a receiving BS;
    /// only UEs nearer their own BS than the victim contribute.
    pub fn laplace_ue_to_bs(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        let p = &self.params;
        if s == 0.0 || p.mix().uplink_active() == 0.0 {
            return Ok(1.0);
        }
        mixture(&p.antenna().alignment_uu(), |gain| self.ue_to_bs_exponent(s, gain))
    }

    /// Laplace transform of the residual self-interference of an FD BS.
    pub fn laplace_self_interference(&self, s: f64) -> Result<f64> {
        check_s(s)?;
        let levels = self_interference_levels(self.params.antenna(), self.params.power());
        Ok(levels.iter().map(|l| l.probability * (-s * l.gain).exp()).sum())
    }
}

pub(super) fn in_context(err: Error, context: &str) -> Error {
    match err {
        Error::NonConvergence {
            context: inner,
            value,
            error,
            subdivisions,
        } => Error::NonConvergence {
            context: format!("{context}: {inner}"),
            value,
            error,
            subdivisions,
        },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AntennaPattern, DuplexMix, PowerConfig, RawConfig, SystemParams};

    fn table1(theta_deg: f64, g_b_dbi: f64, rho_f: f64) -> SystemParams {
        let mut raw = RawConfig::table1();
        raw.antenna.theta_b_deg = theta_deg;
        raw.antenna.g_b_dbi = g_b_dbi;
        raw.network.rho_f = rho_f;
        raw.network.rho_d = 0.5 * (1.0 - rho_f);
        raw.network.rho_u = 1.0 - rho_f - raw.network.rho_d;
        crate::model::build_system(&raw).unwrap()
    }

    /// `∫_0^∞ v/(1 + b v^α) dv = b^(−2/α)·(π/α)/sin(2π/α)`, via the Beta
    /// function `B(2/α, 1 − 2/α)`.
    fn closed_form_exponent(density: f64, c: f64, mu: f64, alpha: f64) -> f64 {
        let b = mu / c;
        let d = 2.0 / alpha;
        TAU * density * b.powf(-d) * (PI / alpha) / (PI * d).sin()
    }

    #[test]
    fn unity_at_zero() {
        let a = Analytic::new(table1(35.0, 15.0, 0.4));
        assert_eq!(a.laplace_bs_to_ue(0.0, 10.0).unwrap(), 1.0);
        assert_eq!(a.laplace_ue_to_ue_fd(0.0).unwrap(), 1.0);
        assert_eq!(a.laplace_ue_to_ue_hd(0.0, 5.0).unwrap(), 1.0);
        assert_eq!(a.laplace_bs_to_bs(0.0).unwrap(), 1.0);
        assert_eq!(a.laplace_ue_to_bs(0.0).unwrap(), 1.0);
        assert!((a.laplace_self_interference(0.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_negative_arguments() {
        let a = Analytic::new(table1(35.0, 15.0, 0.4));
        assert!(a.laplace_bs_to_ue(-1.0, 1.0).is_err());
        assert!(a.laplace_bs_to_ue(1.0, -1.0).is_err());
        assert!(a.laplace_bs_to_bs(f64::NAN).is_err());
    }

    #[test]
    fn empty_interferer_sets() {
        let base = table1(90.0, 7.0, 0.4);
        let no_dl = Analytic::new(base.with_mix(DuplexMix::new(0.0, 0.0, 1.0).unwrap()));
        assert_eq!(no_dl.laplace_bs_to_ue(1e9, 10.0).unwrap(), 1.0);
        assert_eq!(no_dl.laplace_bs_to_bs(1e9).unwrap(), 1.0);
        let no_ul = Analytic::new(base.with_mix(DuplexMix::new(0.0, 1.0, 0.0).unwrap()));
        assert_eq!(no_ul.laplace_ue_to_ue_fd(1e9).unwrap(), 1.0);
        assert_eq!(no_ul.laplace_ue_to_bs(1e9).unwrap(), 1.0);
    }

    #[test]
    fn ue_to_ue_matches_beta_closed_form() {
        let p = table1(35.0, 15.0, 0.4);
        let a = Analytic::new(p);
        for s in [1e6, 1e8, 1e10, 1e12] {
            let c = s * 8.8e-4 * p.power().p_u();
            let density = p.mix().uplink_active() * p.lambda_b();
            let expected = (-closed_form_exponent(density, c, 1.0, 3.67)).exp();
            let got = a.laplace_ue_to_ue_fd(s).unwrap();
            assert!((got - expected).abs() < 1e-8, "s={s}: {got} vs {expected}");
        }
    }

    #[test]
    fn bs_to_bs_matches_beta_closed_form() {
        let p = table1(90.0, 7.0, 0.4);
        let a = Analytic::new(p);
        let s = 1e10;
        let density = p.mix().downlink_active() * p.lambda_b();
        let expected: f64 = p
            .antenna()
            .alignment_du()
            .iter()
            .map(|l| {
                let c = s * l.gain * 8.8e-4 * p.power().p_b();
                l.probability * (-closed_form_exponent(density, c, 1.0, 3.67)).exp()
            })
            .sum();
        assert!((a.laplace_bs_to_bs(s).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn hd_ue_to_ue_dominates_fd_and_limits() {
        let a = Analytic::new(table1(35.0, 15.0, 0.4));
        for s in [1e7, 1e9, 1e11] {
            let fd = a.laplace_ue_to_ue_fd(s).unwrap();
            assert!((a.laplace_ue_to_ue_hd(s, 0.0).unwrap() - fd).abs() < 1e-12);
            let mut last = fd;
            for r in [1.0, 5.0, 20.0, 80.0] {
                let hd = a.laplace_ue_to_ue_hd(s, r).unwrap();
                assert!(hd >= last - 1e-12);
                last = hd;
            }
            assert_eq!(a.laplace_ue_to_ue_hd(s, f64::INFINITY).unwrap(), 1.0);
            assert!((a.laplace_ue_to_ue_hd(s, 1e12).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn ue_to_bs_vanishes_without_acceptance() {
        let p = table1(35.0, 15.0, 0.4).with_nu(0.0).unwrap();
        assert_eq!(Analytic::new(p).laplace_ue_to_bs(1e10).unwrap(), 1.0);
    }

    #[test]
    fn omni_collapse_bs_to_bs() {
        let base = table1(90.0, 7.0, 0.4);
        let omni = base.with_antenna(AntennaPattern::omni(1.0).unwrap());
        let a = Analytic::new(omni);
        let s = 1e10;
        let density = base.mix().downlink_active() * base.lambda_b();
        let c = s * 8.8e-4 * base.power().p_b();
        let expected = (-closed_form_exponent(density, c, 1.0, 3.67)).exp();
        assert!((a.laplace_bs_to_bs(s).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn self_interference_cases() {
        let base = table1(90.0, 7.0, 0.4);
        let perfect = base.with_power(PowerConfig::new(0.25, 0.2, 0.0, 0.0).unwrap());
        assert_eq!(Analytic::new(perfect).laplace_self_interference(1e12).unwrap(), 1.0);

        let omni = base.with_antenna(AntennaPattern::new(1.0, 2.0, 2.0).unwrap());
        let a = Analytic::new(omni);
        let s = 3e11;
        let w = base.power().a_si() * base.power().p_b() * 4.0;
        assert!((a.laplace_self_interference(s).unwrap() - (-s * w).exp()).abs() < 1e-14);
    }

    #[test]
    fn nested_paths_agree_with_closed_paths_at_zero_power_control() {
        let a = Analytic::new(table1(35.0, 15.0, 0.4));
        for s in [1e8, 1e10] {
            let closed = a.ue_to_ue_exponent(s, 3.0).unwrap();
            let nested = a.ue_to_ue_exponent_nested(s, 3.0).unwrap();
            assert!(((closed - nested) / closed).abs() < 1e-5, "{closed} {nested}");
            let g = a.params().antenna().g_b();
            let closed = a.ue_to_bs_exponent(s, g).unwrap();
            let nested = a.ue_to_bs_exponent_nested(s, g).unwrap();
            assert!(((closed - nested) / closed).abs() < 1e-5, "{closed} {nested}");
        }
    }

    #[test]
    fn power_control_is_monotone_in_s() {
        let mut raw = RawConfig::table1();
        raw.power.epsilon = 0.5;
        let a = Analytic::new(crate::model::build_system(&raw).unwrap());
        let mut last = (1.0, 1.0);
        for k in 0..6 {
            let s = 10f64.powi(4 + k);
            let y = a.laplace_ue_to_ue_fd(s).unwrap();
            let h = a.laplace_ue_to_bs(s).unwrap();
            assert!(y <= last.0 + 1e-12 && h <= last.1 + 1e-12);
            assert!(y > 0.0 && h > 0.0);
            last = (y, h);
        }
    }
}
