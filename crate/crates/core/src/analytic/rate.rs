use rayon::prelude::*;

use crate::analytic::laplace::in_context;
use crate::analytic::{Analytic, Direction, Mode};
use crate::error::{Error, Result};
use crate::model::DuplexMix;
use crate::quad::{try_integrate, Estimate, QuadratureSpec};

/// Unit-width `u` blocks integrated per parallel batch.
const BATCH: usize = 8;
/// Beyond this many bits/s/Hz the rate integral is declared divergent.
const MAX_U: usize = 256;

/// Mean spectral efficiency with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// bits/s/Hz, or bits/s/Hz/m² for ASE.
    pub value: f64,
    /// Accumulated quadrature error estimate of the integrated part.
    pub quad_error: f64,
    /// Bound on the part of the integral beyond `upper_u`.
    pub tail_bound: f64,
    pub upper_u: f64,
}

impl RateEstimate {
    pub fn error(&self) -> f64 {
        self.quad_error + self.tail_bound
    }

    fn scaled(self, k: f64) -> RateEstimate {
        RateEstimate {
            value: self.value * k,
            quad_error: self.quad_error * k,
            tail_bound: self.tail_bound * k,
            upper_u: self.upper_u,
        }
    }

    fn zero() -> RateEstimate {
        RateEstimate {
            value: 0.0,
            quad_error: 0.0,
            tail_bound: 0.0,
            upper_u: 0.0,
        }
    }
}

/// Direction-level rate from the FD-cell and HD-cell mode rates:
/// `ρ_F·fd + ρ_D·hd` downlink, `ρ_F·fd + ρ_U·hd` uplink.
pub fn mix_rates(mix: &DuplexMix, direction: Direction, fd: f64, hd: f64) -> f64 {
    let (fd_mode, hd_mode) = direction.modes();
    fd_mode.weight(mix) * fd + hd_mode.weight(mix) * hd
}

/// Direction-level coverage: the FD/HD mode coverages averaged over the cells
/// that carry a link in that direction.
pub fn mix_coverage(mix: &DuplexMix, direction: Direction, fd: f64, hd: f64) -> Result<f64> {
    let (fd_mode, hd_mode) = direction.modes();
    let (wf, wh) = (fd_mode.weight(mix), hd_mode.weight(mix));
    if wf + wh == 0.0 {
        return Err(Error::Domain(format!(
            "no cells carry {} traffic; coverage is undefined",
            direction.label()
        )));
    }
    Ok((wf * fd + wh * hd) / (wf + wh))
}

/// `∫_0^∞ ccdf(2^u − 1) du` for a nonincreasing `ccdf`.
///
/// The integral runs over unit blocks of `u`, [`BATCH`] at a time in
/// parallel, until the CCDF at a block end drops below `abs_tol·10⁻²` and the
/// remaining tail, bounded by continuing the last block-end value
/// geometrically at the observed block-to-block decay ratio, is below
/// `rel_tol` of the total. A CCDF that has not decayed by `u = 256` is
/// reported as non-convergence (the rate diverges).
pub fn integrate_rate<F>(ccdf: F, spec: &QuadratureSpec) -> Result<RateEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let floor = spec.abs_tol * 1e-2;
    let block = |k: usize| -> Result<(Estimate, f64)> {
        let a = k as f64;
        let est = try_integrate(|u| ccdf(u.exp2() - 1.0), a, a + 1.0, spec)?;
        Ok((est, ccdf((a + 1.0).exp2() - 1.0)?))
    };
    let mut total = 0.0;
    let mut quad_error = 0.0;
    let mut prev_end = 1.0;
    let mut start = 0;
    while start < MAX_U {
        let blocks: Vec<(Estimate, f64)> = (start..start + BATCH)
            .into_par_iter()
            .map(block)
            .collect::<Result<_>>()?;
        for (i, (est, end)) in blocks.into_iter().enumerate() {
            total += est.value;
            quad_error += est.error;
            let upper_u = (start + i + 1) as f64;
            let ratio = end / prev_end;
            prev_end = end;
            let tail_bound = if end == 0.0 {
                0.0
            } else if end < floor && ratio < 1.0 {
                end / (1.0 - ratio)
            } else {
                continue;
            };
            if tail_bound <= spec.rel_tol * total {
                return Ok(RateEstimate {
                    value: total,
                    quad_error,
                    tail_bound,
                    upper_u,
                });
            }
        }
        start += BATCH;
    }
    Err(Error::NonConvergence {
        context: "rate integral (CCDF not decaying in u)".into(),
        value: total,
        error: prev_end,
        subdivisions: MAX_U,
    })
}

impl Analytic {
    /// `∫_0^∞ P[γ > 2^u − 1] du` for the tagged link of `mode`; see
    /// [`integrate_rate`] for the truncation rule.
    pub fn mean_rate(&self, mode: Mode) -> Result<RateEstimate> {
        let ccdf_spec = QuadratureSpec {
            abs_tol: self.outer.abs_tol * 1e-2,
            ..self.outer
        };
        integrate_rate(|y| Ok(self.ccdf_unchecked(mode, y, &ccdf_spec)?.value), &self.outer)
            .map_err(|e| in_context(e, &format!("{mode} mean rate")))
    }

    /// Network-level mean rate of `direction`: the FD and HD mode rates
    /// weighted by the cell fractions. Zero-weight modes are not evaluated.
    pub fn network_rate(&self, direction: Direction) -> Result<RateEstimate> {
        let mix = self.params.mix();
        let (fd, hd) = direction.modes();
        let mut acc = RateEstimate::zero();
        for mode in [fd, hd] {
            let w = mode.weight(mix);
            if w == 0.0 {
                continue;
            }
            let r = self.mean_rate(mode)?.scaled(w);
            acc.value += r.value;
            acc.quad_error += r.quad_error;
            acc.tail_bound += r.tail_bound;
            acc.upper_u = acc.upper_u.max(r.upper_u);
        }
        Ok(acc)
    }

    /// Area spectral efficiency `λ_B·E[C]` of `direction` in bits/s/Hz/m².
    pub fn ase(&self, direction: Direction) -> Result<RateEstimate> {
        Ok(self.network_rate(direction)?.scaled(self.params.lambda_b()))
    }

    /// Direction-level coverage at linear threshold `y`.
    pub fn coverage(&self, direction: Direction, y: f64) -> Result<Estimate> {
        let mix = self.params.mix();
        let (fd, hd) = direction.modes();
        let (wf, wh) = (fd.weight(mix), hd.weight(mix));
        let eval = |mode: Mode, w: f64| -> Result<Estimate> {
            if w == 0.0 {
                Ok(Estimate::exact(0.0))
            } else {
                self.ccdf(mode, y)
            }
        };
        let (ef, eh) = (eval(fd, wf)?, eval(hd, wh)?);
        let value = mix_coverage(mix, direction, ef.value, eh.value)?;
        Ok(Estimate {
            value,
            error: (wf * ef.error + wh * eh.error) / (wf + wh),
            evaluations: ef.evaluations + eh.evaluations,
        })
    }
}
