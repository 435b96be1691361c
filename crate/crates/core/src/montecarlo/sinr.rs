//! Per-sample SINR of the tagged link at the window centre.
//!
//! Each pass returns the FD-cell and HD-cell SINR of one direction from the
//! same draws, so the two modes share every common term (common random
//! numbers). The only differences are the FD-only terms: the own-cell uplink
//! UE on the downlink and self-interference on the uplink.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::analytic::Direction;
use crate::error::{Error, Result};
use crate::model::{self_interference_levels, GainLevel, Link, SystemParams};
use crate::montecarlo::realization::{
    generate_points, rayleigh_distance, BaseStation, BsMode, NetworkRealization, PointClass, RawPoint, Serving,
    UserEquipment, Window,
};
use crate::montecarlo::rng::{family, mix, stream};
use crate::montecarlo::voronoi::{self, Point};

/// Distances below this are raised to it in Voronoi fidelity.
pub const MIN_DISTANCE_M: f64 = 1.0;

fn norm(p: Point) -> f64 {
    p[0].hypot(p[1])
}

fn bearing(from: Point, to: Point) -> f64 {
    (to[1] - from[1]).atan2(to[0] - from[0])
}

fn pick(levels: &[GainLevel], u: f64) -> f64 {
    let mut acc = 0.0;
    for l in levels {
        acc += l.probability;
        if u < acc {
            return l.gain;
        }
    }
    levels.last().expect("nonempty levels").gain
}

/// FD-cell and HD-cell SINR of one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Pair {
    pub fd: f64,
    pub hd: f64,
}

pub(crate) struct Engine<'a> {
    pub params: &'a SystemParams,
    pub window: Window,
    pub seed: u64,
}

impl Engine<'_> {
    fn points(&self, sample: u64, classes: &[PointClass]) -> Vec<RawPoint> {
        classes
            .iter()
            .flat_map(|&c| generate_points(self.params, &self.window, self.seed, sample, c))
            .collect()
    }

    fn fade(&self) -> Exp<f64> {
        Exp::new(self.params.mu()).expect("validated fading rate")
    }

    pub fn check(&self, direction: Direction) -> Result<()> {
        if direction == Direction::Uplink && self.params.nu() == 0.0 {
            return Err(Error::Domain(
                "uplink sampling needs ν > 0 (serving distance undefined)".into(),
            ));
        }
        Ok(())
    }

    // ---- model fidelity -------------------------------------------------

    /// Downlink: serving distance from `f_r`, BS interferers beyond it with
    /// one common alignment gain, uplink UEs everywhere (FD) or beyond the
    /// serving distance (HD).
    pub fn model_downlink(&self, sample: u64) -> Pair {
        let p = self.params;
        let pl = p.path_loss();
        let pw = p.power();
        let mut rng = stream(mix(&[self.seed, family::TAGGED_DL]), sample);
        let r = rayleigh_distance(p.lambda_b(), 1.0 - rng.random::<f64>());
        let h0: f64 = self.fade().sample(&mut rng);
        let c_dd = pick(&p.antenna().alignment_dd(), rng.random());

        let mut i_bs = 0.0;
        for q in self.points(sample, &[PointClass::BsFd, PointClass::BsHdDl]) {
            let d = norm(q.pos);
            if d > r {
                i_bs += pw.p_b() * c_dd * pl.attenuation_unchecked(Link::BsUe, d) * q.fade;
            }
        }
        let (mut i_fd, mut i_hd) = (0.0, 0.0);
        let lam_ul = p.nu() * p.lambda_b();
        for q in self.points(sample, &[PointClass::UeFdUl, PointClass::UeHdUl]) {
            let d = norm(q.pos);
            let tx = uplink_power(p, rayleigh_distance(lam_ul, q.aux));
            let term = tx * pl.attenuation_unchecked(Link::UeUe, d) * q.fade;
            i_fd += term;
            if d > r {
                i_hd += term;
            }
        }
        let s = pw.p_b() * p.antenna().g_b() * pl.attenuation_unchecked(Link::BsUe, r) * h0;
        Pair {
            fd: s / (i_bs + i_fd + p.n0()),
            hd: s / (i_bs + i_hd + p.n0()),
        }
    }

    /// Uplink: serving distance from `f′_r`, all downlink-active BSs with one
    /// common joint alignment gain, uplink UEs accepted only when nearer to
    /// their own BS than to the victim, with one common receive gain.
    pub fn model_uplink(&self, sample: u64) -> Pair {
        let p = self.params;
        let pl = p.path_loss();
        let pw = p.power();
        let lam_ul = p.nu() * p.lambda_b();
        let mut rng = stream(mix(&[self.seed, family::TAGGED_UL]), sample);
        let r = rayleigh_distance(lam_ul, 1.0 - rng.random::<f64>());
        let h0: f64 = self.fade().sample(&mut rng);
        let c_du = pick(&p.antenna().alignment_du(), rng.random());
        let c_uu = pick(&p.antenna().alignment_uu(), rng.random());
        let mut si_rng = stream(mix(&[self.seed, family::SELF_INTERFERENCE]), sample);
        let w = pick(&self_interference_levels(p.antenna(), pw), si_rng.random());

        let mut i = 0.0;
        for q in self.points(sample, &[PointClass::BsFd, PointClass::BsHdDl]) {
            i += pw.p_b() * c_du * pl.attenuation_unchecked(Link::BsBs, norm(q.pos)) * q.fade;
        }
        for q in self.points(sample, &[PointClass::UeFdUl, PointClass::UeHdUl]) {
            let x = norm(q.pos);
            let z = rayleigh_distance(lam_ul, q.aux);
            if x > z {
                i += uplink_power(p, z) * c_uu * pl.attenuation_unchecked(Link::BsUe, x) * q.fade;
            }
        }
        let s = uplink_power(p, r) * p.antenna().g_b() * pl.attenuation_unchecked(Link::BsUe, r) * h0;
        Pair {
            fd: s / (i + w + p.n1()),
            hd: s / (i + p.n1()),
        }
    }

    // ---- Voronoi fidelity -----------------------------------------------

    fn sites(&self, sample: u64) -> Vec<Site> {
        let mut sites = Vec::new();
        for class in PointClass::BS {
            let mode = class.bs_mode().expect("BS class");
            for q in generate_points(self.params, &self.window, self.seed, sample, class) {
                sites.push(Site {
                    pos: q.pos,
                    mode,
                    fade: q.fade,
                    key: q.key,
                });
            }
        }
        sites
    }

    /// Downlink: the tagged UE at the origin is served by its nearest BS,
    /// whose mode is set to FD or HD-DL. Beams point at the scheduled UEs.
    pub fn voronoi_downlink(&self, sample: u64) -> Pair {
        let p = self.params;
        let pl = p.path_loss();
        let pw = p.power();
        let sites = self.sites(sample);
        let mut rng = stream(mix(&[self.seed, family::TAGGED_DL]), sample);
        let h0: f64 = self.fade().sample(&mut rng);
        let Some(serving) = (0..sites.len()).min_by(|&a, &b| norm(sites[a].pos).total_cmp(&norm(sites[b].pos))) else {
            // No BS in the window: no link.
            return Pair { fd: 0.0, hd: 0.0 };
        };
        let ues = place_ues(&sites, &self.window, p);
        let origin = [0.0, 0.0];
        let gain = |theta: f64| p.antenna().gain(theta);

        let mut i_common = 0.0;
        let mut i_own = 0.0;
        for (j, (site, ue)) in sites.iter().zip(&ues).enumerate() {
            if j != serving && site.mode.transmits() {
                let beam = bearing(site.pos, ue.dl);
                let g = gain(bearing(site.pos, origin) - beam);
                let d = norm(site.pos).max(MIN_DISTANCE_M);
                i_common += pw.p_b() * g * pl.attenuation_unchecked(Link::BsUe, d) * site.fade;
            }
            let receives = if j == serving { true } else { site.mode.receives() };
            if receives {
                let own = dist(ue.ul, site.pos).max(MIN_DISTANCE_M);
                let d = norm(ue.ul).max(MIN_DISTANCE_M);
                let term = uplink_power(p, own) * pl.attenuation_unchecked(Link::UeUe, d) * ue.ul_fade;
                if j == serving {
                    i_own += term;
                } else {
                    i_common += term;
                }
            }
        }
        let r = norm(sites[serving].pos).max(MIN_DISTANCE_M);
        let s = pw.p_b() * p.antenna().g_b() * pl.attenuation_unchecked(Link::BsUe, r) * h0;
        Pair {
            fd: s / (i_common + i_own + p.n0()),
            hd: s / (i_common + p.n0()),
        }
    }

    /// Uplink: a tagged BS at the origin (FD or HD-UL) joins the tessellation
    /// and receives from a UE uniform in its own cell.
    pub fn voronoi_uplink(&self, sample: u64) -> Pair {
        let p = self.params;
        let pl = p.path_loss();
        let pw = p.power();
        let mut sites = self.sites(sample);
        let mut rng = stream(mix(&[self.seed, family::TAGGED_UL]), sample);
        let h0: f64 = self.fade().sample(&mut rng);
        let psi0 = std::f64::consts::TAU * rng.random::<f64>();
        let key0: u64 = rng.random();
        sites.push(Site {
            pos: [0.0, 0.0],
            mode: BsMode::FullDuplex,
            fade: 1.0,
            key: key0,
        });
        let tagged = sites.len() - 1;
        let ues = place_ues(&sites, &self.window, p);
        let origin = [0.0, 0.0];
        let gain = |theta: f64| p.antenna().gain(theta);
        let ul_beam0 = bearing(origin, ues[tagged].ul);

        let mut i = 0.0;
        for (site, ue) in sites[..tagged].iter().zip(&ues) {
            let rx_to_bs = gain(bearing(origin, site.pos) - ul_beam0);
            if site.mode.transmits() {
                let g_tx = gain(bearing(site.pos, origin) - bearing(site.pos, ue.dl));
                let d = norm(site.pos).max(MIN_DISTANCE_M);
                i += pw.p_b() * g_tx * rx_to_bs * pl.attenuation_unchecked(Link::BsBs, d) * site.fade;
            }
            if site.mode.receives() {
                let g_rx = gain(bearing(origin, ue.ul) - ul_beam0);
                let own = dist(ue.ul, site.pos).max(MIN_DISTANCE_M);
                let d = norm(ue.ul).max(MIN_DISTANCE_M);
                i += uplink_power(p, own) * g_rx * pl.attenuation_unchecked(Link::BsUe, d) * ue.ul_fade;
            }
        }
        // The transmit array sees the receive array along ψ, and vice versa
        // along ψ + π.
        let dl_beam0 = bearing(origin, ues[tagged].dl);
        let w = pw.a_si() * pw.p_b() * gain(psi0 - dl_beam0) * gain(psi0 + PI - ul_beam0);
        let r = norm(ues[tagged].ul).max(MIN_DISTANCE_M);
        let s = uplink_power(p, r) * p.antenna().g_b() * pl.attenuation_unchecked(Link::BsUe, r) * h0;
        Pair {
            fd: s / (i + w + p.n1()),
            hd: s / (i + p.n1()),
        }
    }

    /// Voronoi-fidelity realization without a tagged link: every BS serves
    /// UEs uniform in its cell and points its beams at them.
    pub fn voronoi_realization(&self, sample: u64) -> NetworkRealization {
        let p = self.params;
        let sites = self.sites(sample);
        let placed = place_ues(&sites, &self.window, p);
        let mut bs = Vec::with_capacity(sites.len());
        let mut ues = Vec::new();
        for (j, (site, ue)) in sites.iter().zip(&placed).enumerate() {
            let tx = site.mode.transmits();
            let rx = site.mode.receives();
            bs.push(BaseStation {
                position: site.pos,
                mode: site.mode,
                dl_beam: tx.then(|| bearing(site.pos, ue.dl)),
                ul_beam: rx.then(|| bearing(site.pos, ue.ul)),
                fade: site.fade,
            });
            let fd = site.mode == BsMode::FullDuplex;
            use crate::analytic::Mode;
            if tx {
                ues.push(UserEquipment {
                    position: ue.dl,
                    role: if fd { Mode::FdDownlink } else { Mode::HdDownlink },
                    serving: Serving::Bs(j),
                    fade: ue.dl_fade,
                });
            }
            if rx {
                ues.push(UserEquipment {
                    position: ue.ul,
                    role: if fd { Mode::FdUplink } else { Mode::HdUplink },
                    serving: Serving::Bs(j),
                    fade: ue.ul_fade,
                });
            }
        }
        NetworkRealization {
            window: self.window,
            bs,
            ues,
            seed: self.seed,
            sample,
        }
    }
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Uplink transmit power of a UE at distance `r` from its server.
fn uplink_power(p: &SystemParams, r: f64) -> f64 {
    if p.power().epsilon() == 0.0 {
        p.power().p_u()
    } else {
        p.power().uplink_tx_power(p.path_loss(), r)
    }
}

#[derive(Debug, Clone, Copy)]
struct Site {
    pos: Point,
    mode: BsMode,
    fade: f64,
    key: u64,
}

struct CellUes {
    dl: Point,
    ul: Point,
    dl_fade: f64,
    ul_fade: f64,
}

/// One downlink and one uplink UE per site, uniform in its cell. All draws
/// come from the site's own key so they do not depend on its mode.
fn place_ues(sites: &[Site], window: &Window, p: &SystemParams) -> Vec<CellUes> {
    let pos: Vec<Point> = sites.iter().map(|s| s.pos).collect();
    let cells = voronoi::cells(&pos, window, p.mean_cell_radius());
    let fade = Exp::new(p.mu()).expect("validated fading rate");
    sites
        .iter()
        .zip(&cells)
        .map(|(s, cell)| {
            let mut rng = stream(mix(&[s.key, family::CELL_UE]), 0);
            let mut u3 = || [rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>()];
            let dl = voronoi::uniform_in_polygon(cell, u3());
            let ul = voronoi::uniform_in_polygon(cell, u3());
            CellUes {
                dl,
                ul,
                dl_fade: fade.sample(&mut rng),
                ul_fade: fade.sample(&mut rng),
            }
        })
        .collect()
}
