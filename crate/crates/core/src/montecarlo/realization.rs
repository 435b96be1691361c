use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};

use crate::analytic::Mode;
use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::montecarlo::rng::{family, mix, stream};

/// Half-width of the default window, in mean cell radii `1/√(πλ_B)`.
pub const DEFAULT_WINDOW_RADII: f64 = 15.0;
/// Windows narrower than this many mean cell radii trigger a bias warning.
pub const MIN_GUARD_RADII: f64 = 10.0;
/// Side of the point-generation tiles, in mean cell radii.
const TILE_RADII: f64 = 4.0;

/// Square simulation region `[−w, w]²` centred on the tagged receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    half_width: f64,
}

impl Window {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid(
                "window.half_width",
                format!("must be positive and finite, got {half_width}"),
            ));
        }
        Ok(Window { half_width })
    }

    /// `15/√(πλ_B)`.
    pub fn for_params(params: &SystemParams) -> Self {
        Window {
            half_width: DEFAULT_WINDOW_RADII * params.mean_cell_radius(),
        }
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_width
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0].abs() <= self.half_width && p[1].abs() <= self.half_width
    }

    pub fn guard_warning(&self, params: &SystemParams) -> Option<String> {
        let radii = self.half_width / params.mean_cell_radius();
        (radii < MIN_GUARD_RADII).then(|| {
            format!(
                "window half-width is {radii:.1} mean cell radii (< {MIN_GUARD_RADII}); \
                 truncated interference biases SINR upward"
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BsMode {
    FullDuplex,
    HalfDuplexDownlink,
    HalfDuplexUplink,
}

impl BsMode {
    pub fn transmits(self) -> bool {
        !matches!(self, BsMode::HalfDuplexUplink)
    }

    pub fn receives(self) -> bool {
        !matches!(self, BsMode::HalfDuplexDownlink)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseStation {
    pub position: [f64; 2],
    pub mode: BsMode,
    /// Transmit beam direction (absent for HD-uplink BSs).
    pub dl_beam: Option<f64>,
    /// Receive beam direction (absent for HD-downlink BSs).
    pub ul_beam: Option<f64>,
    /// Fading power of the link to the tagged receiver.
    pub fade: f64,
}

/// Cell type and direction a UE belongs to.
pub type UeRole = Mode;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Serving {
    /// Index into [`NetworkRealization::bs`].
    Bs(usize),
    /// Model fidelity: a serving distance drawn from the link-distance law.
    Synthetic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserEquipment {
    pub position: [f64; 2],
    pub role: UeRole,
    pub serving: Serving,
    pub fade: f64,
}

/// One sampled network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub window: Window,
    pub bs: Vec<BaseStation>,
    pub ues: Vec<UserEquipment>,
    pub seed: u64,
    pub sample: u64,
}

/// Independently generated Poisson processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PointClass {
    BsFd = 0,
    BsHdDl = 1,
    BsHdUl = 2,
    UeFdDl = 3,
    UeFdUl = 4,
    UeHdDl = 5,
    UeHdUl = 6,
}

impl PointClass {
    pub const BS: [PointClass; 3] = [PointClass::BsFd, PointClass::BsHdDl, PointClass::BsHdUl];
    pub const UE: [PointClass; 4] = [
        PointClass::UeFdDl,
        PointClass::UeFdUl,
        PointClass::UeHdDl,
        PointClass::UeHdUl,
    ];

    pub fn density(self, params: &SystemParams) -> f64 {
        let m = params.mix();
        let frac = match self {
            PointClass::BsFd | PointClass::UeFdDl | PointClass::UeFdUl => m.rho_f(),
            PointClass::BsHdDl | PointClass::UeHdDl => m.rho_d(),
            PointClass::BsHdUl | PointClass::UeHdUl => m.rho_u(),
        };
        frac * params.lambda_b()
    }

    pub fn bs_mode(self) -> Option<BsMode> {
        match self {
            PointClass::BsFd => Some(BsMode::FullDuplex),
            PointClass::BsHdDl => Some(BsMode::HalfDuplexDownlink),
            PointClass::BsHdUl => Some(BsMode::HalfDuplexUplink),
            _ => None,
        }
    }

    pub fn ue_role(self) -> Option<UeRole> {
        match self {
            PointClass::UeFdDl => Some(Mode::FdDownlink),
            PointClass::UeFdUl => Some(Mode::FdUplink),
            PointClass::UeHdDl => Some(Mode::HdDownlink),
            PointClass::UeHdUl => Some(Mode::HdUplink),
            _ => None,
        }
    }
}

/// A point with its fixed set of marks. Every point consumes the same number
/// of draws so that marks never shift between classes or fidelities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RawPoint {
    pub pos: [f64; 2],
    pub angle_a: f64,
    pub angle_b: f64,
    pub fade: f64,
    /// Uniform on (0, 1]; drives serving distances in model fidelity.
    pub aux: f64,
    pub key: u64,
}

/// Poisson points of `class` inside `window`, generated tile by tile on a
/// grid anchored at the origin whose spacing depends only on `λ_B`; a larger
/// window therefore contains every point of a smaller one.
pub(crate) fn generate_points(
    params: &SystemParams,
    window: &Window,
    seed: u64,
    sample: u64,
    class: PointClass,
) -> Vec<RawPoint> {
    let density = class.density(params);
    let mut out = Vec::new();
    if density == 0.0 {
        return out;
    }
    let side = TILE_RADII * params.mean_cell_radius();
    let w = window.half_width();
    let lo = (-w / side).floor() as i64;
    let hi = (w / side).floor() as i64;
    let count = Poisson::new(density * side * side).expect("positive Poisson mean");
    let fade = Exp::new(params.mu()).expect("positive fading rate");
    for tx in lo..=hi {
        for ty in lo..=hi {
            let tile_seed = mix(&[seed, family::POINTS, class as u64, tx as u64, ty as u64]);
            let mut rng = stream(tile_seed, sample);
            let n = count.sample(&mut rng) as usize;
            for _ in 0..n {
                let pos = [
                    (tx as f64 + rng.random::<f64>()) * side,
                    (ty as f64 + rng.random::<f64>()) * side,
                ];
                let p = RawPoint {
                    pos,
                    angle_a: TAU * rng.random::<f64>(),
                    angle_b: TAU * rng.random::<f64>(),
                    fade: fade.sample(&mut rng),
                    aux: 1.0 - rng.random::<f64>(),
                    key: rng.random(),
                };
                if window.contains(pos) {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Inverse-CDF draw from `2πλr·e^{−πλr²}`; infinite when `λ = 0`.
pub(crate) fn rayleigh_distance(lambda: f64, u: f64) -> f64 {
    if lambda == 0.0 {
        return f64::INFINITY;
    }
    (-u.ln() / (PI * lambda)).sqrt()
}

/// Model-fidelity realization: thinned BS processes plus the four
/// independent UE processes with synthetic serving distances.
pub(crate) fn model_realization(params: &SystemParams, window: &Window, seed: u64, sample: u64) -> NetworkRealization {
    let mut bs = Vec::new();
    for class in PointClass::BS {
        let mode = class.bs_mode().expect("BS class");
        for p in generate_points(params, window, seed, sample, class) {
            bs.push(BaseStation {
                position: p.pos,
                mode,
                dl_beam: mode.transmits().then_some(p.angle_a),
                ul_beam: mode.receives().then_some(p.angle_b),
                fade: p.fade,
            });
        }
    }
    let mut ues = Vec::new();
    for class in PointClass::UE {
        let role = class.ue_role().expect("UE class");
        let lam = match role.direction() {
            crate::analytic::Direction::Downlink => params.lambda_b(),
            crate::analytic::Direction::Uplink => params.nu() * params.lambda_b(),
        };
        for p in generate_points(params, window, seed, sample, class) {
            ues.push(UserEquipment {
                position: p.pos,
                role,
                serving: Serving::Synthetic(rayleigh_distance(lam, p.aux)),
                fade: p.fade,
            });
        }
    }
    NetworkRealization {
        window: *window,
        bs,
        ues,
        seed,
        sample,
    }
}
