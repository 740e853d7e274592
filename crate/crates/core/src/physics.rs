//! Nondimensional compressible Navier-Stokes flux algebra.
//!
//! Density and temperature are scaled by their free-stream values and
//! velocity by the free-stream speed of sound, which gives `p = rho T / gamma`,
//! `c^2 = T` and a viscosity carrying the factor `M / Re`.

use nalgebra::{Matrix3, Vector5};

use crate::error::{Error, Result};
use crate::recon::ALPHA;
use crate::Vec3;

/// A 5-component flux or conservative vector: mass, momentum, energy.
pub type Flux = Vector5<f64>;

/// Free-stream and fluid constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub mach: f64,
    pub reynolds: f64,
    /// Dimensional free-stream temperature in kelvin.
    pub t_inf: f64,
    /// Sutherland constant in kelvin.
    pub sutherland: f64,
    pub gamma: f64,
    pub prandtl: f64,
    /// Face-gradient damping coefficient.
    pub alpha: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self {
            mach: 0.1,
            reynolds: 0.1,
            t_inf: 300.0,
            sutherland: 110.5,
            gamma: 1.4,
            prandtl: 0.72,
            alpha: ALPHA,
        }
    }
}

impl FlowConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("mach", self.mach),
            ("reynolds", self.reynolds),
            ("t_inf", self.t_inf),
            ("sutherland", self.sutherland),
            ("gamma", self.gamma),
            ("prandtl", self.prandtl),
            ("alpha", self.alpha),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "flow constant {name} must be positive, got {v}"
                )));
            }
        }
        if self.gamma <= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Heat conductivity per unit viscosity, `1 / (Pr (gamma - 1))`.
    pub fn conductivity_factor(&self) -> f64 {
        1.0 / (self.prandtl * (self.gamma - 1.0))
    }
}

/// Primitive variables `(rho, v, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitiveState {
    pub rho: f64,
    pub vel: Vec3,
    pub temp: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, u: f64, v: f64, w: f64, temp: f64) -> Self {
        Self {
            rho,
            vel: Vec3::new(u, v, w),
            temp,
        }
    }

    pub fn from_array(a: [f64; 5]) -> Self {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.rho, self.vel.x, self.vel.y, self.vel.z, self.temp]
    }

    pub fn pressure(&self, gamma: f64) -> f64 {
        self.rho * self.temp / gamma
    }

    /// Total enthalpy per unit mass.
    pub fn enthalpy(&self, gamma: f64) -> f64 {
        self.temp / (gamma - 1.0) + 0.5 * self.vel.norm_squared()
    }

    pub fn check(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.temp > 0.0) || !self.vel.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidState(format!(
                "rho = {}, T = {}, v = ({}, {}, {})",
                self.rho, self.temp, self.vel.x, self.vel.y, self.vel.z
            )));
        }
        Ok(())
    }

    /// Conservative variables `(rho, rho v, rho E)`.
    pub fn conservative(&self, gamma: f64) -> Flux {
        let m = self.rho * self.vel;
        let energy =
            self.pressure(gamma) / (gamma - 1.0) + 0.5 * self.rho * self.vel.norm_squared();
        Flux::new(self.rho, m.x, m.y, m.z, energy)
    }

    /// Jacobian of the conservative variables with respect to `(rho, u, v, w, T)`.
    pub fn conservative_jacobian(&self, gamma: f64) -> [[f64; 5]; 5] {
        let v = self.vel;
        let r = self.rho;
        let e_t = 1.0 / (gamma * (gamma - 1.0));
        [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [v.x, r, 0.0, 0.0, 0.0],
            [v.y, 0.0, r, 0.0, 0.0],
            [v.z, 0.0, 0.0, r, 0.0],
            [
                self.temp * e_t + 0.5 * v.norm_squared(),
                r * v.x,
                r * v.y,
                r * v.z,
                r * e_t,
            ],
        ]
    }
}

/// Sutherland viscosity at face temperature `t_f`.
pub fn sutherland_viscosity(t_f: f64, cfg: &FlowConfig) -> Result<f64> {
    if !(t_f > 0.0) {
        return Err(Error::NonpositiveTemperature { value: t_f });
    }
    let c = cfg.sutherland / cfg.t_inf;
    Ok(cfg.mach / cfg.reynolds * (1.0 + c) / (t_f + c) * t_f.powf(1.5))
}

/// Derivative of [`sutherland_viscosity`] with respect to temperature.
pub fn sutherland_viscosity_derivative(t: f64, cfg: &FlowConfig) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonpositiveTemperature { value: t });
    }
    let c = cfg.sutherland / cfg.t_inf;
    let s = t.sqrt();
    Ok(cfg.mach / cfg.reynolds * (1.0 + c) * (1.5 * s * (t + c) - t * s) / ((t + c) * (t + c)))
}

/// Viscous stress tensor under the Stokes hypothesis; `grad_v[(i, k)]` is
/// `d v_i / d x_k`.
pub fn viscous_stress(grad_v: &Matrix3<f64>, mu: f64) -> Matrix3<f64> {
    let div = grad_v.trace();
    mu * (grad_v + grad_v.transpose() - Matrix3::identity() * (2.0 / 3.0 * div))
}

/// Physical viscous flux projected on the unit normal `n_hat`:
/// `(0, -tau n, -(tau n) . v_f + q_n)` with `q_n = -mu / (Pr (gamma - 1)) grad T . n`.
pub fn viscous_normal_flux(
    grad_v: &Matrix3<f64>,
    grad_t: &Vec3,
    v_f: &Vec3,
    mu_f: f64,
    n_hat: &Vec3,
    cfg: &FlowConfig,
) -> Flux {
    let tau_n = viscous_stress(grad_v, mu_f) * n_hat;
    let q_n = -mu_f * cfg.conductivity_factor() * grad_t.dot(n_hat);
    Flux::new(0.0, -tau_n.x, -tau_n.y, -tau_n.z, -tau_n.dot(v_f) + q_n)
}

/// Physical inviscid flux of `w` projected on `n_hat`.
pub fn inviscid_normal_flux(w: &PrimitiveState, n_hat: &Vec3, gamma: f64) -> Flux {
    let vn = w.vel.dot(n_hat);
    let p = w.pressure(gamma);
    let m = w.rho * vn * w.vel + p * n_hat;
    Flux::new(w.rho * vn, m.x, m.y, m.z, w.rho * vn * w.enthalpy(gamma))
}

/// Entropy-fix width on the acoustic eigenvalues, as a fraction of the
/// Roe-averaged sound speed.
const ENTROPY_FIX: f64 = 0.05;

/// Roe approximate Riemann flux along the unit normal `n_hat`.
pub fn roe_flux(
    w_l: &PrimitiveState,
    w_r: &PrimitiveState,
    n_hat: &Vec3,
    cfg: &FlowConfig,
) -> Result<Flux> {
    w_l.check()?;
    w_r.check()?;
    let g = cfg.gamma;
    let (p_l, p_r) = (w_l.pressure(g), w_r.pressure(g));
    let (h_l, h_r) = (w_l.enthalpy(g), w_r.enthalpy(g));

    let ratio = (w_r.rho / w_l.rho).sqrt();
    let rho = ratio * w_l.rho;
    let vel = (w_l.vel + ratio * w_r.vel) / (1.0 + ratio);
    let h = (h_l + ratio * h_r) / (1.0 + ratio);
    let q2 = vel.norm_squared();
    let c2 = (g - 1.0) * (h - 0.5 * q2);
    if !(c2 > 0.0) {
        return Err(Error::InvalidState(format!(
            "Roe-averaged sound speed squared is {c2:e}"
        )));
    }
    let c = c2.sqrt();
    let vn = vel.dot(n_hat);

    let drho = w_r.rho - w_l.rho;
    let dp = p_r - p_l;
    let dv = w_r.vel - w_l.vel;
    let dvn = dv.dot(n_hat);

    let fix = |lambda: f64| {
        let delta = ENTROPY_FIX * c;
        let a = lambda.abs();
        if a < delta {
            0.5 * (a * a + delta * delta) / delta
        } else {
            a
        }
    };
    let ws1 = fix(vn - c);
    let ws2 = vn.abs();
    let ws3 = fix(vn + c);

    let amp1 = (dp - rho * c * dvn) / (2.0 * c2);
    let amp2 = drho - dp / c2;
    let amp3 = (dp + rho * c * dvn) / (2.0 * c2);

    let wave = |s: f64, m: Vec3, e: f64| Flux::new(s, m.x, m.y, m.z, e);
    let r1 = wave(1.0, vel - c * n_hat, h - vn * c);
    let r2 = wave(1.0, vel, 0.5 * q2);
    let r3 = wave(1.0, vel + c * n_hat, h + vn * c);
    let dvt = dv - dvn * n_hat;
    let r4 = wave(0.0, dvt, vel.dot(&dv) - vn * dvn);

    let diss = ws1 * amp1 * r1 + ws2 * amp2 * r2 + ws3 * amp3 * r3 + ws2 * rho * r4;
    let f_l = inviscid_normal_flux(w_l, n_hat, g);
    let f_r = inviscid_normal_flux(w_r, n_hat, g);
    Ok(0.5 * (f_l + f_r - diss))
}
