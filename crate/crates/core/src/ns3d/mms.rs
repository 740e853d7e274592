//! Manufactured solution `w = w0 + psi (1, 1, 1, 1, 1)` with
//! `psi = 0.1 exp(0.5 (x + y + z))`, and the forcing that makes it exact.

use nalgebra::Matrix3;

use crate::error::Result;
use crate::physics::{
    inviscid_normal_flux, sutherland_viscosity, sutherland_viscosity_derivative,
    viscous_normal_flux, FlowConfig, Flux, PrimitiveState,
};
use crate::Vec3;

/// Constant part of the manufactured primitive state `(rho, u, v, w, T)`.
pub const BASE_STATE: [f64; 5] = [1.0, 0.3, 0.2, 0.1, 1.0];

const AMPLITUDE: f64 = 0.1;
const RATE: f64 = 0.5;

fn psi(p: &Vec3) -> f64 {
    AMPLITUDE * (RATE * (p.x + p.y + p.z)).exp()
}

/// Manufactured primitive state at `p`.
pub fn manufactured_solution(p: &Vec3) -> PrimitiveState {
    let s = psi(p);
    PrimitiveState::from_array(BASE_STATE.map(|c| c + s))
}

/// Value, gradient and Hessian of every primitive variable at a point.
#[derive(Debug, Clone, Copy)]
pub struct SolutionJet {
    pub value: [f64; 5],
    pub grad: [Vec3; 5],
    pub hess: [Matrix3<f64>; 5],
}

impl SolutionJet {
    pub fn state(&self) -> PrimitiveState {
        PrimitiveState::from_array(self.value)
    }

    /// Velocity gradient, `(i, k)` entry `d v_i / d x_k`.
    pub fn velocity_gradient(&self) -> Matrix3<f64> {
        Matrix3::from_rows(&[
            self.grad[1].transpose(),
            self.grad[2].transpose(),
            self.grad[3].transpose(),
        ])
    }
}

/// Analytic derivatives of the manufactured solution.
pub fn manufactured_jet(p: &Vec3) -> SolutionJet {
    let s = psi(p);
    let g = Vec3::repeat(RATE * s);
    let h = Matrix3::repeat(RATE * RATE * s);
    SolutionJet {
        value: BASE_STATE.map(|c| c + s),
        grad: [g; 5],
        hess: [h; 5],
    }
}

/// Total (inviscid + viscous) physical flux of the manufactured solution
/// along `n_hat`.
pub fn exact_flux(p: &Vec3, n_hat: &Vec3, cfg: &FlowConfig) -> Result<Flux> {
    let jet = manufactured_jet(p);
    let w = jet.state();
    let mu = sutherland_viscosity(w.temp, cfg)?;
    Ok(inviscid_normal_flux(&w, n_hat, cfg.gamma)
        + viscous_normal_flux(
            &jet.velocity_gradient(),
            &jet.grad[4],
            &w.vel,
            mu,
            n_hat,
            cfg,
        ))
}

/// Divergence of the total flux for a solution given by its local jet.
///
/// Closed-form product-rule expansion; valid for any smooth primitive field.
pub fn forcing_from_jet(jet: &SolutionJet, cfg: &FlowConfig) -> Result<Flux> {
    let g = cfg.gamma;
    let [rho, u, v, w, t] = jet.value;
    let vel = [u, v, w];
    let d_rho = jet.grad[0];
    let d_t = jet.grad[4];
    let d_vel = [jet.grad[1], jet.grad[2], jet.grad[3]];
    let div_v = d_vel[0].x + d_vel[1].y + d_vel[2].z;

    // inviscid part
    let mut f = Flux::zeros();
    let mass_div: f64 = (0..3).map(|i| d_rho[i] * vel[i] + rho * d_vel[i][i]).sum();
    f[0] = mass_div;
    for k in 0..3 {
        let convect: f64 = (0..3).map(|i| rho * vel[i] * d_vel[k][i]).sum();
        let pressure = (d_rho[k] * t + rho * d_t[k]) / g;
        f[k + 1] = mass_div * vel[k] + convect + pressure;
    }
    let enthalpy = t / (g - 1.0) + 0.5 * (u * u + v * v + w * w);
    let d_enthalpy: Vec3 = d_t / (g - 1.0) + d_vel[0] * u + d_vel[1] * v + d_vel[2] * w;
    f[4] = mass_div * enthalpy + (0..3).map(|i| rho * vel[i] * d_enthalpy[i]).sum::<f64>();

    // viscous part
    let mu = sutherland_viscosity(t, cfg)?;
    let d_mu = sutherland_viscosity_derivative(t, cfg)? * d_t;
    let grad_v = jet.velocity_gradient();
    let strain = grad_v + grad_v.transpose() - Matrix3::identity() * (2.0 / 3.0 * div_v);
    // d_k (div v)
    let grad_div = Vec3::from_fn(|k, _| (0..3).map(|i| jet.hess[i + 1][(i, k)]).sum());
    // sum_i d_i tau_ki
    let div_tau = Vec3::from_fn(|k, _| {
        let laplacian = jet.hess[k + 1].trace();
        (0..3).map(|i| d_mu[i] * strain[(k, i)]).sum::<f64>() + mu * (laplacian + grad_div[k] / 3.0)
    });
    for k in 0..3 {
        f[k + 1] -= div_tau[k];
    }
    let vel_v = Vec3::new(u, v, w);
    let work = div_tau.dot(&vel_v) + mu * strain.component_mul(&grad_v).sum();
    let kappa = cfg.conductivity_factor();
    let conduction = kappa * (d_mu.dot(&d_t) + mu * jet.hess[4].trace());
    f[4] -= work + conduction;
    Ok(f)
}

/// Forcing vector at `p` that makes the manufactured solution exact.
pub fn mms_forcing(p: &Vec3, cfg: &FlowConfig) -> Result<Flux> {
    forcing_from_jet(&manufactured_jet(p), cfg)
}
