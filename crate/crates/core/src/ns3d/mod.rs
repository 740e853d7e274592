//! Cell-centered finite-volume discretization of the steady compressible
//! Navier-Stokes equations on tetrahedral meshes, set up as a manufactured
//! solution problem.
//!
//! The residual of cell `j` is the sum over its faces of the numerical flux
//! times the face area, minus the forcing evaluated at the centroid times the
//! cell volume. The inviscid flux is a Roe flux of linearly reconstructed
//! states; the viscous flux uses the alpha-damped face gradient, and its face
//! temperature and face velocity come from the selected
//! [`ReconstructionStrategy`]. Cells owning a boundary face are pinned to the
//! exact solution.

mod mms;

pub use mms::{
    exact_flux, forcing_from_jet, manufactured_jet, manufactured_solution, mms_forcing,
    SolutionJet, BASE_STATE,
};

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::Mesh3D;
use crate::physics::{
    roe_flux, sutherland_viscosity, viscous_normal_flux, FlowConfig, Flux, PrimitiveState,
};
use crate::recon::{alpha_damped_face_gradient, face_scalar, LsqGradient, ReconstructionStrategy};
use crate::solver::{Block, BlockCsr, SteadyProblem};
use crate::Vec3;

/// Primitive variables of one cell, `(rho, u, v, w, T)`.
pub type State = [f64; 5];

/// Per-cell gradients of the five primitive variables.
pub type StateGradient = [Vec3; 5];

pub const VARIABLE_NAMES: [&str; 5] = ["rho", "u", "v", "w", "T"];

#[derive(Debug, Clone)]
struct FaceGeometry {
    unit_normal: Vec3,
    area: f64,
    /// Distances from the face centroid to the owner and neighbor centroids.
    dist: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct NS3DProblem {
    mesh: Mesh3D,
    lsq: LsqGradient,
    strategy: ReconstructionStrategy,
    cfg: FlowConfig,
    forcing: Vec<Flux>,
    geometry: Vec<FaceGeometry>,
}

fn to_state(w: &PrimitiveState) -> State {
    w.to_array()
}

fn jacobian_pattern(mesh: &Mesh3D) -> Vec<Vec<usize>> {
    (0..mesh.num_cells())
        .map(|c| std::iter::once(c).chain(mesh.neighbors(c)).collect())
        .collect()
}

impl NS3DProblem {
    /// Sets up the manufactured-solution problem on `mesh`.
    pub fn new(mesh: Mesh3D, strategy: ReconstructionStrategy, cfg: FlowConfig) -> Result<Self> {
        cfg.validate()?;
        let lsq = LsqGradient::new(&mesh)?;
        let forcing = mesh
            .centroids()
            .par_iter()
            .map(|p| mms_forcing(p, &cfg))
            .collect::<Result<Vec<_>>>()?;
        let geometry = mesh
            .faces()
            .iter()
            .map(|f| {
                let xj = mesh.centroids()[f.owner];
                let dist_k = f
                    .neighbor
                    .map_or(0.0, |k| (f.centroid - mesh.centroids()[k]).norm());
                FaceGeometry {
                    unit_normal: f.unit_normal(),
                    area: f.area(),
                    dist: [(f.centroid - xj).norm(), dist_k],
                }
            })
            .collect();
        Ok(Self {
            mesh,
            lsq,
            strategy,
            cfg,
            forcing,
            geometry,
        })
    }

    /// Drops the forcing term, leaving the homogeneous equations.
    pub fn without_forcing(mut self) -> Self {
        self.forcing.iter_mut().for_each(|f| *f = Flux::zeros());
        self
    }

    pub fn mesh(&self) -> &Mesh3D {
        &self.mesh
    }

    pub fn strategy(&self) -> ReconstructionStrategy {
        self.strategy
    }

    pub fn flow(&self) -> &FlowConfig {
        &self.cfg
    }

    /// Forcing vector at each cell centroid.
    pub fn forcing(&self) -> &[Flux] {
        &self.forcing
    }

    /// Manufactured solution sampled at the cell centroids.
    pub fn exact_state(&self) -> Vec<State> {
        self.mesh
            .centroids()
            .iter()
            .map(|p| to_state(&manufactured_solution(p)))
            .collect()
    }

    /// Overwrites every boundary-adjacent cell with the exact solution.
    pub fn apply_boundary_closure(&self, states: &mut [State]) {
        for (c, s) in states.iter_mut().enumerate() {
            if self.mesh.is_boundary_adjacent(c) {
                *s = to_state(&manufactured_solution(&self.mesh.centroids()[c]));
            }
        }
    }

    /// Free-stream constants in the interior, exact values in pinned cells.
    pub fn initial_state(&self) -> Vec<State> {
        let mut s = vec![BASE_STATE; self.mesh.num_cells()];
        self.apply_boundary_closure(&mut s);
        s
    }

    /// Least-squares gradients of all five primitive variables.
    pub fn gradients(&self, states: &[State]) -> Vec<StateGradient> {
        self.lsq.gradients(states)
    }

    /// Numerical flux per unit area through face `fi`, along the normal
    /// pointing out of the owner.
    pub fn face_flux(&self, fi: usize, states: &[State], grads: &[StateGradient]) -> Result<Flux> {
        let face = &self.mesh.faces()[fi];
        let geo = &self.geometry[fi];
        let n_hat = geo.unit_normal;
        let j = face.owner;
        let xj = self.mesh.centroids()[j];
        let xc = face.centroid;
        let recon = |c: usize, x: &Vec3| -> State {
            std::array::from_fn(|v| states[c][v] + grads[c][v].dot(&(xc - x)))
        };
        let w_l = recon(j, &xj);

        let Some(k) = face.neighbor else {
            // Boundary faces only feed pinned cells: physical flux of the
            // owner's reconstructed state with the owner's gradients.
            let wb = PrimitiveState::from_array(w_l);
            let inv = roe_flux(&wb, &wb, &n_hat, &self.cfg)?;
            let mu = sutherland_viscosity(wb.temp, &self.cfg)?;
            let g = &grads[j];
            let gv = Matrix3::from_rows(&[g[1].transpose(), g[2].transpose(), g[3].transpose()]);
            return Ok(inv + viscous_normal_flux(&gv, &g[4], &wb.vel, mu, &n_hat, &self.cfg));
        };

        let xk = self.mesh.centroids()[k];
        let w_r = recon(k, &xk);
        let inv = roe_flux(
            &PrimitiveState::from_array(w_l),
            &PrimitiveState::from_array(w_r),
            &n_hat,
            &self.cfg,
        )?;

        let mut face_grad = [Vec3::zeros(); 5];
        for v in 1..5 {
            face_grad[v] = alpha_damped_face_gradient(
                &grads[j][v],
                &grads[k][v],
                w_l[v],
                w_r[v],
                &xj,
                &xk,
                &n_hat,
                self.cfg.alpha,
            )?;
        }
        let face_value = |v: usize| {
            face_scalar(
                self.strategy,
                [states[j][v], states[k][v]],
                [w_l[v], w_r[v]],
                geo.dist,
            )
        };
        let t_f = face_value(4)?;
        let v_f = Vec3::new(face_value(1)?, face_value(2)?, face_value(3)?);
        let mu_f = sutherland_viscosity(t_f, &self.cfg)?;
        let grad_v = Matrix3::from_rows(&[
            face_grad[1].transpose(),
            face_grad[2].transpose(),
            face_grad[3].transpose(),
        ]);
        Ok(inv + viscous_normal_flux(&grad_v, &face_grad[4], &v_f, mu_f, &n_hat, &self.cfg))
    }

    /// Residual of every cell without the boundary closure: boundary faces
    /// contribute their flux and no cell is zeroed.
    pub fn raw_residual(&self, states: &[State], grads: &[StateGradient]) -> Result<Vec<Flux>> {
        if states.len() != self.mesh.num_cells() || grads.len() != states.len() {
            return Err(Error::InvalidArgument(format!(
                "{} states and {} gradients for {} cells",
                states.len(),
                grads.len(),
                self.mesh.num_cells()
            )));
        }
        // Face fluxes in parallel, accumulated serially in face order so the
        // result does not depend on the thread count.
        let fluxes = (0..self.mesh.faces().len())
            .into_par_iter()
            .map(|fi| self.face_flux(fi, states, grads))
            .collect::<Result<Vec<Flux>>>()?;
        let mut res: Vec<Flux> = self
            .forcing
            .iter()
            .zip(self.mesh.volumes())
            .map(|(f, v)| -f * *v)
            .collect();
        for ((face, geo), flux) in self.mesh.faces().iter().zip(&self.geometry).zip(&fluxes) {
            let contribution = flux * geo.area;
            res[face.owner] += contribution;
            if let Some(k) = face.neighbor {
                res[k] -= contribution;
            }
        }
        Ok(res)
    }

    /// Residual with the boundary closure applied (pinned cells report zero).
    pub fn residual_ns3d(&self, states: &[State], grads: &[StateGradient]) -> Result<Vec<Flux>> {
        let mut res = self.raw_residual(states, grads)?;
        for (c, r) in res.iter_mut().enumerate() {
            if self.mesh.is_boundary_adjacent(c) {
                *r = Flux::zeros();
            }
        }
        Ok(res)
    }

    /// Compact first-order face flux used for the approximate Jacobian:
    /// Roe flux of the cell states plus a thin-layer viscous flux with
    /// frozen viscosity.
    fn compact_flux(&self, fi: usize, wj: &State, wk: &State, mu: f64) -> Result<Flux> {
        let face = &self.mesh.faces()[fi];
        let k = face.neighbor.expect("interior face");
        let n_hat = self.geometry[fi].unit_normal;
        let proj = (self.mesh.centroids()[k] - self.mesh.centroids()[face.owner])
            .dot(&n_hat)
            .abs();
        let (l, r) = (
            PrimitiveState::from_array(*wj),
            PrimitiveState::from_array(*wk),
        );
        let inv = roe_flux(&l, &r, &n_hat, &self.cfg)?;
        let scale = self.cfg.alpha / proj;
        let g = |v: usize| scale * (wk[v] - wj[v]) * n_hat;
        let grad_v = Matrix3::from_rows(&[g(1).transpose(), g(2).transpose(), g(3).transpose()]);
        let v_f = 0.5 * (l.vel + r.vel);
        Ok(inv + viscous_normal_flux(&grad_v, &g(4), &v_f, mu, &n_hat, &self.cfg))
    }

    /// Approximate Jacobian: linearized compact flux on every interior face,
    /// plus a local pseudo-time term `(lambda_j / cfl) dU/dw`, where
    /// `lambda_j` sums convective and viscous spectral radii over the faces.
    pub fn approximate_jacobian(&self, states: &[State], cfl: f64) -> Result<BlockCsr<5>> {
        let mesh = &self.mesh;
        let mut jac = BlockCsr::<5>::from_pattern(&jacobian_pattern(mesh));
        let visc_factor = (4.0f64 / 3.0).max(self.cfg.gamma / self.cfg.prandtl);

        let blocks = mesh
            .faces()
            .par_iter()
            .enumerate()
            .map(|(fi, face)| -> Result<Option<(Block<5>, Block<5>, f64)>> {
                let Some(k) = face.neighbor else {
                    return Ok(None);
                };
                let j = face.owner;
                if mesh.is_boundary_adjacent(j) && mesh.is_boundary_adjacent(k) {
                    return Ok(None);
                }
                let (wj, wk) = (states[j], states[k]);
                let mu = sutherland_viscosity(0.5 * (wj[4] + wk[4]), &self.cfg)?;
                let base = self.compact_flux(fi, &wj, &wk, mu)?;
                let mut a_j = [[0.0; 5]; 5];
                let mut a_k = [[0.0; 5]; 5];
                for v in 0..5 {
                    let h_j = 1e-7 * wj[v].abs().max(1.0);
                    let mut pj = wj;
                    pj[v] += h_j;
                    let dj = (self.compact_flux(fi, &pj, &wk, mu)? - base) / h_j;
                    let h_k = 1e-7 * wk[v].abs().max(1.0);
                    let mut pk = wk;
                    pk[v] += h_k;
                    let dk = (self.compact_flux(fi, &wj, &pk, mu)? - base) / h_k;
                    for e in 0..5 {
                        a_j[e][v] = dj[e];
                        a_k[e][v] = dk[e];
                    }
                }
                let proj = (mesh.centroids()[k] - mesh.centroids()[j])
                    .dot(&self.geometry[fi].unit_normal)
                    .abs();
                let l = PrimitiveState::from_array(wj);
                let r = PrimitiveState::from_array(wk);
                let vn = (0.5 * (l.vel + r.vel))
                    .dot(&self.geometry[fi].unit_normal)
                    .abs();
                let c = (0.5 * (wj[4] + wk[4])).sqrt();
                let rho = 0.5 * (wj[0] + wk[0]);
                let radius = vn + c + visc_factor * mu / (rho * proj);
                Ok(Some((a_j, a_k, radius)))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut lambda = vec![0.0; mesh.num_cells()];
        for ((fi, face), entry) in mesh.faces().iter().enumerate().zip(blocks) {
            let Some((a_j, a_k, radius)) = entry else {
                continue;
            };
            let area = self.geometry[fi].area;
            let (j, k) = (face.owner, face.neighbor.unwrap());
            jac.add(j, j, area, &a_j);
            jac.add(j, k, area, &a_k);
            jac.add(k, j, -area, &a_j);
            jac.add(k, k, -area, &a_k);
            lambda[j] += radius * area;
            lambda[k] += radius * area;
        }
        for (c, lam) in lambda.iter().enumerate() {
            if mesh.is_boundary_adjacent(c) {
                continue;
            }
            let m = PrimitiveState::from_array(states[c]).conservative_jacobian(self.cfg.gamma);
            jac.add(c, c, lam / cfl, &m);
        }
        Ok(jac)
    }
}

impl SteadyProblem<5> for NS3DProblem {
    fn num_cells(&self) -> usize {
        self.mesh.num_cells()
    }

    fn is_pinned(&self, cell: usize) -> bool {
        self.mesh.is_boundary_adjacent(cell)
    }

    fn residual(&self, state: &[State]) -> Result<Vec<State>> {
        for s in state {
            PrimitiveState::from_array(*s).check()?;
        }
        let grads = self.gradients(state);
        Ok(self
            .residual_ns3d(state, &grads)?
            .into_iter()
            .map(|r| [r[0], r[1], r[2], r[3], r[4]])
            .collect())
    }

    fn jacobian(&self, state: &[State], cfl: f64) -> Result<BlockCsr<5>> {
        self.approximate_jacobian(state, cfl)
    }
}
