//! Steady nonlinear diffusion `-(nu u_x)_x = f` on `[0, 1]` with `nu = u^2`.
//!
//! The manufactured solution is `u = exp(2x)`. Cells are numbered `0..n`, and
//! face `f` separates cells `f` and `f + 1`. The face viscosity is evaluated
//! from `u^2` values with a selectable [`ReconstructionStrategy`]; the face
//! derivative is the alpha-damped formula built on centered cell derivatives.

use crate::error::{Error, Result};
use crate::mesh::Grid1D;
use crate::recon::{
    alpha_damped_face_derivative_1d, face_scalar, gradient_1d, ReconstructionStrategy, ALPHA,
};
use crate::solver::{BlockCsr, SteadyProblem};

/// Exact solution `u_e = exp(2x)`.
pub fn exact_solution(x: f64) -> f64 {
    (2.0 * x).exp()
}

/// Forcing `f = -(u_e^2 u_e')' = -12 exp(6x)`.
pub fn forcing(x: f64) -> f64 {
    -12.0 * (6.0 * x).exp()
}

#[derive(Debug, Clone)]
pub struct Diffusion1DProblem {
    grid: Grid1D,
    strategy: ReconstructionStrategy,
    alpha: f64,
    linearize_viscosity: bool,
}

// Sparse linear combination of cell values.
type LinComb = Vec<(usize, f64)>;

fn axpy(acc: &mut LinComb, scale: f64, x: &[(usize, f64)]) {
    for &(i, v) in x {
        match acc.iter_mut().find(|(j, _)| *j == i) {
            Some((_, w)) => *w += scale * v,
            None => acc.push((i, scale * v)),
        }
    }
}

impl Diffusion1DProblem {
    pub fn new(grid: Grid1D, strategy: ReconstructionStrategy) -> Self {
        Self {
            grid,
            strategy,
            alpha: ALPHA,
            linearize_viscosity: true,
        }
    }

    /// Whether the solver Jacobian includes the linearized face viscosity
    /// (default) or keeps it frozen.
    pub fn with_viscosity_linearization(mut self, on: bool) -> Self {
        self.linearize_viscosity = on;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn strategy(&self) -> ReconstructionStrategy {
        self.strategy
    }

    /// Exact solution sampled at the cell centers.
    pub fn exact_state(&self) -> Vec<f64> {
        self.grid
            .centers()
            .iter()
            .map(|&x| exact_solution(x))
            .collect()
    }

    /// Pins the first and last cells to the exact solution.
    pub fn apply_boundary_closure(&self, u: &mut [f64]) {
        let x = self.grid.centers();
        let n = x.len();
        u[0] = exact_solution(x[0]);
        u[n - 1] = exact_solution(x[n - 1]);
    }

    /// Initial guess: linear interpolation between the two pinned boundary
    /// cells.
    ///
    /// A constant guess such as `u = 1` is a poor start: the forcing is large
    /// and negative, so pseudo-time marching pulls the interior through
    /// `u = 0`, where the viscosity `u^2` vanishes.
    pub fn initial_state(&self) -> Vec<f64> {
        let x = self.grid.centers();
        let n = x.len();
        let (x0, x1) = (x[0], x[n - 1]);
        let (u0, u1) = (exact_solution(x0), exact_solution(x1));
        x.iter()
            .map(|&xi| u0 + (u1 - u0) * (xi - x0) / (x1 - x0))
            .collect()
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.grid.num_cells() {
            return Err(Error::InvalidArgument(format!(
                "solution has {} values for {} cells",
                u.len(),
                self.grid.num_cells()
            )));
        }
        Ok(())
    }

    fn face_viscosity(&self, u: &[f64], g: &[f64], f: usize) -> Result<(f64, f64, f64)> {
        let x = self.grid.centers();
        let xf = self.grid.face(f);
        let (j, k) = (f, f + 1);
        let u_l = u[j] + g[j] * (xf - x[j]);
        let u_r = u[k] + g[k] * (xf - x[k]);
        let nu = face_scalar(
            self.strategy,
            [u[j] * u[j], u[k] * u[k]],
            [u_l * u_l, u_r * u_r],
            [(xf - x[j]).abs(), (x[k] - xf).abs()],
        )?;
        Ok((nu, u_l, u_r))
    }

    /// Face viscosities for every interior face.
    pub fn face_viscosities(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let g = gradient_1d(&self.grid, u)?;
        (0..self.grid.num_cells() - 1)
            .map(|f| self.face_viscosity(u, &g, f).map(|v| v.0))
            .collect()
    }

    /// Diffusive fluxes `phi_f = -nu_f (u_x)_f` on every interior face.
    pub fn face_fluxes(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let g = gradient_1d(&self.grid, u)?;
        let x = self.grid.centers();
        (0..self.grid.num_cells() - 1)
            .map(|f| {
                let (nu, u_l, u_r) = self.face_viscosity(u, &g, f)?;
                let du = alpha_damped_face_derivative_1d(
                    g[f],
                    g[f + 1],
                    u_l,
                    u_r,
                    x[f],
                    x[f + 1],
                    self.alpha,
                )?;
                Ok(-nu * du)
            })
            .collect()
    }

    /// Residual `phi_{j+1/2} - phi_{j-1/2} - f(x_j) h_j` on interior cells;
    /// the two boundary cells report zero.
    pub fn residual(&self, u: &[f64]) -> Result<Vec<f64>> {
        let phi = self.face_fluxes(u)?;
        let x = self.grid.centers();
        let h = self.grid.volumes();
        let n = x.len();
        let mut res = vec![0.0; n];
        for j in 1..n - 1 {
            res[j] = phi[j] - phi[j - 1] - forcing(x[j]) * h[j];
        }
        Ok(res)
    }

    // Coefficients of the face derivative on face f as a combination of
    // cell values; it is linear in u.
    fn face_derivative_weights(&self, f: usize) -> LinComb {
        let x = self.grid.centers();
        let n = x.len();
        let grad = |j: usize| -> LinComb {
            let (a, b) = if j == 0 {
                (0, 1)
            } else if j == n - 1 {
                (n - 2, n - 1)
            } else {
                (j - 1, j + 1)
            };
            let d = 1.0 / (x[b] - x[a]);
            vec![(b, d), (a, -d)]
        };
        let xf = self.grid.face(f);
        let (j, k) = (f, f + 1);
        let (gj, gk) = (grad(j), grad(k));
        let damp = self.alpha / (2.0 * (x[k] - x[j]));
        let mut w = LinComb::new();
        axpy(&mut w, 0.5, &gj);
        axpy(&mut w, 0.5, &gk);
        // + damp (u_R - u_L)
        axpy(&mut w, damp, &[(k, 1.0)]);
        axpy(&mut w, damp * (xf - x[k]), &gk);
        axpy(&mut w, -damp, &[(j, 1.0)]);
        axpy(&mut w, -damp * (xf - x[j]), &gj);
        w
    }

    /// Jacobian of the residual with the face viscosities frozen at `u`,
    /// plus a pseudo-time diagonal `|J_jj| / cfl`.
    pub fn frozen_viscosity_jacobian(&self, u: &[f64], cfl: f64) -> Result<BlockCsr<1>> {
        let nu = self.face_viscosities(u)?;
        let n = self.grid.num_cells();
        let pattern: Vec<Vec<usize>> = (0..n)
            .map(|i| (i.saturating_sub(2)..(i + 3).min(n)).collect())
            .collect();
        let mut jac = BlockCsr::from_pattern(&pattern);
        for j in 1..n - 1 {
            // res_j = -nu_j d_j + nu_{j-1} d_{j-1}
            for (m, c) in self.face_derivative_weights(j) {
                jac.add(j, m, -nu[j] * c, &[[1.0]]);
            }
            for (m, c) in self.face_derivative_weights(j - 1) {
                jac.add(j, m, nu[j - 1] * c, &[[1.0]]);
            }
            let d = jac.diagonal(j)[0][0].abs();
            jac.add(j, j, d / cfl, &[[1.0]]);
        }
        Ok(jac)
    }

    /// Solver Jacobian: the frozen-viscosity Jacobian plus the viscosity
    /// linearized as the arithmetic average of `u^2`, whatever the strategy,
    /// and a pseudo-time diagonal `sum_m |J_jm| / cfl`. For the arithmetic strategy
    /// this is the exact Jacobian of the residual.
    pub fn approximate_jacobian(&self, u: &[f64], cfl: f64) -> Result<BlockCsr<1>> {
        let mut jac = self.frozen_viscosity_jacobian(u, f64::INFINITY)?;
        let phi = self.face_fluxes(u)?;
        let nu = self.face_viscosities(u)?;
        let n = self.grid.num_cells();
        for j in 1..n - 1 {
            // phi_f = -nu_f d_f, d(nu_f)/du_m = u_m for the two cells of face f
            for (f, sign) in [(j, 1.0), (j - 1, -1.0)] {
                if !self.linearize_viscosity || nu[f] == 0.0 {
                    continue;
                }
                let d_f = phi[f] / nu[f];
                for m in [f, f + 1] {
                    jac.add(j, m, sign * d_f * u[m], &[[1.0]]);
                }
            }
            let row_sum: f64 = (j.saturating_sub(2)..(j + 3).min(n))
                .map(|m| jac.get(j, m)[0][0].abs())
                .sum();
            jac.add(j, j, row_sum / cfl, &[[1.0]]);
        }
        Ok(jac)
    }
}

impl SteadyProblem<1> for Diffusion1DProblem {
    fn num_cells(&self) -> usize {
        self.grid.num_cells()
    }

    fn is_pinned(&self, cell: usize) -> bool {
        cell == 0 || cell == self.grid.num_cells() - 1
    }

    fn residual(&self, state: &[[f64; 1]]) -> Result<Vec<[f64; 1]>> {
        let u: Vec<f64> = state.iter().map(|s| s[0]).collect();
        Ok(Diffusion1DProblem::residual(self, &u)?
            .into_iter()
            .map(|r| [r])
            .collect())
    }

    fn jacobian(&self, state: &[[f64; 1]], cfl: f64) -> Result<BlockCsr<1>> {
        let u: Vec<f64> = state.iter().map(|s| s[0]).collect();
        self.approximate_jacobian(&u, cfl)
    }

    /// The viscosity `u^2` degenerates at zero and is symmetric in the sign
    /// of `u`; only the positive branch is admissible.
    fn check_state(&self, state: &[[f64; 1]]) -> Result<()> {
        match state.iter().position(|s| !(s[0] > 0.0)) {
            Some(j) => Err(Error::InvalidState(format!(
                "nonpositive solution {} in cell {j}",
                state[j][0]
            ))),
            None => Ok(()),
        }
    }
}
