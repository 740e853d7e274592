//! Solver-free invariant checks of the discretization.

use fvvisc::mesh::generate_tet_mesh;
use fvvisc::ns3d::{exact_flux, mms_forcing, NS3DProblem, BASE_STATE};
use fvvisc::physics::{inviscid_normal_flux, roe_flux, sutherland_viscosity, Flux, PrimitiveState};
use fvvisc::recon::{face_scalar, LsqGradient, ReconstructionStrategy};
use fvvisc::Vec3;

use crate::config::StudyConfig;

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> Check {
    Check {
        name,
        pass: worst <= tol,
        detail: format!("worst {worst:.2e}, tolerance {tol:.0e}"),
    }
}

/// Runs every check on a mesh of edge size 4 built from `cfg`.
pub fn run(cfg: &StudyConfig) -> fvvisc::Result<Vec<Check>> {
    let mesh = generate_tet_mesh(4, cfg.perturbation.min(0.24), cfg.seed)?;
    let flow = &cfg.flow;
    let mut out = Vec::new();

    let exact = Vec3::new(2.0, -3.0, 0.5);
    let field: Vec<f64> = mesh
        .centroids()
        .iter()
        .map(|p| exact.dot(p) + 0.7)
        .collect();
    let worst = LsqGradient::new(&mesh)?
        .gradient(&field)
        .iter()
        .map(|g| (g - exact).norm() / exact.norm())
        .fold(0.0, f64::max);
    out.push(check("lsq gradient linear exactness", worst, 1e-12));

    let states = [
        PrimitiveState::from_array(BASE_STATE),
        PrimitiveState::new(0.8, -0.4, 0.1, 0.9, 1.3),
        PrimitiveState::new(2.5, 0.0, 0.0, 0.0, 0.6),
    ];
    let mut worst: f64 = 0.0;
    for w in &states {
        for n in [Vec3::x(), Vec3::new(0.3, -0.5, 0.8).normalize()] {
            let roe = roe_flux(w, w, &n, flow)?;
            let phys = inviscid_normal_flux(w, &n, flow.gamma);
            worst = worst.max((roe - phys).norm() / phys.norm());
        }
    }
    out.push(check("roe flux consistency", worst, 1e-13));

    let mut worst: f64 = 0.0;
    for &s in &cfg.strategies {
        let problem = NS3DProblem::new(mesh.clone(), s, *flow)?.without_forcing();
        let states = vec![BASE_STATE; mesh.num_cells()];
        let grads = problem.gradients(&states);
        for r in problem.raw_residual(&states, &grads)? {
            worst = worst.max(r.amax());
        }
    }
    out.push(check("free-stream preservation", worst, 1e-13));

    let volume_defect = (mesh.total_volume() - 0.125).abs();
    out.push(check(
        "geometric closure and volume",
        mesh.max_closure_defect().max(volume_defect),
        1e-12,
    ));

    let mut worst: f64 = 0.0;
    for (a, b) in [(1.0, 2.0), (0.3, -4.0), (1e3, 1e-3)] {
        let arith = face_scalar(
            ReconstructionStrategy::Arithmetic,
            [a, b],
            [a, b],
            [1.0, 2.0],
        )?;
        let half = face_scalar(
            ReconstructionStrategy::Weighted(0.5),
            [a, b],
            [a, b],
            [1.0, 2.0],
        )?;
        let idw = face_scalar(
            ReconstructionStrategy::InverseDistance,
            [a, b],
            [a, b],
            [0.7, 0.7],
        )?;
        let scale = a.abs().max(b.abs());
        worst = worst
            .max((arith - half).abs() / scale)
            .max((arith - idw).abs() / scale);
    }
    out.push(check(
        "weighted(0.5) and equal-distance idw match arithmetic",
        worst,
        1e-15,
    ));

    let mu = sutherland_viscosity(1.0, flow)?;
    out.push(Check {
        name: "sutherland viscosity at free-stream temperature",
        pass: mu == flow.mach / flow.reynolds,
        detail: format!("mu(1) = {mu}, M/Re = {}", flow.mach / flow.reynolds),
    });

    let mut worst: f64 = 0.0;
    for i in 1..4 {
        for j in 1..4 {
            for k in 1..4 {
                let p = Vec3::new(i as f64, j as f64, k as f64) * 0.125;
                let analytic = mms_forcing(&p, flow)?;
                let oracle = flux_divergence(&p, flow)?;
                worst = worst.max((analytic - oracle).norm() / oracle.norm());
            }
        }
    }
    out.push(check(
        "manufactured forcing against flux divergence",
        worst,
        1e-7,
    ));
    Ok(out)
}

// Fourth-order central difference of the exact flux, summed over the axes.
fn flux_divergence(p: &Vec3, flow: &fvvisc::physics::FlowConfig) -> fvvisc::Result<Flux> {
    let h = 1e-4;
    let mut div = Flux::zeros();
    for d in 0..3 {
        let n = Vec3::ith(d, 1.0);
        let f = |s: f64| exact_flux(&(p + Vec3::ith(d, s * h)), &n, flow);
        div += (-f(2.0)? + f(1.0)? * 8.0 - f(-1.0)? * 8.0 + f(-2.0)?) / (12.0 * h);
    }
    Ok(div)
}
