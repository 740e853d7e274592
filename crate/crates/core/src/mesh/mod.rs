//! Cell-centered grids: irregular 1D partitions of `[0, 1]` and perturbed
//! tetrahedral meshes of the cube `[0, 0.5]^3`.

mod grid1d;
mod tet;
pub mod vtk;

pub use grid1d::{generate_grid_1d, Grid1D};
pub use tet::{generate_tet_mesh, Face, Mesh3D, CUBE_EDGE};

/// Default node perturbation of irregular 1D grids, as a fraction of 1/n.
pub const DEFAULT_PERTURBATION_1D: f64 = 0.3;
/// Default vertex perturbation of 3D meshes, as a fraction of the spacing.
/// Kuhn tetrahedra stay valid for any value below 0.25.
pub const DEFAULT_PERTURBATION_3D: f64 = 0.2;
