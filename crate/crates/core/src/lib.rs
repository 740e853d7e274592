//! Second-order cell-centered finite-volume viscous discretizations on
//! irregular grids, and the grid-convergence machinery used to verify them.
//!
//! The crate is organized bottom-up:
//!
//! - [`mesh`]: irregular 1D grids and perturbed tetrahedral meshes.
//! - [`recon`]: gradients, face reconstruction, face-coefficient strategies.
//! - [`physics`]: nondimensional Navier-Stokes flux algebra.
//! - [`diffusion1d`] and [`ns3d`]: the two model problems.
//! - [`solver`]: implicit defect-correction iteration.
//! - [`verify`]: error norms, observed orders and convergence studies.

pub mod diffusion1d;
pub mod error;
pub mod mesh;
pub mod ns3d;
pub mod physics;
pub mod recon;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};

/// Coordinates and gradients in 3D.
pub type Vec3 = nalgebra::Vector3<f64>;
