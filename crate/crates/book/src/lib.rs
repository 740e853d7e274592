//! The guide's chapters, one module each, so `cargo test --doc` runs every
//! listing against the current crates. A failing test names its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/meshes.md")]
pub mod meshes {}
#[doc = include_str!("../../../book/src/face-coefficients.md")]
pub mod face_coefficients {}
#[doc = include_str!("../../../book/src/diffusion-1d.md")]
pub mod diffusion_1d {}
#[doc = include_str!("../../../book/src/navier-stokes-3d.md")]
pub mod navier_stokes_3d {}
#[doc = include_str!("../../../book/src/convergence-studies.md")]
pub mod convergence_studies {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
