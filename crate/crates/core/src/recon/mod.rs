//! Cell gradients, face reconstruction and face-coefficient strategies.

mod face;
mod gradient;
mod strategy;

pub use face::{
    alpha_damped_face_derivative_1d, alpha_damped_face_gradient, extrapolate, reconstruct_lr, ALPHA,
};
pub use gradient::{gradient_1d, lsq_gradient_3d, LsqGradient};
pub use strategy::{face_scalar, ReconstructionStrategy};
