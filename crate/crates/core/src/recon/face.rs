use crate::error::{Error, Result};
use crate::Vec3;

/// Damping coefficient of the face gradient.
pub const ALPHA: f64 = 4.0 / 3.0;

/// Linear extrapolation of a cell value to the face centroid.
#[inline]
pub fn extrapolate(value: f64, grad: &Vec3, x_cell: &Vec3, x_face: &Vec3) -> f64 {
    value + grad.dot(&(x_face - x_cell))
}

/// Left and right face states of one variable, each extrapolated from its
/// own cell to the face centroid `x_c`.
pub fn reconstruct_lr(
    (w_j, grad_j, x_j): (f64, &Vec3, &Vec3),
    (w_k, grad_k, x_k): (f64, &Vec3, &Vec3),
    x_c: &Vec3,
) -> (f64, f64) {
    (
        extrapolate(w_j, grad_j, x_j, x_c),
        extrapolate(w_k, grad_k, x_k, x_c),
    )
}

/// Alpha-damped face gradient on a 3D face.
///
/// The average of the two cell gradients plus a penalty on the jump between
/// the reconstructed face states along the unit normal `n_hat`:
/// `0.5 (g_j + g_k) + alpha / |(x_k - x_j) . n_hat| (w_R - w_L) n_hat`.
pub fn alpha_damped_face_gradient(
    grad_j: &Vec3,
    grad_k: &Vec3,
    w_l: f64,
    w_r: f64,
    x_j: &Vec3,
    x_k: &Vec3,
    n_hat: &Vec3,
    alpha: f64,
) -> Result<Vec3> {
    let proj = (x_k - x_j).dot(n_hat).abs();
    if !(proj > 0.0) {
        return Err(Error::DegenerateGeometry(
            "cell-to-cell vector is parallel to the face".into(),
        ));
    }
    Ok(0.5 * (grad_j + grad_k) + (alpha / proj) * (w_r - w_l) * n_hat)
}

/// 1D alpha-damped face derivative between cells at `x_j < x_k`:
/// `0.5 (g_j + g_k) + alpha / (2 (x_k - x_j)) (u_R - u_L)`.
pub fn alpha_damped_face_derivative_1d(
    grad_j: f64,
    grad_k: f64,
    u_l: f64,
    u_r: f64,
    x_j: f64,
    x_k: f64,
    alpha: f64,
) -> Result<f64> {
    let dx = x_k - x_j;
    if dx == 0.0 {
        return Err(Error::DegenerateGeometry("coincident cell centers".into()));
    }
    Ok(0.5 * (grad_j + grad_k) + alpha / (2.0 * dx) * (u_r - u_l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradients_return_cell_values() {
        let z = Vec3::zeros();
        let (l, r) = reconstruct_lr(
            (1.5, &z, &Vec3::new(0.0, 0.0, 0.0)),
            (2.5, &z, &Vec3::new(1.0, 0.0, 0.0)),
            &Vec3::new(0.4, 0.1, 0.0),
        );
        assert_eq!((l, r), (1.5, 2.5));
    }

    #[test]
    fn dot_product_extrapolation() {
        let x_j = Vec3::new(0.3, 0.3, 0.3);
        let x_c = x_j + Vec3::new(0.1, 0.2, 0.0);
        let v = extrapolate(1.0, &Vec3::new(1.0, 0.0, 0.0), &x_j, &x_c);
        assert!((v - 1.1).abs() < 1e-15);
    }

    #[test]
    fn linear_field_is_reconstructed_exactly() {
        let g = Vec3::new(0.5, -2.0, 1.0);
        let field = |p: &Vec3| 3.0 + g.dot(p);
        let x_j = Vec3::new(0.1, 0.2, 0.05);
        let x_k = Vec3::new(0.2, 0.15, 0.12);
        let x_c = Vec3::new(0.17, 0.19, 0.07);
        let (l, r) = reconstruct_lr((field(&x_j), &g, &x_j), (field(&x_k), &g, &x_k), &x_c);
        assert!((l - field(&x_c)).abs() < 1e-14);
        assert!((r - field(&x_c)).abs() < 1e-14);
        let n = Vec3::new(1.0, 0.2, 0.3).normalize();
        let fg = alpha_damped_face_gradient(&g, &g, l, r, &x_j, &x_k, &n, ALPHA).unwrap();
        assert!((fg - g).norm() < 1e-12);
    }

    #[test]
    fn no_jump_returns_the_gradient() {
        let g = Vec3::new(1.0, 2.0, 3.0);
        let n = Vec3::new(0.0, 0.0, 1.0);
        let fg = alpha_damped_face_gradient(
            &g,
            &g,
            0.7,
            0.7,
            &Vec3::zeros(),
            &Vec3::new(0.1, 0.1, 0.3),
            &n,
            ALPHA,
        )
        .unwrap();
        assert_eq!(fg, g);
    }

    #[test]
    fn one_dimensional_hand_value() {
        let d = alpha_damped_face_derivative_1d(0.0, 0.0, 0.0, 1.0, 0.25, 0.75, ALPHA).unwrap();
        assert!((d - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn parallel_face_is_degenerate() {
        let g = Vec3::zeros();
        let err = alpha_damped_face_gradient(
            &g,
            &g,
            0.0,
            1.0,
            &Vec3::zeros(),
            &Vec3::new(1.0, 0.0, 0.0),
            &Vec3::new(0.0, 1.0, 0.0),
            ALPHA,
        )
        .unwrap_err();
        assert!(matches!(err, Error::DegenerateGeometry(_)));
        assert!(alpha_damped_face_derivative_1d(0.0, 0.0, 0.0, 1.0, 0.5, 0.5, ALPHA).is_err());
    }
}
