use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Grid1D, Mesh3D};
use crate::Vec3;

/// Cell derivatives on a 1D grid.
///
/// Interior cells use the centered difference over the two neighboring cell
/// centers; the two end cells use a one-sided two-point difference. Both are
/// exact for linear data on any grid.
pub fn gradient_1d(grid: &Grid1D, u: &[f64]) -> Result<Vec<f64>> {
    let n = grid.num_cells();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "1D gradient needs at least 3 cells, got {n}"
        )));
    }
    if u.len() != n {
        return Err(Error::InvalidArgument(format!(
            "field has {} values for {n} cells",
            u.len()
        )));
    }
    let x = grid.centers();
    let mut g = Vec::with_capacity(n);
    g.push((u[1] - u[0]) / (x[1] - x[0]));
    for j in 1..n - 1 {
        g.push((u[j + 1] - u[j - 1]) / (x[j + 1] - x[j - 1]));
    }
    g.push((u[n - 1] - u[n - 2]) / (x[n - 1] - x[n - 2]));
    Ok(g)
}

// A stencil whose normal matrix has a relative determinant below this is
// treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

/// Unweighted linear least-squares gradients on a tetrahedral mesh.
///
/// The stencil of a cell is its face neighbors. Cells whose face neighbors do
/// not span three directions (corner cells with two boundary faces) also use
/// the neighbors of their neighbors. The fit is precomputed as per-neighbor
/// weight vectors, so `grad_j = sum_k w_jk (q_k - q_j)`.
#[derive(Debug, Clone)]
pub struct LsqGradient {
    offsets: Vec<usize>,
    stencil: Vec<usize>,
    weights: Vec<Vec3>,
}

fn normal_matrix(mesh: &Mesh3D, c: usize, cells: &[usize]) -> Matrix3<f64> {
    let xc = mesh.centroids()[c];
    cells.iter().fold(Matrix3::zeros(), |acc, &k| {
        let d = mesh.centroids()[k] - xc;
        acc + d * d.transpose()
    })
}

fn is_full_rank(a: &Matrix3<f64>) -> bool {
    let scale = a.trace() / 3.0;
    scale > 0.0 && a.determinant() / (scale * scale * scale) > RANK_TOL
}

impl LsqGradient {
    pub fn new(mesh: &Mesh3D) -> Result<Self> {
        let per_cell: Vec<Result<(Vec<usize>, Vec<Vec3>)>> = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| {
                let mut cells: Vec<usize> = mesh.neighbors(c).collect();
                let mut a = normal_matrix(mesh, c, &cells);
                if !is_full_rank(&a) {
                    let first: Vec<usize> = cells.clone();
                    for k in first {
                        for m in mesh.neighbors(k) {
                            if m != c && !cells.contains(&m) {
                                cells.push(m);
                            }
                        }
                    }
                    a = normal_matrix(mesh, c, &cells);
                    if !is_full_rank(&a) {
                        return Err(Error::SingularStencil { cell: c });
                    }
                }
                let inv = a.try_inverse().ok_or(Error::SingularStencil { cell: c })?;
                let xc = mesh.centroids()[c];
                let w = cells
                    .iter()
                    .map(|&k| inv * (mesh.centroids()[k] - xc))
                    .collect();
                Ok((cells, w))
            })
            .collect();

        let mut offsets = Vec::with_capacity(mesh.num_cells() + 1);
        let mut stencil = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        for r in per_cell {
            let (cells, w) = r?;
            stencil.extend(cells);
            weights.extend(w);
            offsets.push(stencil.len());
        }
        Ok(Self {
            offsets,
            stencil,
            weights,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Stencil cells of cell `c`.
    pub fn stencil(&self, c: usize) -> &[usize] {
        &self.stencil[self.offsets[c]..self.offsets[c + 1]]
    }

    /// Gradient of a scalar field.
    pub fn gradient(&self, field: &[f64]) -> Vec<Vec3> {
        assert_eq!(field.len(), self.num_cells());
        (0..self.num_cells())
            .into_par_iter()
            .map(|c| {
                let range = self.offsets[c]..self.offsets[c + 1];
                self.stencil[range.clone()]
                    .iter()
                    .zip(&self.weights[range])
                    .fold(Vec3::zeros(), |g, (&k, w)| g + w * (field[k] - field[c]))
            })
            .collect()
    }

    /// Gradients of every component of a multi-variable field.
    pub fn gradients<const N: usize>(&self, field: &[[f64; N]]) -> Vec<[Vec3; N]> {
        assert_eq!(field.len(), self.num_cells());
        (0..self.num_cells())
            .into_par_iter()
            .map(|c| {
                let range = self.offsets[c]..self.offsets[c + 1];
                let mut g = [Vec3::zeros(); N];
                for (&k, w) in self.stencil[range.clone()].iter().zip(&self.weights[range]) {
                    for (gv, (qk, qc)) in g.iter_mut().zip(field[k].iter().zip(&field[c])) {
                        *gv += w * (qk - qc);
                    }
                }
                g
            })
            .collect()
    }
}

/// Least-squares gradient of a scalar cell field.
pub fn lsq_gradient_3d(mesh: &Mesh3D, field: &[f64]) -> Result<Vec<Vec3>> {
    if field.len() != mesh.num_cells() {
        return Err(Error::InvalidArgument(format!(
            "field has {} values for {} cells",
            field.len(),
            mesh.num_cells()
        )));
    }
    Ok(LsqGradient::new(mesh)?.gradient(field))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_grid_1d, generate_tet_mesh};

    #[test]
    fn central_difference_is_linear_exact() {
        let g = generate_grid_1d(11, false, 0.3, 4).unwrap();
        let u: Vec<f64> = g.centers().iter().map(|x| 5.0 * x + 1.0).collect();
        for d in gradient_1d(&g, &u).unwrap() {
            assert!((d - 5.0).abs() < 1e-12);
        }
        let c = vec![3.0; 11];
        assert!(gradient_1d(&g, &c).unwrap().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn central_difference_of_exponential() {
        // cells of width 0.01 centered on 0.49, 0.5, 0.51 inside a uniform grid
        let g = generate_grid_1d(100, true, 0.0, 0).unwrap();
        let u: Vec<f64> = g.centers().iter().map(|x| (2.0 * x).exp()).collect();
        let d = gradient_1d(&g, &u).unwrap();
        let j = 49; // center 0.495
        let xj = g.centers()[j];
        let expected = (2.0 * xj).exp() * ((0.02f64).exp() - (-0.02f64).exp()) / 0.02;
        assert!((d[j] - expected).abs() < 1e-12 * expected);
        // at x = 0.5 with h = 0.01 the centered difference is 5.43693
        let at_half = 1f64.exp() * ((0.02f64).exp() - (-0.02f64).exp()) / 0.02;
        assert!((at_half - 5.43693).abs() < 1e-5);
    }

    #[test]
    fn gradient_1d_rejects_mismatch() {
        let g = generate_grid_1d(5, true, 0.0, 0).unwrap();
        assert!(gradient_1d(&g, &[1.0; 4]).is_err());
    }

    #[test]
    fn lsq_linear_exactness() {
        let mesh = generate_tet_mesh(4, 0.3, 2).unwrap();
        let f: Vec<f64> = mesh
            .centroids()
            .iter()
            .map(|p| 2.0 * p.x + 3.0 * p.y - p.z + 0.7)
            .collect();
        let g = lsq_gradient_3d(&mesh, &f).unwrap();
        let exact = Vec3::new(2.0, 3.0, -1.0);
        for gc in g {
            assert!((gc - exact).norm() <= 1e-12 * exact.norm());
        }
    }

    #[test]
    fn lsq_constant_field() {
        let mesh = generate_tet_mesh(3, 0.3, 2).unwrap();
        let g = lsq_gradient_3d(&mesh, &vec![4.2; mesh.num_cells()]).unwrap();
        assert!(g.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn corner_cells_are_augmented() {
        let mesh = generate_tet_mesh(3, 0.3, 2).unwrap();
        let lsq = LsqGradient::new(&mesh).unwrap();
        let widened = (0..mesh.num_cells())
            .filter(|&c| lsq.stencil(c).len() > mesh.neighbors(c).count())
            .count();
        assert!(widened > 0);
    }

    #[test]
    fn lsq_quadratic_error_is_first_order() {
        let errors: Vec<(f64, f64)> = [4usize, 8, 16]
            .iter()
            .map(|&n| {
                let mesh = generate_tet_mesh(n, 0.2, 5).unwrap();
                let f: Vec<f64> = mesh.centroids().iter().map(|p| p.x * p.x).collect();
                let g = lsq_gradient_3d(&mesh, &f).unwrap();
                let err = g
                    .iter()
                    .zip(mesh.centroids())
                    .map(|(g, p)| (g.x - 2.0 * p.x).abs())
                    .sum::<f64>()
                    / mesh.num_cells() as f64;
                (0.5 / n as f64, err)
            })
            .collect();
        for w in errors.windows(2) {
            let order = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
            assert!(order > 0.8, "order {order}");
        }
    }
}
