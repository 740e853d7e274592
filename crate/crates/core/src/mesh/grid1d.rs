use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A cell-centered grid on `[0, 1]`.
///
/// Cells are delimited by consecutive nodes; the cell center is the midpoint
/// of its two nodes, so on an irregular grid an interior node (the face) is
/// generally not halfway between the two adjacent cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    nodes: Vec<f64>,
    centers: Vec<f64>,
    volumes: Vec<f64>,
}

impl Grid1D {
    /// Builds a grid from explicit node coordinates.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::InvalidArgument(format!(
                "a 1D grid needs at least 3 cells, got {}",
                nodes.len().saturating_sub(1)
            )));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(Error::InvalidArgument(
                "grid nodes must start at 0 and end at 1".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        let centers = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let volumes = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self {
            nodes,
            centers,
            volumes,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Cell-center coordinates `x_j`.
    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// Cell widths `h_j`.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Location of the face between cell `j` and cell `j + 1`.
    pub fn face(&self, j: usize) -> f64 {
        self.nodes[j + 1]
    }

    /// Interior face coordinates, one per adjacent cell pair.
    pub fn faces(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Ratio of the widest to the narrowest cell.
    pub fn stretch_ratio(&self) -> f64 {
        let max = self.volumes.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.volumes.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Generates an `n`-cell grid on `[0, 1]`.
///
/// Irregular grids displace every interior node of the uniform partition by a
/// seeded uniform random amount in `[-perturbation, perturbation] / n`. The
/// endpoints stay at 0 and 1, and `perturbation < 0.5` keeps nodes ordered.
pub fn generate_grid_1d(n: usize, regular: bool, perturbation: f64, seed: u64) -> Result<Grid1D> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "1D grid needs n >= 3 cells, got {n}"
        )));
    }
    if !(0.0..0.5).contains(&perturbation) {
        return Err(Error::InvalidArgument(format!(
            "perturbation must lie in [0, 0.5), got {perturbation}"
        )));
    }
    let h = 1.0 / n as f64;
    let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    nodes[n] = 1.0;
    if !regular {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for node in nodes.iter_mut().take(n).skip(1) {
            let r: f64 = rng.random_range(-1.0..=1.0);
            *node += perturbation * h * r;
        }
    }
    Grid1D::from_nodes(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_partition() {
        let g = generate_grid_1d(4, true, 0.0, 0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(g.volumes().iter().all(|&h| h == 0.25));
        assert_eq!(g.centers(), &[0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn irregular_grid_is_valid() {
        let g = generate_grid_1d(7, false, 0.3, 1).unwrap();
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
        let total: f64 = g.volumes().iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(g.nodes()[0], 0.0);
        assert_eq!(g.nodes()[7], 1.0);
        for (j, &x) in g.centers().iter().enumerate() {
            assert_eq!(x, 0.5 * (g.nodes()[j] + g.nodes()[j + 1]));
        }
    }

    #[test]
    fn finest_study_grid_is_irregular() {
        let g = generate_grid_1d(63, false, 0.3, 7).unwrap();
        assert!(g.stretch_ratio() > 1.0);
    }

    #[test]
    fn faces_are_off_midpoint() {
        for n in [7, 11, 15, 19, 23, 31, 47, 63] {
            let g = generate_grid_1d(n, false, 0.3, 1).unwrap();
            let c = g.centers();
            let off = (0..n - 1).any(|j| (g.face(j) - 0.5 * (c[j] + c[j + 1])).abs() > 1e-12);
            assert!(off, "n={n}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(
            generate_grid_1d(2, true, 0.0, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            generate_grid_1d(10, false, 0.5, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn deterministic() {
        let a = generate_grid_1d(31, false, 0.3, 42).unwrap();
        let b = generate_grid_1d(31, false, 0.3, 42).unwrap();
        assert_eq!(a, b);
    }
}
