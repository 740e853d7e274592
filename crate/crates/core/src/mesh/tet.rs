use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::Vec3;

/// Edge length of the cube domain `[0, 0.5]^3`.
pub const CUBE_EDGE: f64 = 0.5;

/// A triangular face with its owner (and neighbor, for interior faces).
#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: [usize; 3],
    pub owner: usize,
    /// `None` on the domain boundary.
    pub neighbor: Option<usize>,
    pub centroid: Vec3,
    /// Scaled normal pointing out of the owner cell; its length is the face area.
    pub normal: Vec3,
}

impl Face {
    pub fn area(&self) -> f64 {
        self.normal.norm()
    }

    pub fn unit_normal(&self) -> Vec3 {
        self.normal / self.normal.norm()
    }

    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

/// An unstructured tetrahedral mesh with precomputed geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh3D {
    vertices: Vec<Vec3>,
    cells: Vec<[usize; 4]>,
    centroids: Vec<Vec3>,
    volumes: Vec<f64>,
    faces: Vec<Face>,
    cell_faces: Vec<[usize; 4]>,
    boundary_adjacent: Vec<bool>,
}

fn tet_volume(p: [Vec3; 4]) -> f64 {
    (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0]))) / 6.0
}

impl Mesh3D {
    /// Computes cell and face geometry from raw tetrahedral connectivity.
    ///
    /// Every tetrahedron must be positively oriented (right-handed vertex
    /// order); a zero or negative volume is reported as a degenerate cell.
    pub fn from_connectivity(vertices: Vec<Vec3>, cells: Vec<[usize; 4]>) -> Result<Self> {
        let mut centroids = Vec::with_capacity(cells.len());
        let mut volumes = Vec::with_capacity(cells.len());
        for (c, tet) in cells.iter().enumerate() {
            if tet.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!(
                    "cell {c} references a missing vertex"
                )));
            }
            let p = tet.map(|v| vertices[v]);
            let vol = tet_volume(p);
            if !(vol > 0.0) {
                return Err(Error::DegenerateMesh {
                    cell: c,
                    volume: vol,
                });
            }
            volumes.push(vol);
            centroids.push((p[0] + p[1] + p[2] + p[3]) / 4.0);
        }

        // Faces are numbered in first-visit order so the mesh is reproducible.
        const LOCAL_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];
        let mut lookup: HashMap<[usize; 3], usize> = HashMap::with_capacity(2 * cells.len());
        let mut faces: Vec<Face> = Vec::with_capacity(2 * cells.len() + cells.len() / 2);
        let mut cell_faces = vec![[usize::MAX; 4]; cells.len()];
        for (c, tet) in cells.iter().enumerate() {
            for (lf, local) in LOCAL_FACES.iter().enumerate() {
                let verts = local.map(|i| tet[i]);
                let mut key = verts;
                key.sort_unstable();
                if let Some(&fi) = lookup.get(&key) {
                    let face: &mut Face = &mut faces[fi];
                    if face.neighbor.is_some() {
                        return Err(Error::InvalidArgument(format!(
                            "face {key:?} shared by more than two cells"
                        )));
                    }
                    face.neighbor = Some(c);
                    cell_faces[c][lf] = fi;
                } else {
                    let [a, b, d] = verts.map(|v| vertices[v]);
                    let mut normal = 0.5 * (b - a).cross(&(d - a));
                    let centroid = (a + b + d) / 3.0;
                    if normal.dot(&(centroid - centroids[c])) < 0.0 {
                        normal = -normal;
                    }
                    if !(normal.norm() > 0.0) {
                        return Err(Error::DegenerateGeometry(format!(
                            "zero-area face {key:?} on cell {c}"
                        )));
                    }
                    lookup.insert(key, faces.len());
                    cell_faces[c][lf] = faces.len();
                    faces.push(Face {
                        vertices: verts,
                        owner: c,
                        neighbor: None,
                        centroid,
                        normal,
                    });
                }
            }
        }

        let mut boundary_adjacent = vec![false; cells.len()];
        for f in faces.iter().filter(|f| f.is_boundary()) {
            boundary_adjacent[f.owner] = true;
        }

        Ok(Self {
            vertices,
            cells,
            centroids,
            volumes,
            faces,
            cell_faces,
            boundary_adjacent,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    pub fn centroids(&self) -> &[Vec3] {
        &self.centroids
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// The four faces of cell `c`.
    pub fn cell_faces(&self, c: usize) -> &[usize; 4] {
        &self.cell_faces[c]
    }

    /// True when cell `c` owns at least one boundary face.
    pub fn is_boundary_adjacent(&self, c: usize) -> bool {
        self.boundary_adjacent[c]
    }

    pub fn boundary_adjacent(&self) -> &[bool] {
        &self.boundary_adjacent
    }

    /// Face neighbors of cell `c`.
    pub fn neighbors(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.cell_faces[c].iter().filter_map(move |&fi| {
            let f = &self.faces[fi];
            match f.neighbor {
                Some(n) if f.owner == c => Some(n),
                Some(_) => Some(f.owner),
                None => None,
            }
        })
    }

    /// Outward scaled normal of face `fi` as seen from cell `c`.
    pub fn outward_normal(&self, c: usize, fi: usize) -> Vec3 {
        let f = &self.faces[fi];
        if f.owner == c {
            f.normal
        } else {
            -f.normal
        }
    }

    /// Returns a copy with the owner and neighbor of interior face `fi` swapped.
    pub fn with_face_flipped(&self, fi: usize) -> Result<Self> {
        let mut mesh = self.clone();
        let face = &mut mesh.faces[fi];
        let neighbor = face
            .neighbor
            .ok_or_else(|| Error::InvalidArgument(format!("face {fi} is a boundary face")))?;
        face.neighbor = Some(face.owner);
        face.owner = neighbor;
        face.normal = -face.normal;
        Ok(mesh)
    }

    /// Largest per-cell `|sum of outward normals| / sum of face areas`.
    pub fn max_closure_defect(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| {
                let mut sum = Vec3::zeros();
                let mut area = 0.0;
                for &fi in &self.cell_faces[c] {
                    sum += self.outward_normal(c, fi);
                    area += self.faces[fi].area();
                }
                sum.norm() / area
            })
            .fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes.iter().sum()
    }
}

// Kuhn split of the unit cube into six tetrahedra along the (0,0,0)-(1,1,1)
// diagonal. Every tet is a monotone lattice path, so neighboring hexes split
// their shared face along the same diagonal.
fn kuhn_tets() -> [[[usize; 3]; 4]; 6] {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [1, 2, 0],
        [2, 0, 1],
        [0, 2, 1],
        [2, 1, 0],
        [1, 0, 2],
    ];
    PERMS.map(|p| {
        let mut corners = [[0usize; 3]; 4];
        for step in 0..3 {
            corners[step + 1] = corners[step];
            corners[step + 1][p[step]] = 1;
        }
        // odd permutations produce left-handed tets
        if p == [0, 2, 1] || p == [2, 1, 0] || p == [1, 0, 2] {
            corners.swap(2, 3);
        }
        corners
    })
}

/// Generates an irregular tetrahedral mesh of the cube `[0, 0.5]^3`.
///
/// The cube is split into `n^3` hexahedra, each cut into six tetrahedra, for
/// `6 n^3` cells. Interior vertices are moved by a seeded uniform amount of at
/// most `perturbation * 0.5 / n` per coordinate; boundary vertices stay put so
/// every boundary remains flat.
pub fn generate_tet_mesh(n: usize, perturbation: f64, seed: u64) -> Result<Mesh3D> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "tet mesh needs n >= 2 blocks per direction, got {n}"
        )));
    }
    if !(0.0..0.5).contains(&perturbation) {
        return Err(Error::InvalidArgument(format!(
            "perturbation must lie in [0, 0.5), got {perturbation}"
        )));
    }
    let spacing = CUBE_EDGE / n as f64;
    let np = n + 1;
    let index = |i: usize, j: usize, k: usize| i + np * (j + np * k);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity(np * np * np);
    for k in 0..np {
        for j in 0..np {
            for i in 0..np {
                let mut p = Vec3::new(i as f64, j as f64, k as f64) * spacing;
                let interior = [i, j, k].iter().all(|&c| c > 0 && c < n);
                if interior && perturbation > 0.0 {
                    for d in 0..3 {
                        let r: f64 = rng.random_range(-1.0..=1.0);
                        p[d] += perturbation * spacing * r;
                    }
                }
                vertices.push(p);
            }
        }
    }

    let pattern = kuhn_tets();
    let mut cells = Vec::with_capacity(6 * n * n * n);
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                for tet in &pattern {
                    cells.push(tet.map(|o| index(i + o[0], j + o[1], k + o[2])));
                }
            }
        }
    }
    Mesh3D::from_connectivity(vertices, cells)
}
