//! Legacy VTK (2.0, ASCII) export of tetrahedral meshes.

use std::io::Write;

use super::Mesh3D;

const VTK_TETRA: u8 = 10;

/// Writes `mesh` as an ASCII unstructured grid, with optional per-cell scalars.
pub fn write_vtk<W: Write>(
    mut out: W,
    mesh: &Mesh3D,
    title: &str,
    cell_scalars: &[(&str, &[f64])],
) -> std::io::Result<()> {
    writeln!(out, "# vtk DataFile Version 2.0")?;
    // the title line may not contain newlines
    writeln!(out, "{}", title.replace('\n', " "))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", mesh.vertices().len())?;
    for p in mesh.vertices() {
        writeln!(out, "{:e} {:e} {:e}", p.x, p.y, p.z)?;
    }
    let nc = mesh.num_cells();
    writeln!(out, "CELLS {} {}", nc, 5 * nc)?;
    for c in mesh.cells() {
        writeln!(out, "4 {} {} {} {}", c[0], c[1], c[2], c[3])?;
    }
    writeln!(out, "CELL_TYPES {nc}")?;
    for _ in 0..nc {
        writeln!(out, "{VTK_TETRA}")?;
    }
    writeln!(out, "CELL_DATA {nc}")?;
    writeln!(out, "SCALARS volume double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in mesh.volumes() {
        writeln!(out, "{v:e}")?;
    }
    writeln!(out, "SCALARS boundary_adjacent int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for &b in mesh.boundary_adjacent() {
        writeln!(out, "{}", b as u8)?;
    }
    for (name, values) in cell_scalars {
        if values.len() != nc {
            return Err(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                format!(
                    "scalar field {name} has {} values for {nc} cells",
                    values.len()
                ),
            ));
        }
        writeln!(out, "SCALARS {} double 1", name.replace(' ', "_"))?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for v in *values {
            writeln!(out, "{v:e}")?;
        }
    }
    Ok(())
}
