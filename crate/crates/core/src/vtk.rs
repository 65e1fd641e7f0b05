//! Legacy ASCII VTK export of the sub-element mesh.
//!
//! Points are the global patch nodes. Straight triangles are written as
//! linear triangles (type 5), triangles carrying a quadratic interface edge
//! as quadratic triangles (type 22) and uncut quadrilaterals by their four
//! corners (type 9).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::basis::ElementShape;
use crate::error::{Error, Result};
use crate::mesh::{Curvature, MeshModel};
use crate::space::DofMap;

pub const VTK_TRIANGLE: u8 = 5;
pub const VTK_QUAD: u8 = 9;
pub const VTK_QUADRATIC_TRIANGLE: u8 = 22;

/// Corner order of the lexicographic 3×3 quad nodes, counterclockwise.
const QUAD_CORNERS: [usize; 4] = [0, 2, 8, 6];

/// One output cell: VTK type, point indices, side and curvature code.
#[derive(Clone, Debug, PartialEq)]
pub struct VtkCell {
    pub kind: u8,
    pub points: Vec<usize>,
    pub side: u8,
    pub curvature: u8,
}

/// Cells of `mesh` in patch order.
pub fn cells(mesh: &MeshModel, dofs: &DofMap) -> Vec<VtkCell> {
    let mut out = Vec::with_capacity(mesh.n_elements());
    for patch in &mesh.patches {
        let (i, j) = patch.index;
        if !dofs.is_active(i, j) {
            continue;
        }
        for el in &patch.elements {
            let global = |a: usize| dofs.dof(i, j, el.nodes[a]);
            let (kind, points) = match el.shape {
                ElementShape::Quad => (VTK_QUAD, QUAD_CORNERS.iter().map(|&a| global(a)).collect()),
                ElementShape::Tri if el.curvature == Curvature::QuadraticEdge => {
                    (VTK_QUADRATIC_TRIANGLE, (0..6).map(global).collect())
                }
                ElementShape::Tri => (VTK_TRIANGLE, (0..3).map(global).collect()),
            };
            out.push(VtkCell {
                kind,
                points,
                side: el.side.number(),
                curvature: el.curvature.code(),
            });
        }
    }
    out
}

/// Writes the mesh with optional nodal values `u_h` (one per dof).
pub fn write_vtk(mut w: impl Write, mesh: &MeshModel, dofs: &DofMap, u_h: Option<&[f64]>) -> std::io::Result<()> {
    let points = dofs.positions(mesh);
    let cells = cells(mesh, dofs);
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "patch mesh, {} patches per side, PN = {}, n_l = {}", mesh.grid.n, mesh.pn, mesh.n_l)?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", points.len())?;
    for p in &points {
        writeln!(w, "{:.17e} {:.17e} 0", p.x, p.y)?;
    }
    let size: usize = cells.iter().map(|c| c.points.len() + 1).sum();
    writeln!(w, "CELLS {} {}", cells.len(), size)?;
    for c in &cells {
        write!(w, "{}", c.points.len())?;
        for p in &c.points {
            write!(w, " {p}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {}", cells.len())?;
    for c in &cells {
        writeln!(w, "{}", c.kind)?;
    }
    writeln!(w, "CELL_DATA {}", cells.len())?;
    writeln!(w, "SCALARS side int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for c in &cells {
        writeln!(w, "{}", c.side)?;
    }
    writeln!(w, "SCALARS curvature int 1")?;
    writeln!(w, "LOOKUP_TABLE default")?;
    for c in &cells {
        writeln!(w, "{}", c.curvature)?;
    }
    if let Some(u) = u_h {
        assert_eq!(u.len(), points.len(), "one value per point expected");
        writeln!(w, "POINT_DATA {}", points.len())?;
        writeln!(w, "SCALARS u_h double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in u {
            writeln!(w, "{v:.17e}")?;
        }
    }
    Ok(())
}

/// [`write_vtk`] to a file.
pub fn export_vtk(path: &Path, mesh: &MeshModel, dofs: &DofMap, u_h: Option<&[f64]>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_vtk(&mut w, mesh, dofs, u_h).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}
