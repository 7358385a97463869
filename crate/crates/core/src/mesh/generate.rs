//! Structured mesh families on the unit square and cube. Refinement level
//! `L` halves the mesh size at each step.

use std::fmt;
use std::str::FromStr;

use super::{build_mesh, Cell, Mesh};
use crate::error::{Error, Result};
use crate::quadrature::Point;
use crate::refelem::CellShape;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    TriSquare,
    QuadSquare,
    /// Triangles on the left half, squares on the right half.
    HybridSquare,
    TetCube,
    HexCube,
    PrismCube,
    /// Prisms for `x < 1/2`, hexahedra for `x > 1/2`.
    PrismHexCube,
    /// Tetrahedra for `z < 1/2`, prisms for `z > 1/2`.
    TetPrismCube,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::TriSquare,
        Family::QuadSquare,
        Family::HybridSquare,
        Family::TetCube,
        Family::HexCube,
        Family::PrismCube,
        Family::PrismHexCube,
        Family::TetPrismCube,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::TriSquare => "tri-square",
            Family::QuadSquare => "quad-square",
            Family::HybridSquare => "hybrid-square",
            Family::TetCube => "tet-cube",
            Family::HexCube => "hex-cube",
            Family::PrismCube => "prism-cube",
            Family::PrismHexCube => "prism-hex-cube",
            Family::TetPrismCube => "tet-prism-cube",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::TriSquare | Family::QuadSquare | Family::HybridSquare => 2,
            _ => 3,
        }
    }

    /// Subdivisions per axis at level `level`.
    pub fn divisions(self, level: u32) -> usize {
        match self {
            Family::HybridSquare | Family::PrismHexCube | Family::TetPrismCube => 1 << (level + 1),
            _ => 1 << level,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

fn grid_vertices(n: usize, dim: usize) -> Vec<Point> {
    let h = 1.0 / n as f64;
    let mut v = Vec::new();
    let nz = if dim == 3 { n + 1 } else { 1 };
    for k in 0..nz {
        for j in 0..=n {
            for i in 0..=n {
                let z = if dim == 3 { k as f64 * h } else { 0.0 };
                v.push([i as f64 * h, j as f64 * h, z]);
            }
        }
    }
    v
}

fn cell(shape: CellShape, vertices: Vec<usize>) -> Cell {
    Cell { shape, vertices }
}

/// Kuhn subdivision of a cube into six tetrahedra sharing the main diagonal.
fn kuhn(c: &[usize; 8]) -> Vec<Vec<usize>> {
    // cube corner index bit pattern: x + 2y + 4z
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms
        .iter()
        .map(|p| {
            let mut bits = 0;
            let mut t = vec![c[0]];
            for &axis in p {
                bits |= 1 << axis;
                t.push(c[bits]);
            }
            // odd permutations are negatively oriented
            let odd = matches!(p, [0, 2, 1] | [1, 0, 2] | [2, 1, 0]);
            if odd {
                t.swap(2, 3);
            }
            t
        })
        .collect()
}

/// Generates level `level` of a structured family.
pub fn generate(family: Family, level: u32) -> Result<Mesh> {
    if level > 12 {
        return Err(Error::InvalidMesh(format!("refinement level {level} too large")));
    }
    let n = family.divisions(level);
    let dim = family.dim();
    let vertices = grid_vertices(n, dim);
    let id2 = |i: usize, j: usize| j * (n + 1) + i;
    let id3 = |i: usize, j: usize, k: usize| (k * (n + 1) + j) * (n + 1) + i;
    let mut cells = Vec::new();
    if dim == 2 {
        for j in 0..n {
            for i in 0..n {
                let (a, b, c, d) = (id2(i, j), id2(i + 1, j), id2(i + 1, j + 1), id2(i, j + 1));
                let quad = match family {
                    Family::TriSquare => false,
                    Family::QuadSquare => true,
                    _ => 2 * i >= n,
                };
                if quad {
                    cells.push(cell(CellShape::Quadrilateral, vec![a, b, c, d]));
                } else {
                    cells.push(cell(CellShape::Triangle, vec![a, b, c]));
                    cells.push(cell(CellShape::Triangle, vec![a, c, d]));
                }
            }
        }
    } else {
        for k in 0..n {
            for j in 0..n {
                for i in 0..n {
                    let corner: [usize; 8] = std::array::from_fn(|b| id3(i + (b & 1), j + ((b >> 1) & 1), k + (b >> 2)));
                    let shape = match family {
                        Family::TetCube => CellShape::Tetrahedron,
                        Family::HexCube => CellShape::Hexahedron,
                        Family::PrismCube => CellShape::Prism,
                        Family::PrismHexCube if 2 * i < n => CellShape::Prism,
                        Family::PrismHexCube => CellShape::Hexahedron,
                        Family::TetPrismCube if 2 * k < n => CellShape::Tetrahedron,
                        _ => CellShape::Prism,
                    };
                    let [c0, c1, c2, c3, c4, c5, c6, c7] = corner;
                    match shape {
                        CellShape::Tetrahedron => {
                            for t in kuhn(&corner) {
                                cells.push(cell(shape, t));
                            }
                        }
                        CellShape::Hexahedron => cells.push(cell(shape, vec![c0, c1, c3, c2, c4, c5, c7, c6])),
                        _ => {
                            cells.push(cell(shape, vec![c0, c1, c3, c4, c5, c7]));
                            cells.push(cell(shape, vec![c0, c3, c2, c4, c7, c6]));
                        }
                    }
                }
            }
        }
    }
    build_mesh(dim, vertices, cells)
}
