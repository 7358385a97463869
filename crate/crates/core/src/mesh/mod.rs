//! Conforming hybrid affine meshes.
//!
//! Every cell is the image `F_T(x^) = a_T + B_T x^` of one of the reference
//! cells. Facets are derived from the cells; the global normal of an
//! interior facet points from the lower to the higher adjacent cell id, and
//! boundary normals point outward.

mod conformity;
mod generate;
mod io;

use std::collections::HashMap;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{dist, dot, facet_normal, sub};
use crate::quadrature::{FacetShape, Point};
use crate::refelem::CellShape;

pub use generate::{generate, Family};
pub use io::{read_mesh, write_mesh};

/// Relative tolerance (w.r.t. `h_T`) for the affinity check.
pub const AFFINE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub shape: CellShape,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct AffineMap {
    pub dim: usize,
    pub origin: Point,
    /// `B_T`, padded with the identity in 2D.
    pub jacobian: Matrix3<f64>,
    pub det: f64,
    pub inverse: Matrix3<f64>,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        Self::new(dim, [0.0; 3], Matrix3::identity()).unwrap()
    }

    /// Returns `None` for a singular or orientation-reversing matrix.
    pub fn new(dim: usize, origin: Point, jacobian: Matrix3<f64>) -> Option<Self> {
        let det = jacobian.determinant();
        if !(det > 0.0) {
            return None;
        }
        let inverse = jacobian.try_inverse()?;
        Some(Self { dim, origin, jacobian, det, inverse })
    }

    pub fn apply(&self, xh: &Point) -> Point {
        let v = self.jacobian * nalgebra::Vector3::from(*xh);
        let mut p = [self.origin[0] + v[0], self.origin[1] + v[1], self.origin[2] + v[2]];
        if self.dim == 2 {
            p[2] = 0.0;
        }
        p
    }

    pub fn apply_inverse(&self, x: &Point) -> Point {
        let v = self.inverse * nalgebra::Vector3::from(sub(x, &self.origin));
        let mut p = [v[0], v[1], v[2]];
        if self.dim == 2 {
            p[2] = 0.0;
        }
        p
    }

    /// Contravariant Piola transform `(1/det B) B v^`.
    pub fn piola(&self, vh: &Point) -> Point {
        let v = self.jacobian * nalgebra::Vector3::from(*vh) / self.det;
        [v[0], v[1], v[2]]
    }

    /// Maps a reference gradient to the physical one, `B^{-T} g^`.
    pub fn covariant(&self, gh: &Point) -> Point {
        let v = self.inverse.transpose() * nalgebra::Vector3::from(*gh);
        [v[0], v[1], v[2]]
    }

    /// Spectral condition number of the `d x d` block of `B_T`.
    pub fn condition(&self) -> f64 {
        let sv = if self.dim == 2 {
            self.jacobian.fixed_view::<2, 2>(0, 0).into_owned().singular_values().as_slice().to_vec()
        } else {
            self.jacobian.singular_values().as_slice().to_vec()
        };
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Free function form of [`AffineMap::piola`].
pub fn piola_map(map: &AffineMap, vh: &Point) -> Point {
    map.piola(vh)
}

#[derive(Clone, Debug)]
pub struct Facet {
    pub shape: FacetShape,
    /// Global vertex ids, ordered as the local facet of `cells[0]`.
    pub vertices: Vec<usize>,
    /// Adjacent cells in increasing id order (one on the boundary).
    pub cells: Vec<usize>,
    /// Global unit normal (outward of `cells[0]`).
    pub normal: Point,
    pub measure: f64,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.cells.len() == 1
    }
}

/// Local view of a facet from one of its cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellFacet {
    pub facet: usize,
    /// `+1` if the cell's outward normal agrees with the global normal.
    pub sign: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetSide {
    pub cell: usize,
    pub local_facet: usize,
    pub sign: f64,
    /// `perm[k]` = position in the cell's local facet of the `k`-th global
    /// facet vertex.
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FacetSignature {
    pub facet: usize,
    pub sides: Vec<FacetSide>,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub vertices: Vec<Point>,
    pub cells: Vec<Cell>,
    pub facets: Vec<Facet>,
    pub cell_facets: Vec<Vec<CellFacet>>,
    pub maps: Vec<AffineMap>,
    pub diameters: Vec<f64>,
    /// `max_T ||B_T|| ||B_T^{-1}||`.
    pub shape_regularity: f64,
}

impl Mesh {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Global mesh size `h = max_T h_T`.
    pub fn h(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    pub fn cell_measure(&self, cell: usize) -> f64 {
        self.cells[cell].shape.reference_measure() * self.maps[cell].det
    }

    pub fn cell_vertex_coords(&self, cell: usize) -> Vec<Point> {
        self.cells[cell].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn facet_vertex_coords(&self, facet: usize) -> Vec<Point> {
        self.facets[facet].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn boundary_facets(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.facets.len()).filter(|&f| self.facets[f].is_boundary())
    }

    pub fn shapes(&self) -> Vec<CellShape> {
        let mut s: Vec<CellShape> = self.cells.iter().map(|c| c.shape).collect();
        s.sort();
        s.dedup();
        s
    }

    pub fn facet_signature(&self, facet: usize) -> FacetSignature {
        let fac = &self.facets[facet];
        let sides = fac
            .cells
            .iter()
            .map(|&cell| {
                let local_facet = self.cell_facets[cell].iter().position(|cf| cf.facet == facet).unwrap();
                let local = self.cells[cell].shape.facets()[local_facet].vertices;
                let verts = &self.cells[cell].vertices;
                let permutation = fac
                    .vertices
                    .iter()
                    .map(|g| local.iter().position(|&l| verts[l] == *g).unwrap())
                    .collect();
                FacetSide { cell, local_facet, sign: self.cell_facets[cell][local_facet].sign, permutation }
            })
            .collect();
        FacetSignature { facet, sides }
    }
}

fn affine_map(cell_id: usize, cell: &Cell, vertices: &[Point], dim: usize) -> Result<(AffineMap, f64)> {
    let pts: Vec<Point> = cell.vertices.iter().map(|&v| vertices[v]).collect();
    let diameter = pts
        .iter()
        .enumerate()
        .flat_map(|(i, a)| pts[i + 1..].iter().map(move |b| dist(a, b)))
        .fold(0.0, f64::max);
    let mut jac = Matrix3::identity();
    for (col, &k) in cell.shape.frame_vertices().iter().enumerate() {
        let e = sub(&pts[k], &pts[0]);
        for row in 0..dim {
            jac[(row, col)] = e[row];
        }
    }
    let det = jac.determinant();
    let map = AffineMap::new(dim, pts[0], jac).ok_or(Error::InvertedCell { cell: cell_id, det })?;
    if !(det > 1e-14 * diameter.powi(dim as i32)) {
        return Err(Error::InvertedCell { cell: cell_id, det });
    }
    let deviation = cell
        .shape
        .reference_vertices()
        .iter()
        .zip(&pts)
        .map(|(xh, x)| dist(&map.apply(xh), x))
        .fold(0.0, f64::max);
    if deviation > AFFINE_TOL * diameter {
        return Err(Error::NonAffineCell { cell: cell_id, deviation });
    }
    Ok((map, diameter))
}

/// Builds connectivity, orientation signs and affine maps, and validates
/// conformity.
pub fn build_mesh(dim: usize, vertices: Vec<Point>, cells: Vec<Cell>) -> Result<Mesh> {
    if dim != 2 && dim != 3 {
        return Err(Error::InvalidMesh(format!("dimension {dim}")));
    }
    if cells.is_empty() {
        return Err(Error::InvalidMesh("no cells".into()));
    }
    for (i, v) in vertices.iter().enumerate() {
        if v.iter().any(|c| !c.is_finite()) || (dim == 2 && v[2] != 0.0) {
            return Err(Error::InvalidMesh(format!("vertex {i} has invalid coordinates {v:?}")));
        }
    }
    for (c, cell) in cells.iter().enumerate() {
        if cell.shape.dim() != dim {
            return Err(Error::InvalidMesh(format!("cell {c} is {:?} in a {dim}D mesh", cell.shape)));
        }
        if cell.vertices.len() != cell.shape.vertex_count() {
            return Err(Error::InvalidMesh(format!("cell {c} has {} vertices", cell.vertices.len())));
        }
        if let Some(&v) = cell.vertices.iter().find(|&&v| v >= vertices.len()) {
            return Err(Error::InvalidMesh(format!("cell {c} references missing vertex {v}")));
        }
        let mut sorted = cell.vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != cell.vertices.len() {
            return Err(Error::InvalidMesh(format!("cell {c} repeats a vertex")));
        }
    }

    let mut maps = Vec::with_capacity(cells.len());
    let mut diameters = Vec::with_capacity(cells.len());
    let mut shape_regularity = 0.0f64;
    for (c, cell) in cells.iter().enumerate() {
        let (map, diameter) = affine_map(c, cell, &vertices, dim)?;
        shape_regularity = shape_regularity.max(map.condition());
        maps.push(map);
        diameters.push(diameter);
    }

    let mut facets: Vec<Facet> = Vec::new();
    let mut lookup: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cell_facets = Vec::with_capacity(cells.len());
    for (c, cell) in cells.iter().enumerate() {
        let mut local = Vec::with_capacity(cell.shape.facets().len());
        for rf in cell.shape.facets() {
            let ids: Vec<usize> = rf.vertices.iter().map(|&l| cell.vertices[l]).collect();
            let mut key = ids.clone();
            key.sort_unstable();
            match lookup.get(&key) {
                Some(&f) => {
                    let fac = &mut facets[f];
                    if fac.cells.len() >= 2 {
                        return Err(Error::NonConforming(format!("facet {key:?} shared by more than two cells")));
                    }
                    fac.cells.push(c);
                    local.push(CellFacet { facet: f, sign: -1.0 });
                }
                None => {
                    let pts: Vec<Point> = ids.iter().map(|&v| vertices[v]).collect();
                    let (normal, measure) = facet_normal(rf.shape, &pts);
                    lookup.insert(key, facets.len());
                    local.push(CellFacet { facet: facets.len(), sign: 1.0 });
                    facets.push(Facet { shape: rf.shape, vertices: ids, cells: vec![c], normal, measure });
                }
            }
        }
        cell_facets.push(local);
    }

    // the two cells of an interior facet must lie on opposite sides
    for (f, fac) in facets.iter().enumerate() {
        if fac.cells.len() == 2 {
            let anchor = vertices[fac.vertices[0]];
            let side = |cell: usize| {
                let pts: Vec<Point> = cells[cell].vertices.iter().map(|&v| vertices[v]).collect();
                let n = pts.len() as f64;
                let mut c = [0.0; 3];
                for p in &pts {
                    for k in 0..3 {
                        c[k] += p[k] / n;
                    }
                }
                dot(&fac.normal, &sub(&c, &anchor))
            };
            if !(side(fac.cells[0]) < 0.0 && side(fac.cells[1]) > 0.0) {
                return Err(Error::NonConforming(format!("cells adjacent to facet {f} overlap")));
            }
        }
    }

    let mesh = Mesh { dim, vertices, cells, facets, cell_facets, maps, diameters, shape_regularity };
    conformity::check_boundary(&mesh)?;
    Ok(mesh)
}
