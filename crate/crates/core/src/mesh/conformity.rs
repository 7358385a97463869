//! Geometric conformity of the boundary: a conforming mesh has no vertex
//! lying on a boundary facet other than that facet's own vertices, and no two
//! boundary facets overlap. Boundary facets are binned on a uniform grid.

use std::collections::HashMap;

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{dist, dot, sub};
use crate::quadrature::{FacetShape, Point};

const REL_TOL: f64 = 1e-10;

struct Grid {
    origin: Point,
    size: f64,
    dim: usize,
    bins: HashMap<[i64; 3], Vec<usize>>,
}

impl Grid {
    fn key(&self, p: &Point) -> [i64; 3] {
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = ((p[a] - self.origin[a]) / self.size).floor() as i64;
        }
        k
    }

    fn insert(&mut self, id: usize, lo: &Point, hi: &Point) {
        let (a, b) = (self.key(lo), self.key(hi));
        let z = if self.dim == 3 { a[2]..=b[2] } else { 0..=0 };
        for i in a[0]..=b[0] {
            for j in a[1]..=b[1] {
                for k in z.clone() {
                    self.bins.entry([i, j, k]).or_default().push(id);
                }
            }
        }
    }

    fn query(&self, p: &Point) -> &[usize] {
        self.bins.get(&self.key(p)).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

/// Whether `p` lies on the closed planar facet within `tol`.
fn on_facet(shape: FacetShape, v: &[Point], p: &Point, tol: f64) -> bool {
    let e1 = sub(&v[1], &v[0]);
    let e2 = sub(&v[v.len() - 1], &v[0]);
    let r = sub(p, &v[0]);
    let (s, t, resid) = match shape {
        FacetShape::Segment => {
            let s = dot(&r, &e1) / dot(&e1, &e1);
            let q = [r[0] - s * e1[0], r[1] - s * e1[1], r[2] - s * e1[2]];
            (s, 0.0, dot(&q, &q).sqrt())
        }
        _ => {
            let (a, b, c) = (dot(&e1, &e1), dot(&e1, &e2), dot(&e2, &e2));
            let (r1, r2) = (dot(&r, &e1), dot(&r, &e2));
            let det = a * c - b * b;
            let s = (c * r1 - b * r2) / det;
            let t = (a * r2 - b * r1) / det;
            let q: Point = std::array::from_fn(|k| r[k] - s * e1[k] - t * e2[k]);
            (s, t, dot(&q, &q).sqrt())
        }
    };
    let scale = dist(&v[0], &v[1]).max(dist(&v[0], &v[v.len() - 1]));
    if resid > tol {
        return false;
    }
    let eps = tol / scale;
    match shape {
        FacetShape::Segment => s >= -eps && s <= 1.0 + eps,
        FacetShape::Triangle => s >= -eps && t >= -eps && s + t <= 1.0 + eps,
        FacetShape::Quadrilateral => s >= -eps && t >= -eps && s <= 1.0 + eps && t <= 1.0 + eps,
    }
}

pub(super) fn check_boundary(mesh: &Mesh) -> Result<()> {
    let boundary: Vec<usize> = mesh.boundary_facets().collect();
    if boundary.is_empty() {
        return Err(Error::InvalidMesh("mesh has no boundary".into()));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in &mesh.vertices {
        for a in 0..3 {
            lo[a] = lo[a].min(v[a]);
            hi[a] = hi[a].max(v[a]);
        }
    }
    let extent = (0..mesh.dim).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    let mut size = boundary
        .iter()
        .map(|&f| mesh.facets[f].measure.powf(1.0 / (mesh.dim as f64 - 1.0)))
        .fold(0.0, f64::max);
    // keep the bin count bounded
    size = size.max(extent / 512.0);
    let tol = REL_TOL * extent.max(f64::MIN_POSITIVE);
    let mut grid = Grid { origin: lo, size, dim: mesh.dim, bins: HashMap::new() };
    for &f in &boundary {
        let pts = mesh.facet_vertex_coords(f);
        let mut a = [f64::INFINITY; 3];
        let mut b = [f64::NEG_INFINITY; 3];
        for p in &pts {
            for k in 0..3 {
                a[k] = a[k].min(p[k] - tol);
                b[k] = b[k].max(p[k] + tol);
            }
        }
        grid.insert(f, &a, &b);
    }

    for (vid, p) in mesh.vertices.iter().enumerate() {
        for &f in grid.query(p) {
            let fac = &mesh.facets[f];
            if fac.vertices.contains(&vid) {
                continue;
            }
            if on_facet(fac.shape, &mesh.facet_vertex_coords(f), p, tol) {
                return Err(Error::NonConforming(format!("vertex {vid} lies on boundary facet {f}")));
            }
        }
    }
    for &f in &boundary {
        let pts = mesh.facet_vertex_coords(f);
        let n = pts.len() as f64;
        let c: Point = std::array::from_fn(|k| pts.iter().map(|p| p[k]).sum::<f64>() / n);
        for &g in grid.query(&c) {
            if g != f && on_facet(mesh.facets[g].shape, &mesh.facet_vertex_coords(g), &c, tol) {
                return Err(Error::NonConforming(format!("boundary facets {f} and {g} overlap")));
            }
        }
    }
    Ok(())
}
