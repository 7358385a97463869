//! First-order BDM1 bases on the triangle and the square, obtained by
//! inverting the matrix of normal-component point functionals at the edge
//! endpoints.

use nalgebra::DMatrix;

use super::CellShape;
use crate::geometry::facet_normal;
use crate::poly::{Poly, VecPoly};

/// Local DOF matrices above this condition number abort the construction.
pub const MAX_CONDITION: f64 = 1e3;

fn spanning_set(shape: CellShape) -> Vec<VecPoly> {
    let (x, y) = (Poly::var(0), Poly::var(1));
    let one = Poly::constant(1.0);
    let o = Poly::zero;
    let mut set = vec![
        VecPoly::new(vec![one.clone(), o()]),
        VecPoly::new(vec![x.clone(), o()]),
        VecPoly::new(vec![y.clone(), o()]),
        VecPoly::new(vec![o(), one]),
        VecPoly::new(vec![o(), x.clone()]),
        VecPoly::new(vec![o(), y.clone()]),
    ];
    if shape == CellShape::Quadrilateral {
        // curl(x^2 y) and curl(x y^2)
        set.push(VecPoly::new(vec![x.clone() * x.clone(), -2.0 * (x.clone() * y.clone())]));
        set.push(VecPoly::new(vec![2.0 * (x.clone() * y.clone()), -(y.clone() * y)]));
    }
    set
}

/// Returns the dual basis ordered facet by facet, endpoint by endpoint,
/// together with the condition number of the functional matrix.
pub fn bdm1(shape: CellShape) -> (Vec<VecPoly>, f64) {
    let set = spanning_set(shape);
    let n = set.len();
    let verts = shape.reference_vertices();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut row = 0;
    for facet in shape.facets() {
        let pts: Vec<_> = facet.vertices.iter().map(|&v| verts[v]).collect();
        let (normal, measure) = facet_normal(facet.shape, &pts);
        for p in &pts {
            for (col, f) in set.iter().enumerate() {
                let val = f.eval(p);
                a[(row, col)] = measure * (normal[0] * val[0] + normal[1] * val[1]);
            }
            row += 1;
        }
    }
    assert_eq!(row, n, "BDM1 functional count mismatch");
    let sv = a.clone().singular_values();
    let cond = sv.max() / sv.min();
    assert!(cond < MAX_CONDITION, "BDM1 functional matrix ill-conditioned ({cond:e})");
    let inv = a.try_inverse().expect("BDM1 functional matrix is singular");
    let basis = (0..n)
        .map(|j| {
            set.iter()
                .enumerate()
                .fold(VecPoly::zero(2), |acc, (m, f)| acc + inv[(m, j)] * f.clone())
        })
        .collect();
    (basis, cond)
}
