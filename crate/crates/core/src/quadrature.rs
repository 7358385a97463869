//! Quadrature rules on reference cells and facets.
//!
//! All rules are normalized so that the weights sum to one; an integral over
//! a cell `T` is `|T| * sum_n w_n f(x_n)`.

use crate::refelem::CellShape;

pub type Point = [f64; 3];

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Normalized integral `sum_n w_n f(x_n)`.
    pub fn apply(&self, mut f: impl FnMut(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]` (weights sum to one).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n.
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { t } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pnm1) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (1.0 - t);
        weights[i] = 1.0 / ((1.0 - t * t) * dp * dp);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| nodes[a].total_cmp(&nodes[b]));
    (idx.iter().map(|&i| nodes[i]).collect(), idx.iter().map(|&i| weights[i]).collect())
}

fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 2
}

/// A Gauss-type rule on the reference cell exact for polynomials of total
/// degree `degree` (tensor Gauss-Legendre, collapsed on simplices).
pub fn cell_gauss(shape: CellShape, degree: usize) -> QuadratureRule {
    let n = points_for_degree(degree);
    let (t, w) = gauss_legendre(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    match shape {
        CellShape::Triangle => {
            for (u, wu) in t.iter().zip(&w) {
                for (v, wv) in t.iter().zip(&w) {
                    points.push([*u, v * (1.0 - u), 0.0]);
                    weights.push(2.0 * wu * wv * (1.0 - u));
                }
            }
        }
        CellShape::Quadrilateral => {
            for (u, wu) in t.iter().zip(&w) {
                for (v, wv) in t.iter().zip(&w) {
                    points.push([*u, *v, 0.0]);
                    weights.push(wu * wv);
                }
            }
        }
        CellShape::Tetrahedron => {
            for (u, wu) in t.iter().zip(&w) {
                for (v, wv) in t.iter().zip(&w) {
                    for (s, ws) in t.iter().zip(&w) {
                        points.push([*u, v * (1.0 - u), s * (1.0 - u) * (1.0 - v)]);
                        weights.push(6.0 * wu * wv * ws * (1.0 - u) * (1.0 - u) * (1.0 - v));
                    }
                }
            }
        }
        CellShape::Hexahedron => {
            for (u, wu) in t.iter().zip(&w) {
                for (v, wv) in t.iter().zip(&w) {
                    for (s, ws) in t.iter().zip(&w) {
                        points.push([*u, *v, *s]);
                        weights.push(wu * wv * ws);
                    }
                }
            }
        }
        CellShape::Prism => {
            let tri = cell_gauss(CellShape::Triangle, degree);
            for (p, wp) in tri.points.iter().zip(&tri.weights) {
                for (s, ws) in t.iter().zip(&w) {
                    points.push([p[0], p[1], *s]);
                    weights.push(wp * ws);
                }
            }
        }
    }
    QuadratureRule { points, weights }
}

/// Shape of a cell facet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FacetShape {
    Segment,
    Triangle,
    Quadrilateral,
}

impl FacetShape {
    pub fn vertex_count(self) -> usize {
        match self {
            FacetShape::Segment => 2,
            FacetShape::Triangle => 3,
            FacetShape::Quadrilateral => 4,
        }
    }

    /// Nodal (hat) functions of the facet vertices at parameter `(s, t)`.
    ///
    /// Segment `v0 + s (v1 - v0)`, triangle `v0 + s (v1 - v0) + t (v2 - v0)`,
    /// quadrilateral bilinear with cyclic vertex order.
    pub fn hat_functions(self, s: f64, t: f64) -> [f64; 4] {
        match self {
            FacetShape::Segment => [1.0 - s, s, 0.0, 0.0],
            FacetShape::Triangle => [1.0 - s - t, s, t, 0.0],
            FacetShape::Quadrilateral => [(1.0 - s) * (1.0 - t), s * (1.0 - t), s * t, (1.0 - s) * t],
        }
    }

    /// Facet parameters of the centroid.
    pub fn centroid_params(self) -> [f64; 2] {
        match self {
            FacetShape::Segment => [0.5, 0.0],
            FacetShape::Triangle => [1.0 / 3.0, 1.0 / 3.0],
            FacetShape::Quadrilateral => [0.5, 0.5],
        }
    }

    /// Gauss rule in facet parameters, normalized to unit total weight.
    pub fn gauss(self, degree: usize) -> Vec<([f64; 2], f64)> {
        let n = points_for_degree(degree);
        let (t, w) = gauss_legendre(n);
        let mut out = Vec::new();
        match self {
            FacetShape::Segment => {
                for (u, wu) in t.iter().zip(&w) {
                    out.push(([*u, 0.0], *wu));
                }
            }
            FacetShape::Triangle => {
                for (u, wu) in t.iter().zip(&w) {
                    for (v, wv) in t.iter().zip(&w) {
                        out.push(([*u, v * (1.0 - u)], 2.0 * wu * wv * (1.0 - u)));
                    }
                }
            }
            FacetShape::Quadrilateral => {
                for (u, wu) in t.iter().zip(&w) {
                    for (v, wv) in t.iter().zip(&w) {
                        out.push(([*u, *v], wu * wv));
                    }
                }
            }
        }
        out
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact integral of `x^a y^b z^c` over the reference cell divided by the
/// cell measure.
pub fn monomial_mean(shape: CellShape, e: [u32; 3]) -> f64 {
    let [a, b, c] = e;
    match shape {
        CellShape::Triangle => {
            assert_eq!(c, 0);
            2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)
        }
        CellShape::Quadrilateral => {
            assert_eq!(c, 0);
            1.0 / ((a + 1) as f64 * (b + 1) as f64)
        }
        CellShape::Tetrahedron => 6.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3),
        CellShape::Hexahedron => 1.0 / ((a + 1) as f64 * (b + 1) as f64 * (c + 1) as f64),
        CellShape::Prism => 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2) / (c + 1) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_odd_degree() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn cell_gauss_exact_for_requested_degree() {
        for shape in CellShape::ALL {
            let rule = cell_gauss(shape, 6);
            let dim = shape.dim();
            for a in 0..=6u32 {
                for b in 0..=(6 - a) {
                    let cmax = if dim == 3 { 6 - a - b } else { 0 };
                    for c in 0..=cmax {
                        let q = rule.apply(|p| p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32));
                        let exact = monomial_mean(shape, [a, b, c]);
                        assert!((q - exact).abs() < 1e-13 * exact.max(1e-3), "{shape:?} {a}{b}{c}");
                    }
                }
            }
        }
    }

    #[test]
    fn facet_rules_integrate_hat_functions() {
        for (shape, mean) in [
            (FacetShape::Segment, 0.5),
            (FacetShape::Triangle, 1.0 / 3.0),
            (FacetShape::Quadrilateral, 0.25),
        ] {
            let q: f64 = shape.gauss(5).iter().map(|(p, w)| w * shape.hat_functions(p[0], p[1])[0]).sum();
            assert!((q - mean).abs() < 1e-14);
        }
    }
}
