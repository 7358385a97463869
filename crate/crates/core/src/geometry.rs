//! Small fixed-size vector helpers shared by reference and physical cells.

use crate::quadrature::{FacetShape, Point};

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &Point, b: &Point) -> f64 {
    norm(&sub(a, b))
}

/// Unit normal and measure of a planar facet.
///
/// Vertices are ordered so that the normal points outward: for segments the
/// direction `(v1 - v0)` rotated clockwise, for triangles and
/// quadrilaterals `(v1 - v0) x (v_last - v0)`.
pub fn facet_normal(shape: FacetShape, v: &[Point]) -> (Point, f64) {
    match shape {
        FacetShape::Segment => {
            let t = sub(&v[1], &v[0]);
            let len = norm(&t);
            ([t[1] / len, -t[0] / len, 0.0], len)
        }
        FacetShape::Triangle | FacetShape::Quadrilateral => {
            let last = v.len() - 1;
            let c = cross(&sub(&v[1], &v[0]), &sub(&v[last], &v[0]));
            let n = norm(&c);
            let measure = if shape == FacetShape::Triangle { 0.5 * n } else { n };
            ([c[0] / n, c[1] / n, c[2] / n], measure)
        }
    }
}

/// Maps facet parameters `(s, t)` to a point on the facet.
pub fn facet_point(shape: FacetShape, v: &[Point], s: f64, t: f64) -> Point {
    let h = shape.hat_functions(s, t);
    let mut p = [0.0; 3];
    for (k, vk) in v.iter().enumerate() {
        for a in 0..3 {
            p[a] += h[k] * vk[a];
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_normal_rotates_clockwise() {
        let (n, len) = facet_normal(FacetShape::Segment, &[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert_eq!(n, [0.0, -1.0, 0.0]);
        assert_eq!(len, 2.0);
    }

    #[test]
    fn quad_facet_area() {
        let v = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 3.0, 0.0], [0.0, 3.0, 0.0]];
        let (n, a) = facet_normal(FacetShape::Quadrilateral, &v);
        assert_eq!(n, [0.0, 0.0, 1.0]);
        assert_eq!(a, 6.0);
        assert_eq!(facet_point(FacetShape::Quadrilateral, &v, 0.5, 0.5), [1.0, 1.5, 0.0]);
    }
}
