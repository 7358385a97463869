//! Second-order velocity bases on the five reference cells.
//!
//! Each list is indexed so that entry `i` is the basis function `Phi_{i+1}`
//! of the corresponding element family.

use crate::poly::{Poly, VecPoly};

fn xyz() -> (Poly, Poly, Poly) {
    (Poly::var(0), Poly::var(1), Poly::var(2))
}

fn v2(a: Poly, b: Poly) -> VecPoly {
    VecPoly::new(vec![a, b])
}

fn v3(a: Poly, b: Poly, c: Poly) -> VecPoly {
    VecPoly::new(vec![a, b, c])
}

fn o() -> Poly {
    Poly::zero()
}

/// RT1 on the unit triangle.
pub fn triangle() -> Vec<VecPoly> {
    let (x, y, _) = xyz();
    let xx = x.clone() * x.clone();
    let yy = y.clone() * y.clone();
    let xy = x.clone() * y.clone();
    vec![
        v2(2.0 * xx.clone() + xy.clone() - x.clone(), yy.clone() + 2.0 * xy.clone() - y.clone()),
        v2(xx.clone() + 2.0 * xy.clone() - x.clone(), 2.0 * yy.clone() + xy.clone() - y.clone()),
        v2(-xx.clone() + xy.clone() + x.clone() - y.clone(), yy.clone() - xy.clone()),
        v2(
            -2.0 * xx.clone() - xy.clone() + 3.0 * x.clone() + y.clone() - 1.0,
            -yy.clone() - 2.0 * xy.clone() + y.clone(),
        ),
        v2(
            -xx.clone() - 2.0 * xy.clone() + x.clone(),
            -2.0 * yy.clone() - xy.clone() + x.clone() + 3.0 * y.clone() - 1.0,
        ),
        v2(xx.clone() - xy.clone(), -yy.clone() + xy.clone() - x.clone() + y.clone()),
        v2(xy.clone(), yy - y),
        v2(xx - x, xy),
    ]
}

/// BDFM2 on the unit square.
pub fn quadrilateral() -> Vec<VecPoly> {
    let (x, y, _) = xyz();
    let xx = x.clone() * x.clone();
    let yy = y.clone() * y.clone();
    let xy = x.clone() * y.clone();
    vec![
        v2(2.0 * xx.clone() - 2.0 * xy.clone(), o()),
        v2(2.0 * xx.clone() + 2.0 * xy.clone() - 2.0 * x.clone(), o()),
        v2(o(), 2.0 * yy.clone() + 2.0 * xy.clone() - 2.0 * y.clone()),
        v2(o(), 2.0 * yy.clone() - 2.0 * xy.clone()),
        v2(-2.0 * xx.clone() + 2.0 * xy.clone() + 2.0 * x.clone() - 2.0 * y.clone(), o()),
        v2(
            -2.0 * xx.clone() - 2.0 * xy.clone() + 4.0 * x.clone() + 2.0 * y.clone() - 2.0,
            o(),
        ),
        v2(
            o(),
            -2.0 * yy.clone() - 2.0 * xy.clone() + 2.0 * x.clone() + 4.0 * y.clone() - 2.0,
        ),
        v2(
            o(),
            -2.0 * yy.clone() + 2.0 * xy.clone() - 2.0 * x.clone() + 2.0 * y.clone(),
        ),
        v2(xx - x, o()),
        v2(o(), yy - y),
    ]
}

/// RTN1 on the unit tetrahedron: twelve vertex functions followed by the
/// three barycenter functions.
pub fn tetrahedron() -> Vec<VecPoly> {
    let (x, y, z) = xyz();
    let p13 = v3(x.clone() * x.clone() - x.clone(), x.clone() * y.clone(), x.clone() * z.clone());
    let p14 = v3(y.clone() * x.clone(), y.clone() * y.clone() - y.clone(), y.clone() * z.clone());
    let p15 = v3(z.clone() * x.clone(), z.clone() * y.clone(), z.clone() * z.clone() - z.clone());
    let s = x.clone() + y.clone() + z.clone() - 1.0;
    let comb = |base: VecPoly, a: f64, b: f64, c: f64| {
        base + a * p13.clone() + b * p14.clone() + c * p15.clone()
    };
    vec![
        comb(v3(x.clone(), o(), o()), 2.0, 1.0, 1.0),
        comb(v3(o(), y.clone(), o()), 1.0, 2.0, 1.0),
        comb(v3(o(), o(), z.clone()), 1.0, 1.0, 2.0),
        comb(v3(-y.clone(), y.clone(), o()), -1.0, 1.0, 0.0),
        comb(v3(-z.clone(), o(), z.clone()), -1.0, 0.0, 1.0),
        comb(v3(s.clone(), o(), o()), -2.0, -1.0, -1.0),
        comb(v3(o(), -z.clone(), z.clone()), 0.0, -1.0, 1.0),
        comb(v3(o(), s.clone(), o()), -1.0, -2.0, -1.0),
        comb(v3(x.clone(), -x.clone(), o()), 1.0, -1.0, 0.0),
        comb(v3(o(), o(), s), -1.0, -1.0, -2.0),
        comb(v3(x.clone(), o(), -x), 1.0, 0.0, -1.0),
        comb(v3(o(), y.clone(), -y), 0.0, 1.0, -1.0),
        p13.clone(),
        p14.clone(),
        p15.clone(),
    ]
}

/// Q1^3 plus `(x^2, 0, 0), (0, y^2, 0), (0, 0, z^2)` on the unit cube.
///
/// The vertex functions are built from `a(x, y, z) = xyz` and the bubble
/// `b(w) = w (1 - w) / 2`; with this sign every vertex function vanishes at
/// the barycenter.
pub fn hexahedron() -> Vec<VecPoly> {
    let a = |rx: bool, ry: bool, rz: bool| {
        let (x, y, z) = xyz();
        let mut p = x * y * z;
        for (axis, r) in [rx, ry, rz].into_iter().enumerate() {
            if r {
                p = p.reflect(axis);
            }
        }
        p
    };
    let b = |axis: usize| {
        let w = Poly::var(axis);
        0.5 * (w.clone() * (Poly::constant(1.0) - w))
    };
    let along = |axis: usize, sign: f64, p: Poly| {
        let mut comps = vec![o(), o(), o()];
        comps[axis] = sign * p;
        VecPoly::new(comps)
    };
    // (sign, reflect x, reflect y, reflect z) per function, grouped by direction.
    let xs = [
        (1.0, false, true, false),
        (1.0, false, false, false),
        (1.0, false, false, true),
        (1.0, false, true, true),
        (-1.0, true, true, false),
        (-1.0, true, false, false),
        (-1.0, true, false, true),
        (-1.0, true, true, true),
    ];
    let ys = [
        (-1.0, true, true, false),
        (-1.0, false, true, false),
        (-1.0, false, true, true),
        (-1.0, true, true, true),
        (1.0, true, false, false),
        (1.0, false, false, false),
        (1.0, false, false, true),
        (1.0, true, false, true),
    ];
    let zs = [
        (-1.0, true, true, true),
        (-1.0, false, true, true),
        (-1.0, false, false, true),
        (-1.0, true, false, true),
        (1.0, true, true, false),
        (1.0, false, true, false),
        (1.0, false, false, false),
        (1.0, true, false, false),
    ];
    let mut out = Vec::with_capacity(27);
    for (axis, table) in [(0, xs), (1, ys), (2, zs)] {
        for (sign, rx, ry, rz) in table {
            out.push(along(axis, sign, a(rx, ry, rz) - b(axis)));
        }
    }
    for axis in 0..3 {
        out.push(along(axis, 1.0, 2.0 * b(axis)));
    }
    out
}

/// Prism element: the eighteen vertex functions followed by six interior
/// functions.
///
/// The interior enrichment is recombined so that each interior function
/// vanishes at the other interior node; entries 18, 20, 22 belong to the
/// node `(1/3, 1/3, 1/3)` and entries 19, 21, 23 to `(1/3, 1/3, 2/3)`.
pub fn prism() -> Vec<VecPoly> {
    let (x, y, z) = xyz();
    let one = || Poly::constant(1.0);
    let zc = one() - z.clone();
    let s = x.clone() + y.clone() - 1.0;
    let psi = [
        v3(x.clone() * z.clone(), o(), o()),
        v3(o(), y.clone() * z.clone(), o()),
        v3(-(y.clone() * z.clone()), y.clone() * z.clone(), o()),
        v3(s.clone() * z.clone(), o(), o()),
        v3(o(), s.clone() * z.clone(), o()),
        v3(x.clone() * z.clone(), -(x.clone() * z.clone()), o()),
        v3(x.clone() * zc.clone(), o(), o()),
        v3(o(), y.clone() * zc.clone(), o()),
        v3(-(y.clone() * zc.clone()), y.clone() * zc.clone(), o()),
        v3(s.clone() * zc.clone(), o(), o()),
        v3(o(), s.clone() * zc.clone(), o()),
        v3(x.clone() * zc.clone(), -(x.clone() * zc.clone()), o()),
        v3(o(), o(), -s.clone() * z.clone()),
        v3(o(), o(), x.clone() * z.clone()),
        v3(o(), o(), y.clone() * z.clone()),
        v3(o(), o(), s.clone() * zc.clone()),
        v3(o(), o(), -(x.clone() * zc.clone())),
        v3(o(), o(), -(y.clone() * zc.clone())),
    ];
    let bub = -s * x.clone() * y.clone();
    let f19 = 4.5 * v3(o(), o(), x.clone() * z.clone() * z.clone() * zc.clone());
    let f20 = 4.5 * v3(o(), o(), x.clone() * z.clone() * zc.clone() * zc.clone());
    let f21 = 9.0 * v3(bub.clone() * z.clone(), o(), o());
    let f22 = 9.0 * v3(bub.clone() * zc.clone(), o(), o());
    let f23 = 9.0 * v3(o(), bub.clone() * z.clone(), o());
    let f24 = 9.0 * v3(o(), bub * zc, o());
    let [p1, p2, p3, p4, p5, p6, p7, p8, p9, p10, p11, p12, p13, p14, p15, p16, p17, p18] = psi;
    let mut out = vec![
        p1 - f21.clone(),
        p2 - f23.clone(),
        p3 + f21.clone() - f23.clone(),
        p4 + f21.clone(),
        p5 + f23.clone(),
        p6 - f21.clone() + f23.clone(),
        p7 - f22.clone(),
        p8 - f24.clone(),
        p9 + f22.clone() - f24.clone(),
        p10 + f22.clone(),
        p11 + f24.clone(),
        p12 - f22.clone() + f24.clone(),
        p13 - f19.clone(),
        p14 - f19.clone(),
        p15 - f19.clone(),
        p16 + f20.clone(),
        p17 + f20.clone(),
        p18 + f20.clone(),
    ];
    // 2 f_lower - f_upper vanishes at z = 2/3, 2 f_upper - f_lower at z = 1/3.
    for (upper, lower) in [(f19, f20), (f21, f22), (f23, f24)] {
        out.push(2.0 * lower.clone() - upper.clone());
        out.push(2.0 * upper - lower);
    }
    out
}
