//! Reference cells, lumping quadrature rules and the velocity/pressure bases
//! whose mass matrices become block diagonal under those rules.
//!
//! Every velocity basis function is associated with exactly one quadrature
//! node: it is nonzero there and vanishes at all other nodes. At each node
//! exactly `d` functions are associated. Functions associated with a vertex
//! node additionally carry the facet on which their normal trace lives.

mod bases;
mod bdm;

use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{dot, facet_normal};
use crate::poly::{Exponent, Poly, VecPoly};
use crate::quadrature::{cell_gauss, monomial_mean, FacetShape, Point, QuadratureRule};

pub use bdm::MAX_CONDITION as BDM_MAX_CONDITION;

/// Values of basis functions at quadrature nodes below this magnitude are
/// analytically zero and are stored as exact zeros.
pub const NODE_ZERO_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellShape {
    Triangle,
    Quadrilateral,
    Tetrahedron,
    Hexahedron,
    Prism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefFacet {
    /// Cell-local vertex indices, ordered so that the induced normal points
    /// outward (see [`crate::geometry::facet_normal`]).
    pub vertices: &'static [usize],
    pub shape: FacetShape,
}

const fn seg(v: &'static [usize]) -> RefFacet {
    RefFacet { vertices: v, shape: FacetShape::Segment }
}
const fn tri(v: &'static [usize]) -> RefFacet {
    RefFacet { vertices: v, shape: FacetShape::Triangle }
}
const fn quad(v: &'static [usize]) -> RefFacet {
    RefFacet { vertices: v, shape: FacetShape::Quadrilateral }
}

const TRIANGLE_VERTICES: [Point; 3] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
const QUAD_VERTICES: [Point; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
const TET_VERTICES: [Point; 4] = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
const HEX_VERTICES: [Point; 8] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [1.0, 1.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [1.0, 1.0, 1.0],
    [0.0, 1.0, 1.0],
];
const PRISM_VERTICES: [Point; 6] = [
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 1.0],
];

const TRIANGLE_FACETS: [RefFacet; 3] = [seg(&[0, 1]), seg(&[1, 2]), seg(&[2, 0])];
const QUAD_FACETS: [RefFacet; 4] = [seg(&[0, 1]), seg(&[1, 2]), seg(&[2, 3]), seg(&[3, 0])];
const TET_FACETS: [RefFacet; 4] = [tri(&[0, 2, 1]), tri(&[0, 1, 3]), tri(&[0, 3, 2]), tri(&[1, 2, 3])];
const HEX_FACETS: [RefFacet; 6] = [
    quad(&[0, 3, 2, 1]),
    quad(&[4, 5, 6, 7]),
    quad(&[0, 1, 5, 4]),
    quad(&[1, 2, 6, 5]),
    quad(&[2, 3, 7, 6]),
    quad(&[3, 0, 4, 7]),
];
const PRISM_FACETS: [RefFacet; 5] = [
    tri(&[0, 2, 1]),
    tri(&[3, 4, 5]),
    quad(&[0, 1, 4, 3]),
    quad(&[1, 2, 5, 4]),
    quad(&[2, 0, 3, 5]),
];

impl CellShape {
    pub const ALL: [CellShape; 5] = [
        CellShape::Triangle,
        CellShape::Quadrilateral,
        CellShape::Tetrahedron,
        CellShape::Hexahedron,
        CellShape::Prism,
    ];

    pub fn dim(self) -> usize {
        match self {
            CellShape::Triangle | CellShape::Quadrilateral => 2,
            _ => 3,
        }
    }

    pub fn reference_vertices(self) -> &'static [Point] {
        match self {
            CellShape::Triangle => &TRIANGLE_VERTICES,
            CellShape::Quadrilateral => &QUAD_VERTICES,
            CellShape::Tetrahedron => &TET_VERTICES,
            CellShape::Hexahedron => &HEX_VERTICES,
            CellShape::Prism => &PRISM_VERTICES,
        }
    }

    pub fn vertex_count(self) -> usize {
        self.reference_vertices().len()
    }

    pub fn facets(self) -> &'static [RefFacet] {
        match self {
            CellShape::Triangle => &TRIANGLE_FACETS,
            CellShape::Quadrilateral => &QUAD_FACETS,
            CellShape::Tetrahedron => &TET_FACETS,
            CellShape::Hexahedron => &HEX_FACETS,
            CellShape::Prism => &PRISM_FACETS,
        }
    }

    /// Measure of the reference cell.
    pub fn reference_measure(self) -> f64 {
        match self {
            CellShape::Triangle | CellShape::Prism => 0.5,
            CellShape::Quadrilateral | CellShape::Hexahedron => 1.0,
            CellShape::Tetrahedron => 1.0 / 6.0,
        }
    }

    /// Local vertices whose differences to vertex 0 form the columns of
    /// the affine map matrix.
    pub fn frame_vertices(self) -> &'static [usize] {
        match self {
            CellShape::Triangle => &[1, 2],
            CellShape::Quadrilateral => &[1, 3],
            CellShape::Tetrahedron | CellShape::Prism => &[1, 2, 3],
            CellShape::Hexahedron => &[1, 3, 4],
        }
    }

    pub fn centroid(self) -> Point {
        match self {
            CellShape::Triangle => [1.0 / 3.0, 1.0 / 3.0, 0.0],
            CellShape::Quadrilateral => [0.5, 0.5, 0.0],
            CellShape::Tetrahedron => [0.25, 0.25, 0.25],
            CellShape::Hexahedron => [0.5, 0.5, 0.5],
            CellShape::Prism => [1.0 / 3.0, 1.0 / 3.0, 0.5],
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            CellShape::Triangle => "tri",
            CellShape::Quadrilateral => "quad",
            CellShape::Tetrahedron => "tet",
            CellShape::Hexahedron => "hex",
            CellShape::Prism => "prism",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.tag() == tag)
    }

    /// Whether a reference point lies in the closed cell (with tolerance).
    pub fn contains(self, p: &Point, tol: f64) -> bool {
        let [x, y, z] = *p;
        let unit = |t: f64| t >= -tol && t <= 1.0 + tol;
        match self {
            CellShape::Triangle => x >= -tol && y >= -tol && x + y <= 1.0 + tol && z == 0.0,
            CellShape::Quadrilateral => unit(x) && unit(y) && z == 0.0,
            CellShape::Tetrahedron => x >= -tol && y >= -tol && z >= -tol && x + y + z <= 1.0 + tol,
            CellShape::Hexahedron => unit(x) && unit(y) && unit(z),
            CellShape::Prism => x >= -tol && y >= -tol && x + y <= 1.0 + tol && unit(z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeOrder {
    FirstOrder,
    SecondOrder,
}

impl SchemeOrder {
    pub fn from_number(k: u32) -> Option<Self> {
        match k {
            1 => Some(SchemeOrder::FirstOrder),
            2 => Some(SchemeOrder::SecondOrder),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            SchemeOrder::FirstOrder => 1,
            SchemeOrder::SecondOrder => 2,
        }
    }
}

/// Polynomial class a lumping rule integrates exactly, given as a monomial
/// spanning set.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactnessClass {
    pub description: &'static str,
    pub monomials: Vec<[u32; 3]>,
}

impl ExactnessClass {
    fn total_degree(dim: usize, degree: u32, description: &'static str) -> Self {
        let mut monomials = Vec::new();
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                if dim == 2 {
                    monomials.push([a, b, 0]);
                } else {
                    for c in 0..=(degree - a - b) {
                        monomials.push([a, b, c]);
                    }
                }
            }
        }
        Self { description, monomials }
    }
}

/// How a velocity basis function is identified with a global DOF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofKind {
    /// Normal flux at the `node`-th vertex of local facet `facet`.
    FacetNode { facet: usize, node: usize },
    Interior,
}

#[derive(Clone, Debug)]
pub struct VelocityBasis {
    functions: Vec<VecPoly>,
    divergences: Vec<Poly>,
    node_of: Vec<usize>,
    dof_kind: Vec<DofKind>,
    flux_scale: Vec<f64>,
    /// `node_values[node][i]`, exact zeros off the associated node.
    node_values: Vec<Vec<Point>>,
}

impl VelocityBasis {
    pub fn count(&self) -> usize {
        self.functions.len()
    }

    pub fn function(&self, i: usize) -> Result<&VecPoly> {
        self.functions.get(i).ok_or(Error::IndexOutOfRange { index: i, count: self.count() })
    }

    pub fn evaluate(&self, i: usize, x: &Point) -> Result<Vec<f64>> {
        Ok(self.function(i)?.eval(x))
    }

    pub fn divergence(&self, i: usize, x: &Point) -> Result<f64> {
        self.divergences
            .get(i)
            .map(|d| d.eval(x))
            .ok_or(Error::IndexOutOfRange { index: i, count: self.count() })
    }

    pub fn divergence_poly(&self, i: usize) -> &Poly {
        &self.divergences[i]
    }

    pub fn node_of(&self, i: usize) -> usize {
        self.node_of[i]
    }

    pub fn dof_kind(&self, i: usize) -> DofKind {
        self.dof_kind[i]
    }

    /// `|F| n.phi` at the associated facet vertex, with `n` the outward unit
    /// normal of the reference facet. One for interior functions.
    pub fn flux_scale(&self, i: usize) -> f64 {
        self.flux_scale[i]
    }

    pub fn value_at_node(&self, node: usize, i: usize) -> &Point {
        &self.node_values[node][i]
    }

    /// Evaluates all functions at a point into `out[i]` (unused components zero).
    pub fn eval_all(&self, x: &Point, out: &mut [Point]) {
        for (o, f) in out.iter_mut().zip(&self.functions) {
            *o = [0.0; 3];
            f.eval_into(x, &mut o[..f.dim()]);
        }
    }
}

#[derive(Clone, Debug)]
pub struct PressureBasis {
    functions: Vec<Poly>,
    pub degree: usize,
}

impl PressureBasis {
    pub fn count(&self) -> usize {
        self.functions.len()
    }

    pub fn functions(&self) -> &[Poly] {
        &self.functions
    }

    pub fn evaluate(&self, i: usize, x: &Point) -> Result<f64> {
        self.functions
            .get(i)
            .map(|q| q.eval(x))
            .ok_or(Error::IndexOutOfRange { index: i, count: self.count() })
    }

    pub fn eval_all(&self, x: &Point, out: &mut [f64]) {
        for (o, q) in out.iter_mut().zip(&self.functions) {
            *o = q.eval(x);
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReferenceElementDef {
    pub shape: CellShape,
    pub order: SchemeOrder,
    /// Lumping rule, weights sum to one.
    pub rule: QuadratureRule,
    pub exactness: ExactnessClass,
    pub velocity: VelocityBasis,
    pub pressure: PressureBasis,
    /// Quadrature node located at each reference vertex.
    pub vertex_node: Vec<usize>,
    /// `div_moments[q][i] = int_{T^} q^ div phi^_i`.
    pub div_moments: Vec<Vec<f64>>,
    /// Condition number of the DOF functional matrix (first order only).
    pub functional_condition: Option<f64>,
    /// Whether the lumping rule integrates every velocity basis function
    /// exactly, i.e. is exact on constants times the velocity space.
    pub exact_on_constants: bool,
}

impl ReferenceElementDef {
    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Quadrature nodes that are not cell vertices.
    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.rule.len()).filter(|n| !self.vertex_node.contains(n)).collect()
    }

    pub fn node_blocks(&self) -> Vec<Vec<usize>> {
        node_blocks(self)
    }
}

fn p1_centered(shape: CellShape) -> Vec<Poly> {
    let c = shape.centroid();
    let mut q = vec![Poly::constant(1.0)];
    for axis in 0..shape.dim() {
        q.push(Poly::var(axis) - c[axis]);
    }
    q
}

fn pressure_basis(shape: CellShape, order: SchemeOrder) -> PressureBasis {
    match order {
        SchemeOrder::FirstOrder => PressureBasis { functions: vec![Poly::constant(1.0)], degree: 0 },
        SchemeOrder::SecondOrder => {
            let mut functions = p1_centered(shape);
            let mut degree = 1;
            if shape == CellShape::Hexahedron {
                // div of Q1^3 + {x^2, y^2, z^2}: adds the bilinear products, not xyz
                let c = |a: usize| Poly::var(a) - 0.5;
                functions.push(c(0) * c(1));
                functions.push(c(0) * c(2));
                functions.push(c(1) * c(2));
                degree = 2;
            }
            PressureBasis { functions, degree }
        }
    }
}

fn lumping_rule(shape: CellShape, order: SchemeOrder) -> (QuadratureRule, ExactnessClass) {
    let third = 1.0 / 3.0;
    match (shape, order) {
        (CellShape::Triangle, SchemeOrder::FirstOrder) => (
            QuadratureRule { points: TRIANGLE_VERTICES.to_vec(), weights: vec![third; 3] },
            ExactnessClass::total_degree(2, 1, "P1"),
        ),
        (CellShape::Quadrilateral, SchemeOrder::FirstOrder) => (
            QuadratureRule { points: QUAD_VERTICES.to_vec(), weights: vec![0.25; 4] },
            ExactnessClass { description: "Q1", monomials: vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]] },
        ),
        (CellShape::Triangle, SchemeOrder::SecondOrder) => {
            let mut points = TRIANGLE_VERTICES.to_vec();
            points.push([third, third, 0.0]);
            let w = 1.0 / 12.0;
            (
                QuadratureRule { points, weights: vec![w, w, w, 0.75] },
                ExactnessClass::total_degree(2, 2, "P2"),
            )
        }
        (CellShape::Quadrilateral, SchemeOrder::SecondOrder) => {
            let mut points = QUAD_VERTICES.to_vec();
            points.push([0.5, 0.5, 0.0]);
            let w = 1.0 / 12.0;
            (
                QuadratureRule { points, weights: vec![w, w, w, w, 2.0 / 3.0] },
                ExactnessClass::total_degree(2, 3, "P3"),
            )
        }
        (CellShape::Tetrahedron, SchemeOrder::SecondOrder) => {
            let mut points = TET_VERTICES.to_vec();
            points.push([0.25; 3]);
            let w = 1.0 / 20.0;
            (
                QuadratureRule { points, weights: vec![w, w, w, w, 0.8] },
                ExactnessClass::total_degree(3, 2, "P2"),
            )
        }
        (CellShape::Hexahedron, SchemeOrder::SecondOrder) => {
            // lexicographic vertex order, then the barycenter
            let mut points = Vec::new();
            for k in 0..2 {
                for j in 0..2 {
                    for i in 0..2 {
                        points.push([i as f64, j as f64, k as f64]);
                    }
                }
            }
            points.push([0.5; 3]);
            let mut weights = vec![1.0 / 24.0; 8];
            weights.push(2.0 / 3.0);
            let mut class = ExactnessClass::total_degree(3, 3, "P3 + span{x^2yz, xy^2z, xyz^3}");
            class.monomials.extend([[2, 1, 1], [1, 2, 1], [1, 1, 3]]);
            (QuadratureRule { points, weights }, class)
        }
        (CellShape::Prism, SchemeOrder::SecondOrder) => {
            let mut points = PRISM_VERTICES.to_vec();
            points.push([third, third, third]);
            points.push([third, third, 2.0 * third]);
            let mut weights = vec![1.0 / 24.0; 6];
            weights.extend([0.375, 0.375]);
            (
                QuadratureRule { points, weights },
                ExactnessClass {
                    description: "span{1, x, y, z, xz, yz}",
                    monomials: vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [0, 1, 1]],
                },
            )
        }
        _ => unreachable!("checked by caller"),
    }
}

fn velocity_functions(shape: CellShape, order: SchemeOrder) -> (Vec<VecPoly>, Option<f64>) {
    match (shape, order) {
        (_, SchemeOrder::FirstOrder) => {
            let (f, cond) = bdm::bdm1(shape);
            (f, Some(cond))
        }
        (CellShape::Triangle, _) => (bases::triangle(), None),
        (CellShape::Quadrilateral, _) => (bases::quadrilateral(), None),
        (CellShape::Tetrahedron, _) => (bases::tetrahedron(), None),
        (CellShape::Hexahedron, _) => (bases::hexahedron(), None),
        (CellShape::Prism, _) => (bases::prism(), None),
    }
}

fn points_equal(a: &Point, b: &Point) -> bool {
    (0..3).all(|k| (a[k] - b[k]).abs() < 1e-14)
}

fn build(shape: CellShape, order: SchemeOrder) -> ReferenceElementDef {
    let dim = shape.dim();
    let (rule, exactness) = lumping_rule(shape, order);
    let (functions, functional_condition) = velocity_functions(shape, order);
    let divergences: Vec<Poly> = functions.iter().map(VecPoly::divergence).collect();
    let verts = shape.reference_vertices();
    let vertex_node: Vec<usize> = verts
        .iter()
        .map(|v| {
            rule.points
                .iter()
                .position(|p| points_equal(p, v))
                .expect("every reference vertex is a quadrature node")
        })
        .collect();

    let node_values: Vec<Vec<Point>> = rule
        .points
        .iter()
        .map(|p| {
            functions
                .iter()
                .map(|f| {
                    let mut v = [0.0; 3];
                    f.eval_into(p, &mut v[..dim]);
                    for c in &mut v {
                        if c.abs() < NODE_ZERO_TOL {
                            *c = 0.0;
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();

    let mut node_of = Vec::with_capacity(functions.len());
    let mut dof_kind = Vec::with_capacity(functions.len());
    let mut flux_scale = Vec::with_capacity(functions.len());
    for i in 0..functions.len() {
        let nodes: Vec<usize> = (0..rule.len())
            .filter(|&n| node_values[n][i].iter().any(|&c| c != 0.0))
            .collect();
        assert_eq!(nodes.len(), 1, "{shape:?}/{order:?}: basis {i} is nonzero at nodes {nodes:?}");
        let node = nodes[0];
        node_of.push(node);
        match vertex_node.iter().position(|&n| n == node) {
            Some(vertex) => {
                let value = node_values[node][i];
                let hits: Vec<(usize, usize, f64)> = shape
                    .facets()
                    .iter()
                    .enumerate()
                    .filter_map(|(f, facet)| {
                        let pos = facet.vertices.iter().position(|&v| v == vertex)?;
                        let pts: Vec<Point> = facet.vertices.iter().map(|&v| verts[v]).collect();
                        let (normal, measure) = facet_normal(facet.shape, &pts);
                        let flux = measure * dot(&normal, &value);
                        (flux.abs() > NODE_ZERO_TOL).then_some((f, pos, flux))
                    })
                    .collect();
                assert_eq!(hits.len(), 1, "{shape:?}/{order:?}: basis {i} has flux on facets {hits:?}");
                let (facet, pos, flux) = hits[0];
                dof_kind.push(DofKind::FacetNode { facet, node: pos });
                flux_scale.push(flux);
            }
            None => {
                dof_kind.push(DofKind::Interior);
                flux_scale.push(1.0);
            }
        }
    }

    let pressure = pressure_basis(shape, order);
    let gauss = cell_gauss(shape, pressure.degree + divergences.iter().map(Poly::degree).max().unwrap_or(0));
    let measure = shape.reference_measure();
    let div_moments = pressure
        .functions
        .iter()
        .map(|q| {
            divergences
                .iter()
                .map(|d| measure * gauss.apply(|p| q.eval(p) * d.eval(p)))
                .collect()
        })
        .collect();

    let exact = cell_gauss(shape, functions.iter().map(VecPoly::degree).max().unwrap_or(0));
    let exact_on_constants = functions.iter().all(|f| {
        (0..dim).all(|a| {
            let lumped = rule.apply(|p| f.comps[a].eval(p));
            let reference = exact.apply(|p| f.comps[a].eval(p));
            (lumped - reference).abs() <= 1e-12 * (1.0 + reference.abs())
        })
    });

    ReferenceElementDef {
        shape,
        order,
        rule,
        exactness,
        velocity: VelocityBasis { functions, divergences, node_of, dof_kind, flux_scale, node_values },
        pressure,
        vertex_node,
        div_moments,
        functional_condition,
        exact_on_constants,
    }
}

fn slot(shape: CellShape, order: SchemeOrder) -> usize {
    let s = CellShape::ALL.iter().position(|&x| x == shape).unwrap();
    2 * s + usize::from(order == SchemeOrder::SecondOrder)
}

/// Returns the (cached, immutable) reference element for a shape and order.
pub fn reference_element(shape: CellShape, order: SchemeOrder) -> Result<&'static ReferenceElementDef> {
    static CACHE: [OnceLock<ReferenceElementDef>; 10] = [const { OnceLock::new() }; 10];
    if order == SchemeOrder::FirstOrder && shape.dim() == 3 {
        return Err(Error::UndefinedCombination { shape, order });
    }
    Ok(CACHE[slot(shape, order)].get_or_init(|| build(shape, order)))
}

pub fn eval_velocity(def: &ReferenceElementDef, i: usize, x: &Point) -> Result<Vec<f64>> {
    def.velocity.evaluate(i, x)
}

pub fn eval_divergence(def: &ReferenceElementDef, i: usize, x: &Point) -> Result<f64> {
    def.velocity.divergence(i, x)
}

/// Relative tolerance for quadrature identities.
pub const EXACTNESS_TOL: f64 = 1e-12;

/// Whether the lumping rule reproduces the mean of `f` over the reference
/// cell to [`EXACTNESS_TOL`] relative accuracy.
pub fn verify_exactness(def: &ReferenceElementDef, f: &Poly) -> bool {
    let exact: f64 = f
        .terms()
        .map(|(e, c)| c * monomial_mean(def.shape, [e[0] as u32, e[1] as u32, e[2] as u32]))
        .sum();
    let quad = def.rule.apply(|p| f.eval(p));
    let scale: f64 = f
        .terms()
        .map(|(e, c)| c.abs() * monomial_mean(def.shape, [e[0] as u32, e[1] as u32, e[2] as u32]))
        .sum();
    (quad - exact).abs() <= EXACTNESS_TOL * exact.abs().max(scale).max(f64::MIN_POSITIVE)
}

/// Basis indices associated with each quadrature node.
pub fn node_blocks(def: &ReferenceElementDef) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); def.rule.len()];
    for i in 0..def.velocity.count() {
        blocks[def.velocity.node_of(i)].push(i);
    }
    blocks
}

/// Monomial `x^a y^b z^c` as a polynomial.
pub fn monomial(e: [u32; 3]) -> Poly {
    let exp: Exponent = [e[0] as u8, e[1] as u8, e[2] as u8];
    Poly::monomial(exp, 1.0)
}

impl fmt::Display for ReferenceElementDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "element {} order {}", self.shape.tag(), self.order.number())?;
        writeln!(f, "quadrature {} points, exact for {}", self.rule.len(), self.exactness.description)?;
        for (n, (p, w)) in self.rule.points.iter().zip(&self.rule.weights).enumerate() {
            writeln!(f, "  r{} = {:?}  w = {w:.12}", n + 1, &p[..self.dim()])?;
        }
        writeln!(f, "velocity basis ({} functions)", self.velocity.count())?;
        for i in 0..self.velocity.count() {
            let kind = match self.velocity.dof_kind(i) {
                DofKind::FacetNode { facet, node } => format!("facet {facet} node {node}"),
                DofKind::Interior => "interior".to_string(),
            };
            let comps: Vec<String> = self.velocity.functions[i].comps.iter().map(|c| c.to_string()).collect();
            writeln!(
                f,
                "  Phi{} @ r{} [{kind}]: ({})  div = {}",
                i + 1,
                self.velocity.node_of(i) + 1,
                comps.join(", "),
                self.velocity.divergences[i]
            )?;
        }
        writeln!(f, "pressure basis ({} functions, degree {})", self.pressure.count(), self.pressure.degree)?;
        for (i, q) in self.pressure.functions.iter().enumerate() {
            writeln!(f, "  q{} = {q}", i + 1)?;
        }
        Ok(())
    }
}
