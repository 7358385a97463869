//! Global numbering and assembly of the lumped velocity mass matrix, the
//! divergence matrix and the right-hand sides of
//!
//! ```text
//! M u - B^T p = g,    B u = f.
//! ```
//!
//! `M` is block diagonal over quadrature-node clusters. The boundary term is
//! `g_j = -<p_D, n.phi_j>`, which is the sign that makes `u = -K grad p`.

mod dofmap;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::quadrature::{cell_gauss, Point};

pub use dofmap::{build_dofmap, Cluster, ClusterKind, DofMap};

/// Degree of the Gauss rules used for the source and boundary data.
pub const DATA_QUAD_DEGREE: usize = 6;
/// Velocity count above which the dense oracles refuse to run.
pub const DENSE_LIMIT: usize = 2000;

pub type ScalarField = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type TensorField = Arc<dyn Fn(&Point) -> Matrix3<f64> + Send + Sync>;

/// Coefficients and data of the Darcy problem.
#[derive(Clone)]
pub struct ProblemData {
    pub dim: usize,
    /// Conductivity; only the leading `dim x dim` block is used.
    pub conductivity: TensorField,
    pub source: ScalarField,
    pub boundary_pressure: ScalarField,
    /// Declared eigenvalue bounds of `K`, spot-checked at quadrature points.
    pub bounds: Option<(f64, f64)>,
}

impl std::fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemData").field("dim", &self.dim).field("bounds", &self.bounds).finish()
    }
}

impl ProblemData {
    pub fn new(
        dim: usize,
        conductivity: impl Fn(&Point) -> Matrix3<f64> + Send + Sync + 'static,
        source: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        boundary_pressure: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            conductivity: Arc::new(conductivity),
            source: Arc::new(source),
            boundary_pressure: Arc::new(boundary_pressure),
            bounds: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, |_| Matrix3::identity(), |_| 0.0, |_| 0.0)
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bounds = Some((lo, hi));
        self
    }

    pub fn with_conductivity(mut self, k: impl Fn(&Point) -> Matrix3<f64> + Send + Sync + 'static) -> Self {
        self.conductivity = Arc::new(k);
        self
    }

    pub fn with_source(mut self, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Arc::new(f);
        self
    }

    pub fn with_boundary_pressure(mut self, g: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.boundary_pressure = Arc::new(g);
        self
    }

    /// `K(x)^{-1}`, zero padded to 3x3 in 2D.
    pub fn inverse_conductivity(&self, x: &Point) -> Result<Matrix3<f64>> {
        let k = (self.conductivity)(x);
        let d = self.dim;
        let kd = k.view((0, 0), (d, d)).into_owned();
        let scale = kd.amax();
        if !kd.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConductivity { point: *x, reason: "non-finite entry".into() });
        }
        if (kd.clone() - kd.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidConductivity { point: *x, reason: "not symmetric".into() });
        }
        let eig = kd.clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if !(hi > 0.0) || lo <= 1e-14 * hi {
            if lo.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::SingularConductivity { point: *x });
            }
            return Err(Error::InvalidConductivity { point: *x, reason: format!("eigenvalue {lo:e} not positive") });
        }
        if let Some((kl, kh)) = self.bounds {
            let slack = 1e-12 * kh.abs();
            if lo < kl - slack || hi > kh + slack {
                return Err(Error::InvalidConductivity {
                    point: *x,
                    reason: format!("eigenvalues [{lo:e}, {hi:e}] outside declared [{kl:e}, {kh:e}]"),
                });
            }
        }
        let inv = kd.try_inverse().ok_or(Error::SingularConductivity { point: *x })?;
        let mut out = Matrix3::zeros();
        out.view_mut((0, 0), (d, d)).copy_from(&inv);
        Ok(out)
    }
}

/// Physical value of local velocity function `i` of `cell` at reference
/// point `xh`, including the DOF scaling.
pub fn physical_velocity(mesh: &Mesh, dofs: &DofMap, cell: usize, i: usize, vh: &Point) -> Point {
    let v = mesh.maps[cell].piola(vh);
    let s = dofs.cell_scale[cell][i];
    [s * v[0], s * v[1], s * v[2]]
}

#[derive(Clone, Debug)]
pub struct MassBlock {
    pub cluster: usize,
    pub members: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// Block diagonal lumped velocity mass matrix, one block per cluster.
#[derive(Clone, Debug)]
pub struct LumpedMassMatrix {
    pub size: usize,
    pub blocks: Vec<MassBlock>,
}

impl LumpedMassMatrix {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for b in &self.blocks {
            for (a, &i) in b.members.iter().enumerate() {
                for (c, &j) in b.members.iter().enumerate() {
                    m[(i, j)] = b.matrix[(a, c)];
                }
            }
        }
        m
    }

    pub fn to_csr(&self) -> CsrMatrix<f64> {
        let mut coo = CooMatrix::new(self.size, self.size);
        for b in &self.blocks {
            for (a, &i) in b.members.iter().enumerate() {
                for (c, &j) in b.members.iter().enumerate() {
                    coo.push(i, j, b.matrix[(a, c)]);
                }
            }
        }
        CsrMatrix::from(&coo)
    }

    pub fn mul(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.size);
        for b in &self.blocks {
            for (a, &i) in b.members.iter().enumerate() {
                y[i] += b.members.iter().enumerate().map(|(c, &j)| b.matrix[(a, c)] * x[j]).sum::<f64>();
            }
        }
        y
    }
}

/// Lumped mass `sum_T |T| sum_n w_n K^{-1}(x_n) phi_i(x_n) . phi_j(x_n)`,
/// accumulated only over the functions associated with each node.
pub fn assemble_lumped_mass(mesh: &Mesh, dofs: &DofMap, data: &ProblemData) -> Result<LumpedMassMatrix> {
    let mut blocks: Vec<MassBlock> = dofs
        .clusters
        .iter()
        .enumerate()
        .map(|(k, c)| MassBlock { cluster: k, members: c.members.clone(), matrix: DMatrix::zeros(c.members.len(), c.members.len()) })
        .collect();
    for cell in 0..mesh.num_cells() {
        let def = dofs.def(mesh, cell);
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let mut local: Vec<Vec<usize>> = vec![Vec::new(); def.rule.len()];
        for i in 0..def.velocity.count() {
            local[def.velocity.node_of(i)].push(i);
        }
        for (n, (xh, w)) in def.rule.points.iter().zip(&def.rule.weights).enumerate() {
            if local[n].is_empty() {
                continue;
            }
            let kinv = data.inverse_conductivity(&map.apply(xh))?;
            let block = &mut blocks[dofs.node_cluster[cell][n]];
            let values: Vec<(usize, nalgebra::Vector3<f64>)> = local[n]
                .iter()
                .map(|&i| {
                    let v = physical_velocity(mesh, dofs, cell, i, def.velocity.value_at_node(n, i));
                    let pos = block.members.binary_search(&dofs.cell_velocity[cell][i]).expect("dof in its node cluster");
                    (pos, nalgebra::Vector3::from(v))
                })
                .collect();
            for (a, va) in &values {
                let kva = kinv * va;
                for (b, vb) in &values {
                    block.matrix[(*a, *b)] += measure * w * kva.dot(vb);
                }
            }
        }
    }
    for b in &mut blocks {
        // symmetric up to roundoff of K^{-1}; make it exact
        let t = b.matrix.transpose();
        b.matrix = (&b.matrix + t) * 0.5;
    }
    Ok(LumpedMassMatrix { size: dofs.n_velocity, blocks })
}

/// Dense lumped mass accumulated over every function pair at every node,
/// with no use of the cluster structure (test oracle).
pub fn assemble_lumped_mass_dense(mesh: &Mesh, dofs: &DofMap, data: &ProblemData) -> Result<DMatrix<f64>> {
    if dofs.n_velocity >= DENSE_LIMIT {
        return Err(Error::Incompatible(format!("dense mass needs fewer than {DENSE_LIMIT} velocity unknowns")));
    }
    let mut m = DMatrix::zeros(dofs.n_velocity, dofs.n_velocity);
    for cell in 0..mesh.num_cells() {
        let def = dofs.def(mesh, cell);
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let nloc = def.velocity.count();
        for (n, (xh, w)) in def.rule.points.iter().zip(&def.rule.weights).enumerate() {
            let kinv = data.inverse_conductivity(&map.apply(xh))?;
            let vals: Vec<nalgebra::Vector3<f64>> = (0..nloc)
                .map(|i| nalgebra::Vector3::from(physical_velocity(mesh, dofs, cell, i, def.velocity.value_at_node(n, i))))
                .collect();
            for a in 0..nloc {
                for b in 0..nloc {
                    let (ga, gb) = (dofs.cell_velocity[cell][a], dofs.cell_velocity[cell][b]);
                    m[(ga, gb)] += measure * w * (kinv * vals[a]).dot(&vals[b]);
                }
            }
        }
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Exactly integrated velocity mass matrix (Gauss rule of high degree).
pub fn assemble_exact_mass(mesh: &Mesh, dofs: &DofMap, data: &ProblemData) -> Result<CsrMatrix<f64>> {
    let mut coo = CooMatrix::new(dofs.n_velocity, dofs.n_velocity);
    let mut vals = Vec::new();
    for cell in 0..mesh.num_cells() {
        let def = dofs.def(mesh, cell);
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let nloc = def.velocity.count();
        let degree = (0..nloc).map(|i| def.velocity.function(i).map(|f| f.degree()).unwrap_or(0)).max().unwrap_or(0);
        let rule = cell_gauss(def.shape, 2 * degree + 2);
        let mut local = DMatrix::<f64>::zeros(nloc, nloc);
        let mut ref_vals = vec![[0.0; 3]; nloc];
        for (xh, w) in rule.points.iter().zip(&rule.weights) {
            let kinv = data.inverse_conductivity(&map.apply(xh))?;
            def.velocity.eval_all(xh, &mut ref_vals);
            vals.clear();
            vals.extend((0..nloc).map(|i| nalgebra::Vector3::from(physical_velocity(mesh, dofs, cell, i, &ref_vals[i]))));
            for a in 0..nloc {
                let ka = kinv * vals[a];
                for b in 0..nloc {
                    local[(a, b)] += measure * w * ka.dot(&vals[b]);
                }
            }
        }
        for a in 0..nloc {
            for b in 0..nloc {
                coo.push(dofs.cell_velocity[cell][a], dofs.cell_velocity[cell][b], 0.5 * (local[(a, b)] + local[(b, a)]));
            }
        }
    }
    Ok(CsrMatrix::from(&coo))
}

/// `B[i, j] = int_T div(phi_j) q_i`. With the Piola scaling the local
/// block is the reference divergence moment matrix times the DOF scaling.
pub fn assemble_div(mesh: &Mesh, dofs: &DofMap) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(dofs.n_pressure, dofs.n_velocity);
    for cell in 0..mesh.num_cells() {
        let def = dofs.def(mesh, cell);
        let p0 = dofs.pressure_offset[cell];
        for (q, row) in def.div_moments.iter().enumerate() {
            for (i, &m) in row.iter().enumerate() {
                if m != 0.0 {
                    coo.push(p0 + q, dofs.cell_velocity[cell][i], m * dofs.cell_scale[cell][i]);
                }
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// Returns `(g_vec, f_vec)`.
pub fn assemble_rhs(mesh: &Mesh, dofs: &DofMap, data: &ProblemData) -> (DVector<f64>, DVector<f64>) {
    let mut g = DVector::zeros(dofs.n_velocity);
    let mut f = DVector::zeros(dofs.n_pressure);
    let mut qv = Vec::new();
    for cell in 0..mesh.num_cells() {
        let def = dofs.def(mesh, cell);
        let map = &mesh.maps[cell];
        let measure = mesh.cell_measure(cell);
        let rule = cell_gauss(def.shape, DATA_QUAD_DEGREE);
        qv.resize(def.pressure.count(), 0.0);
        let p0 = dofs.pressure_offset[cell];
        for (xh, w) in rule.points.iter().zip(&rule.weights) {
            let fx = (data.source)(&map.apply(xh));
            def.pressure.eval_all(xh, &mut qv);
            for (k, q) in qv.iter().enumerate() {
                f[p0 + k] += measure * w * fx * q;
            }
        }
    }
    for fac in mesh.boundary_facets() {
        let facet = &mesh.facets[fac];
        let pts = mesh.facet_vertex_coords(fac);
        let def = dofs.def(mesh, facet.cells[0]);
        // Without interior DOFs, a lumping rule that misses constants times V^
        // leaves the zero-mean part of the normal trace invisible to constant
        // velocities; pairing it with the data would break exactness for
        // linear pressures, so only the mean flux is kept (centroid rule).
        let rule = if def.exact_on_constants || !def.interior_nodes().is_empty() {
            facet.shape.gauss(DATA_QUAD_DEGREE)
        } else {
            vec![(facet.shape.centroid_params(), 1.0)]
        };
        for (k, &v) in facet.vertices.iter().enumerate() {
            let dof = dofs.facet_node_dofs[&(fac, v)];
            // n.phi = hat_k / |F| on this facet
            let integral: f64 = rule
                .iter()
                .map(|(st, w)| {
                    let x = crate::geometry::facet_point(facet.shape, &pts, st[0], st[1]);
                    w * (data.boundary_pressure)(&x) * facet.shape.hat_functions(st[0], st[1])[k]
                })
                .sum();
            g[dof] -= integral;
        }
    }
    (g, f)
}

#[cfg(test)]
mod tests;
