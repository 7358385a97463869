use std::collections::HashMap;

use crate::error::Result;
use crate::mesh::Mesh;
use crate::refelem::{reference_element, DofKind, ReferenceElementDef, SchemeOrder};

/// Quadrature node shared by the members of a mass-matrix block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClusterKind {
    Vertex(usize),
    /// Interior lumping node `node` of cell `cell`.
    Interior { cell: usize, node: usize },
}

#[derive(Clone, Debug)]
pub struct Cluster {
    pub kind: ClusterKind,
    /// Sorted velocity ids.
    pub members: Vec<usize>,
}

impl Cluster {
    pub fn position(&self, dof: usize) -> Option<usize> {
        self.members.binary_search(&dof).ok()
    }
}

#[derive(Clone, Debug)]
pub struct DofMap {
    pub order: SchemeOrder,
    pub dim: usize,
    pub n_velocity: usize,
    pub n_pressure: usize,
    /// `(facet, global vertex) -> velocity id`.
    pub facet_node_dofs: HashMap<(usize, usize), usize>,
    /// Per cell, local velocity index to global id.
    pub cell_velocity: Vec<Vec<usize>>,
    /// Per cell, `s / sigma` scaling of each local function (one for
    /// interior functions).
    pub cell_scale: Vec<Vec<f64>>,
    pub pressure_offset: Vec<usize>,
    pub pressure_count: Vec<usize>,
    pub clusters: Vec<Cluster>,
    /// Cluster of every velocity id.
    pub cluster_of: Vec<usize>,
    /// Per cell, cluster of every lumping node.
    pub node_cluster: Vec<Vec<usize>>,
}

impl DofMap {
    pub fn def(&self, mesh: &Mesh, cell: usize) -> &'static ReferenceElementDef {
        reference_element(mesh.cells[cell].shape, self.order).expect("validated in build_dofmap")
    }

    pub fn pressure_range(&self, cell: usize) -> std::ops::Range<usize> {
        self.pressure_offset[cell]..self.pressure_offset[cell] + self.pressure_count[cell]
    }

    pub fn total(&self) -> usize {
        self.n_velocity + self.n_pressure
    }
}

/// Numbers the velocity and pressure unknowns and groups velocity ids by
/// lumping node.
pub fn build_dofmap(mesh: &Mesh, order: SchemeOrder) -> Result<DofMap> {
    let mut defs = Vec::with_capacity(mesh.num_cells());
    for cell in &mesh.cells {
        defs.push(reference_element(cell.shape, order)?);
    }

    let mut facet_node_dofs = HashMap::new();
    let mut cell_velocity = Vec::with_capacity(mesh.num_cells());
    let mut cell_scale = Vec::with_capacity(mesh.num_cells());
    let mut n_velocity = 0;
    let mut vertex_members: Vec<Vec<usize>> = vec![Vec::new(); mesh.num_vertices()];
    let mut interior: Vec<Cluster> = Vec::new();
    let mut interior_cluster: Vec<HashMap<usize, usize>> = Vec::with_capacity(mesh.num_cells());

    for (c, cell) in mesh.cells.iter().enumerate() {
        let def = defs[c];
        let facets = cell.shape.facets();
        let mut ids = Vec::with_capacity(def.velocity.count());
        let mut scale = Vec::with_capacity(def.velocity.count());
        let mut local_interior: HashMap<usize, usize> = HashMap::new();
        for i in 0..def.velocity.count() {
            match def.velocity.dof_kind(i) {
                DofKind::FacetNode { facet, node } => {
                    let cf = mesh.cell_facets[c][facet];
                    let vertex = cell.vertices[facets[facet].vertices[node]];
                    let id = *facet_node_dofs.entry((cf.facet, vertex)).or_insert_with(|| {
                        vertex_members[vertex].push(n_velocity);
                        n_velocity += 1;
                        n_velocity - 1
                    });
                    ids.push(id);
                    scale.push(cf.sign / def.velocity.flux_scale(i));
                }
                DofKind::Interior => {
                    let node = def.velocity.node_of(i);
                    let k = *local_interior.entry(node).or_insert_with(|| {
                        interior.push(Cluster { kind: ClusterKind::Interior { cell: c, node }, members: Vec::new() });
                        interior.len() - 1
                    });
                    interior[k].members.push(n_velocity);
                    ids.push(n_velocity);
                    scale.push(1.0);
                    n_velocity += 1;
                }
            }
        }
        cell_velocity.push(ids);
        cell_scale.push(scale);
        interior_cluster.push(local_interior);
    }

    let mut clusters: Vec<Cluster> = Vec::new();
    let mut vertex_cluster = vec![usize::MAX; mesh.num_vertices()];
    for (v, members) in vertex_members.into_iter().enumerate() {
        if !members.is_empty() {
            vertex_cluster[v] = clusters.len();
            clusters.push(Cluster { kind: ClusterKind::Vertex(v), members });
        }
    }
    let offset = clusters.len();
    clusters.extend(interior);
    let mut cluster_of = vec![usize::MAX; n_velocity];
    for (k, cl) in clusters.iter_mut().enumerate() {
        cl.members.sort_unstable();
        for &m in &cl.members {
            cluster_of[m] = k;
        }
    }

    let mut node_cluster = Vec::with_capacity(mesh.num_cells());
    for (c, cell) in mesh.cells.iter().enumerate() {
        let def = defs[c];
        let mut nodes = vec![usize::MAX; def.rule.len()];
        for (lv, &n) in def.vertex_node.iter().enumerate() {
            nodes[n] = vertex_cluster[cell.vertices[lv]];
        }
        for (&n, &k) in &interior_cluster[c] {
            nodes[n] = offset + k;
        }
        node_cluster.push(nodes);
    }

    let pressure_count: Vec<usize> = defs.iter().map(|d| d.pressure.count()).collect();
    let mut pressure_offset = Vec::with_capacity(defs.len());
    let mut n_pressure = 0;
    for &k in &pressure_count {
        pressure_offset.push(n_pressure);
        n_pressure += k;
    }

    Ok(DofMap {
        order,
        dim: mesh.dim,
        n_velocity,
        n_pressure,
        facet_node_dofs,
        cell_velocity,
        cell_scale,
        pressure_offset,
        pressure_count,
        clusters,
        cluster_of,
        node_cluster,
    })
}
