use super::*;
use crate::mesh::{build_mesh, generate, Cell, Family};
use crate::refelem::{CellShape, SchemeOrder};

fn reference_mesh(shape: CellShape) -> Mesh {
    let v = shape.reference_vertices().to_vec();
    build_mesh(shape.dim(), v, vec![Cell { shape, vertices: (0..shape.vertex_count()).collect() }]).unwrap()
}

fn two_triangles() -> Mesh {
    let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
    let cells = vec![
        Cell { shape: CellShape::Triangle, vertices: vec![0, 1, 2] },
        Cell { shape: CellShape::Triangle, vertices: vec![0, 2, 3] },
    ];
    build_mesh(2, v, cells).unwrap()
}

fn cluster_sizes(d: &DofMap) -> (Vec<usize>, Vec<usize>) {
    let mut vert = Vec::new();
    let mut int = Vec::new();
    for c in &d.clusters {
        match c.kind {
            ClusterKind::Vertex(_) => vert.push(c.members.len()),
            ClusterKind::Interior { .. } => int.push(c.members.len()),
        }
    }
    (vert, int)
}

#[test]
fn single_triangle_counts() {
    let m = reference_mesh(CellShape::Triangle);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    assert_eq!((d.n_velocity, d.n_pressure), (8, 3));
    assert_eq!(cluster_sizes(&d), (vec![2, 2, 2], vec![2]));
}

#[test]
fn two_triangles_share_edge_dofs() {
    let m = two_triangles();
    assert_eq!(m.facets.len(), 5);
    assert_eq!(m.facets.iter().filter(|f| !f.is_boundary()).count(), 1);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    assert_eq!(d.n_velocity, 14);
    for c in &d.clusters {
        if let ClusterKind::Vertex(v) = c.kind {
            let expected = if v == 0 || v == 2 { 3 } else { 2 };
            assert_eq!(c.members.len(), expected, "vertex {v}");
        }
    }
}

#[test]
fn single_hexahedron_counts() {
    let m = reference_mesh(CellShape::Hexahedron);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    assert_eq!((d.n_velocity, d.n_pressure), (27, 7));
    let m = reference_mesh(CellShape::Prism);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    assert_eq!(cluster_sizes(&d).1, vec![3, 3]);
}

#[test]
fn every_dof_in_exactly_one_cluster() {
    for family in Family::ALL {
        let m = generate(family, 1).unwrap();
        for order in [SchemeOrder::FirstOrder, SchemeOrder::SecondOrder] {
            let Ok(d) = build_dofmap(&m, order) else {
                assert!(family.dim() == 3 && order == SchemeOrder::FirstOrder);
                continue;
            };
            let mut seen = vec![0; d.n_velocity];
            for c in &d.clusters {
                for &j in &c.members {
                    seen[j] += 1;
                }
                if let ClusterKind::Interior { .. } = c.kind {
                    assert_eq!(c.members.len(), m.dim);
                }
            }
            assert!(seen.iter().all(|&s| s == 1), "{family}");
            let expected: usize = m.cells.iter().map(|c| crate::refelem::reference_element(c.shape, order).unwrap().pressure.count()).sum();
            assert_eq!(d.n_pressure, expected);
        }
    }
}

#[test]
fn reference_triangle_interior_block() {
    let m = reference_mesh(CellShape::Triangle);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let mass = assemble_lumped_mass(&m, &d, &ProblemData::identity(2)).unwrap();
    let block = mass.blocks.iter().find(|b| matches!(d.clusters[b.cluster].kind, ClusterKind::Interior { .. })).unwrap();
    let expect = [[5.0, -4.0], [-4.0, 5.0]];
    for a in 0..2 {
        for b in 0..2 {
            assert!((block.matrix[(a, b)] - 3.0 / 8.0 * expect[a][b] / 81.0).abs() < 1e-15);
        }
    }
    // brute force over the rule with all functions
    let dense = assemble_lumped_mass_dense(&m, &d, &ProblemData::identity(2)).unwrap();
    let (i, j) = (block.members[0], block.members[1]);
    assert!((dense[(i, j)] + 3.0 / 8.0 * 4.0 / 81.0).abs() < 1e-15);
}

#[test]
fn lumped_mass_is_clustered_symmetric_and_matches_dense() {
    for family in Family::ALL {
        let m = generate(family, 0).unwrap();
        let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
        let data = ProblemData::identity(m.dim).with_conductivity(|x| {
            let mut k = Matrix3::identity() * (2.0 + x[0]);
            k[(0, 1)] = 0.3;
            k[(1, 0)] = 0.3;
            k
        });
        let mass = assemble_lumped_mass(&m, &d, &data).unwrap();
        let clustered = mass.to_dense();
        let dense = assemble_lumped_mass_dense(&m, &d, &data).unwrap();
        assert_eq!(clustered, dense, "{family}");
        assert_eq!(clustered, clustered.transpose());
        for i in 0..d.n_velocity {
            for j in 0..d.n_velocity {
                if d.cluster_of[i] != d.cluster_of[j] {
                    assert_eq!(dense[(i, j)], 0.0);
                }
            }
        }
        for b in &mass.blocks {
            assert!(b.matrix.clone().cholesky().is_some());
        }
    }
}

#[test]
fn mass_scales_inversely_with_conductivity() {
    let m = reference_mesh(CellShape::Quadrilateral);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let m1 = assemble_lumped_mass(&m, &d, &ProblemData::identity(2)).unwrap().to_dense();
    let data = ProblemData::identity(2).with_conductivity(|_| Matrix3::identity() * 2.0);
    let m2 = assemble_lumped_mass(&m, &d, &data).unwrap().to_dense();
    assert!((m1 * 0.5 - m2).amax() < 1e-15);
}

#[test]
fn divergence_rows_telescope() {
    let m = two_triangles();
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let b = assemble_div(&m, &d);
    let dense = DMatrix::from(&b);
    // sum of constant rows = net boundary flux functional
    let mut sum = DVector::zeros(d.n_velocity);
    for c in 0..m.num_cells() {
        sum += dense.row(d.pressure_offset[c]).transpose();
    }
    let interior_facet = m.facets.iter().position(|f| !f.is_boundary()).unwrap();
    for &v in &m.facets[interior_facet].vertices {
        let j = d.facet_node_dofs[&(interior_facet, v)];
        assert!(sum[j].abs() < 1e-14);
        // each side carries the flux with opposite sign
        assert!((dense[(0, j)] + dense[(3, j)]).abs() < 1e-14 && dense[(0, j)].abs() > 0.1);
    }
    // locality: cell rows only touch the cell's velocity columns
    for c in 0..m.num_cells() {
        for r in d.pressure_range(c) {
            let row = b.row(r);
            assert!(row.col_indices().iter().all(|j| d.cell_velocity[c].contains(j)));
        }
    }
}

#[test]
fn interior_function_has_zero_mean_divergence() {
    let m = reference_mesh(CellShape::Triangle);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let b = DMatrix::from(&assemble_div(&m, &d));
    let interior = d.clusters.iter().find(|c| matches!(c.kind, ClusterKind::Interior { .. })).unwrap();
    for &j in &interior.members {
        assert!(b[(0, j)].abs() < 1e-15);
    }
}

#[test]
fn rhs_examples() {
    let m = reference_mesh(CellShape::Triangle);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let (g, f) = assemble_rhs(&m, &d, &ProblemData::identity(2));
    assert_eq!(g.amax(), 0.0);
    assert_eq!(f.amax(), 0.0);
    let data = ProblemData::identity(2).with_source(|_| 1.0);
    let (_, f) = assemble_rhs(&m, &d, &data);
    assert!((f[0] - 0.5).abs() < 1e-15);
    assert!(f[1].abs() < 1e-15 && f[2].abs() < 1e-15);
    // constant boundary pressure: -int hat = -|F|/2 / |F| per endpoint
    let data = ProblemData::identity(2).with_boundary_pressure(|_| 1.0);
    let (g, _) = assemble_rhs(&m, &d, &data);
    for (&(_, _), &j) in &d.facet_node_dofs {
        assert!((g[j] + 0.5).abs() < 1e-14);
    }
}

#[test]
fn conductivity_validation() {
    let data = ProblemData::identity(2).with_conductivity(|_| Matrix3::zeros());
    assert!(matches!(data.inverse_conductivity(&[0.0; 3]), Err(Error::SingularConductivity { .. })));
    let data = ProblemData::identity(2).with_conductivity(|_| -Matrix3::identity());
    assert!(matches!(data.inverse_conductivity(&[0.0; 3]), Err(Error::InvalidConductivity { .. })));
    let data = ProblemData::identity(2).with_conductivity(|_| {
        let mut k = Matrix3::identity();
        k[(0, 1)] = 0.5;
        k
    });
    assert!(matches!(data.inverse_conductivity(&[0.0; 3]), Err(Error::InvalidConductivity { .. })));
    let data = ProblemData::identity(3).with_conductivity(|_| Matrix3::identity() * 3.0).with_bounds(0.5, 2.0);
    assert!(matches!(data.inverse_conductivity(&[0.0; 3]), Err(Error::InvalidConductivity { .. })));
    let data = ProblemData::identity(3).with_conductivity(|_| Matrix3::identity() * 2.0).with_bounds(0.5, 2.0);
    let inv = data.inverse_conductivity(&[0.0; 3]).unwrap();
    assert!((inv - Matrix3::identity() * 0.5).amax() < 1e-15);

    let m = reference_mesh(CellShape::Triangle);
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let data = ProblemData::identity(2).with_conductivity(|_| Matrix3::zeros());
    assert!(matches!(assemble_lumped_mass(&m, &d, &data), Err(Error::SingularConductivity { .. })));
}

#[test]
fn exact_mass_is_close_to_lumped_on_constants() {
    // lumped product is exact for products of P1 data, so a constant
    // field interpolant gives the same energy
    let m = generate(Family::HybridSquare, 0).unwrap();
    let d = build_dofmap(&m, SchemeOrder::SecondOrder).unwrap();
    let data = ProblemData::identity(2);
    let exact = DMatrix::from(&assemble_exact_mass(&m, &d, &data).unwrap());
    let lumped = assemble_lumped_mass(&m, &d, &data).unwrap().to_dense();
    assert!((&exact - exact.transpose()).amax() < 1e-14);
    assert!(exact.clone().cholesky().is_some());
    let ratio = (exact.trace() / lumped.trace()).ln().abs();
    assert!(ratio < 1.0);
}
