use nalgebra::Matrix3;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::*;
use crate::assembly::{assemble_div, assemble_lumped_mass, assemble_rhs, build_dofmap, MassBlock, ProblemData};
use crate::mesh::{build_mesh, generate, Cell, Family, Mesh};
use crate::refelem::{CellShape, SchemeOrder};

fn csr(m: &DMatrix<f64>) -> CsrMatrix<f64> {
    CsrMatrix::from(m)
}

fn rel(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[test]
fn one_by_one() {
    let a = csr(&DMatrix::from_element(1, 1, 2.0));
    let (x, stats) = conjugate_gradient(&a, &DVector::from_element(1, 4.0), 1e-12).unwrap();
    assert!((x[0] - 2.0).abs() < 1e-15);
    assert!(stats.iterations <= 1);
}

#[test]
fn random_spd_matches_cholesky() {
    let mut rng = StdRng::seed_from_u64(7);
    let n = 50;
    let r = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let a = &r * r.transpose() + DMatrix::identity(n, n) * n as f64 * 0.1;
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let direct = a.clone().cholesky().unwrap().solve(&b);
    let (x, stats) = conjugate_gradient(&csr(&a), &b, 1e-12).unwrap();
    assert!(stats.residual <= 1e-12);
    assert!(rel(&x, &direct) < 1e-9);
}

#[test]
fn indefinite_matrix_fails() {
    let a = DMatrix::from_row_slice(2, 2, &[1.0, 3.0, 3.0, 1.0]);
    let r = conjugate_gradient(&csr(&a), &DVector::from_vec(vec![1.0, 0.0]), 1e-12);
    assert!(matches!(r, Err(Error::NoConvergence { .. })));
}

#[test]
fn non_spd_block_is_reported() {
    let mass = LumpedMassMatrix {
        size: 1,
        blocks: vec![MassBlock { cluster: 0, members: vec![0], matrix: DMatrix::from_element(1, 1, -1.0) }],
    };
    let b = csr(&DMatrix::from_element(1, 1, 1.0));
    let r = reduce(&mass, &b, &DVector::zeros(1), &DVector::zeros(1));
    assert!(matches!(r, Err(Error::NonSpdBlock { cluster: 0 })));
}

struct Fixture {
    mass: LumpedMassMatrix,
    div: CsrMatrix<f64>,
    g: DVector<f64>,
    f: DVector<f64>,
}

fn fixture(mesh: &Mesh, order: SchemeOrder, data: &ProblemData) -> Fixture {
    let dofs = build_dofmap(mesh, order).unwrap();
    let mass = assemble_lumped_mass(mesh, &dofs, data).unwrap();
    let div = assemble_div(mesh, &dofs);
    let (g, f) = assemble_rhs(mesh, &dofs, data);
    Fixture { mass, div, g, f }
}

fn varied_data(dim: usize) -> ProblemData {
    ProblemData::identity(dim)
        .with_conductivity(|x| {
            let mut k = Matrix3::identity() * (2.0 + x[0] * x[1]);
            k[(0, 1)] = 0.4 * x[2] + 0.2;
            k[(1, 0)] = 0.4 * x[2] + 0.2;
            k
        })
        .with_source(|x| (3.0 * x[0]).sin() + x[1] * x[2])
        .with_boundary_pressure(|x| x[0] * x[0] - x[1] + 0.5 * x[2])
}

#[test]
fn single_triangle_schur_matches_dense() {
    let shape = CellShape::Triangle;
    let mesh = build_mesh(2, shape.reference_vertices().to_vec(), vec![Cell { shape, vertices: vec![0, 1, 2] }]).unwrap();
    let fx = fixture(&mesh, SchemeOrder::SecondOrder, &ProblemData::identity(2));
    let s = reduce(&fx.mass, &fx.div, &fx.g, &fx.f).unwrap();
    let m = fx.mass.to_dense();
    let b = DMatrix::from(&fx.div);
    let dense = &b * m.try_inverse().unwrap() * b.transpose();
    let sd = DMatrix::from(&s.matrix);
    assert_eq!(sd.shape(), (3, 3));
    assert!((&sd - &dense).amax() < 1e-12 * dense.amax());
    assert_eq!(sd, sd.transpose());
    assert!(sd.cholesky().is_some());
}

#[test]
fn two_triangle_fill_pattern() {
    let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
    let cells = vec![
        Cell { shape: CellShape::Triangle, vertices: vec![0, 1, 2] },
        Cell { shape: CellShape::Triangle, vertices: vec![0, 2, 3] },
    ];
    let mesh = build_mesh(2, v, cells).unwrap();
    let fx = fixture(&mesh, SchemeOrder::SecondOrder, &ProblemData::identity(2));
    let s = reduce(&fx.mass, &fx.div, &fx.g, &fx.f).unwrap();
    let b = DMatrix::from(&fx.div);
    let dense = &b * fx.mass.to_dense().try_inverse().unwrap() * b.transpose();
    let sd = DMatrix::from(&s.matrix);
    assert!((&sd - &dense).amax() < 1e-12 * dense.amax());
    // the cells share vertices, so the off-diagonal cell block is coupled
    assert!(sd.view((0, 3), (3, 3)).amax() > 1e-3);
}

#[test]
fn zero_data_gives_zero_solution() {
    let mesh = generate(Family::HybridSquare, 0).unwrap();
    let fx = fixture(&mesh, SchemeOrder::SecondOrder, &ProblemData::identity(2));
    let s = reduce(&fx.mass, &fx.div, &fx.g, &fx.f).unwrap();
    assert_eq!(s.rhs.amax(), 0.0);
    let sol = solve_mixed(&fx.mass, &fx.div, &fx.g, &fx.f, DEFAULT_TOL).unwrap();
    assert_eq!(sol.p.amax(), 0.0);
    assert_eq!(sol.u.amax(), 0.0);
    let dense = solve_saddle_dense(&fx.mass.to_dense(), &DMatrix::from(&fx.div), &fx.g, &fx.f).unwrap();
    assert_eq!(dense.p.amax(), 0.0);
}

#[test]
fn reduced_path_matches_dense_oracle() {
    for family in Family::ALL {
        let mesh = generate(family, 0).unwrap();
        for order in [SchemeOrder::FirstOrder, SchemeOrder::SecondOrder] {
            if family.dim() == 3 && order == SchemeOrder::FirstOrder {
                continue;
            }
            let fx = fixture(&mesh, order, &varied_data(mesh.dim));
            let sol = solve_mixed(&fx.mass, &fx.div, &fx.g, &fx.f, 1e-14).unwrap();
            let dense = solve_saddle_dense(&fx.mass.to_dense(), &DMatrix::from(&fx.div), &fx.g, &fx.f).unwrap();
            assert!(rel(&sol.p, &dense.p) < 1e-10, "{family} {order:?}");
            assert!(rel(&sol.u, &dense.u) < 1e-10, "{family} {order:?}");
            // velocity equation residual
            let b = DMatrix::from(&fx.div);
            let r = fx.mass.mul(&sol.u) - b.transpose() * &sol.p - &fx.g;
            assert!(r.norm() <= 1e-12 * fx.g.norm().max(1.0));
        }
    }
}

#[test]
fn constant_pressure_patch() {
    for family in Family::ALL {
        let mesh = generate(family, 1).unwrap();
        let data = varied_data(mesh.dim).with_source(|_| 0.0).with_boundary_pressure(|_| 1.0);
        let dofs = build_dofmap(&mesh, SchemeOrder::SecondOrder).unwrap();
        let fx = fixture(&mesh, SchemeOrder::SecondOrder, &data);
        let sol = solve_mixed(&fx.mass, &fx.div, &fx.g, &fx.f, 1e-14).unwrap();
        for c in 0..mesh.num_cells() {
            let r = dofs.pressure_range(c);
            assert!((sol.p[r.start] - 1.0).abs() < 1e-10, "{family}");
            for k in r.start + 1..r.end {
                assert!(sol.p[k].abs() < 1e-10);
            }
        }
        assert!(sol.u.amax() < 1e-10, "{family} {}", sol.u.amax());
    }
}
