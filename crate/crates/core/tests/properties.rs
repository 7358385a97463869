//! Pipeline invariants on random data.

use mfmfe::assembly::{assemble_div, assemble_lumped_mass, assemble_rhs, build_dofmap, ProblemData};
use mfmfe::mesh::{generate, Family};
use mfmfe::postprocess::{eval_divergence, project_pressure};
use mfmfe::reduce_solve::solve_mixed;
use mfmfe::refelem::SchemeOrder;
use nalgebra::Matrix3;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![Just(Family::TriSquare), Just(Family::QuadSquare), Just(Family::HybridSquare)]
}

fn order() -> impl Strategy<Value = SchemeOrder> {
    prop_oneof![Just(SchemeOrder::FirstOrder), Just(SchemeOrder::SecondOrder)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `div u_h` is the `L2` projection of `f` onto the pressure space.
    #[test]
    fn divergence_is_projected_source(family in family(), order in order(), c in prop::array::uniform6(-2.0f64..2.0), k in 0.5f64..3.0) {
        let mesh = generate(family, 1).unwrap();
        let dofs = build_dofmap(&mesh, order).unwrap();
        let f = move |x: &[f64; 3]| c[0] + c[1] * x[0] + c[2] * x[1] + c[3] * x[0] * x[1] + c[4] * x[0] * x[0];
        let data = ProblemData::identity(2)
            .with_conductivity(move |x| {
                let mut m = Matrix3::identity() * (k + x[0]);
                m[(0, 1)] = 0.2;
                m[(1, 0)] = 0.2;
                m
            })
            .with_source(f)
            .with_boundary_pressure(move |x| c[5] * x[0] - x[1]);
        let mass = assemble_lumped_mass(&mesh, &dofs, &data).unwrap();
        let div = assemble_div(&mesh, &dofs);
        let (g, rhs) = assemble_rhs(&mesh, &dofs, &data);
        let sol = solve_mixed(&mass, &div, &g, &rhs, 1e-14).unwrap();
        let degree = match order {
            SchemeOrder::FirstOrder => 0,
            SchemeOrder::SecondOrder => 1,
        };
        let proj = project_pressure(&mesh, degree, &f).unwrap();
        let scale = 1.0 + c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for cell in 0..mesh.num_cells() {
            let xh = mesh.cells[cell].shape.centroid();
            let x = mesh.maps[cell].apply(&xh);
            let d = eval_divergence(&mesh, &dofs, &sol.u, cell, &xh);
            prop_assert!((d - proj.eval(cell, &x)).abs() < 1e-9 * scale, "cell {cell}: {d} vs {}", proj.eval(cell, &x));
        }
    }

    /// The Schur complement is symmetric to rounding, and its action on a vector equals
    /// `B M^-1 B^T` applied through the block factors.
    #[test]
    fn schur_matches_block_inverse(family in family(), seed in 0u64..1000) {
        let mesh = generate(family, 1).unwrap();
        let dofs = build_dofmap(&mesh, SchemeOrder::SecondOrder).unwrap();
        let data = ProblemData::identity(2);
        let mass = assemble_lumped_mass(&mesh, &dofs, &data).unwrap();
        let div = assemble_div(&mesh, &dofs);
        let (g, f) = assemble_rhs(&mesh, &dofs, &data);
        let system = mfmfe::reduce_solve::reduce(&mass, &div, &g, &f).unwrap();
        let s = seed as f64;
        let q = nalgebra::DVector::from_fn(dofs.n_pressure, |i, _| (i as f64 * 0.77 + s).sin());
        let direct = &system.matrix * &q;
        let bt = &div.transpose() * &q;
        let via_blocks = &div * system.apply_mass_inverse(&bt);
        prop_assert!((&direct - &via_blocks).norm() <= 1e-12 * direct.norm().max(1.0));
        let dense = nalgebra::DMatrix::from(&system.matrix);
        let asym = (&dense - dense.transpose()).abs().max();
        prop_assert!(asym <= 1e-12 * dense.abs().max(), "asymmetry {asym}");
    }
}
