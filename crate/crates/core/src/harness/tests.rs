use super::*;

fn report(h: f64, e: f64) -> ErrorReport {
    ErrorReport { h, dof_u: 10, dof_p: 4, err_u: e, err_div: e, err_p: e, err_proj0: e, err_post: e }
}

#[test]
fn cases_are_consistent() {
    for case in CASES {
        case.check_consistency().unwrap();
    }
}

#[test]
fn consistency_check_catches_wrong_source() {
    let case = case_by_name("paper2d").unwrap();
    let shifted = ManufacturedCase { name: "shifted", source: |x| (case_by_name("paper2d").unwrap().source)(x) + 1e-3, ..case };
    assert!(shifted.check_consistency().is_err());
    let wrong_k = ManufacturedCase { name: "wrong-k", conductivity: |_| nalgebra::Matrix3::identity(), ..case };
    assert!(wrong_k.check_consistency().is_err());
}

#[test]
fn unknown_case() {
    assert!(matches!(case_by_name("nope"), Err(Error::UnknownCase(_))));
}

#[test]
fn csv_layout() {
    assert_eq!(emit_csv(&[]), format!("{CSV_HEADER}\n"));
    let one = emit_csv(&[report(0.5, 0.4)]);
    let lines: Vec<&str> = one.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1], "5.00000e-1,10,4,4.00000e-1,,4.00000e-1,,4.00000e-1,,4.00000e-1,");
    let two = emit_csv(&[report(0.5, 0.4), report(0.25, 0.1)]);
    let row: Vec<&str> = two.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row.len(), 11);
    assert_eq!(row[4], "2.00000e0");
}

#[test]
fn dimension_mismatch_is_rejected() {
    let case = case_by_name("smooth3d").unwrap();
    let opts = RunOptions::new(SchemeOrder::SecondOrder, 1e-12);
    assert!(matches!(run_case(&case, Family::TriSquare, 0, &opts), Err(Error::Incompatible(_))));
    assert!(matches!(convergence_study(&case, Family::HexCube, 1..=1, &opts), Err(Error::DegenerateSequence(_))));
}

#[test]
fn constant_case_is_reproduced() {
    let opts = RunOptions::new(SchemeOrder::SecondOrder, 1e-14);
    for (name, family) in [("constant2d", Family::HybridSquare), ("constant3d", Family::PrismHexCube)] {
        let out = run_case(&case_by_name(name).unwrap(), family, 1, &opts).unwrap();
        let r = &out.report;
        for e in [r.err_u, r.err_div, r.err_p, r.err_proj0, r.err_post] {
            assert!(e <= 1e-10, "{name}: {r:?}");
        }
    }
}

#[test]
fn paper2d_smoke() {
    let opts = RunOptions::new(SchemeOrder::SecondOrder, 1e-12);
    let out = run_case(&case_by_name("paper2d").unwrap(), Family::HybridSquare, 2, &opts).unwrap();
    let r = &out.report;
    assert!(r.err_u.is_finite() && r.err_p.is_finite() && r.err_post.is_finite());
    assert!(r.err_u < 0.1 && r.err_p < 0.1);
    assert!(out.conservation <= 10.0 * opts.tol, "{} {:?}", out.conservation, out.solution.stats);
    assert!(out.velocity_residual <= 1e-12);
}

#[test]
fn linear_pressure_is_reproduced() {
    let opts = RunOptions::new(SchemeOrder::FirstOrder, 1e-14);
    for family in [Family::TriSquare, Family::QuadSquare] {
        let r = run_case(&case_by_name("linear2d").unwrap(), family, 2, &opts).unwrap().report;
        assert!(r.err_u <= 1e-10 && r.err_proj0 <= 1e-10 && r.err_post <= 1e-10, "{family}: {r:?}");
    }
    let opts = RunOptions::new(SchemeOrder::SecondOrder, 1e-14);
    for (name, family) in [("linear2d", Family::HybridSquare), ("linear3d", Family::TetCube), ("linear3d", Family::HexCube)] {
        let r = run_case(&case_by_name(name).unwrap(), family, 1, &opts).unwrap().report;
        assert!(r.err_u <= 1e-10 && r.err_p <= 1e-10 && r.err_post <= 1e-10, "{family}: {r:?}");
    }
}

#[test]
fn norm_quadrature_degree_is_converged() {
    let case = case_by_name("paper2d").unwrap();
    for order in [SchemeOrder::FirstOrder, SchemeOrder::SecondOrder] {
        let mut opts = RunOptions::new(order, 1e-12);
        let a = run_case(&case, Family::HybridSquare, 3, &opts).unwrap().report;
        opts.norm_degree = 8;
        let b = run_case(&case, Family::HybridSquare, 3, &opts).unwrap().report;
        for (x, y) in [(a.err_u, b.err_u), (a.err_p, b.err_p), (a.err_proj0, b.err_proj0), (a.err_post, b.err_post)] {
            assert!((x - y).abs() < 1e-3 * y, "{order:?}: {x} vs {y}");
        }
    }
}
