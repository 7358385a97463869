use std::process::{Command, Output};

fn mfem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfem")).args(args).output().expect("mfem runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn study_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("study.csv");
    let mtx = dir.path().join("mtx");
    let out = mfem(&[
        "study", "--case", "paper2d", "--family", "hybrid-square", "--order", "2", "--levels", "0..1", "--tol", "1e-12",
        "--out", csv.to_str().unwrap(), "--export-matrices", mtx.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "h,dof_u,dof_p,err_u,eoc_u,err_p,eoc_p,err_proj0,eoc_proj0,err_post,eoc_post");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].split(',').nth(4).unwrap().is_empty());
    assert!(!lines[2].split(',').nth(4).unwrap().is_empty());
    for level in ["level0", "level1"] {
        for name in ["mass.mtx", "div.mtx", "schur.mtx"] {
            assert!(mtx.join(level).join(name).is_file(), "{level}/{name}");
        }
    }
}

#[test]
fn run_prints_errors() {
    let out = mfem(&["run", "--case", "smooth3d", "--family", "hex-cube", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    for key in ["err_u", "err_p", "err_proj0", "err_post", "conservation"] {
        assert!(s.contains(key), "{key} missing in {s}");
    }
}

#[test]
fn mesh_gen_and_check_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.mesh");
    let out = mfem(&["mesh", "gen", "--family", "tet-prism-cube", "--level", "1", "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = mfem(&["mesh", "check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("ok: dim 3"));

    // vertex 4 hangs on the diagonal of the first triangle
    let hanging = "mfem-mesh 1 2\nvertices 5\n0 0\n1 0\n1 1\n0 1\n0.5 0.5\ncells 3\ntri 0 1 2\ntri 0 4 3\ntri 4 2 3\n";
    std::fs::write(&file, hanging).unwrap();
    let out = mfem(&["mesh", "check", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
}

#[test]
fn dump_element_lists_basis() {
    let out = mfem(&["dump-element", "--shape", "prism", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("prism"));
    let out = mfem(&["dump-element", "--shape", "hex", "--order", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exit_codes() {
    assert_eq!(mfem(&["--help"]).status.code(), Some(0));
    assert_eq!(mfem(&["--version"]).status.code(), Some(0));
    assert_eq!(mfem(&["bogus"]).status.code(), Some(3));
    assert_eq!(mfem(&["study", "--case", "nope"]).status.code(), Some(3));
    assert_eq!(mfem(&["study", "--case", "paper2d", "--levels", "2..2"]).status.code(), Some(3));
    assert_eq!(mfem(&["run", "--case", "paper2d", "--family", "hex-cube"]).status.code(), Some(3));
    assert_eq!(mfem(&["run", "--case", "paper2d", "--order", "3"]).status.code(), Some(3));
    // an unreachable tolerance makes conjugate gradients fail
    assert_eq!(mfem(&["run", "--case", "paper2d", "--level", "0", "--tol", "1e-300"]).status.code(), Some(2));
}
