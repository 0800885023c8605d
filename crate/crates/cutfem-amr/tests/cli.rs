//! End-to-end tests of the command-line driver: exit codes, file outputs
//! and the documented flags.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutfem-amr"))
}

fn read_csv(dir: &Path) -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(dir.join("convergence.csv")).unwrap();
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn missing_config_exits_2_and_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "does-not-exist.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("does-not-exist.json"), "{stderr}");
}

#[test]
fn invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"example": 9}"#).unwrap();
    let out = bin()
        .args(["run", "bad.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"example": 1, "thetaa": 0.3}"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "bad.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn example1_default_run_produces_increasing_history() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["example", "1", "--max-dof", "900"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(dir.path());
    assert_eq!(
        rows[0].join(","),
        "step,ndof,eta,eta_residual,eta_jump,eta_nitsche,eta_bc,true_error,\
         effectivity,osc,cg_iters,cond_est,wall_s"
    );
    assert!(rows.len() >= 6, "only {} rows", rows.len());
    let ndofs: Vec<usize> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(ndofs.windows(2).all(|w| w[1] > w[0]));
    // No exact solution: the error columns are nan but parse as floats.
    for row in &rows[1..] {
        assert_eq!(row[7], "nan");
        assert_eq!(row[8], "nan");
        for col in [2, 3, 4, 5, 6, 9, 11, 12] {
            row[col].parse::<f64>().unwrap();
        }
    }
}

#[test]
fn example3_uniform_quadruples_dofs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["example", "3", "--uniform", "--max-dof", "4000"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(dir.path());
    let ndofs: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(ndofs.len() >= 3);
    for pair in ndofs.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!((3.0..5.0).contains(&ratio), "growth {ratio}");
    }
}

#[test]
fn flags_theta_and_no_bc_apply() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "example", "3", "--no-bc", "--theta", "0.4", "--max-dof", "600",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = read_csv(dir.path());
    // Higher theta marks more aggressively: fewer steps to the cap than
    // the default (sanity bound, not exact).
    assert!(rows.len() - 1 < 40);
}

#[test]
fn custom_level_set_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("custom.json"),
        r#"{"example": "custom",
            "bbox": [-2.0, -2.0, 2.0, 2.0],
            "n0": 8,
            "max_dofs": 300,
            "level_set": {"circle": {"center": [0.1, -0.2], "radius": 1.3}}}"#,
    )
    .unwrap();
    let out = bin()
        .args(["run", "custom.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // Homogeneous data: the zero solution is found at once.
    let rows = read_csv(dir.path());
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][2].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn rerun_overwrites_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.json"),
        r#"{"example": 3, "max_dofs": 500, "vtk_every": 3}"#,
    )
    .unwrap();
    let run = || {
        let out = bin()
            .args(["run", "run.json"])
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
        let vtk = std::fs::read_to_string(dir.path().join("mesh_step_0.vtk")).unwrap();
        (csv, vtk)
    };
    let (csv1, vtk1) = run();
    let (csv2, vtk2) = run();
    assert_eq!(vtk1, vtk2);
    // All columns except wall time are bit-identical.
    let strip = |text: &str| -> String {
        text.lines()
            .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap())
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&csv1), strip(&csv2));
    // VTK snapshot carries the pinned field names.
    for field in ["classification", "eta", "eta_bc"] {
        assert!(vtk1.contains(&format!("SCALARS {field} double")));
    }
}

#[test]
fn example3_rejects_bad_omega() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["example", "3", "--omega", "1.0"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pi"), "{stderr}");
}
