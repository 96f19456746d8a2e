use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bec-entropy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_gaussian(dir: &Path, name: &str, spacing: f64, n: usize, bad_row: Option<usize>) -> String {
    let mut text = String::from("# x density\n");
    for i in 0..n {
        let x = i as f64 * spacing;
        let mut v = PI.powf(-1.5) * (-x * x).exp();
        if Some(i) == bad_row {
            v = -0.01;
        }
        writeln!(text, "{x:.17e} {v:.17e}").unwrap();
    }
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    assert_eq!(code(&run(&["--bogus-flag"])), 1);
    assert_eq!(code(&run(&["--grid-points", "10", "--out-dir", out_dir])), 1);
    assert_eq!(code(&run(&["--format", "xml", "--out-dir", out_dir])), 1);
    assert_eq!(code(&run(&["--n-values", "1000,500", "--out-dir", out_dir])), 1);
    assert_eq!(code(&run(&["--ingest-position", "x.dat", "--out-dir", out_dir])), 1);
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn solver_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--n-values", "1000000",
        "--r-max", "4",
        "--grid-points", "401",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ingested_gaussian_saturates_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write_gaussian(dir.path(), "rho.dat", 0.01, 1201, None);
    let mom = write_gaussian(dir.path(), "nk.dat", 0.01, 1201, None);
    let out = run(&[
        "--ingest-position", &pos,
        "--ingest-momentum", &mom,
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    let s = json["report"]["s_total"].as_f64().unwrap();
    assert!((s - 6.43419).abs() < 1e-3, "S = {s}");
    assert!(json["report"]["omega"].as_f64().unwrap() < 1e-3);
}

#[test]
fn negative_density_is_rejected_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let pos = write_gaussian(dir.path(), "rho.dat", 0.01, 1201, Some(40));
    let mom = write_gaussian(dir.path(), "nk.dat", 0.01, 1201, None);
    let out = run(&["--ingest-position", &pos, "--ingest-momentum", &mom, "--out-dir",
        dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    // header comment occupies line 1
    assert!(stderr.contains("42"), "{stderr}");
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn sweep_writes_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--n-values", "500,1000,3000",
        "--export-densities",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["table.csv", "fit.json", "fig1.dat", "fig2.dat", "rho_N500.dat", "nk_N3000.dat"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let table = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,S_r(min),S_r,S_r(max),S_k(min),S_k,S_k(max),S(min),S,S(max),Omega"
    );
    assert_eq!(lines.count(), 3);
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap())
            .unwrap();
    for key in ["a", "b", "rms_residual", "n_min", "n_max"] {
        assert!(fit.get(key).is_some(), "{key}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n_values = [500, 1000]\nformat = [\"csv\", \"json\"]\n").unwrap();
    let out = run(&[
        "--config", cfg.to_str().unwrap(),
        "--format", "csv",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("table.csv").exists());
    assert!(!dir.path().join("fit.json").exists());

    std::fs::write(&cfg, "n_values = [500]\nunknown_key = 1\n").unwrap();
    assert_eq!(code(&run(&["--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = run(&["--n-values", "500,1000,3000", "--out-dir", d.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    for f in ["table.csv", "fit.json", "fig1.dat", "fig2.dat"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}
