use std::path::Path;
use std::process::Command;

use mwl_core::fields::read_mwf;

fn mwl(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mwl"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("mwl runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn gen_is_deterministic_and_identity_is_identity() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    assert!(mwl(&["gen", "--seed", "11"], a.path()).status.success());
    assert!(mwl(&["gen", "--seed", "11"], b.path()).status.success());
    for name in [
        "identity",
        "sqrt_sine",
        "commuting_0",
        "commuting_1",
        "rotating",
    ] {
        let file = format!("{name}.mwf.json");
        let (x, y) = (
            std::fs::read(a.path().join(&file)).unwrap(),
            std::fs::read(b.path().join(&file)).unwrap(),
        );
        assert_eq!(x, y, "{file} differs between runs");
    }
    let id = read_mwf(a.path().join("identity.mwf.json")).unwrap();
    for m in id.values() {
        assert_eq!(
            m.as_general(),
            &mwl_core::linalg::GeneralMatrix::identity(2)
        );
    }
}

#[test]
fn commuting_recipe_commutes_after_reload() {
    let dir = tempfile::tempdir().unwrap();
    assert!(mwl(&["gen"], dir.path()).status.success());
    let w0 = read_mwf(dir.path().join("commuting_0.mwf.json")).unwrap();
    let w1 = read_mwf(dir.path().join("commuting_1.mwf.json")).unwrap();
    for (a, b) in w0.values().iter().zip(w1.values()) {
        let (a, b) = (a.as_general(), b.as_general());
        assert!(
            (&(a * b) - &(b * a)).frobenius_norm()
                < 1e-10 * (1.0 + a.frobenius_norm() * b.frobenius_norm())
        );
    }
}

#[test]
fn k_sweep_of_equal_spaces_is_min_one_t() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(
        &[
            "sweep",
            "k-functional",
            "--w0",
            "identity",
            "--w1",
            "identity",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = read_csv(&dir.path().join("sweep_k-functional.csv"));
    assert_eq!(header, ["t", "k", "e"]);
    let i1 = rows.iter().position(|r| r[0] == 1.0).unwrap();
    let norm = rows[i1][1];
    for r in &rows {
        assert!(
            (r[1] - r[0].min(1.0) * norm).abs() <= 1e-9 * norm,
            "t={} K={}",
            r[0],
            r[1]
        );
    }
}

#[test]
fn ap_sweep_is_nondecreasing_in_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(&["sweep", "ap", "--w0", "sqrt_sine"], dir.path());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = read_csv(&dir.path().join("sweep_ap.csv"));
    for p in [1.5, 2.0, 3.0] {
        let col: Vec<f64> = rows.iter().filter(|r| r[1] == p).map(|r| r[2]).collect();
        assert_eq!(col.len(), 5);
        assert!(
            col.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12)),
            "p={p}: {col:?}"
        );
    }
}

#[test]
fn omega_sweep_matches_finite_differences() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(
        &[
            "sweep",
            "omega",
            "--w0",
            "commuting_0",
            "--w1",
            "rotating",
            "--format",
            "json",
        ],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sweep_omega.json")).unwrap())
            .unwrap();
    for row in v["rows"].as_array().unwrap() {
        assert!(row[3].as_f64().unwrap() <= 1e-4, "{row}");
    }
}

#[test]
fn passing_suite_exits_zero_and_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(&["verify", "--suite", "linalg"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("linalg.report.json").exists());
    let text = std::fs::read_to_string(dir.path().join("linalg.csv")).unwrap();
    assert!(text.starts_with("suite,criterion,check,"));
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(&["verify", "--suite", "nope"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn norm_of_hilbert_is_one_unweighted() {
    let dir = tempfile::tempdir().unwrap();
    let out = mwl(
        &["norm", "--operator", "hilbert", "--weight", "identity"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (_, rows) = read_csv(&dir.path().join("norm_hilbert.csv"));
    assert!((rows[0][1] - 1.0).abs() < 1e-9);
    assert_eq!(rows[0][2], 1.0);
}
