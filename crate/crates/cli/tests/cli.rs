use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn read_csv(path: &Path) -> Result<Vec<HashMap<String, String>>, dilute_cli::CliError> {
    let (headers, rows) = dilute_cli::artifacts::read_csv(path)?;
    Ok(rows
        .into_iter()
        .map(|r| headers.iter().cloned().zip(r).collect())
        .collect())
}

fn dilute(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dilute"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = dilute(args);
    assert!(
        out.status.success(),
        "dilute {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap()
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(dir.path());
    for args in [
        vec!["gap", "--out", out, "--set", "model.gama=1"],
        vec!["gap", "--out", out, "--set", "model.gamma=-1"],
        vec!["gap", "--out", out, "--set", "noequals"],
        vec!["gap", "--out", out, "--config", "/nonexistent/config.toml"],
        vec!["regime", "--out", out],
        vec!["frobnicate"],
    ] {
        let o = dilute(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn oversized_chain_exits_with_solver_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = dilute(&["gap", "--out", path_str(dir.path()), "--set", "model.n_sites=40"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let common = [
        "--seed",
        "5",
        "--set",
        "model.n_sites=3",
        "--set",
        "traject.n_trajectories=40",
        "--set",
        "traject.t_max=40",
        "--set",
        "traject.n_times=21",
        "--set",
        "traject.n_bootstrap=30",
        "--set",
        "traject.raw=true",
    ];
    let mut args_a = vec!["traject", "--out", path_str(a.path())];
    args_a.extend(common);
    let mut args_b = vec!["traject", "--threads", "1", "--out", path_str(b.path())];
    args_b.extend(common);
    run_ok(&args_a);
    run_ok(&args_b);
    let fa = sorted_files(a.path());
    let fb = sorted_files(b.path());
    // config, csv, json, raw dump and its layout sidecar
    assert_eq!(fa.len(), 5);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{} differs", x.display());
    }
}

#[test]
fn different_seeds_change_trajectories() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        run_ok(&[
            "traject",
            "--out",
            path_str(dir.path()),
            "--seed",
            seed,
            "--set",
            "traject.n_trajectories=20",
            "--set",
            "traject.t_max=20",
            "--set",
            "traject.n_times=11",
        ]);
    }
    let ra = read_csv(&a.path().join("traject_n3.csv")).unwrap();
    let rb = read_csv(&b.path().join("traject_n3.csv")).unwrap();
    assert_ne!(ra, rb);
}

#[test]
fn artifacts_carry_stamp() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["gap", "--out", path_str(dir.path()), "--seed", "9", "--set", "model.n_sites=[3,4]"]);
    let gap = json(dir.path().join("gap.json"));
    let cfg = json(dir.path().join("config.json"));
    for v in [&gap, &cfg] {
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["tool"], "dilute");
        assert_eq!(v["seed"], 9);
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    }
    let hash = gap["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(cfg["config_hash"], hash);
    let text = fs::read_to_string(dir.path().join("gap.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# dilute "), "{first}");
    assert!(first.contains(&format!("config_hash={hash}")));
    assert!(first.contains("schema_version=1"));
    let rows = read_csv(&dir.path().join("gap.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["n_sites"], "3");
    assert_eq!(rows[1]["dim"], "81");
}

#[test]
fn output_directory_does_not_change_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        run_ok(&["regime", "--out", path_str(d.path()), "--set", "regime={L=5.0,ell=1.0,gamma=1.0,D=1.0}"]);
    }
    let ha = json(a.path().join("regime.json"))["config_hash"].clone();
    let hb = json(b.path().join("regime.json"))["config_hash"].clone();
    assert_eq!(ha, hb);
}

#[test]
fn ghz_steer_table() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "steer",
        "--out",
        path_str(dir.path()),
        "--set",
        "steer.target=\"ghz\"",
        "--set",
        "model.n_sites=\"3..4\"",
    ]);
    let rows = read_csv(&dir.path().join("steer.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    let expected_lie = [("17", "48"), ("66", "224")];
    for (r, (lie, target)) in rows.iter().zip(expected_lie) {
        assert_eq!(r["target"], "GHZ");
        assert_eq!(r["hot_dim"], "2");
        assert_eq!(r["necessary_hot"], "true");
        assert_eq!(r["necessary_flow"], "false");
        assert_eq!(r["constructive_jumps_valid"], "true");
        assert_eq!(r["lie_dim"], lie);
        assert_eq!(r["lie_target"], target);
    }
}

#[test]
fn raw_dump_has_dims_header() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "traject",
        "--out",
        path_str(dir.path()),
        "--set",
        "traject.n_trajectories=12",
        "--set",
        "traject.t_max=10",
        "--set",
        "traject.n_times=6",
        "--set",
        "traject.raw=true",
    ]);
    let bytes = fs::read(dir.path().join("traject_n3.f64")).unwrap();
    assert_eq!(&bytes[..8], b"DLTRAJ01");
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
    assert_eq!((rows, cols), (12, 6));
    assert_eq!(bytes.len(), 24 + 8 * 12 * 6);
    let first = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    assert!((0.0..=1.0).contains(&first));
    let side = json(dir.path().join("traject_n3.f64.json"));
    assert_eq!(side["schema_version"], 1);
}

#[test]
fn regime_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(dir.path());
    run_ok(&["regime", "--out", out, "--set", "regime={L=5.0,ell=10.0,gamma=0.1,D=1.0}"]);
    let v = json(dir.path().join("regime.json"));
    assert_eq!(v["regime"], "ballistic");
    assert!(v["t_a"].is_null());
    run_ok(&["regime", "--out", out, "--set", "regime={L=100.0,ell=1.0,gamma=0.1,D=1.0}"]);
    let v = json(dir.path().join("regime.json"));
    assert_eq!(v["regime"], "diffusive_large");
    assert_eq!(v["t_d"], 10000.0);
}

#[test]
fn plot_renders_scan_svg() {
    let dir = tempfile::tempdir().unwrap();
    let out = path_str(dir.path());
    run_ok(&["scan", "--out", out, "--set", "model.n_sites=\"5..6\""]);
    let o = run_ok(&["plot", "--out", out]);
    let listed = String::from_utf8(o.stdout).unwrap();
    assert!(listed.contains("scan_gap_vs_n.svg"), "{listed}");
    let svg = fs::read_to_string(dir.path().join("scan_gap_vs_n.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polyline") || svg.contains("<path") || svg.contains("<circle"));
}

#[test]
fn zero_rate_leaves_overlap_constant() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "traject",
        "--out",
        path_str(dir.path()),
        "--set",
        "model.gamma=0",
        "--set",
        "traject.n_trajectories=10",
        "--set",
        "traject.t_max=50",
        "--set",
        "traject.n_times=6",
    ]);
    let rows = read_csv(&dir.path().join("traject_n3.csv")).unwrap();
    let f: Vec<f64> = rows.iter().map(|r| r["mean_overlap"].parse().unwrap()).collect();
    for v in &f {
        assert!((v - f[0]).abs() < 1e-10, "{f:?}");
    }
}
