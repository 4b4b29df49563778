//! End-to-end runs of the `dipole-julia` binary: file interchange between
//! subcommands and the exit-code contract (0 ok, 2 usage, 3 data, 4 numeric).

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dipole-julia"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dipole-julia-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn pipeline_roundtrip_through_files() {
    let dir = scratch("pipeline");
    let shape = dir.join("shape.csv");
    write(&shape, "re,im\n1.5,0.2\n1.6,0.2\n1.5,0.3\n-1.4,0.5\n");

    // pixelate: snap to a lattice.
    let out = bin()
        .args(["pixelate", "--input"])
        .arg(&shape)
        .args(["--pitch", "0.125", "--out"])
        .arg(dir.join("pixels.csv"))
        .output()
        .unwrap();
    assert!(out.status.success(), "pixelate failed: {out:?}");

    // build: one dipole per pixel.
    let out = bin()
        .args(["build", "--pixels"])
        .arg(dir.join("pixels.csv"))
        .args(["--degree", "2", "--eps", "0.05", "--out"])
        .arg(dir.join("map.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "build failed: {out:?}");
    let map_text = std::fs::read_to_string(dir.join("map.json")).unwrap();
    assert!(map_text.contains("\"N\": 2"));
    assert!(map_text.contains("\"dipoles\""));

    // render: PNG + sidecar + boundary cloud.
    let out = bin()
        .args(["render", "--map"])
        .arg(dir.join("map.json"))
        .args(["--grid", "128", "--max-iter", "256", "--out"])
        .arg(dir.join("julia"))
        .output()
        .unwrap();
    assert!(out.status.success(), "render failed: {out:?}");
    assert!(dir.join("julia.png").exists());
    assert!(dir.join("julia.json").exists());
    assert!(dir.join("julia.csv").exists());

    // limitset against the same pixels.
    let out = bin()
        .args(["limitset", "--map"])
        .arg(dir.join("map.json"))
        .args(["--pixels"])
        .arg(dir.join("pixels.csv"))
        .args(["--tol", "0.05", "--out"])
        .arg(dir.join("limit.csv"))
        .output()
        .unwrap();
    assert!(out.status.success(), "limitset failed: {out:?}");
    let limit_text = std::fs::read_to_string(dir.join("limit.csv")).unwrap();
    assert!(limit_text.starts_with("re,im,layer\n"));

    // hausdorff between the boundary cloud and the limit set.
    let out = bin()
        .args(["hausdorff", "--a"])
        .arg(dir.join("julia.csv"))
        .args(["--b"])
        .arg(dir.join("limit.csv"))
        .args(["--out"])
        .arg(dir.join("report.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "hausdorff failed: {out:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert!(report["d_sym"].as_f64().unwrap() >= 0.0);
    assert_eq!(report["flavor"], "planar");

    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn hausdorff_reads_layered_csv_rows() {
    // The limit-set CSV has a third column; the point reader must cope.
    let dir = scratch("layered");
    write(&dir.join("a.csv"), "re,im\n0,0\n");
    write(&dir.join("b.csv"), "re,im,layer\n3.0,4.0,-1\n");
    let out = bin()
        .args(["hausdorff", "--a"])
        .arg(dir.join("a.csv"))
        .args(["--b"])
        .arg(dir.join("b.csv"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"d_sym\": 5.0"), "unexpected report: {text}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn usage_errors_exit_2() {
    let dir = scratch("usage2");
    write(&dir.join("pixels.csv"), "re,im\n1.5,0.2\n");
    // Non-decreasing eps list.
    let out = bin()
        .args(["converge", "--pixels"])
        .arg(dir.join("pixels.csv"))
        .args(["--degree", "2", "--eps", "0.1,0.2", "--grid", "32"])
        .args(["--out"])
        .arg(dir.join("run"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "expected usage exit: {out:?}");

    // Unknown flag (clap's own usage error).
    let out = bin().args(["render", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn data_errors_exit_3() {
    let dir = scratch("data3");
    // Empty shape: no points at all.
    write(&dir.join("empty.csv"), "re,im\n");
    let out = bin()
        .args(["pixelate", "--input"])
        .arg(dir.join("empty.csv"))
        .args(["--pitch", "0.1", "--out"])
        .arg(dir.join("out.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "expected data exit: {out:?}");

    // Disjointness violation: a pixel on the unit circle.
    write(&dir.join("bad.csv"), "re,im\n1.0,0.0\n");
    let out = bin()
        .args(["build", "--pixels"])
        .arg(dir.join("bad.csv"))
        .args(["--degree", "2", "--eps", "0.1", "--out"])
        .arg(dir.join("map.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3), "expected data exit: {out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("1") && stderr.contains("circle"),
        "diagnostic: {stderr}"
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn numeric_errors_exit_4() {
    let dir = scratch("numeric4");
    // A grid deep inside one basin has no boundary to extract.
    write(
        &dir.join("map.json"),
        r#"{"base": {"N": 2, "C": [1.0, 0.0], "p": [0.0, 0.0]}, "dipoles": []}"#,
    );
    let out = bin()
        .args(["render", "--map"])
        .arg(dir.join("map.json"))
        .args(["--viewport", "10,12,10,12", "--grid", "32", "--out"])
        .arg(dir.join("julia"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "expected numeric exit: {out:?}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = scratch("config");
    write(&dir.join("pixels.csv"), "re,im\n1.5,0.2\n");
    write(
        &dir.join("config.json"),
        r#"{"degree": 2, "eps": "0.05", "theta": 0.0}"#,
    );
    // degree and eps come from the config.
    let out = bin()
        .args(["--config"])
        .arg(dir.join("config.json"))
        .args(["build", "--pixels"])
        .arg(dir.join("pixels.csv"))
        .args(["--out"])
        .arg(dir.join("map.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "config-driven build failed: {out:?}");
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("map.json")).unwrap()).unwrap();
    assert_eq!(map["dipoles"][0]["eps"].as_f64(), Some(0.05));

    // The flag wins over the config.
    let out = bin()
        .args(["--config"])
        .arg(dir.join("config.json"))
        .args(["build", "--pixels"])
        .arg(dir.join("pixels.csv"))
        .args(["--eps", "0.02", "--out"])
        .arg(dir.join("map2.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("map2.json")).unwrap()).unwrap();
    assert_eq!(map["dipoles"][0]["eps"].as_f64(), Some(0.02));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn empty_pixel_csv_builds_bare_base_with_warning() {
    let dir = scratch("bare");
    write(&dir.join("none.csv"), "re,im\n");
    let out = bin()
        .args(["build", "--pixels"])
        .arg(dir.join("none.csv"))
        .args(["--degree", "2", "--eps", "0.1", "--out"])
        .arg(dir.join("map.json"))
        .output()
        .unwrap();
    assert!(out.status.success(), "bare build failed: {out:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "missing warning: {stderr}");
    let map: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("map.json")).unwrap()).unwrap();
    assert_eq!(map["dipoles"].as_array().unwrap().len(), 0);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn inverse_render_writes_the_requested_cloud() {
    let dir = scratch("inverse");
    write(
        &dir.join("map.json"),
        r#"{"base": {"N": 2, "C": [1.0, 0.0], "p": [0.0, 0.0]}, "dipoles": []}"#,
    );
    let out = bin()
        .args(["render", "--map"])
        .arg(dir.join("map.json"))
        .args([
            "--grid",
            "64",
            "--method",
            "inverse",
            "--count",
            "500",
            "--burn-in",
            "20",
            "--seed",
            "5",
            "--out",
        ])
        .arg(dir.join("julia"))
        .output()
        .unwrap();
    assert!(out.status.success(), "inverse render failed: {out:?}");
    let cloud = std::fs::read_to_string(dir.join("julia.csv")).unwrap();
    assert_eq!(cloud.lines().count(), 501); // header + 500 points
    let _ = std::fs::remove_dir_all(&dir);
}
