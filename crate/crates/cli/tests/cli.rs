use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn neutro() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neutro"))
}

fn run(args: &[&str]) -> Output {
    neutro().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/uci")
        .join(name)
        .display()
        .to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Single-line diagnostic starting with `error: <kind>:`.
fn assert_fails_with(args: &[&str], kind: &str) {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} should fail");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "stderr: {stderr}");
    assert!(
        stderr.starts_with(&format!("error: {kind}:")),
        "stderr: {stderr}"
    );
}

#[test]
fn synth_diamond_writes_twelve_points_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    ok(&["synth", "diamond", "--k", "2", "--out", s(&out)]);
    let csv = std::fs::read_to_string(out.join("diamond.csv")).unwrap();
    assert_eq!(csv.lines().count(), 12);
    let manifest = json(&out.join("manifest.json"));
    let outputs = manifest["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 2);
    let listed = outputs
        .iter()
        .find(|o| o["path"].as_str().unwrap().ends_with("diamond.csv"))
        .unwrap();
    use sha2::Digest;
    let expected = hex::encode(sha2::Sha256::digest(csv.as_bytes()));
    assert_eq!(listed["sha256"], expected.as_str());
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn iris_with_restarts_reports_accuracy_and_every_cost() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("iris");
    let iris = data("iris.csv");
    ok(&[
        "cluster",
        "--input",
        &iris,
        "--label-column",
        "last",
        "--restarts",
        "5",
        "--out",
        s(&out),
    ]);
    let metrics = json(&out.join("metrics.json"));
    assert!(metrics["accuracy"].as_f64().unwrap() >= 0.85);
    assert_eq!(metrics["clusters"], 3);
    let costs: Vec<f64> = metrics["restart_costs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(costs.len(), 5);
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    assert_eq!(metrics["final_cost"].as_f64().unwrap(), best);
    for f in [
        "memberships.csv",
        "centers.csv",
        "labels.csv",
        "cost_trace.csv",
        "manifest.json",
    ] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let header = std::fs::read_to_string(out.join("memberships.csv")).unwrap();
    assert!(header.starts_with("point_id,T_1,T_2,T_3,F,I\n"));
}

#[test]
fn fcm_method_on_wine() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wine");
    let wine = data("wine.csv");
    ok(&[
        "cluster",
        "--input",
        &wine,
        "--label-column",
        "0",
        "--method",
        "fcm",
        "--out",
        s(&out),
    ]);
    let metrics = json(&out.join("metrics.json"));
    assert_eq!(metrics["method"], "fcm");
    assert!(metrics["accuracy"].as_f64().unwrap() > 0.7);
    let header = std::fs::read_to_string(out.join("memberships.csv")).unwrap();
    assert!(header.starts_with("point_id,W_1,W_2,W_3\n"));
}

fn numeric_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let iris = data("iris.csv");
    let mut outputs = Vec::new();
    for (name, threads) in [("a", None), ("b", None), ("c", Some("1"))] {
        let out = dir.path().join(name);
        let mut cmd = neutro();
        cmd.args([
            "cluster",
            "--input",
            &iris,
            "--label-column",
            "last",
            "--restarts",
            "3",
            "--seed",
            "7",
            "--out",
            s(&out),
        ]);
        if let Some(t) = threads {
            cmd.env("NEUTRO_THREADS", t);
        }
        assert!(cmd.status().unwrap().success());
        outputs.push(numeric_outputs(&out));
    }
    assert_eq!(outputs[0].len(), 6);
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn flags_override_config_file_over_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"num_clusters": 2, "m": 2.5, "alpha": 0.1}"#).unwrap();
    let out = dir.path().join("o");
    let iris = data("iris.csv");
    ok(&[
        "cluster",
        "--input",
        &iris,
        "--label-column",
        "last",
        "--config",
        s(&cfg),
        "--m",
        "3",
        "--normalize-space",
        "normalized",
        "--out",
        s(&out),
    ]);
    let manifest = json(&out.join("manifest.json"));
    let c = &manifest["config"];
    assert_eq!(c["m"], 3.0);
    assert_eq!(c["alpha"], 0.1);
    assert_eq!(c["num_clusters"], 2);
    assert_eq!(c["w2"], 2.0);
    assert_eq!(c["indeterminacy_space"], "normalized");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn segment_with_truth_mask_and_without() {
    let dir = tempfile::tempdir().unwrap();
    let img_dir = dir.path().join("img");
    ok(&[
        "synth",
        "quadrant",
        "--side",
        "32",
        "--noise-sigma",
        "10",
        "--seed",
        "1",
        "--out",
        s(&img_dir),
    ]);
    let image = img_dir.join("image.pgm");
    let truth = img_dir.join("truth.pgm");

    let scored = dir.path().join("scored");
    ok(&[
        "segment",
        "--input",
        s(&image),
        "--truth",
        s(&truth),
        "--k",
        "4",
        "--out",
        s(&scored),
    ]);
    let metrics = json(&scored.join("metrics.json"));
    assert!(metrics["misclassified"].as_u64().unwrap() < 20);
    assert!(scored.join("labels.pgm").exists());
    let sidecar = std::fs::read_to_string(scored.join("labels.csv")).unwrap();
    assert_eq!(sidecar.lines().count(), 32 * 32 + 1);
    let stats = json(&scored.join("membership_stats.json"));
    assert_eq!(stats["clusters"].as_array().unwrap().len(), 4);

    // bright bottom-right quadrant as the foreground object
    let mut mask = b"P5\n32 32\n255\n".to_vec();
    mask.extend((0..32 * 32).map(|i| {
        if i % 32 >= 16 && i / 32 >= 16 {
            255u8
        } else {
            0
        }
    }));
    let mask_path = dir.path().join("mask.pgm");
    std::fs::write(&mask_path, mask).unwrap();
    let masked = dir.path().join("masked");
    ok(&[
        "segment",
        "--input",
        s(&image),
        "--mask",
        s(&mask_path),
        "--k",
        "4",
        "--format",
        "png",
        "--out",
        s(&masked),
    ]);
    let metrics = json(&masked.join("metrics.json"));
    assert!(metrics["f_measure"]["f"].as_f64().unwrap() > 0.95);
    assert!(masked.join("labels.png").exists());

    let plain = dir.path().join("plain");
    ok(&[
        "segment",
        "--input",
        s(&image),
        "--k",
        "4",
        "--method",
        "fcm",
        "--out",
        s(&plain),
    ]);
    let metrics = json(&plain.join("metrics.json"));
    assert!(metrics.get("misclassified").is_none());
    assert!(metrics.get("f_measure").is_none());
}

#[test]
fn synth_steps_png() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("steps");
    ok(&[
        "synth",
        "steps",
        "--width",
        "16",
        "--height",
        "16",
        "--format",
        "png",
        "--out",
        s(&out),
    ]);
    for f in ["image.png", "clean.png", "truth.png", "truth_labels.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn verify_passes_and_catches_injected_faults() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let good = ok(&["verify", "--out", s(&out)]);
    let text = String::from_utf8(good.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let report = json(&out.join("report.json"));
    assert_eq!(report["checks"].as_array().unwrap().len(), 4);
    for fault in ["gradient", "stationarity", "constraint"] {
        assert_fails_with(&["verify", "--inject-fault", fault], "runtime");
    }
}

#[test]
fn errors_are_single_line_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_fails_with(
        &["cluster", "--input", "/nonexistent.csv", "--out", s(&out)],
        "io",
    );
    let ragged = dir.path().join("ragged.csv");
    std::fs::write(&ragged, "1,2\n3\n").unwrap();
    assert_fails_with(
        &["cluster", "--input", s(&ragged), "--out", s(&out)],
        "ragged",
    );
    let good = dir.path().join("good.csv");
    std::fs::write(&good, "1,2\n3,4\n5,6\n").unwrap();
    assert_fails_with(
        &["cluster", "--input", s(&good), "--k", "1", "--out", s(&out)],
        "invalid_config",
    );
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_fails_with(
        &[
            "cluster",
            "--input",
            s(&good),
            "--config",
            s(&cfg),
            "--out",
            s(&out),
        ],
        "json",
    );
    assert_fails_with(
        &["synth", "diamond", "--preset", "x99", "--out", s(&out)],
        "runtime",
    );
    assert_fails_with(&["cluster", "--no-such-flag"], "usage");
    let out = neutro()
        .env("NEUTRO_THREADS", "lots")
        .args(["verify"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert_eq!(String::from_utf8(out.stderr).unwrap().lines().count(), 1);
}
