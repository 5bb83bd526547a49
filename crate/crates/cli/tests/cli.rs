use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_qresource");
const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Data rows as string fields, skipping the schema line and header.
fn rows(text: &str) -> Vec<Vec<String>> {
    let body = text.split_once('\n').map_or("", |(_, rest)| rest);
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap()
}

#[test]
fn golden_schema_lines() {
    let dir = scratch("golden");
    let d = dir.to_str().unwrap();
    run_ok(&["classify", "--out", d]);
    run_ok(&["activate", "--out", d]);
    run_ok(&["monotonicity", "--p-step", "0.25", "--out", d]);
    run_ok(&["experiment", "--theta-grid", "45", "--out", d]);
    run_ok(&["tomography", "--state", "d", "--shots", "0", "--out", d]);
    let golden = [
        ("classes.csv", "# qresource classes v1\nclass,word,permutation,phi00_re,phi00_im,phi11_re,phi11_im,phi01_re,phi01_im,phi10_re,phi10_im"),
        ("infeasible.csv", "# qresource infeasible v1\npermutation,witness_a,witness_b,source_re,source_im,image_re,image_im,kind,detail"),
        ("activation.csv", "# qresource activation v1\ntheta_deg,coherence,concurrence,coherence_err,concurrence_err"),
        ("violation.csv", "# qresource violation v1\np,upper_bound,average,violated"),
        ("truth_zz.csv", "# qresource truth-zz v1\ninput,HD,HA,VD,VA"),
        ("truth_xx.csv", "# qresource truth-xx v1\ninput,DH,DV,AH,AV"),
        ("rho_theta_45.csv", "# qresource density-matrix v1\nrow,col,re,im"),
        ("rho.csv", "# qresource density-matrix v1\nrow,col,re,im"),
        ("dataset.csv", "# qresource tomography-dataset v1 shots=0 mode=multinomial\nsetting,outcome,count"),
    ];
    for (name, head) in golden {
        assert!(read(&dir, name).starts_with(&format!("{head}\n")), "{name} header changed");
    }
    let fid = json(&dir, "fidelity.json");
    for key in ["schema", "Fzz", "Fxx", "lower", "upper", "capability_lower", "process_fidelity"] {
        assert!(fid.get(key).is_some(), "fidelity.json lacks {key}");
    }
    assert_eq!(fid["schema"], "qresource fidelity v1");
    for svg in ["activation.svg", "violation.svg"] {
        let s = read(&dir, svg);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn classify_counts_and_cnot_witness() {
    let dir = scratch("classify");
    run_ok(&["classify", "--overlap-mod", "0.5", "--overlap-arg", "30", "--out", dir.to_str().unwrap()]);
    let classes = rows(&read(&dir, "classes.csv"));
    assert_eq!(classes.len(), 8);
    let infeasible = rows(&read(&dir, "infeasible.csv"));
    assert_eq!(infeasible.len(), 16);
    assert!(infeasible.iter().any(|r| r[0] == "00>00 01>01 10>11 11>10"));
    // Every phase entry is unimodular.
    for r in &classes {
        for k in 0..4 {
            let (re, im) = (f(&r[3 + 2 * k]), f(&r[4 + 2 * k]));
            assert!((re.hypot(im) - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = scratch("rerun_a");
    let b = scratch("rerun_b");
    let cfg = format!("{CONFIGS}/measured_core.toml");
    for dir in [&a, &b] {
        let d = dir.to_str().unwrap();
        run_ok(&["classify", "--overlap-mod", "0.3", "--overlap-arg", "-40", "--out", d]);
        run_ok(&["experiment", "--circuit", &cfg, "--shots", "2000", "--theta-grid", "0,45", "--out", d]);
        run_ok(&[
            "activate", "--mode", "simulated", "--circuit", &cfg, "--shots", "5000", "--rounds", "3",
            "--theta-grid", "15,45", "--out", d,
        ]);
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 9);
    for name in names {
        let name = name.to_str().unwrap();
        assert_eq!(read(&a, name), read(&b, name), "{name} differs between runs");
    }
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let d = dir.to_str().unwrap();
    for bad in ["0", "1", "1.5"] {
        let out = run(&["classify", "--overlap-mod", bad, "--out", d]);
        assert_eq!(out.status.code(), Some(2), "|s| = {bad}");
        assert!(!out.stderr.is_empty());
    }
    let malformed = dir.join("bad.toml");
    fs::write(&malformed, "xi = 0.9\n[[element]]\ntype = \"mirror\"\n").unwrap();
    let out = run(&["experiment", "--circuit", malformed.to_str().unwrap(), "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["activate", "--mode", "simulated", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["activate", "--theta-grid", "0,x", "--out", d]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["classify", "--out", d]).status.code(), Some(0));
}

#[test]
fn monotonicity_rows() {
    let dir = scratch("mono");
    run_ok(&["monotonicity", "--p-min", "0", "--p-max", "1", "--p-step", "0.001", "--out", dir.to_str().unwrap()]);
    let rows = rows(&read(&dir, "violation.csv"));
    assert_eq!(rows.len(), 1001);
    let at = |p: f64| rows.iter().find(|r| (f(&r[0]) - p).abs() < 1e-12).unwrap();
    let r0 = at(0.0);
    assert!((f(&r0[1]) - 2.0).abs() < 1e-9 && (f(&r0[2]) - 4.0 / 3.0).abs() < 1e-9 && r0[3] == "false");
    let r5 = at(0.5);
    assert!((f(&r5[1]) - 1.0).abs() < 1e-9 && (f(&r5[2]) - 7.0 / 6.0).abs() < 1e-9 && r5[3] == "true");
    let violated: Vec<f64> = rows.iter().filter(|r| r[3] == "true").map(|r| f(&r[0])).collect();
    assert!((violated[0] - 0.4).abs() <= 0.001 + 1e-12);
    assert!((violated.last().unwrap() - 1.0).abs() <= 0.001 + 1e-12);
    let svg = read(&dir, "violation.svg");
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg.matches("<polyline fill=\"none\" stroke=\"#dd8452\" stroke-width=\"2\" stroke-dasharray").count(), 1);
}

#[test]
fn ideal_activation_saturates() {
    let dir = scratch("activate");
    run_ok(&["activate", "--out", dir.to_str().unwrap()]);
    let rows = rows(&read(&dir, "activation.csv"));
    assert_eq!(rows.len(), 7);
    for r in rows {
        let theta = f(&r[0]).to_radians();
        let expect = (2.0 * theta).sin().abs();
        assert!((f(&r[1]) - expect).abs() < 1e-9);
        assert!((f(&r[2]) - expect).abs() < 1e-9);
        assert_eq!(f(&r[3]), 0.0);
        assert_eq!(f(&r[4]), 0.0);
    }
}

#[test]
fn simulated_activation_tracks_ideal() {
    let dir = scratch("simulated");
    let cfg = format!("{CONFIGS}/ideal_core.toml");
    let out = run_ok(&[
        "activate", "--mode", "simulated", "--circuit", &cfg, "--shots", "1000000", "--rounds", "0", "--out",
        dir.to_str().unwrap(),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("seed: 42"));
    for r in rows(&read(&dir, "activation.csv")) {
        assert!((f(&r[1]) - f(&r[2])).abs() < 0.01, "{r:?}");
    }
}

#[test]
fn experiment_bounds() {
    let dir = scratch("experiment");
    let d = dir.to_str().unwrap();
    run_ok(&["experiment", "--circuit", &format!("{CONFIGS}/ideal_core.toml"), "--shots", "0", "--out", d]);
    let fid = json(&dir, "fidelity.json");
    for key in ["Fzz", "Fxx", "lower", "upper", "process_fidelity"] {
        assert!((fid[key].as_f64().unwrap() - 1.0).abs() < 1e-9, "{key}");
    }
    // Exact CNOT output at 45° is a Bell state.
    let rho = rows(&read(&dir, "rho_theta_45.csv"));
    assert_eq!(rho.len(), 16);
    for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        assert!((f(&rho[4 * i + j][2]) - 0.5).abs() < 1e-9);
    }

    let injected = dir.join("injected.toml");
    let mut text = fs::read_to_string(format!("{CONFIGS}/ideal_core.toml")).unwrap();
    text = text.replace("# fzz = 0.87", "fzz = 0.87").replace("# fxx = 0.86", "fxx = 0.86");
    fs::write(&injected, text).unwrap();
    run_ok(&["experiment", "--circuit", injected.to_str().unwrap(), "--theta-grid", "0", "--out", d]);
    let fid = json(&dir, "fidelity.json");
    assert_eq!(fid["source"], "injected");
    assert!((fid["lower"].as_f64().unwrap() - 0.73).abs() < 1e-12);
    assert!((fid["upper"].as_f64().unwrap() - 0.86).abs() < 1e-12);
    assert!((fid["capability_lower"].as_f64().unwrap() - 0.46).abs() < 1e-12);
}

#[test]
fn tomography_round_trip() {
    let dir = scratch("tomography");
    let d = dir.to_str().unwrap();
    run_ok(&["tomography", "--state", "bell", "--shots", "20000", "--rounds", "4", "--out", d]);
    let first = read(&dir, "rho.csv");
    let summary = json(&dir, "summary.json");
    assert!(summary["concurrence"].as_f64().unwrap() > 0.97);
    assert!(summary["concurrence_err"].as_f64().unwrap() > 0.0);

    let again = scratch("tomography_input");
    let dataset = dir.join("dataset.csv");
    run_ok(&["tomography", "--input", dataset.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(read(&again, "rho.csv"), first);

    fs::write(dir.join("broken.csv"), "not a dataset\n").unwrap();
    let out = run(&["tomography", "--input", dir.join("broken.csv").to_str().unwrap(), "--out", d]);
    assert_eq!(out.status.code(), Some(2));
}
