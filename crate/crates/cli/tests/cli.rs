use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qmor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmor")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stderr)))
}

fn csv_rows(text: &str) -> Vec<(f64, f64, String)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].to_string())
        })
        .collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn certify_exit_codes() {
    let out = qmor(&["certify", "--builtin", "collective", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reducible"], true);
    assert_eq!(v["dim_algebra"], 20);
    assert_eq!(v["dim_full"], 64);

    let out = qmor(&["certify", "--builtin", "collective", "--n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["reducible"], false);
}

#[test]
fn certify_by_pauli_count() {
    let out = qmor(&["certify", "--builtin", "random-tfim", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim_algebra"], 512);
    assert_eq!(v["dim_full"], 1024);
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(qmor(&["certify", "--builtin", "nope", "--n", "3"]).status.code(), Some(2));
    assert_eq!(qmor(&["certify", "--builtin", "tfim"]).status.code(), Some(2));
    assert_eq!(qmor(&["reduce", "--builtin", "tfim", "--n", "2", "--state", "+"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad =
        write(dir.path(), "m.json", r#"{"n": 2, "terms": [{"label": "a", "paulis": [{"coeff": 1, "pauli": "XQ"}]}]}"#);
    assert_eq!(qmor(&["certify", "--model", &bad]).status.code(), Some(2));
}

#[test]
fn reduce_tfim_plus_state() {
    let out = qmor(&["reduce", "--builtin", "tfim", "--n", "6", "--state", "++++++"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["d"], 64);
    assert_eq!(v["r"], 8);
    assert_eq!(v["basis_size"], 126);
    assert!(v["invariance_residual"].as_f64().unwrap() <= 1e-8);
    assert!(v["containment_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn reduce_methods_agree() {
    let mut dims = Vec::new();
    for method in ["burnside", "pauli", "gramian"] {
        let out = qmor(&["reduce", "--builtin", "random-tfim", "--n", "4", "--state", "+0-1", "--method", method]);
        assert!(out.status.success(), "{method}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        dims.push(v["r"].as_u64().unwrap());
        assert!(v["invariance_residual"].as_f64().unwrap() <= 1e-8, "{method}");
    }
    assert!(dims.iter().all(|&r| r == dims[0]), "{dims:?}");
}

#[test]
fn reduce_writes_artifacts_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let mut contents = Vec::new();
    for run in ["a", "b"] {
        let out_dir = dir.path().join(run);
        let out = qmor(&[
            "reduce",
            "--builtin",
            "tfim",
            "--n",
            "4",
            "--state",
            "gs:0.3,1",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let files: Vec<Vec<u8>> = ["map.json", "phi.csv", "reduced_model.json", "report.json"]
            .iter()
            .map(|f| fs::read(out_dir.join(f)).unwrap())
            .collect();
        contents.push(files);
    }
    assert_eq!(contents[0], contents[1]);
    let report: Value = serde_json::from_slice(&contents[0][3]).unwrap();
    let r = report["r"].as_u64().unwrap() as usize;
    let phi = String::from_utf8(contents[0][1].clone()).unwrap();
    assert_eq!(phi.lines().count(), 16 + 1);
    assert_eq!(phi.lines().next().unwrap().split(',').count(), 2 * r);
}

#[test]
fn single_time_gives_single_row() {
    let out =
        qmor(&["simulate", "--builtin", "tfim", "--n", "3", "--state", "+++", "--lambda", "B=0.5,J=1", "--times", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("time,value,model_kind"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].2, "full");
    // <+++| Σ X |+++> = 3
    assert!((rows[0].1 - 3.0).abs() < 1e-12);
}

#[test]
fn compare_exact_and_truncated() {
    let base = ["simulate", "--builtin", "tfim", "--n", "6", "--state", "gs:0.05,1", "--gs-window", "0.1"];
    let tail = ["--lambda", "B=0.5,J=1", "--times", "0:10:50", "--compare"];
    let out = qmor(&[&base[..], &tail[..]].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 100);
    let (full, red) = rows.split_at(50);
    assert!(full.iter().all(|r| r.2 == "full") && red.iter().all(|r| r.2 == "reduced"));
    let err = full.iter().zip(red).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max);
    assert!(err <= 1e-8, "{err}");

    let out = qmor(&[&base[..], &tail[..], &["--truncate", "1"][..]].concat());
    assert!(out.status.success());
    let rows = csv_rows(&String::from_utf8(out.stdout).unwrap());
    let (full, red) = rows.split_at(50);
    assert!(red[0].2.starts_with("truncated("));
    let err = full.iter().zip(red).map(|(a, b)| (a.1 - b.1).abs()).fold(0.0, f64::max);
    assert!(err > 1e-3, "{err}");
}

#[test]
fn json_bundle_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.json");
    let out = qmor(&[
        "simulate",
        "--builtin",
        "collective",
        "--n",
        "2",
        "--state",
        "00",
        "--lambda",
        "1,0.5,0.2",
        "--times",
        "0:1:5",
        "--compare",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["d"], 4);
    assert_eq!(v["trajectories"].as_array().unwrap().len(), 2);
    assert!(v["max_abs_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn sample_collective_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let sched = write(
        dir.path(),
        "s.json",
        r#"[{"lambda": [1, 0, 0], "times": {"random": {"count": 6}}},
            {"lambda": [0, 1, 0], "times": {"random": {"count": 6}}},
            {"lambda": [0.3, 0.2, 1], "times": {"random": {"count": 6, "interval": [0, 5]}}}]"#,
    );
    let args = ["sample", "--builtin", "collective", "--n", "3", "--state", "000", "--schedule", &sched, "--seed", "7"];
    let a = qmor(&args);
    let b = qmor(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["r"], 4);
    assert_eq!(v["complete"], true);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries[1]["seed"], 8);
    for e in entries {
        assert!(e["rank_after"].as_u64().unwrap() <= 4);
    }

    let other =
        qmor(&["sample", "--builtin", "collective", "--n", "3", "--state", "000", "--schedule", &sched, "--seed", "8"]);
    assert_ne!(json(&other)["entries"][0]["times"], v["entries"][0]["times"]);
}

#[test]
fn sample_flags_aliased_uniform_step() {
    let dir = tempfile::tempdir().unwrap();
    let model =
        write(dir.path(), "m.json", r#"{"n": 1, "terms": [{"label": "l", "paulis": [{"coeff": 1.0, "pauli": "Z"}]}]}"#);
    let sched = write(
        dir.path(),
        "s.json",
        r#"[{"lambda": [1], "times": {"uniform": {"start": 0, "step": 3.141592653589793, "count": 2}}}]"#,
    );
    let out = qmor(&["sample", "--model", &model, "--state", "+", "--schedule", &sched]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["entries"][0]["uniform_step_valid"], false);
    assert_eq!(v["entries"][0]["cyclic_dim"], 2);
    assert_eq!(v["r"], 1);
}

#[test]
fn empty_schedule_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let sched = write(dir.path(), "s.json", "[]");
    let out = qmor(&["sample", "--builtin", "collective", "--n", "2", "--state", "00", "--schedule", &sched]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exported_model_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for (name, n) in [("tfim", "3"), ("collective", "2"), ("random-tfim", "3")] {
        let path = dir.path().join(format!("{name}.json"));
        let p = path.to_str().unwrap();
        assert!(qmor(&["export", "--builtin", name, "--n", n, "--out", p]).status.success());
        let read = qmor::io::read_model(&path).unwrap();
        let built: qmor::model::Builtin = name.parse().unwrap();
        assert_eq!(read, built.build(n.parse().unwrap()).unwrap());
        let again = qmor(&["export", "--model", p]);
        assert_eq!(again.stdout, fs::read(&path).unwrap());
        let a = qmor(&["certify", "--builtin", name, "--n", n]);
        let b = qmor(&["certify", "--model", p]);
        assert_eq!((a.status.code(), a.stdout), (b.status.code(), b.stdout));
    }
}
