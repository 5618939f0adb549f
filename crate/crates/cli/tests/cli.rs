use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn seca() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seca"))
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    seca()
        .arg(cmd)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .env_remove("SECA_THREADS")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect()
}

const SMALL_METRICS: &str = r#"{
  "version": 1, "seed": 5, "n_qubits": 4, "layers": {"from": 1, "to": 10},
  "samples": {"exp_pairs": 40, "ent": 10, "grad": 10}, "bins": 10
}"#;

#[test]
fn metrics_sweep_emits_one_row_per_arch_layer_metric() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "m.json", SMALL_METRICS);
    let out = dir.path().join("out");
    let o = run("metrics", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(text.starts_with("arch,n,L,n_cz,l_cz,seed,metric,value,samples\n"));
    let rows = csv_rows(&out.join("metrics.csv"));
    assert_eq!(rows.len(), 3 * 10 * 3);
    let seca_l10: Vec<_> = rows.iter().filter(|r| r[0] == "seca" && r[2] == "10").collect();
    assert!(seca_l10.iter().all(|r| r[3] == "1" && r[4] == "5" && r[5] == "5"));
    assert!(rows.iter().filter(|r| r[0] == "feca" && r[2] == "7").all(|r| r[3] == "7" && r[4].is_empty()));
    assert!(rows.iter().filter(|r| r[0] == "nocz").all(|r| r[3] == "0"));
    for r in &rows {
        let v: f64 = r[7].parse().unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
}

#[test]
fn metrics_output_is_deterministic_across_threads_and_seed_flag() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "m.json", SMALL_METRICS);
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(code(&run("metrics", &cfg, &a, &["--threads", "1"])), 0);
    let o =
        seca().args(["metrics", "--config"]).arg(&cfg).arg("--out").arg(&b).env("SECA_THREADS", "3").output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(a.join("metrics.csv")).unwrap(), fs::read(b.join("metrics.csv")).unwrap());

    assert_eq!(code(&run("metrics", &cfg, &c, &["--seed", "6"])), 0);
    let rows = csv_rows(&c.join("metrics.csv"));
    assert!(rows.iter().all(|r| r[5] == "6"));
    assert_ne!(fs::read(a.join("metrics.csv")).unwrap(), fs::read(c.join("metrics.csv")).unwrap());
}

#[test]
fn connection_count_and_position_sweeps() {
    let dir = TempDir::new().unwrap();
    let ncz = write_config(
        dir.path(),
        "ncz.json",
        r#"{"version": 1, "seed": 0, "n_qubits": 4, "layers": [4], "sweep": "n_cz",
            "metrics": ["ent"], "samples": {"ent": 5}}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run("metrics", &ncz, &out, &[])), 0);
    let rows = csv_rows(&out.join("metrics.csv"));
    let counts: Vec<&str> = rows.iter().map(|r| r[3].as_str()).collect();
    assert_eq!(counts, ["1", "2", "3", "4"]);
    assert_eq!(rows[0][4], "2");

    let lcz = write_config(
        dir.path(),
        "lcz.json",
        r#"{"version": 1, "seed": 0, "n_qubits": 4, "layers": [3], "sweep": "l_cz", "l_cz": [1, 3],
            "metrics": ["ent"], "samples": {"ent": 5}}"#,
    );
    assert_eq!(code(&run("metrics", &lcz, &out, &[])), 0);
    let rows = csv_rows(&out.join("metrics.csv"));
    let layers: Vec<&str> = rows.iter().map(|r| r[4].as_str()).collect();
    assert_eq!(layers, ["1", "3"]);
    assert!(rows.iter().all(|r| r[0] == "l_cz" && r[3] == "1"));

    let bad = write_config(
        dir.path(),
        "bad.json",
        r#"{"version": 1, "seed": 0, "n_qubits": 4, "layers": [3], "sweep": "l_cz", "l_cz": [4]}"#,
    );
    assert_eq!(code(&run("metrics", &bad, &out, &[])), 2);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let cases = [
        r#"{"seed": 0, "n_qubits": 4, "layers": [1]}"#,
        r#"{"version": 9, "seed": 0, "n_qubits": 4, "layers": [1]}"#,
        r#"{"version": 1, "seed": 0, "n_qubits": 4, "layers": []}"#,
        r#"{"version": 1, "seed": 0, "n_qubits": 5, "layers": [1]}"#,
        r#"{"version": 1, "seed": 0, "n_qubits": 4, "layers": [1], "typo": true}"#,
        r#"{"version": 1, "n_qubits": 4, "layers": [1]}"#,
        r#"not json"#,
    ];
    for (k, json) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("c{k}.json"), json);
        let o = run("metrics", &cfg, &out, &[]);
        assert_eq!(code(&o), 2, "case {k}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run("metrics", &missing, &out, &[])), 2);
    let ok = write_config(dir.path(), "ok.json", SMALL_METRICS);
    assert_eq!(code(&run("metrics", &ok, &out, &["--threads", "0"])), 2);
}

#[test]
fn heisenberg_vqe_writes_repeats_and_traces() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.json",
        r#"{"version": 1, "seed": 2, "problem": "heisenberg", "n_qubits": 4, "layers": [1, 2],
            "couplings": [1.0, 2.0], "steps": [2, 4], "repeats": 3}"#,
    );
    let out = dir.path().join("out");
    let o = run("vqe", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let reps = csv_rows(&out.join("vqe_repeats.csv"));
    // 2 arch × 2 L × 2 J × 2 step budgets × (3 runs + mean + var)
    assert_eq!(reps.len(), 2 * 2 * 2 * 2 * 5);
    let first: Vec<_> = reps.iter().take(5).map(|r| r[6].clone()).collect();
    assert_eq!(first, ["0", "1", "2", "mean", "var"]);
    assert_eq!(&reps[0][7], "2");
    let exact: f64 = reps[0][10].parse().unwrap();
    assert!((exact + 2.0).abs() < 1e-9);
    let energies: Vec<f64> = reps[..3].iter().map(|r| r[8].parse().unwrap()).collect();
    let mean: f64 = reps[3][8].parse().unwrap();
    assert!((mean - energies.iter().sum::<f64>() / 3.0).abs() < 1e-12);

    let trace = csv_rows(&out.join("vqe_trace.csv"));
    // 2 × 2 × 2 groups × 3 runs × (steps 0..=4)
    assert_eq!(trace.len(), 8 * 3 * 5);
    assert_eq!(trace[0][7], "0");
    // Budget-2 rows in the repeat table equal step 2 of the trace.
    assert_eq!(reps[0][8], trace[2][8]);
}

#[test]
fn qubo_vqe_trace_schema_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "q.json",
        r#"{"version": 1, "seed": 0, "problem": "qubo", "n_qubits": 8, "layers": [2],
            "architectures": ["seca"], "densities": [0.5], "steps": [300], "repeats": 1}"#,
    );
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&run("vqe", &cfg, &a, &[])), 0);
    assert_eq!(code(&run("vqe", &cfg, &b, &["--threads", "2"])), 0);
    for f in ["vqe_repeats.csv", "vqe_trace.csv", "qubo_instance_0.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(a.join("vqe_trace.csv")).unwrap();
    assert!(header.starts_with("problem,arch,n,L,param,rep,seed,step,energy,e_var,v_score\n"));
    assert_eq!(csv_rows(&a.join("vqe_trace.csv")).len(), 301);

    let inst =
        seca_core::QuboInstance::from_json(&fs::read_to_string(a.join("qubo_instance_0.json")).unwrap()).unwrap();
    assert_eq!(inst.edges().len(), 14);
    let reps = csv_rows(&a.join("vqe_repeats.csv"));
    let mode_cost: f64 = reps[0][11].parse().unwrap();
    let (_, min) = seca_core::problems::brute_force_min(&inst).unwrap();
    assert!(mode_cost >= min - 1e-12);
}

fn cut_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    write_config(dir, name, &format!(r#"{{"version": 1, "seed": 0, {body}}}"#))
}

#[test]
fn cut_verify_passes_on_seca() {
    let dir = TempDir::new().unwrap();
    let cfg = cut_config(
        dir.path(),
        "c.json",
        r#""n_qubits": 6, "layers": 3, "theta_seeds": 10,
           "observables": [{"kind": "heisenberg"}, {"kind": "boundary_zz"}, {"kind": "pauli", "terms": [{"coeff": 0.5, "pauli": "XYZIZX"}]}]"#,
    );
    let out = dir.path().join("out");
    let o = run("cut-verify", &cfg, &out, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("cut_report.json")).unwrap()).unwrap();
    let keys: Vec<&str> = report.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["cuts", "terms_executed", "kappa", "value", "uncut_value", "abs_error"] {
        assert!(keys.contains(&k), "{k}");
    }
    assert_eq!(report["cuts"], 1);
    assert_eq!(report["terms_executed"], 10);
    assert!(report["abs_error"].as_f64().unwrap() < 1e-9);
    let checks: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("cut_checks.json")).unwrap()).unwrap();
    assert_eq!(checks.as_array().unwrap().len(), 30);
}

#[test]
fn cut_verify_flags_corrupted_coefficient() {
    let dir = TempDir::new().unwrap();
    let cfg =
        cut_config(dir.path(), "c.json", r#""n_qubits": 6, "layers": 3, "corrupt_term": {"index": 4, "scale": 1.01}"#);
    let o = run("cut-verify", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("max |error|"));
}

#[test]
fn cut_verify_without_connections_runs_one_term() {
    let dir = TempDir::new().unwrap();
    let cfg = cut_config(dir.path(), "c.json", r#""n_qubits": 4, "layers": 2, "architecture": "nocz""#);
    let out = dir.path().join("out");
    assert_eq!(code(&run("cut-verify", &cfg, &out, &[])), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("cut_report.json")).unwrap()).unwrap();
    assert_eq!(report["terms_executed"], 1);
    assert_eq!(report["cuts"], 0);
}

#[test]
fn cut_verify_rejects_oversized_or_over_budget_runs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let big = cut_config(dir.path(), "big.json", r#""n_qubits": 14, "layers": 1"#);
    assert_eq!(code(&run("cut-verify", &big, &out, &[])), 2);
    let budget =
        cut_config(dir.path(), "b.json", r#""n_qubits": 4, "layers": 3, "architecture": "feca", "budget": 100"#);
    assert_eq!(code(&run("cut-verify", &budget, &out, &[])), 2);
}

#[test]
fn plot_writes_one_svg_per_metric_deterministically() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "m.json", SMALL_METRICS);
    let out = dir.path().join("out");
    assert_eq!(code(&run("metrics", &cfg, &out, &[])), 0);
    let plot = write_config(dir.path(), "p.json", r#"{"version": 1, "input": "out/metrics.csv"}"#);
    let (p1, p2) = (dir.path().join("p1"), dir.path().join("p2"));
    assert_eq!(code(&run("plot", &plot, &p1, &[])), 0);
    assert_eq!(code(&run("plot", &plot, &p2, &[])), 0);
    for m in ["exp_kl", "ent", "grad_var"] {
        let f = format!("plot_{m}.svg");
        let a = fs::read_to_string(p1.join(&f)).unwrap();
        assert!(a.starts_with("<svg") && a.contains("polyline") && a.contains(">seca<"));
        assert_eq!(a, fs::read_to_string(p2.join(&f)).unwrap());
    }
    assert_eq!(fs::read_dir(&p1).unwrap().count(), 3);
}

#[test]
fn plot_repeat_table_with_error_bars() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        "v.json",
        r#"{"version": 1, "seed": 0, "problem": "heisenberg", "n_qubits": 4, "layers": [1, 2, 3],
            "steps": [3], "repeats": 3, "write_traces": false}"#,
    );
    let out = dir.path().join("out");
    assert_eq!(code(&run("vqe", &cfg, &out, &[])), 0);
    assert!(!out.join("vqe_trace.csv").exists());
    let plot = write_config(
        dir.path(),
        "p.json",
        &format!(r#"{{"version": 1, "input": {:?}, "y": "final_energy"}}"#, out.join("vqe_repeats.csv")),
    );
    assert_eq!(code(&run("plot", &plot, &out, &[])), 0);
    let svg = fs::read_to_string(out.join("plot_heisenberg_final_energy.svg")).unwrap();
    assert!(svg.contains("<path d=\"M"));
}

#[test]
fn plot_rejects_unknown_schema_and_empty_data() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    fs::write(dir.path().join("empty.csv"), "arch,n,L,n_cz,l_cz,seed,metric,value,samples\n").unwrap();
    fs::write(dir.path().join("other.csv"), "a,b\n1,2\n").unwrap();
    fs::write(dir.path().join("nan.csv"), "arch,n,L,n_cz,l_cz,seed,metric,value,samples\nseca,4,x,1,1,0,ent,0.5,10\n")
        .unwrap();
    for (k, input) in ["empty.csv", "other.csv", "nan.csv", "absent.csv"].iter().enumerate() {
        let plot = write_config(dir.path(), &format!("p{k}.json"), &format!(r#"{{"version": 1, "input": "{input}"}}"#));
        assert_eq!(code(&run("plot", &plot, &out, &[])), 2, "{input}");
    }
    fs::write(dir.path().join("ok.csv"), "arch,n,L,n_cz,l_cz,seed,metric,value,samples\nseca,4,2,1,1,0,ent,0.5,10\n")
        .unwrap();
    let bad_axis = write_config(dir.path(), "px.json", r#"{"version": 1, "input": "ok.csv", "x": "value"}"#);
    assert_eq!(code(&run("plot", &bad_axis, &out, &[])), 2);
}

#[test]
fn unknown_command_is_a_usage_error() {
    let o = seca().args(["train", "--config", "x.json"]).output().unwrap();
    assert_eq!(code(&o), 2);
}
