use std::path::PathBuf;
use std::process::{Command, Output};

fn isp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isp"))
        .args(args)
        .env_remove("ISP_OUTPUT_DIR")
        .output()
        .expect("run isp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("isp-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn simulate_k3_schedule_reaches_sink() {
    let o = isp(&[
        "simulate",
        "--k",
        "3",
        "--n",
        "16",
        "--schedule",
        "k3-paper",
        "--stride",
        "10000",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iteration,eee,eeN,eNe,eNN,Nee,NeN,NNe,NNN,sink_probability"
    );
    let last = text.lines().last().unwrap();
    let p: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(p > 0.99, "{last}");
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--k", "2", "--n", "12", "--schedule", "pg2"];
    assert_eq!(stdout(&isp(&args)), stdout(&isp(&args)));
}

#[test]
fn simulate_reads_schedule_file() {
    let dir = scratch_dir("schedule");
    let file = dir.join("s.json");
    std::fs::write(
        &file,
        r#"{"k": 2, "N": 1024, "phases": [{"op": "g2", "reps": 25}, {"op": "g1", "coeff": 0.785}]}"#,
    )
    .unwrap();
    let out = dir.join("t.csv");
    let o = isp(&[
        "simulate",
        "--schedule-file",
        file.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    assert_eq!(text.lines().count(), 2 + 25 + 25);
}

#[test]
fn output_dir_from_environment() {
    let dir = scratch_dir("env");
    let o = Command::new(env!("CARGO_BIN_EXE_isp"))
        .args(["graph", "--k", "3"])
        .env("ISP_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    let dot = std::fs::read_to_string(dir.join("graph.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
}

#[test]
fn size_must_match_n() {
    let o = isp(&["simulate", "--k", "2", "--n", "10", "--size", "1000"]);
    assert_eq!(o.status.code(), Some(2));
    let o = isp(&["simulate", "--k", "2", "--size", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn schedule_needs_matching_k() {
    let o = isp(&["simulate", "--k", "2", "--schedule", "k3-paper"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn graph_json_and_limits() {
    let o = isp(&["graph", "--k", "3", "--approx", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k"], 3);
    assert_eq!(isp(&["graph", "--k", "9"]).status.code(), Some(2));
}

#[test]
fn verify_passes_and_reports_forms() {
    let o = isp(&[
        "verify",
        "--max-k",
        "2",
        "--max-n",
        "3",
        "--sequences",
        "5",
        "--length",
        "40",
        "--parallel-form",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("parallel-form compute-uncompute deviation 0 reproduces"));
    assert!(text.contains("parallel-form printed"));
    assert!(text.trim_end().ends_with("PASS"));
}

#[test]
fn verify_catches_corrupted_operator() {
    let o = isp(&[
        "verify",
        "--max-k",
        "1",
        "--max-n",
        "2",
        "--sequences",
        "3",
        "--corrupt",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL reduced-vs-full k=1 n=1 sequence=0"));
}

#[test]
fn analyze_speedup_table() {
    let o = isp(&["analyze", "speedup", "--n", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("method,k,coefficient,success_probability\n"));
    let ratio: f64 = text
        .lines()
        .find(|l| l.starts_with("sqrt2-ratio"))
        .and_then(|l| l.split(',').nth(2))
        .unwrap()
        .parse()
        .unwrap();
    assert!((ratio - std::f64::consts::SQRT_2).abs() < 0.02);
}

#[test]
fn analyze_json_uses_twelve_digits() {
    let o = isp(&["analyze", "lower-bound", "--k", "3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lower_bound_constant"].as_f64().unwrap(), 0.908560296416);
    assert_eq!(v["inequality_holds"], true);
}

#[test]
fn analyze_sweeps_write_csv() {
    for metric in [
        "approx-error",
        "sole-pg",
        "perturbation",
        "closed-form",
        "cube",
    ] {
        let o = isp(&["analyze", metric, "--n-min", "8", "--n-max", "14"]);
        assert!(o.status.success(), "{metric}");
        assert!(stdout(&o).starts_with("metric,N,value,seed\n"), "{metric}");
        assert_eq!(stdout(&o).lines().count(), 5, "{metric}");
    }
}

#[test]
fn analyze_optimize_k3() {
    let o = isp(&["analyze", "optimize-k3", "--n", "18"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let get = |q: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{q},")))
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((get("c1") - 0.78).abs() < 0.02);
    assert!((get("total_coefficient") - 1.5).abs() < 0.02);
}
