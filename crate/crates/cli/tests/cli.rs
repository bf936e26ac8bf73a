use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hammerstein"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn solve_2d_writes_table_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    assert!(run(&["solve-2d"], &out).status.success());
    let (header, rows) = csv_rows(&out.join("table1.csv"));
    assert_eq!(
        header,
        ["n", "du_norm_start_1", "du_norm_start_2", "du_norm_start_3"]
    );
    let third: Vec<f64> = rows.iter().filter_map(|r| r[3].parse().ok()).collect();
    let peak = third
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i + 1)
        .unwrap();
    assert!((6..=10).contains(&peak));
    // Ten significant digits.
    assert_eq!(rows[0][1], "2.121320344e1");

    let summary = json(&out.join("summary.json"));
    assert_eq!(summary["all_converged"], true);
    assert_eq!(summary["starts"].as_array().unwrap().len(), 3);
}

#[test]
fn looser_tolerance_gives_fewer_rows() {
    let dir = TempDir::new().unwrap();
    let (tight, loose) = (dir.path().join("tight"), dir.path().join("loose"));
    assert!(run(&["solve-2d"], &tight).status.success());
    assert!(run(&["solve-2d", "--tolerance", "1e-1"], &loose)
        .status
        .success());
    let rows = |p: &Path| csv_rows(&p.join("table1.csv")).1.len();
    assert!(rows(&loose) < rows(&tight));
}

#[test]
fn divergence_exits_nonzero_and_keeps_partial_table() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "blowup.json",
        r#"{"f": {"rows": [[-50, 0], [0, -50]]}, "starts": [{"u1": [1, 1], "v1": [1, 1]}]}"#,
    );
    let out = dir.path().join("run");
    let status = run(&["solve-2d", "--config", &cfg], &out).status;
    assert_eq!(status.code(), Some(1));
    let (_, rows) = csv_rows(&out.join("table1.csv"));
    assert!(!rows.is_empty());
    let summary = json(&out.join("summary.json"));
    assert!(summary["starts"][0]["error"]
        .as_str()
        .unwrap()
        .contains("diverged"));
}

#[test]
fn outputs_are_byte_identical_for_a_fixed_seed() {
    let dir = TempDir::new().unwrap();
    for (cmd, files) in [
        ("solve-2d", &["table1.csv", "summary.json"][..]),
        (
            "pendulum",
            &["amplitude.csv", "trace.csv", "report.json"][..],
        ),
        ("check-lemmas", &["report.json"][..]),
        ("validate-schedule", &["report.json"][..]),
    ] {
        let a = dir.path().join(format!("{cmd}-a"));
        let b = dir.path().join(format!("{cmd}-b"));
        run(&[cmd, "--seed", "42"], &a);
        run(&[cmd, "--seed", "42"], &b);
        for f in files {
            assert_eq!(
                fs::read(a.join(f)).unwrap(),
                fs::read(b.join(f)).unwrap(),
                "{cmd}/{f}"
            );
        }
    }
}

#[test]
fn pendulum_default_reports_residual_and_warnings() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    assert!(run(&["pendulum"], &out).status.success());
    let report = json(&out.join("report.json"));
    assert!(report["ode_residual"].as_f64().unwrap() <= 5e-2);
    assert!(report["monotonicity"]["f"]["eta_hat"].as_f64().unwrap() > 0.0);
    assert!(report["monotonicity"]["k"]["eta_hat"].as_f64().unwrap() <= 0.0);
    assert!(!report["warnings"].as_array().unwrap().is_empty());
    let (header, rows) = csv_rows(&out.join("amplitude.csv"));
    assert_eq!(header, ["t", "v"]);
    assert_eq!(rows.len(), 101);
    let (header, _) = csv_rows(&out.join("trace.csv"));
    assert_eq!(header, ["n", "du_norm", "dv_norm", "residual"]);
}

#[test]
fn unforced_pendulum_has_zero_amplitude() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "zero.json",
        r#"{"forcing": {"kind": "zero"}, "grid_size": 21}"#,
    );
    let out = dir.path().join("run");
    assert!(run(&["pendulum", "--config", &cfg], &out).status.success());
    let (_, rows) = csv_rows(&out.join("amplitude.csv"));
    assert!(rows.iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn pendulum_refinement_agrees() {
    let dir = TempDir::new().unwrap();
    let amplitude = |n: usize| {
        let cfg = write_config(
            &dir,
            &format!("n{n}.json"),
            &format!(r#"{{"grid_size": {n}}}"#),
        );
        let out = dir.path().join(format!("run{n}"));
        assert!(run(&["pendulum", "--config", &cfg], &out).status.success());
        csv_rows(&out.join("amplitude.csv"))
            .1
            .iter()
            .map(|r| r[1].parse::<f64>().unwrap())
            .collect::<Vec<_>>()
    };
    let coarse = amplitude(51);
    let fine = amplitude(101);
    for (c, f) in coarse.iter().zip(fine.iter().step_by(2)) {
        assert!((c - f).abs() <= 5e-3);
    }
}

#[test]
fn pendulum_cap_reached_is_a_failure() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let status = run(&["pendulum", "--max-iter", "3"], &out).status;
    assert_eq!(status.code(), Some(1));
    assert_eq!(json(&out.join("report.json"))["converged"], false);
}

#[test]
fn schedule_reports_never_fail_the_process() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("harmonic");
    assert!(run(&["validate-schedule"], &out).status.success());
    let r = json(&out.join("report.json"));
    assert_eq!(r["all_pass"], false);
    for cond in [
        "cond_sum_diverges",
        "cond_ratio_limit",
        "cond_lambda_little_o",
    ] {
        assert_eq!(r["report"][cond]["status"], "fail", "{cond}");
        assert!(!r["report"][cond]["probes"].as_array().unwrap().is_empty());
    }

    let cfg = write_config(
        &dir,
        "power.json",
        r#"{"schedule": {"kind": "power_law", "lambda_exponent": 0.6, "theta_exponent": 0.25, "scale": 0.49}}"#,
    );
    let out = dir.path().join("power");
    assert!(run(&["validate-schedule", "--config", &cfg], &out)
        .status
        .success());
    assert_eq!(json(&out.join("report.json"))["all_pass"], true);

    let cfg = write_config(
        &dir,
        "flat.json",
        r#"{"schedule": {"kind": "constant_theta", "theta": 0.4}}"#,
    );
    let out = dir.path().join("flat");
    assert!(run(&["validate-schedule", "--config", &cfg], &out)
        .status
        .success());
    assert_eq!(
        json(&out.join("report.json"))["report"]["cond_theta_to_zero"]["status"],
        "fail"
    );
}

#[test]
fn malformed_schedule_is_an_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"schedule": {"kind": "power_law", "lambda_exponent": -1, "theta_exponent": 0.25, "scale": 0.49}}"#,
    );
    let out = dir.path().join("bad");
    let status = run(&["validate-schedule", "--config", &cfg], &out).status;
    assert!(!status.success());
}

#[test]
fn check_lemmas_passes_at_p_two_and_reports_p_three() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    assert!(run(&["check-lemmas", "--seed", "9"], &out).status.success());
    let r = json(&out.join("report.json"));
    assert_eq!(r["passed"], true);
    let sweeps = r["sweeps"].as_array().unwrap();
    assert_eq!(sweeps[0]["p"], 2.0);
    assert_eq!(sweeps[0]["phi_bounds"]["passed"], 500);
    assert_eq!(sweeps[1]["asserted"], false);
}

#[test]
fn check_lemmas_rejects_zero_samples() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "zero.json", r#"{"samples": 0}"#);
    let out = dir.path().join("run");
    let output = run(&["check-lemmas", "--config", &cfg], &out);
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("sample"));
}

#[test]
fn shipped_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = TempDir::new().unwrap();
    for (cmd, file) in [
        ("solve-2d", "solve-2d.json"),
        ("pendulum", "pendulum.json"),
        ("validate-schedule", "schedule-power-law.json"),
        ("check-lemmas", "lemmas.json"),
    ] {
        let cfg = configs.join(file);
        let out = dir.path().join(cmd);
        let status = run(&[cmd, "--config", cfg.to_str().unwrap()], &out).status;
        assert!(status.success(), "{cmd} with {file}");
    }
}
