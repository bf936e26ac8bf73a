//! Browser bindings. Every export returns a JSON string so the page can plot
//! it directly; the `*_json` functions are the same calls without the
//! wasm-bindgen wrapper and are what the native tests exercise.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hammerstein::experiment::{trace_shape, MatrixExperiment, Start, TraceShape};
use hammerstein::pendulum::{
    assemble_hammerstein, default_pendulum_config, solve_discretized, Forcing, PendulumProblem,
};
use hammerstein::solver::{validate_schedule, Schedule, ScheduleReport};
use hammerstein::Error;

/// Largest grid the page may request; keeps a solve well under a second.
pub const MAX_GRID: usize = 401;

#[derive(Serialize)]
struct MatrixTrace {
    du_norms: Vec<f64>,
    diverged: Option<String>,
    shape: TraceShape,
}

/// `‖u_{n+1} − u_n‖` for the matrix experiment from one start.
pub fn matrix_trace_json(u1: &[f64], v1: &[f64], tolerance: f64) -> Result<String, String> {
    let exp = MatrixExperiment {
        starts: vec![Start {
            u1: u1.to_vec(),
            v1: v1.to_vec(),
        }],
        tolerance,
        max_iter: 5000,
        ..MatrixExperiment::default()
    };
    let cfg = exp.config_for(&exp.starts[0]).map_err(|e| e.to_string())?;
    let (trace, diverged) = match hammerstein::solver::solve_hammerstein(&exp.f, &exp.k, &cfg) {
        Ok(t) => (t, None),
        Err(Error::Diverged { step, trace, .. }) => {
            (*trace, Some(format!("diverged at step {step}")))
        }
        Err(e) => return Err(e.to_string()),
    };
    let out = MatrixTrace {
        du_norms: trace.du_norms(),
        diverged,
        shape: trace_shape(&trace, tolerance, &exp.f, &exp.k, &exp.p),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Amplitude {
    t: Vec<f64>,
    v: Vec<f64>,
    iterations: usize,
    converged: bool,
    ode_residual: f64,
}

/// Pendulum amplitude for `v'' + a² sin v = c sin(2πt)` on `n` nodes.
pub fn pendulum_json(a: f64, c: f64, n: usize) -> Result<String, String> {
    if n > MAX_GRID {
        return Err(format!("grid size {n} exceeds {MAX_GRID}"));
    }
    let prob = PendulumProblem::new(
        a,
        Forcing::Sine {
            amplitude: c,
            cycles: 1.0,
        },
        n,
    )
    .map_err(|e| e.to_string())?;
    let disc = assemble_hammerstein(&prob).map_err(|e| e.to_string())?;
    let cfg = default_pendulum_config(&disc).with_max_iter(5000);
    let sol = solve_discretized(&prob, &disc, &cfg).map_err(|e| e.to_string())?;
    let out = Amplitude {
        t: sol.nodes,
        v: sol.amplitude.coords().to_vec(),
        iterations: sol.trace.iterations(),
        converged: sol.trace.converged,
        ode_residual: sol.ode_residual,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ScheduleView {
    description: String,
    all_pass: bool,
    lambda: Vec<f64>,
    theta: Vec<f64>,
    report: ScheduleReport,
}

/// Validates a schedule given as JSON (for example
/// `{"kind": "power_law", "lambda_exponent": 0.6, "theta_exponent": 0.25, "scale": 0.49}`)
/// and samples its first `horizon` terms for plotting.
pub fn schedule_json(schedule: &str, horizon: usize) -> Result<String, String> {
    let s: Schedule = serde_json::from_str(schedule).map_err(|e| e.to_string())?;
    let report = validate_schedule(&s, horizon).map_err(|e| e.to_string())?;
    let out = ScheduleView {
        description: s.description(),
        all_pass: report.all_pass(),
        lambda: (1..=horizon).map(|n| s.lambda(n)).collect(),
        theta: (1..=horizon).map(|n| s.theta(n)).collect(),
        report,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn matrix_trace(
    u1x: f64,
    u1y: f64,
    v1x: f64,
    v1y: f64,
    tolerance: f64,
) -> Result<String, JsError> {
    matrix_trace_json(&[u1x, u1y], &[v1x, v1y], tolerance).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn pendulum(a: f64, c: f64, n: usize) -> Result<String, JsError> {
    pendulum_json(a, c, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn schedule(schedule: &str, horizon: usize) -> Result<String, JsError> {
    schedule_json(schedule, horizon).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn matrix_trace_peaks_in_the_expected_window() {
        let v = parse(&matrix_trace_json(&[4.0, -5.0], &[-7.0, 3.0], 1e-4).unwrap());
        let peak = v["shape"]["peak_n"].as_u64().unwrap();
        assert!((6..=10).contains(&peak));
        assert_eq!(v["shape"]["converged"], true);
        assert!(v["diverged"].is_null());
    }

    #[test]
    fn pendulum_curve_is_small_and_accurate() {
        let v = parse(&pendulum_json(0.5, 0.1, 101).unwrap());
        assert_eq!(v["t"].as_array().unwrap().len(), 101);
        assert!(v["ode_residual"].as_f64().unwrap() <= 5e-2);
        assert!(pendulum_json(0.5, 0.1, MAX_GRID + 1).is_err());
        assert!(pendulum_json(0.0, 0.1, 21).is_err());
    }

    #[test]
    fn schedule_view_matches_validator() {
        let harmonic = parse(&schedule_json(r#"{"kind": "harmonic"}"#, 1000).unwrap());
        assert_eq!(harmonic["all_pass"], false);
        assert_eq!(harmonic["lambda"].as_array().unwrap().len(), 1000);
        let good = parse(
            &schedule_json(
                r#"{"kind": "power_law", "lambda_exponent": 0.6, "theta_exponent": 0.25, "scale": 0.49}"#,
                1000,
            )
            .unwrap(),
        );
        assert_eq!(good["all_pass"], true);
        assert!(schedule_json(r#"{"kind": "nope"}"#, 1000).is_err());
    }
}
