use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use hammerstein::experiment::{trace_shape, MatrixExperiment, Start, TraceShape};
use hammerstein::functionals::{sweep_lemmas, LemmaSweep};
use hammerstein::operators::{monotonicity_report, MonotonicityReport, SampleSpec};
use hammerstein::pendulum::{
    assemble_hammerstein, default_pendulum_config, solve_discretized, PendulumProblem,
};
use hammerstein::solver::{validate_schedule as judge, ScheduleReport, MIN_HORIZON};
use hammerstein::{ConjugatePair, Error, IterationTrace, Schedule};

use crate::output::{num, prepare_dir, read_config, write_csv, write_json};
use crate::{Common, SolverFlags};

/// Splits a solver result into the trace that exists either way and the
/// divergence message, if any.
fn keep_trace(
    result: hammerstein::Result<IterationTrace>,
) -> Result<(IterationTrace, Option<String>)> {
    match result {
        Ok(trace) => Ok((trace, None)),
        Err(Error::Diverged {
            step,
            reason,
            trace,
        }) => Ok((*trace, Some(format!("diverged at step {step}: {reason}")))),
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct StartSummary {
    u1: Vec<f64>,
    v1: Vec<f64>,
    converged: bool,
    /// Step at which the stopping rule fired.
    convergence_iteration: Option<usize>,
    shape: TraceShape,
    error: Option<String>,
}

#[derive(Serialize)]
struct Solve2dSummary {
    schedule: Schedule,
    tolerance: f64,
    max_iter: usize,
    all_converged: bool,
    starts: Vec<StartSummary>,
}

pub fn solve_2d(common: &Common, flags: &SolverFlags) -> Result<bool> {
    let mut exp: MatrixExperiment = read_config(common.config.as_deref())?;
    if let Some(t) = flags.tolerance {
        exp.tolerance = t;
    }
    if let Some(m) = flags.max_iter {
        exp.max_iter = m;
    }
    prepare_dir(&common.out)?;

    let mut columns = Vec::new();
    let mut starts = Vec::new();
    for (start, result) in exp.starts.iter().zip(exp.run()) {
        let (trace, error) = keep_trace(result)?;
        let Start { u1, v1 } = start.clone();
        let shape = trace_shape(&trace, exp.tolerance, &exp.f, &exp.k, &exp.p);
        columns.push(trace.du_norms());
        starts.push(StartSummary {
            u1,
            v1,
            converged: trace.converged,
            convergence_iteration: trace.converged.then(|| trace.iterations()),
            shape,
            error,
        });
    }

    let header: Vec<String> = std::iter::once("n".to_string())
        .chain((1..=columns.len()).map(|i| format!("du_norm_start_{i}")))
        .collect();
    let rows_len = columns.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<Vec<String>> = (0..rows_len)
        .map(|i| {
            std::iter::once((i + 1).to_string())
                .chain(
                    columns
                        .iter()
                        .map(|c| c.get(i).map_or(String::new(), |&x| num(x))),
                )
                .collect()
        })
        .collect();
    write_csv(&common.out.join("table1.csv"), &header, &rows)?;

    let all_converged = starts.iter().all(|s| s.converged);
    write_json(
        &common.out.join("summary.json"),
        &Solve2dSummary {
            schedule: exp.schedule,
            tolerance: exp.tolerance,
            max_iter: exp.max_iter,
            all_converged,
            starts,
        },
    )?;
    Ok(all_converged)
}

#[derive(Deserialize)]
#[serde(default)]
struct MonotonicitySampling {
    samples: usize,
    half_width: f64,
}

impl Default for MonotonicitySampling {
    fn default() -> Self {
        Self {
            samples: 2000,
            half_width: 0.5,
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(default)]
struct PendulumConfig {
    #[serde(flatten)]
    problem: PendulumProblem,
    schedule: Option<Schedule>,
    tolerance: Option<f64>,
    max_iter: Option<usize>,
    seed: u64,
    monotonicity: MonotonicitySampling,
}

#[derive(Serialize)]
struct Monotonicity {
    f: MonotonicityReport,
    k: MonotonicityReport,
}

#[derive(Serialize)]
struct PendulumReport {
    problem: PendulumProblem,
    schedule: Schedule,
    tolerance: f64,
    max_iter: usize,
    seed: u64,
    converged: bool,
    iterations: usize,
    ode_residual: Option<f64>,
    max_amplitude: Option<f64>,
    monotonicity: Monotonicity,
    warnings: Vec<String>,
    error: Option<String>,
}

pub fn pendulum(common: &Common, flags: &SolverFlags) -> Result<bool> {
    let cfg: PendulumConfig = read_config(common.config.as_deref())?;
    let prob = cfg.problem;
    let seed = common.seed.unwrap_or(cfg.seed);
    let disc = assemble_hammerstein(&prob)?;
    let mut solve = default_pendulum_config(&disc);
    if let Some(s) = cfg.schedule {
        solve.schedule = s;
    }
    if let Some(t) = flags.tolerance.or(cfg.tolerance) {
        solve.tolerance = t;
    }
    if let Some(m) = flags.max_iter.or(cfg.max_iter) {
        solve.max_iter = m;
    }
    prepare_dir(&common.out)?;

    let pair = ConjugatePair::hilbert();
    let spec = SampleSpec::new(cfg.monotonicity.samples, seed)
        .with_half_width(cfg.monotonicity.half_width)
        .with_weights(disc.grid.weights().to_vec());
    let monotonicity = Monotonicity {
        f: monotonicity_report(&disc.f_op, &pair, &spec)?,
        k: monotonicity_report(&disc.k_op, &pair, &spec)?,
    };
    let mut warnings: Vec<String> = [("F", &monotonicity.f), ("K", &monotonicity.k)]
        .iter()
        .filter_map(|(name, r)| r.warning.as_ref().map(|w| format!("{name}: {w}")))
        .collect();
    if !warnings.is_empty() {
        warnings.push(
            "the problem lies outside the strong-monotonicity hypotheses; \
             convergence is observed, not guaranteed"
                .into(),
        );
    }

    let (trace, error, solution) = match solve_discretized(&prob, &disc, &solve) {
        Ok(sol) => (sol.trace.clone(), None, Some(sol)),
        Err(e) => {
            let (trace, error) = keep_trace(Err(e))?;
            (trace, error, None)
        }
    };

    let trace_rows: Vec<Vec<String>> = trace
        .steps
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                num(s.du_norm),
                num(s.dv_norm),
                num(s.residual),
            ]
        })
        .collect();
    write_csv(
        &common.out.join("trace.csv"),
        &["n", "du_norm", "dv_norm", "residual"].map(String::from),
        &trace_rows,
    )?;
    if let Some(sol) = &solution {
        let rows: Vec<Vec<String>> = sol
            .nodes
            .iter()
            .zip(sol.amplitude.coords())
            .map(|(&t, &v)| vec![num(t), num(v)])
            .collect();
        write_csv(
            &common.out.join("amplitude.csv"),
            &["t", "v"].map(String::from),
            &rows,
        )?;
    }

    let converged = trace.converged && error.is_none();
    write_json(
        &common.out.join("report.json"),
        &PendulumReport {
            problem: prob,
            schedule: solve.schedule,
            tolerance: solve.tolerance,
            max_iter: solve.max_iter,
            seed,
            converged,
            iterations: trace.iterations(),
            ode_residual: solution.as_ref().map(|s| s.ode_residual),
            max_amplitude: solution.as_ref().map(|s| s.amplitude.max_abs()),
            monotonicity,
            warnings,
            error,
        },
    )?;
    Ok(converged)
}

#[derive(Deserialize)]
#[serde(default)]
struct ScheduleConfig {
    schedule: Schedule,
    horizon: usize,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::harmonic(),
            horizon: MIN_HORIZON,
        }
    }
}

#[derive(Serialize)]
struct ScheduleOutput {
    schedule: Schedule,
    all_pass: bool,
    report: ScheduleReport,
}

/// Reporting only: verdicts never change the exit status.
pub fn validate_schedule(common: &Common) -> Result<bool> {
    let cfg: ScheduleConfig = read_config(common.config.as_deref())?;
    let report = judge(&cfg.schedule, cfg.horizon)?;
    prepare_dir(&common.out)?;
    write_json(
        &common.out.join("report.json"),
        &ScheduleOutput {
            schedule: cfg.schedule,
            all_pass: report.all_pass(),
            report,
        },
    )?;
    Ok(true)
}

#[derive(Deserialize)]
#[serde(default)]
struct LemmaConfig {
    samples: usize,
    dimension: usize,
    exponents: Vec<f64>,
    seed: u64,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self {
            samples: 500,
            dimension: 4,
            exponents: vec![2.0, 3.0],
            seed: 0,
        }
    }
}

#[derive(Serialize)]
struct SweepEntry {
    /// Only the Hilbert case is expected to hold; other exponents are
    /// reported for inspection.
    asserted: bool,
    all_passed: bool,
    #[serde(flatten)]
    sweep: LemmaSweep,
}

#[derive(Serialize)]
struct LemmaReport {
    seed: u64,
    samples: usize,
    dimension: usize,
    passed: bool,
    sweeps: Vec<SweepEntry>,
}

pub fn check_lemmas(common: &Common) -> Result<bool> {
    let cfg: LemmaConfig = read_config(common.config.as_deref())?;
    let seed = common.seed.unwrap_or(cfg.seed);
    let mut sweeps = Vec::new();
    for &p in &cfg.exponents {
        let pair = ConjugatePair::new(p).with_context(|| format!("exponent {p}"))?;
        let sweep = sweep_lemmas(&pair, cfg.samples, cfg.dimension, seed)?;
        sweeps.push(SweepEntry {
            asserted: pair.is_hilbert(),
            all_passed: sweep.all_passed(),
            sweep,
        });
    }
    let passed = sweeps.iter().all(|s| !s.asserted || s.all_passed);
    prepare_dir(&common.out)?;
    write_json(
        &common.out.join("report.json"),
        &LemmaReport {
            seed,
            samples: cfg.samples,
            dimension: cfg.dimension,
            passed,
            sweeps,
        },
    )?;
    Ok(passed)
}
