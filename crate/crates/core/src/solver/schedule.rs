//! Step-size (`λ_n`) and anchoring (`θ_n`) sequences, and a numerical probe
//! of the conditions the convergence theorem places on them:
//!
//! * (i) `θ_n → 0`
//! * (ii) `Σ λ_n θ_n = ∞` and `λ_n = o(θ_n)`
//! * (iii) `((θ_{n−1}/θ_n) − 1) / (λ_n θ_n) → 0`
//!
//! Limits cannot be decided from finitely many terms. Each condition is
//! judged from probe values at `N, 2N, 5N, 10N` for a horizon `N`: the local
//! log-log slope between `N` and `10N` classifies the tail as decaying,
//! flat/growing, or borderline, and non-monotone probes are reported as
//! inconclusive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The sequence families understood by [`make_schedule`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    /// `λ_n = 1/n`, `θ_n = 1/(n+1)`. Note `λ_1 = 1` lies outside `(0, 1)`.
    Harmonic,
    /// `λ_n = (n+1)^{−a}`, `θ_n = scale·(n+1)^{−b}`; the index shift keeps
    /// `λ_1 < 1` and `θ_1 < 1/2`.
    PowerLaw {
        lambda_exponent: f64,
        theta_exponent: f64,
        scale: f64,
    },
    /// `λ_n = 1/n` with a constant `θ_n`.
    ConstantTheta { theta: f64 },
}

/// A validated `(λ_n, θ_n)` pair of sequences, indexed from `n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScheduleKind", into = "ScheduleKind")]
pub struct Schedule {
    kind: ScheduleKind,
}

impl TryFrom<ScheduleKind> for Schedule {
    type Error = Error;

    fn try_from(kind: ScheduleKind) -> Result<Self> {
        make_schedule(kind)
    }
}

impl From<Schedule> for ScheduleKind {
    fn from(s: Schedule) -> Self {
        s.kind
    }
}

pub fn make_schedule(kind: ScheduleKind) -> Result<Schedule> {
    match kind {
        ScheduleKind::Harmonic => {}
        ScheduleKind::PowerLaw {
            lambda_exponent: a,
            theta_exponent: b,
            scale,
        } => {
            if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
                return Err(Error::InvalidSchedule(format!(
                    "power-law exponents must be positive, got a = {a}, b = {b}"
                )));
            }
            if !(scale > 0.0 && scale <= 0.5) {
                return Err(Error::InvalidSchedule(format!(
                    "scale {scale} puts theta_n outside (0, 1/2)"
                )));
            }
        }
        ScheduleKind::ConstantTheta { theta } => {
            if !(theta > 0.0 && theta < 0.5) {
                return Err(Error::InvalidSchedule(format!(
                    "constant theta {theta} is outside (0, 1/2)"
                )));
            }
        }
    }
    Ok(Schedule { kind })
}

impl Schedule {
    pub fn harmonic() -> Self {
        Self {
            kind: ScheduleKind::Harmonic,
        }
    }

    pub fn power_law(lambda_exponent: f64, theta_exponent: f64, scale: f64) -> Result<Self> {
        make_schedule(ScheduleKind::PowerLaw {
            lambda_exponent,
            theta_exponent,
            scale,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    /// `λ_n`, for `n ≥ 1`.
    pub fn lambda(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            ScheduleKind::Harmonic | ScheduleKind::ConstantTheta { .. } => 1.0 / n,
            ScheduleKind::PowerLaw {
                lambda_exponent, ..
            } => (n + 1.0).powf(-lambda_exponent),
        }
    }

    /// `θ_n`, for `n ≥ 1`.
    pub fn theta(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            ScheduleKind::Harmonic => 1.0 / (n + 1.0),
            ScheduleKind::PowerLaw {
                theta_exponent,
                scale,
                ..
            } => scale * (n + 1.0).powf(-theta_exponent),
            ScheduleKind::ConstantTheta { theta } => theta,
        }
    }

    pub fn description(&self) -> String {
        match self.kind {
            ScheduleKind::Harmonic => "lambda_n = 1/n, theta_n = 1/(n+1)".to_string(),
            ScheduleKind::PowerLaw {
                lambda_exponent,
                theta_exponent,
                scale,
            } => format!(
                "lambda_n = (n+1)^-{lambda_exponent}, theta_n = {scale}*(n+1)^-{theta_exponent}"
            ),
            ScheduleKind::ConstantTheta { theta } => {
                format!("lambda_n = 1/n, theta_n = {theta}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub n: usize,
    pub value: f64,
}

/// A judged condition together with the numbers it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub probes: Vec<Probe>,
    /// Log-log slope of the probed quantity between `N` and `10N`.
    pub slope: f64,
    pub note: String,
}

/// The first index where `λ_n ∉ (0, 1)` or `θ_n ∉ (0, 1/2)`, if any.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeViolation {
    pub n: usize,
    pub lambda: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub description: String,
    pub horizon: usize,
    pub cond_theta_to_zero: Verdict,
    pub cond_sum_diverges: Verdict,
    pub cond_lambda_little_o: Verdict,
    pub cond_ratio_limit: Verdict,
    pub range_violation: Option<RangeViolation>,
    /// `Σ_{n ≤ N} λ_n θ_n` and `Σ_{n ≤ 10N} λ_n θ_n`.
    pub partial_sums: [f64; 2],
}

impl ScheduleReport {
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 4] {
        [
            ("theta_to_zero", &self.cond_theta_to_zero),
            ("sum_diverges", &self.cond_sum_diverges),
            ("lambda_little_o_theta", &self.cond_lambda_little_o),
            ("ratio_limit", &self.cond_ratio_limit),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts()
            .iter()
            .all(|(_, v)| v.status == VerdictStatus::Pass)
    }
}

pub const MIN_HORIZON: usize = 1000;

// Slopes at or below this count as algebraic decay to zero.
const DECAY_SLOPE: f64 = -0.05;
// Slopes at or above this count as a flat or growing tail.
const FLAT_SLOPE: f64 = -0.005;
// Half-width of the borderline band around the harmonic slope −1 for (ii).
const HARMONIC_BAND: f64 = 0.05;

fn probe_points(horizon: usize) -> [usize; 4] {
    [horizon, 2 * horizon, 5 * horizon, 10 * horizon]
}

fn probes(horizon: usize, f: impl Fn(usize) -> f64) -> Vec<Probe> {
    probe_points(horizon)
        .iter()
        .map(|&n| Probe { n, value: f(n) })
        .collect()
}

fn log_slope(first: f64, last: f64) -> f64 {
    (last / first).ln() / 10f64.ln()
}

fn is_monotone(values: &[f64]) -> bool {
    let dec = values.windows(2).all(|w| w[1] <= w[0]);
    let inc = values.windows(2).all(|w| w[1] >= w[0]);
    dec || inc
}

/// Judges whether a quantity tends to zero from its probes.
fn decay_verdict(probes: Vec<Probe>, what: &str) -> Verdict {
    let values: Vec<f64> = probes.iter().map(|p| p.value.abs()).collect();
    let first = values[0];
    let last = values[values.len() - 1];
    if values.iter().any(|v| !v.is_finite()) {
        return Verdict {
            status: VerdictStatus::Inconclusive,
            probes,
            slope: f64::NAN,
            note: format!("{what}: non-finite probe value"),
        };
    }
    if values.iter().all(|&v| v == 0.0) {
        return Verdict {
            status: VerdictStatus::Pass,
            probes,
            slope: f64::NEG_INFINITY,
            note: format!("{what} is identically zero on the probes"),
        };
    }
    let slope = if first == 0.0 {
        f64::INFINITY
    } else {
        log_slope(first, last)
    };
    let (status, note) = if !is_monotone(&values) {
        (
            VerdictStatus::Inconclusive,
            format!("{what}: probes are not monotone"),
        )
    } else if slope <= DECAY_SLOPE {
        (
            VerdictStatus::Pass,
            format!("{what} decays like n^{slope:.3}"),
        )
    } else if slope >= FLAT_SLOPE {
        (
            VerdictStatus::Fail,
            format!("{what} does not decay (slope {slope:.3}, last probe {last:.6e})"),
        )
    } else {
        (
            VerdictStatus::Inconclusive,
            format!("{what}: slope {slope:.3} too shallow to decide"),
        )
    };
    Verdict {
        status,
        probes,
        slope,
        note,
    }
}

/// Numerically probes conditions (i) to (iii) out to `10 × horizon` terms.
pub fn validate_schedule(s: &Schedule, horizon: usize) -> Result<ScheduleReport> {
    if horizon < MIN_HORIZON {
        return Err(Error::InvalidInput(format!(
            "horizon {horizon} is below the minimum {MIN_HORIZON}"
        )));
    }

    // (i): the spec-level probe θ_N < 1e−2·θ_1 passes directly; otherwise the
    // tail slope decides.
    let theta_probes = probes(horizon, |n| s.theta(n));
    let mut cond_i = decay_verdict(theta_probes, "theta_n");
    if cond_i.status != VerdictStatus::Pass && s.theta(horizon) < 1e-2 * s.theta(1) {
        cond_i.status = VerdictStatus::Pass;
        cond_i.note = format!("theta_N below 1e-2 * theta_1 ({})", cond_i.note);
    }

    let term = |n: usize| s.lambda(n) * s.theta(n);
    let sum_probes = probes(horizon, term);
    let t_first = sum_probes[0].value;
    let t_last = sum_probes[sum_probes.len() - 1].value;
    let term_slope = log_slope(t_first, t_last);
    let values: Vec<f64> = sum_probes.iter().map(|p| p.value).collect();
    let (status, note) =
        if !values.iter().all(|v| v.is_finite() && *v > 0.0) || !is_monotone(&values) {
            (
                VerdictStatus::Inconclusive,
                "lambda_n*theta_n probes are not positive and monotone".to_string(),
            )
        } else if term_slope >= -1.0 + HARMONIC_BAND {
            (
                VerdictStatus::Pass,
                format!("terms decay like n^{term_slope:.3}, slower than 1/n: series diverges"),
            )
        } else if term_slope <= -1.0 - HARMONIC_BAND {
            (
                VerdictStatus::Fail,
                format!("terms decay like n^{term_slope:.3}, faster than 1/n: series converges"),
            )
        } else {
            (
                VerdictStatus::Inconclusive,
                format!("terms decay like n^{term_slope:.3}, too close to 1/n to decide"),
            )
        };
    let cond_ii_sum = Verdict {
        status,
        probes: sum_probes,
        slope: term_slope,
        note,
    };

    let cond_ii_o = decay_verdict(
        probes(horizon, |n| s.lambda(n) / s.theta(n)),
        "lambda_n/theta_n",
    );

    let cond_iii = decay_verdict(
        probes(horizon, |n| {
            ((s.theta(n - 1) / s.theta(n)) - 1.0) / (s.lambda(n) * s.theta(n))
        }),
        "((theta_{n-1}/theta_n) - 1)/(lambda_n*theta_n)",
    );

    let range_violation = (1..=horizon).find_map(|n| {
        let (lambda, theta) = (s.lambda(n), s.theta(n));
        let ok = lambda > 0.0 && lambda < 1.0 && theta > 0.0 && theta < 0.5;
        (!ok).then_some(RangeViolation { n, lambda, theta })
    });

    let mut sum_n = 0.0;
    let mut sum_10n = 0.0;
    for n in 1..=10 * horizon {
        sum_10n += term(n);
        if n == horizon {
            sum_n = sum_10n;
        }
    }

    Ok(ScheduleReport {
        description: s.description(),
        horizon,
        cond_theta_to_zero: cond_i,
        cond_sum_diverges: cond_ii_sum,
        cond_lambda_little_o: cond_ii_o,
        cond_ratio_limit: cond_iii,
        range_violation,
        partial_sums: [sum_n, sum_10n],
    })
}
