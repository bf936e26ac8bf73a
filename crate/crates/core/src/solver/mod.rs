//! The coupled iteration for `u + KFu = 0`.
//!
//! With `J = J^E` and `J* = J^{E*}`, starting from anchors `u₁ ∈ E`,
//! `v₁ ∈ E*`:
//!
//! ```text
//! u_{n+1} = J*( J u_n  − λ_n (F u_n − v_n + θ_n (J u_n  − J u₁ )) )
//! v_{n+1} = J ( J* v_n − λ_n (K v_n + u_n + θ_n (J* v_n − J* v₁)) )
//! ```
//!
//! In a Hilbert space both duality maps are the identity and the update
//! collapses to `u_{n+1} = u_n − λ_n (F u_n − v_n + θ_n (u_n − u₁))` (and the
//! analogous `v` update). [`solve_hammerstein`] runs the general form,
//! [`solve_hammerstein_hilbert`] the collapsed one.

mod schedule;

pub use schedule::{
    make_schedule, validate_schedule, Probe, RangeViolation, Schedule, ScheduleKind,
    ScheduleReport, Verdict, VerdictStatus, MIN_HORIZON,
};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::operators::{MatrixOperator, Operator};
use crate::spaces::{duality_map, inverse_duality_map, norm_p, norm_q, ConjugatePair, GridVector};

/// Iterates whose largest coordinate exceeds this are treated as divergent.
pub const DIVERGENCE_BOUND: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub pair: ConjugatePair,
    pub tolerance: f64,
    pub max_iter: usize,
    pub schedule: Schedule,
    pub u1: GridVector,
    /// Defaults to `F(u₁)` when absent.
    #[serde(default)]
    pub v1: Option<GridVector>,
}

impl SolveConfig {
    pub fn new(pair: ConjugatePair, schedule: Schedule, u1: GridVector) -> Self {
        Self {
            pair,
            tolerance: 1e-4,
            max_iter: 1000,
            schedule,
            u1,
            v1: None,
        }
    }

    pub fn with_v1(mut self, v1: GridVector) -> Self {
        self.v1 = Some(v1);
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidInput("max_iter must be at least 1".into()));
        }
        check_dim(dim, self.u1.len())?;
        if let Some(v1) = &self.v1 {
            check_dim(dim, v1.len())?;
        }
        Ok(())
    }
}

/// One recorded iteration: the iterate `(u_n, v_n)` and the size of the step
/// taken from it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub n: usize,
    pub u: GridVector,
    pub v: GridVector,
    /// `‖u_{n+1} − u_n‖`
    pub du_norm: f64,
    /// `‖v_{n+1} − v_n‖` in the dual norm.
    pub dv_norm: f64,
    /// `‖u_n + K F u_n‖`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub steps: Vec<TraceStep>,
    pub converged: bool,
    pub final_u: GridVector,
    pub final_v: GridVector,
}

impl IterationTrace {
    /// Number of recorded steps.
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    /// `(n, du_norm)` at the largest step size.
    pub fn du_peak(&self) -> Option<(usize, f64)> {
        self.steps
            .iter()
            .map(|s| (s.n, s.du_norm))
            .fold(None, |best, cur| match best {
                Some((_, d)) if d >= cur.1 => best,
                _ => Some(cur),
            })
    }

    /// First `n` with `du_norm < tol`.
    pub fn first_du_below(&self, tol: f64) -> Option<usize> {
        self.steps.iter().find(|s| s.du_norm < tol).map(|s| s.n)
    }

    pub fn du_norms(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.du_norm).collect()
    }
}

/// `‖u + K(F(u))‖_p`.
pub fn residual(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    u: &GridVector,
    pair: &ConjugatePair,
) -> Result<f64> {
    let kfu = k_op.apply(&f_op.apply(u)?)?;
    Ok(norm_p(&u.add(&kfu)?, pair))
}

/// State shared by every step of one solve.
pub struct Anchors {
    u1: GridVector,
    v1: GridVector,
    j_u1: GridVector,
    jstar_v1: GridVector,
}

impl Anchors {
    pub fn new(u1: GridVector, v1: GridVector, pair: &ConjugatePair) -> Result<Self> {
        let j_u1 = duality_map(&u1, pair)?;
        let jstar_v1 = inverse_duality_map(&v1, pair)?;
        Ok(Self {
            u1,
            v1,
            j_u1,
            jstar_v1,
        })
    }
}

/// One step of the general (Banach-space) update. Returns `(u_{n+1}, v_{n+1})`
/// together with `F u_n`, which the caller reuses for the residual.
#[allow(clippy::too_many_arguments)]
pub fn banach_step(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    pair: &ConjugatePair,
    anchors: &Anchors,
    lambda: f64,
    theta: f64,
    u: &GridVector,
    v: &GridVector,
) -> Result<(GridVector, GridVector, GridVector)> {
    let ju = duality_map(u, pair)?;
    let jstar_v = inverse_duality_map(v, pair)?;
    let fu = f_op.apply(u)?;
    let kv = k_op.apply(v)?;

    // J u_n − λ (F u_n − v_n + θ (J u_n − J u₁))
    let anchor_u = ju.sub(&anchors.j_u1)?;
    let drive_u = fu.sub(v)?.add_scaled(theta, &anchor_u)?;
    let u_next = inverse_duality_map(&ju.add_scaled(-lambda, &drive_u)?, pair)?;

    // J* v_n − λ (K v_n + u_n + θ (J* v_n − J* v₁))
    let anchor_v = jstar_v.sub(&anchors.jstar_v1)?;
    let drive_v = kv.add(u)?.add_scaled(theta, &anchor_v)?;
    let v_next = duality_map(&jstar_v.add_scaled(-lambda, &drive_v)?, pair)?;

    Ok((u_next, v_next, fu))
}

/// One step of the Hilbert-space update, with no duality maps.
pub fn hilbert_step(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    anchors: &Anchors,
    lambda: f64,
    theta: f64,
    u: &GridVector,
    v: &GridVector,
) -> Result<(GridVector, GridVector, GridVector)> {
    let fu = f_op.apply(u)?;
    let kv = k_op.apply(v)?;
    let u_next = u.add_scaled(
        -lambda,
        &fu.sub(v)?.add_scaled(theta, &u.sub(&anchors.u1)?)?,
    )?;
    let v_next = v.add_scaled(
        -lambda,
        &kv.add(u)?.add_scaled(theta, &v.sub(&anchors.v1)?)?,
    )?;
    Ok((u_next, v_next, fu))
}

fn run(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    cfg: &SolveConfig,
    step: impl Fn(
        &Anchors,
        f64,
        f64,
        &GridVector,
        &GridVector,
    ) -> Result<(GridVector, GridVector, GridVector)>,
) -> Result<IterationTrace> {
    check_dim(f_op.dim(), k_op.dim())?;
    cfg.validate(f_op.dim())?;
    let pair = &cfg.pair;
    let u1 = cfg.u1.clone();
    let v1 = match &cfg.v1 {
        Some(v1) => v1.clone(),
        None => f_op.apply(&u1)?,
    };
    let anchors = Anchors::new(u1.clone(), v1.clone(), pair)?;

    let mut trace = IterationTrace {
        steps: Vec::new(),
        converged: false,
        final_u: u1.clone(),
        final_v: v1.clone(),
    };
    let (mut u, mut v) = (u1, v1);
    for n in 1..=cfg.max_iter {
        let lambda = cfg.schedule.lambda(n);
        let theta = cfg.schedule.theta(n);
        let (u_next, v_next, fu) = step(&anchors, lambda, theta, &u, &v)?;
        let residual = norm_p(&u.add(&k_op.apply(&fu)?)?, pair);
        let du_norm = norm_p(&u_next.sub(&u)?, pair);
        let dv_norm = norm_q(&v_next.sub(&v)?, pair);
        trace.steps.push(TraceStep {
            n,
            u,
            v,
            du_norm,
            dv_norm,
            residual,
        });

        let blown_up = |x: &GridVector| !x.is_finite() || x.max_abs() > DIVERGENCE_BOUND;
        if blown_up(&u_next) || blown_up(&v_next) {
            trace.final_u = u_next;
            trace.final_v = v_next;
            return Err(Error::Diverged {
                step: n,
                reason: format!("iterate left the ball of radius {DIVERGENCE_BOUND:e}"),
                trace: Box::new(trace),
            });
        }
        u = u_next;
        v = v_next;
        if du_norm.max(dv_norm) < cfg.tolerance {
            trace.converged = true;
            break;
        }
    }
    trace.final_u = u;
    trace.final_v = v;
    Ok(trace)
}

/// Runs the general duality-map iteration until
/// `max(‖Δu‖, ‖Δv‖) < tolerance` or `max_iter` steps.
pub fn solve_hammerstein(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    cfg: &SolveConfig,
) -> Result<IterationTrace> {
    let pair = cfg.pair;
    run(f_op, k_op, cfg, |anchors, lambda, theta, u, v| {
        banach_step(f_op, k_op, &pair, anchors, lambda, theta, u, v)
    })
}

/// The same iteration written without duality maps; only valid at `p = 2`.
pub fn solve_hammerstein_hilbert(
    f_op: &dyn Operator,
    k_op: &dyn Operator,
    cfg: &SolveConfig,
) -> Result<IterationTrace> {
    if !cfg.pair.is_hilbert() {
        return Err(Error::Unsupported(format!(
            "the Hilbert-space update requires p = 2, got p = {}",
            cfg.pair.p()
        )));
    }
    run(f_op, k_op, cfg, |anchors, lambda, theta, u, v| {
        hilbert_step(f_op, k_op, anchors, lambda, theta, u, v)
    })
}

/// Solution of a linear instance by direct algebra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearSolution {
    pub u: GridVector,
    /// `det(I + KF)`
    pub determinant: f64,
}

/// For linear `F`, `K` the equation is `(I + KF) u = 0`, whose only solution
/// is `u = 0` when `I + KF` is nonsingular.
pub fn direct_linear_solution(
    f_op: &MatrixOperator,
    k_op: &MatrixOperator,
) -> Result<LinearSolution> {
    let n = f_op.dim();
    check_dim(n, k_op.dim())?;
    let m = DMatrix::identity(n, n) + k_op.entries() * f_op.entries();
    let determinant = m.clone().lu().determinant();
    let scale = m.norm().max(1.0).powi(n as i32);
    if !determinant.is_finite() || determinant.abs() <= 1e-12 * scale {
        return Err(Error::NonUniqueSolution { determinant });
    }
    Ok(LinearSolution {
        u: GridVector::unit(vec![0.0; n])?,
        determinant,
    })
}
