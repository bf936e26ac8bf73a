//! The 2×2 linear experiment: `F = [[7, 9], [-9, 25]]`, `K = [[3, -2], [2, 5]]`
//! on `ℝ²`, `λ_n = 1/n`, `θ_n = 1/(n+1)`, run from three starting pairs.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operators::MatrixOperator;
use crate::solver::{
    direct_linear_solution, solve_hammerstein, IterationTrace, Schedule, SolveConfig,
};
use crate::spaces::{norm_p, ConjugatePair, GridVector};

pub fn experiment_f() -> MatrixOperator {
    MatrixOperator::from_rows(&[vec![7.0, 9.0], vec![-9.0, 25.0]])
        .expect("square")
        .with_claim(7.0, 2.0)
}

pub fn experiment_k() -> MatrixOperator {
    MatrixOperator::from_rows(&[vec![3.0, -2.0], vec![2.0, 5.0]])
        .expect("square")
        .with_claim(3.0, 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Start {
    pub u1: Vec<f64>,
    pub v1: Vec<f64>,
}

impl Start {
    pub fn label(&self) -> String {
        format!("u1={:?} v1={:?}", self.u1, self.v1)
    }
}

pub fn experiment_starts() -> Vec<Start> {
    vec![
        Start {
            u1: vec![1.0, 1.0],
            v1: vec![1.0, 1.0],
        },
        Start {
            u1: vec![1.0, 0.5],
            v1: vec![0.25, 1.0],
        },
        Start {
            u1: vec![4.0, -5.0],
            v1: vec![-7.0, 3.0],
        },
    ]
}

/// Inputs of the matrix experiment. Every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatrixExperiment {
    pub f: MatrixOperator,
    pub k: MatrixOperator,
    pub starts: Vec<Start>,
    pub schedule: Schedule,
    pub tolerance: f64,
    pub max_iter: usize,
    pub p: ConjugatePair,
}

impl Default for MatrixExperiment {
    fn default() -> Self {
        Self {
            f: experiment_f(),
            k: experiment_k(),
            starts: experiment_starts(),
            schedule: Schedule::harmonic(),
            tolerance: 1e-4,
            max_iter: 10_000,
            p: ConjugatePair::hilbert(),
        }
    }
}

impl MatrixExperiment {
    pub fn config_for(&self, start: &Start) -> Result<SolveConfig> {
        Ok(
            SolveConfig::new(self.p, self.schedule, GridVector::unit(start.u1.clone())?)
                .with_v1(GridVector::unit(start.v1.clone())?)
                .with_tolerance(self.tolerance)
                .with_max_iter(self.max_iter),
        )
    }

    /// Solves every start on its own thread; results keep the start order.
    pub fn run(&self) -> Vec<Result<IterationTrace>> {
        std::thread::scope(|scope| {
            let handles: Vec<_> = self
                .starts
                .iter()
                .map(|start| {
                    scope.spawn(move || {
                        let cfg = self.config_for(start)?;
                        solve_hammerstein(&self.f, &self.k, &cfg)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        })
    }
}

/// Summary of one trace: where it peaks, when it settles, how close it ends.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceShape {
    pub converged: bool,
    pub iterations: usize,
    pub peak_n: usize,
    pub peak_du: f64,
    pub first_du_below_tolerance: Option<usize>,
    pub final_u: Vec<f64>,
    /// `‖final_u − u*‖` against the direct linear solution.
    pub oracle_error: Option<f64>,
}

pub fn trace_shape(
    trace: &IterationTrace,
    tolerance: f64,
    f: &MatrixOperator,
    k: &MatrixOperator,
    pair: &ConjugatePair,
) -> TraceShape {
    let (peak_n, peak_du) = trace.du_peak().unwrap_or((0, 0.0));
    let oracle_error = direct_linear_solution(f, k)
        .ok()
        .and_then(|sol| trace.final_u.sub(&sol.u).ok())
        .map(|d| norm_p(&d, pair));
    TraceShape {
        converged: trace.converged,
        iterations: trace.iterations(),
        peak_n,
        peak_du,
        first_du_below_tolerance: trace.first_du_below(tolerance),
        final_u: trace.final_u.coords().to_vec(),
        oracle_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_experiment_converges_for_every_start() {
        let exp = MatrixExperiment::default();
        for (trace, start) in exp.run().into_iter().zip(&exp.starts) {
            let trace = trace.unwrap();
            assert!(trace.converged, "{}", start.label());
            let shape = trace_shape(&trace, exp.tolerance, &exp.f, &exp.k, &exp.p);
            assert!((6..=10).contains(&shape.peak_n), "{shape:?}");
        }
    }

    #[test]
    fn experiment_json_defaults() {
        let exp: MatrixExperiment = serde_json::from_str(r#"{"tolerance": 0.1}"#).unwrap();
        assert_eq!(exp.tolerance, 0.1);
        assert_eq!(exp.f, experiment_f());
        assert_eq!(exp.starts.len(), 3);
    }

    #[test]
    fn looser_tolerance_stops_earlier() {
        let tight = MatrixExperiment::default();
        let loose = MatrixExperiment {
            tolerance: 1e-1,
            ..MatrixExperiment::default()
        };
        let a = tight.run().remove(0).unwrap();
        let b = loose.run().remove(0).unwrap();
        assert!(b.iterations() < a.iterations());
    }
}
