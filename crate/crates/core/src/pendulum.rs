//! Forced pendulum `v'' + a² sin v = z` on `[0, 1]` with `v(0) = v(1) = 0`,
//! recast as a Hammerstein equation through the Green function of
//! `v'' = 0` with the same boundary values.
//!
//! The Green function is sought as `A + Bt` left of the source point `x` and
//! `C + Dt` right of it. Boundary values give `A = 0` and `C + D = 0`,
//! continuity at `t = x` gives `C + (D − B)x = 0`, and the unit jump of
//! `∂G/∂t` gives `D − B = 1`, hence
//!
//! ```text
//! G(t, x) = t(x − 1)   for 0 ≤ t ≤ x
//!         = x(t − 1)   for x < t ≤ 1
//! ```
//!
//! and `w ↦ ∫ G(·, x) w(x) dx` solves `v'' = w`. With `g = ∫ G z`, the
//! pendulum becomes `v = g − ∫ G a² sin v`. Writing `v = u − ĝ` with the
//! offset `ĝ = −g` turns this into `u + K F u = 0` where `K` integrates
//! against `G` and `(F u)(x) = a² sin(u(x) − ĝ(x))`.

use nalgebra::{DMatrix, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::operators::{IntegralOperator, NemytskiiOperator};
use crate::solver::{solve_hammerstein, IterationTrace, Schedule, SolveConfig};
use crate::spaces::{ConjugatePair, GridVector};

/// Coefficients of the two affine branches of `G(·, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Green function of `v'' = w`, `v(0) = v(1) = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GreenFunction;

pub fn build_green_function() -> GreenFunction {
    GreenFunction
}

impl GreenFunction {
    /// Solves the four defining conditions for the branch coefficients at
    /// source point `x`.
    pub fn coefficients(&self, x: f64) -> GreenCoefficients {
        // Unknowns (A, B, C, D).
        #[rustfmt::skip]
        let m = Matrix4::new(
            1.0, 0.0, 0.0, 0.0,   // G(0, x) = A = 0
            0.0, 0.0, 1.0, 1.0,   // G(1, x) = C + D = 0
            1.0, x, -1.0, -x,     // (A + Bx) − (C + Dx) = 0
            0.0, -1.0, 0.0, 1.0,  // D − B = 1
        );
        let rhs = Vector4::new(0.0, 0.0, 0.0, 1.0);
        let sol = m
            .lu()
            .solve(&rhs)
            .expect("Green conditions are nonsingular");
        GreenCoefficients {
            a: sol[0],
            b: sol[1],
            c: sol[2],
            d: sol[3],
        }
    }

    /// Closed form: `A = 0`, `B = x − 1`, `C = −x`, `D = x`.
    pub fn closed_form_coefficients(&self, x: f64) -> GreenCoefficients {
        GreenCoefficients {
            a: 0.0,
            b: x - 1.0,
            c: -x,
            d: x,
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        if t <= x {
            t * (x - 1.0)
        } else {
            x * (t - 1.0)
        }
    }

    /// One-sided `∂G/∂t` on the left (`0 ≤ t < x`) and right (`x < t ≤ 1`).
    pub fn slopes(&self, x: f64) -> (f64, f64) {
        let c = self.closed_form_coefficients(x);
        (c.b, c.d)
    }
}

/// Nodes in `[0, 1]` with composite-trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn uniform(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 3 nodes, got {n}"
            )));
        }
        let h = 1.0 / (n - 1) as f64;
        let nodes = (0..n)
            .map(|i| if i == n - 1 { 1.0 } else { i as f64 * h })
            .collect();
        Self::from_nodes(nodes)
    }

    /// Arbitrary strictly increasing nodes covering `[0, 1]`.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "grid needs at least 3 nodes, got {n}"
            )));
        }
        if nodes[0] != 0.0 || nodes[n - 1] != 1.0 {
            return Err(Error::InvalidInput(
                "grid must start at 0 and end at 1".into(),
            ));
        }
        if nodes
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidInput(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = nodes[i + 1] - nodes[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Spacing, if the nodes are equally spaced.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let h = self.nodes[1] - self.nodes[0];
        self.nodes
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12)
            .then_some(h)
    }

    pub fn vector(&self, coords: Vec<f64>) -> Result<GridVector> {
        GridVector::new(coords, self.weights.clone())
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridVector {
        self.vector(self.nodes.iter().map(|&t| f(t)).collect())
            .expect("grid weights are valid")
    }
}

/// `M_ij = G(t_i, t_j)`.
pub fn green_kernel_matrix(g: &GreenFunction, grid: &Grid) -> DMatrix<f64> {
    let t = grid.nodes();
    DMatrix::from_fn(t.len(), t.len(), |i, j| g.eval(t[i], t[j]))
}

/// `g_i = Σ_j w_j G(t_i, t_j) z(t_j)`, the discrete solution of `v'' = z`.
pub fn compute_g(z: impl Fn(f64) -> f64, grid: &Grid) -> GridVector {
    let green = build_green_function();
    let t = grid.nodes();
    let wz: Vec<f64> = t
        .iter()
        .zip(grid.weights())
        .map(|(&x, w)| w * z(x))
        .collect();
    let coords = t
        .iter()
        .map(|&ti| {
            t.iter()
                .zip(&wz)
                .map(|(&xj, f)| green.eval(ti, xj) * f)
                .sum()
        })
        .collect();
    grid.vector(coords).expect("grid weights are valid")
}

/// Driving force `z` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forcing {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude · sin(2π · cycles · t)`; odd about `t = 1/2` for integer
    /// `cycles`.
    Sine {
        amplitude: f64,
        #[serde(default = "one")]
        cycles: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl Forcing {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Forcing::Zero => 0.0,
            Forcing::Constant { value } => value,
            Forcing::Sine { amplitude, cycles } => {
                amplitude * (2.0 * std::f64::consts::PI * cycles * t).sin()
            }
        }
    }
}

impl Default for Forcing {
    fn default() -> Self {
        Forcing::Sine {
            amplitude: 0.1,
            cycles: 1.0,
        }
    }
}

/// Defaults: `a = 0.5`, `z = 0.1 sin(2πt)`, 101 nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PendulumProblem {
    pub amplitude_a: f64,
    pub forcing: Forcing,
    pub grid_size: usize,
}

impl Default for PendulumProblem {
    fn default() -> Self {
        Self {
            amplitude_a: 0.5,
            forcing: Forcing::default(),
            grid_size: 101,
        }
    }
}

impl PendulumProblem {
    pub fn new(amplitude_a: f64, forcing: Forcing, grid_size: usize) -> Result<Self> {
        let prob = Self {
            amplitude_a,
            forcing,
            grid_size,
        };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if self.amplitude_a == 0.0 || !self.amplitude_a.is_finite() {
            return Err(Error::InvalidInput(format!(
                "pendulum constant a = {} must be finite and nonzero",
                self.amplitude_a
            )));
        }
        if self.grid_size < 3 {
            return Err(Error::InvalidInput(format!(
                "grid size {} is below the minimum 3",
                self.grid_size
            )));
        }
        Ok(())
    }
}

/// The discrete Hammerstein equation `u + K F u = 0` for one pendulum
/// problem.
#[derive(Debug, Clone)]
pub struct DiscretizedHammerstein {
    pub grid: Grid,
    pub k_op: IntegralOperator,
    pub f_op: NemytskiiOperator,
    /// `g = ∫ G z`.
    pub g_vec: GridVector,
}

impl DiscretizedHammerstein {
    /// The offset `ĝ = −g` inside `F`; the amplitude is `v = u − ĝ`.
    pub fn offset(&self) -> &[f64] {
        self.f_op.offset()
    }

    pub fn amplitude_from(&self, u: &GridVector) -> Result<GridVector> {
        check_dim(self.grid.len(), u.len())?;
        let coords = u
            .coords()
            .iter()
            .zip(self.offset())
            .map(|(u, off)| u - off)
            .collect();
        self.grid.vector(coords)
    }

    /// `u = v + ĝ`, the Hammerstein unknown for a given amplitude.
    pub fn unknown_from(&self, v: &GridVector) -> Result<GridVector> {
        check_dim(self.grid.len(), v.len())?;
        let coords = v
            .coords()
            .iter()
            .zip(self.offset())
            .map(|(v, off)| v + off)
            .collect();
        self.grid.vector(coords)
    }
}

pub fn assemble_hammerstein(prob: &PendulumProblem) -> Result<DiscretizedHammerstein> {
    prob.validate()?;
    let grid = Grid::uniform(prob.grid_size)?;
    let green = build_green_function();
    let k_op = IntegralOperator::new(green_kernel_matrix(&green, &grid), grid.weights().to_vec())?;
    let forcing = prob.forcing;
    let g_vec = compute_g(|t| forcing.eval(t), &grid);
    let offset = g_vec.coords().iter().map(|g| -g).collect();
    let f_op = NemytskiiOperator::new(prob.amplitude_a, offset)?;
    Ok(DiscretizedHammerstein {
        grid,
        k_op,
        f_op,
        g_vec,
    })
}

/// Applies `w ↦ ∫ G w` on a uniform grid and returns the largest mismatch
/// between the second central difference of the result and `w` at interior
/// nodes.
pub fn verify_green(g: &GreenFunction, w: impl Fn(f64) -> f64, grid: &Grid) -> Result<f64> {
    let h = grid
        .uniform_spacing()
        .ok_or_else(|| Error::Unsupported("finite-difference check needs a uniform grid".into()))?;
    if grid.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "finite-difference check needs at least 5 nodes, got {}",
            grid.len()
        )));
    }
    let t = grid.nodes();
    let wv: Vec<f64> = t
        .iter()
        .zip(grid.weights())
        .map(|(&x, q)| q * w(x))
        .collect();
    let v: Vec<f64> = t
        .iter()
        .map(|&ti| t.iter().zip(&wv).map(|(&xj, f)| g.eval(ti, xj) * f).sum())
        .collect();
    Ok((1..t.len() - 1)
        .map(|i| ((v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h) - w(t[i])).abs())
        .fold(0.0, f64::max))
}

/// `max_i |v''_i + a² sin v_i − z(t_i)|` over interior nodes, with `v''` the
/// second central difference.
pub fn ode_residual(
    v: &GridVector,
    grid: &Grid,
    amplitude_a: f64,
    forcing: &Forcing,
) -> Result<f64> {
    check_dim(grid.len(), v.len())?;
    let h = grid
        .uniform_spacing()
        .ok_or_else(|| Error::Unsupported("ODE residual needs a uniform grid".into()))?;
    let a2 = amplitude_a * amplitude_a;
    let (t, v) = (grid.nodes(), v.coords());
    Ok((1..t.len() - 1)
        .map(|i| {
            let d2 = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h);
            (d2 + a2 * v[i].sin() - forcing.eval(t[i])).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone)]
pub struct PendulumSolution {
    pub nodes: Vec<f64>,
    pub amplitude: GridVector,
    pub trace: IterationTrace,
    pub ode_residual: f64,
}

/// A Hilbert-space configuration on the problem's grid: `u₁ = 0`, the
/// compliant power-law schedule `λ_n = (n+1)^{-0.6}`, `θ_n = 0.49 (n+1)^{-0.25}`.
pub fn default_pendulum_config(disc: &DiscretizedHammerstein) -> SolveConfig {
    let schedule = Schedule::power_law(0.6, 0.25, 0.49).expect("valid power law");
    let u1 = disc
        .grid
        .vector(vec![0.0; disc.grid.len()])
        .expect("grid weights are valid");
    SolveConfig::new(ConjugatePair::hilbert(), schedule, u1)
        .with_tolerance(1e-9)
        .with_max_iter(20_000)
}

pub fn solve_pendulum(prob: &PendulumProblem, cfg: &SolveConfig) -> Result<PendulumSolution> {
    let disc = assemble_hammerstein(prob)?;
    solve_discretized(prob, &disc, cfg)
}

pub fn solve_discretized(
    prob: &PendulumProblem,
    disc: &DiscretizedHammerstein,
    cfg: &SolveConfig,
) -> Result<PendulumSolution> {
    if !cfg.pair.is_hilbert() {
        return Err(Error::Unsupported(format!(
            "the pendulum lives in weighted L2; got p = {}",
            cfg.pair.p()
        )));
    }
    if cfg.u1.weights() != disc.grid.weights() {
        return Err(Error::InvalidWeights(
            "starting point must carry the grid's quadrature weights".into(),
        ));
    }
    let trace = solve_hammerstein(&disc.f_op, &disc.k_op, cfg)?;
    let amplitude = disc.amplitude_from(&trace.final_u)?;
    let ode_residual = ode_residual(&amplitude, &disc.grid, prob.amplitude_a, &prob.forcing)?;
    Ok(PendulumSolution {
        nodes: disc.grid.nodes().to_vec(),
        amplitude,
        trace,
        ode_residual,
    })
}
