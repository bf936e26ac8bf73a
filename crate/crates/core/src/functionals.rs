//! Lyapunov-type functionals `φ_p`, `V_p`, `Λ_p` and numerical checks of the
//! inequalities they satisfy.
//!
//! `φ_p(x, y) = (p/q)‖x‖^q − p⟨x, J y⟩ + ‖y‖^p` is evaluated exactly in this
//! form. For `p ≠ 2` it is not a distance-like quantity (for instance
//! `φ_p(x, x) < 0` once `‖x‖ > 1`), so the inequality checks are only
//! expected to hold in the Hilbert case. The check functions never panic on a
//! violated inequality; they return a [`FunctionalReport`] with
//! `satisfied = false`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spaces::{
    duality_map, inverse_duality_map, norm_p, norm_q, pairing, ConjugatePair, GridVector,
    ProductVector,
};

const ABS_SLACK: f64 = 1e-9;
const REL_SLACK: f64 = 1e-9;

/// Outcome of evaluating an inequality `lower_bound ≤ value ≤ upper_bound`.
///
/// One-sided inequalities use an infinite bound on the open side (serialized
/// as `null`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub satisfied: bool,
}

impl FunctionalReport {
    pub fn new(value: f64, lower_bound: f64, upper_bound: f64) -> Self {
        let slack = |bound: f64| ABS_SLACK + REL_SLACK * value.abs().max(bound.abs());
        let above = lower_bound == f64::NEG_INFINITY || value >= lower_bound - slack(lower_bound);
        let below = upper_bound == f64::INFINITY || value <= upper_bound + slack(upper_bound);
        // NaN on either side fails both comparisons.
        Self {
            value,
            lower_bound,
            upper_bound,
            satisfied: above && below && !value.is_nan(),
        }
    }

    /// Distance from `value` to the nearest finite bound.
    pub fn gap(&self) -> f64 {
        let lo = if self.lower_bound.is_finite() {
            self.value - self.lower_bound
        } else {
            f64::INFINITY
        };
        let hi = if self.upper_bound.is_finite() {
            self.upper_bound - self.value
        } else {
            f64::INFINITY
        };
        lo.min(hi)
    }
}

/// `(p/q)‖x‖^q − p⟨x, J^E y⟩ + ‖y‖^p`.
pub fn phi_p(x: &GridVector, y: &GridVector, pair: &ConjugatePair) -> Result<f64> {
    let (p, q) = (pair.p(), pair.q());
    let jy = duality_map(y, pair)?;
    let cross = pairing(x, &jy)?;
    let nx = norm_p(x, pair);
    let ny = norm_p(y, pair);
    Ok((p / q) * nx.powf(q) - p * cross + ny.powf(p))
}

/// `V_p(x, x*) = (p/q)‖x‖^q − p⟨x, x*⟩ + ‖x*‖_*^q`.
///
/// The last term is written with the dual norm raised to `q`, which equals
/// `‖J^{E*} x*‖^p`; with it `V_p(x, x*) = φ_p(x, J^{E*} x*)` holds for every
/// `p`. At `p = 2` this is the usual `‖x‖² − 2⟨x, x*⟩ + ‖x*‖²`.
pub fn v_p(x: &GridVector, xstar: &GridVector, pair: &ConjugatePair) -> Result<f64> {
    let (p, q) = (pair.p(), pair.q());
    let cross = pairing(x, xstar)?;
    let nx = norm_p(x, pair);
    let nxs = norm_q(xstar, pair);
    Ok((p / q) * nx.powf(q) - p * cross + nxs.powf(q))
}

/// `Λ_p(x₁, x₂) = φ_p(u₁, u₂) + φ_p(v₁, v₂)`.
pub fn wedge_p(x1: &ProductVector, x2: &ProductVector, pair: &ConjugatePair) -> Result<f64> {
    Ok(phi_p(x1.first(), x2.first(), pair)? + phi_p(x1.second(), x2.second(), pair)?)
}

// Integer exponents keep the sign of a negative base, fractional ones yield NaN.
fn pow_as_written(base: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        base.powi(p as i32)
    } else {
        base.powf(p)
    }
}

/// Sandwich `(‖x‖ − ‖y‖)^p ≤ φ_p(x, y) ≤ (‖x‖ + ‖y‖)^p`.
pub fn check_phi_bounds(
    x: &GridVector,
    y: &GridVector,
    pair: &ConjugatePair,
) -> Result<FunctionalReport> {
    let p = pair.p();
    let nx = norm_p(x, pair);
    let ny = norm_p(y, pair);
    let value = phi_p(x, y, pair)?;
    Ok(FunctionalReport::new(
        value,
        pow_as_written(nx - ny, p),
        (nx + ny).powf(p),
    ))
}

/// `V_p(x, x*) + p⟨J^{E*}x* − x, y*⟩ ≤ V_p(x, x* + y*)`.
///
/// `value` is the left side, `upper_bound` the right side.
pub fn check_lemma_vp_descent(
    x: &GridVector,
    xstar: &GridVector,
    ystar: &GridVector,
    pair: &ConjugatePair,
) -> Result<FunctionalReport> {
    let p = pair.p();
    let jx = inverse_duality_map(xstar, pair)?;
    let lhs = v_p(x, xstar, pair)? + p * pairing(&jx.sub(x)?, ystar)?;
    let rhs = v_p(x, &xstar.add(ystar)?, pair)?;
    Ok(FunctionalReport::new(lhs, f64::NEG_INFINITY, rhs))
}

/// `φ_p(y, x) − φ_p(y, z) ≥ p⟨z − y, J x − J z⟩`.
///
/// `value` is the left side, `lower_bound` the right side.
pub fn check_lemma_three_point(
    x: &GridVector,
    y: &GridVector,
    z: &GridVector,
    pair: &ConjugatePair,
) -> Result<FunctionalReport> {
    let p = pair.p();
    let lhs = phi_p(y, x, pair)? - phi_p(y, z, pair)?;
    let jdiff = duality_map(x, pair)?.sub(&duality_map(z, pair)?)?;
    let rhs = p * pairing(&z.sub(y)?, &jdiff)?;
    Ok(FunctionalReport::new(lhs, rhs, f64::INFINITY))
}

/// `‖x − y‖^p ≥ φ_p(x, y) − (p/q)‖x‖^q` on a ball around the origin.
///
/// `value` is `‖x − y‖^p`, `lower_bound` the right side.
pub fn check_lemma_ball_bound(
    x: &GridVector,
    y: &GridVector,
    pair: &ConjugatePair,
) -> Result<FunctionalReport> {
    let (p, q) = (pair.p(), pair.q());
    let lhs = norm_p(&x.sub(y)?, pair).powf(p);
    let rhs = phi_p(x, y, pair)? - (p / q) * norm_p(x, pair).powf(q);
    Ok(FunctionalReport::new(lhs, rhs, f64::INFINITY))
}

/// Pass counts for one inequality over a random sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SweepCount {
    pub samples: usize,
    pub passed: usize,
    /// Smallest `gap()` seen; negative means a violation.
    pub min_gap: f64,
}

impl SweepCount {
    fn record(&mut self, report: &FunctionalReport) {
        if self.samples == 0 || report.gap() < self.min_gap || report.gap().is_nan() {
            self.min_gap = report.gap();
        }
        self.samples += 1;
        if report.satisfied {
            self.passed += 1;
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Results of sweeping all four inequality checks at one exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSweep {
    pub p: f64,
    pub dimension: usize,
    pub seed: u64,
    pub phi_bounds: SweepCount,
    pub vp_descent: SweepCount,
    pub three_point: SweepCount,
    pub ball_bound: SweepCount,
}

impl LemmaSweep {
    pub fn all_passed(&self) -> bool {
        self.phi_bounds.all_passed()
            && self.vp_descent.all_passed()
            && self.three_point.all_passed()
            && self.ball_bound.all_passed()
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> GridVector {
    let coords = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    GridVector::unit(coords).expect("dimension is positive")
}

fn random_in_unit_ball(rng: &mut ChaCha8Rng, dim: usize, pair: &ConjugatePair) -> GridVector {
    let x = random_vector(rng, dim);
    let n = norm_p(&x, pair);
    if n > 1.0 {
        x.scale(1.0 / n)
    } else {
        x
    }
}

/// Evaluates every inequality check on `samples` seeded random draws from
/// `[-1, 1]^dimension` (the unit ball for the ball bound).
pub fn sweep_lemmas(
    pair: &ConjugatePair,
    samples: usize,
    dimension: usize,
    seed: u64,
) -> Result<LemmaSweep> {
    if samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    if dimension == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sweep = LemmaSweep {
        p: pair.p(),
        dimension,
        seed,
        phi_bounds: SweepCount::default(),
        vp_descent: SweepCount::default(),
        three_point: SweepCount::default(),
        ball_bound: SweepCount::default(),
    };
    for _ in 0..samples {
        let x = random_vector(&mut rng, dimension);
        let y = random_vector(&mut rng, dimension);
        let z = random_vector(&mut rng, dimension);
        sweep.phi_bounds.record(&check_phi_bounds(&x, &y, pair)?);
        sweep
            .vp_descent
            .record(&check_lemma_vp_descent(&x, &y, &z, pair)?);
        sweep
            .three_point
            .record(&check_lemma_three_point(&x, &y, &z, pair)?);

        let bx = random_in_unit_ball(&mut rng, dimension, pair);
        let by = random_in_unit_ball(&mut rng, dimension, pair);
        sweep
            .ball_bound
            .record(&check_lemma_ball_bound(&bx, &by, pair)?);
    }
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(c: &[f64]) -> GridVector {
        GridVector::unit(c.to_vec()).unwrap()
    }

    fn p2() -> ConjugatePair {
        ConjugatePair::hilbert()
    }

    #[test]
    fn phi_examples() {
        assert_relative_eq!(phi_p(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &p2()).unwrap(), 2.0);
        let x = v(&[0.6, 0.8]);
        assert_relative_eq!(phi_p(&x, &x, &p2()).unwrap(), 0.0, epsilon = 1e-15);
        let e = v(&[1.0, 0.0]);
        let p3 = ConjugatePair::new(3.0).unwrap();
        assert_relative_eq!(phi_p(&e, &e, &p3).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn phi_on_diagonal_is_negative_for_large_norm_when_p_is_not_two() {
        // (p/q)|x|^q − (p−1)|x|^p at |x| = 2, p = 3: 2·2^1.5 − 2·8 < 0.
        let p3 = ConjugatePair::new(3.0).unwrap();
        let x = v(&[2.0, 0.0]);
        let val = phi_p(&x, &x, &p3).unwrap();
        assert_relative_eq!(val, 2.0 * 2f64.powf(1.5) - 16.0, epsilon = 1e-12);
        assert!(!check_phi_bounds(&x, &x, &p3).unwrap().satisfied);
    }

    #[test]
    fn vp_examples() {
        assert_relative_eq!(v_p(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &p2()).unwrap(), 2.0);
        assert_eq!(v_p(&v(&[0.0, 0.0]), &v(&[0.0, 0.0]), &p2()).unwrap(), 0.0);
        let p3 = ConjugatePair::new(3.0).unwrap();
        let x = v(&[0.3, -0.7, 1.2]);
        let xs = v(&[-0.5, 0.9, 0.25]);
        let lhs = v_p(&x, &xs, &p3).unwrap();
        let rhs = phi_p(&x, &inverse_duality_map(&xs, &p3).unwrap(), &p3).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn wedge_examples() {
        let a = ProductVector::new(v(&[0.2, -1.0]), v(&[0.5, 0.5])).unwrap();
        assert_relative_eq!(wedge_p(&a, &a, &p2()).unwrap(), 0.0, epsilon = 1e-15);
        let x1 = ProductVector::new(v(&[1.0, 0.0]), v(&[0.0, 0.0])).unwrap();
        let x2 = ProductVector::new(v(&[0.0, 0.0]), v(&[0.0, 1.0])).unwrap();
        assert_relative_eq!(wedge_p(&x1, &x2, &p2()).unwrap(), 2.0);
        let s1 = ProductVector::new(x1.second().clone(), x1.first().clone()).unwrap();
        let s2 = ProductVector::new(x2.second().clone(), x2.first().clone()).unwrap();
        assert_relative_eq!(
            wedge_p(&s1, &s2, &p2()).unwrap(),
            wedge_p(&x1, &x2, &p2()).unwrap()
        );
    }

    #[test]
    fn phi_bound_examples() {
        let r = check_phi_bounds(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &p2()).unwrap();
        assert_eq!((r.lower_bound, r.upper_bound), (0.0, 4.0));
        assert_relative_eq!(r.value, 2.0);
        assert!(r.satisfied);
        let x = v(&[0.3, 0.4]);
        let r = check_phi_bounds(&x, &x, &p2()).unwrap();
        assert!(r.satisfied);
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn vp_descent_examples() {
        let x = v(&[0.1, 0.2]);
        let xs = v(&[-0.3, 0.8]);
        let r = check_lemma_vp_descent(&x, &xs, &v(&[0.0, 0.0]), &p2()).unwrap();
        assert!(r.satisfied);
        assert_relative_eq!(r.gap(), 0.0, epsilon = 1e-15);

        let ys = v(&[0.7, -0.4]);
        let r = check_lemma_vp_descent(&x, &xs, &ys, &p2()).unwrap();
        assert_relative_eq!(r.gap(), 0.65, max_relative = 1e-12);
    }

    #[test]
    fn three_point_examples() {
        let x = v(&[0.5, -0.1]);
        let y = v(&[0.2, 0.9]);
        let r = check_lemma_three_point(&x, &y, &x, &p2()).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.value, 0.0);
        let z = v(&[-0.4, 0.3]);
        let r = check_lemma_three_point(&x, &y, &z, &p2()).unwrap();
        // ‖x − z‖² = 0.81 + 0.16
        assert_relative_eq!(r.gap(), 0.97, max_relative = 1e-12);
    }

    #[test]
    fn ball_bound_examples() {
        let x = v(&[0.6, 0.0]);
        let r = check_lemma_ball_bound(&x, &x, &p2()).unwrap();
        assert!(r.satisfied);
        let r = check_lemma_ball_bound(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), &p2()).unwrap();
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-15);
        assert_relative_eq!(r.lower_bound, 1.0, epsilon = 1e-15);
        assert!(r.satisfied);
    }

    #[test]
    fn report_slack_and_nan() {
        assert!(FunctionalReport::new(1.0 + 1e-10, 0.0, 1.0).satisfied);
        assert!(!FunctionalReport::new(1.0 + 1e-6, 0.0, 1.0).satisfied);
        assert!(!FunctionalReport::new(0.5, f64::NAN, 1.0).satisfied);
        assert!(!FunctionalReport::new(f64::NAN, 0.0, 1.0).satisfied);
    }

    #[test]
    fn fractional_lower_bound_of_negative_base_is_nan() {
        let p = ConjugatePair::new(2.5).unwrap();
        let r = check_phi_bounds(&v(&[0.1, 0.0]), &v(&[1.0, 0.0]), &p).unwrap();
        assert!(r.lower_bound.is_nan());
        assert!(!r.satisfied);
    }

    #[test]
    fn sweep_rejects_zero_samples() {
        assert!(sweep_lemmas(&p2(), 0, 3, 1).is_err());
        assert!(sweep_lemmas(&p2(), 10, 0, 1).is_err());
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = sweep_lemmas(&p2(), 50, 3, 9).unwrap();
        let b = sweep_lemmas(&p2(), 50, 3, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.all_passed());
    }
}
