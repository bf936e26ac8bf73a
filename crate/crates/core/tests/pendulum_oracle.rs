mod common;

use common::{max_abs_diff, newton_collocation};
use hammerstein::pendulum::{
    assemble_hammerstein, default_pendulum_config, solve_discretized, Forcing, PendulumProblem,
};

fn solve(a: f64, forcing: Forcing, n: usize) -> Vec<f64> {
    let prob = PendulumProblem::new(a, forcing, n).unwrap();
    let disc = assemble_hammerstein(&prob).unwrap();
    let sol = solve_discretized(&prob, &disc, &default_pendulum_config(&disc)).unwrap();
    assert!(sol.trace.converged);
    assert!(sol.ode_residual <= 5e-2, "residual {}", sol.ode_residual);
    sol.amplitude.coords().to_vec()
}

#[test]
fn oracle_solves_a_linearizable_case() {
    // With tiny forcing sin v ≈ v, and v'' + a²v = c sin(2πt) has the
    // closed form c sin(2πt) / (a² − 4π²).
    let (a, c) = (0.5, 1e-6);
    let v = newton_collocation(a, |t| c * (std::f64::consts::TAU * t).sin(), 201);
    let exact: Vec<f64> = (0..201)
        .map(|i| {
            let t = i as f64 / 200.0;
            c * (std::f64::consts::TAU * t).sin() / (a * a - std::f64::consts::TAU.powi(2))
        })
        .collect();
    assert!(max_abs_diff(&v, &exact) <= 1e-3 * c);
}

#[test]
fn iteration_matches_collocation_oracle() {
    for (a, forcing) in [
        (0.5, Forcing::default()),
        (
            0.8,
            Forcing::Sine {
                amplitude: 0.3,
                cycles: 1.0,
            },
        ),
        (0.5, Forcing::Constant { value: 0.2 }),
    ] {
        let v = solve(a, forcing, 101);
        let oracle = newton_collocation(a, |t| forcing.eval(t), 101);
        let err = max_abs_diff(&v, &oracle);
        assert!(err <= 1e-4, "a={a} {forcing:?}: {err:e}");
    }
}

#[test]
fn refinement_agrees_at_shared_nodes() {
    let coarse = solve(0.5, Forcing::default(), 51);
    let fine = solve(0.5, Forcing::default(), 101);
    let fine_shared: Vec<f64> = fine.iter().step_by(2).copied().collect();
    assert!(max_abs_diff(&coarse, &fine_shared) <= 5e-3);
}
