//! Strongly convergent iteration for Hammerstein equations `u + KFu = 0`.
//!
//! `F: E → E*` and `K: E* → E` are `(p, η)`-strongly monotone maps between a
//! space and its dual. The solution is approached through the coupled
//! iteration on the product `X = E × E*` (see [`solver`]), which drives the
//! pair `(u_n, v_n)` towards `(u*, F u*)`.
//!
//! Modules:
//!
//! * [`spaces`] -- weighted `ℓ^p` vectors, duality maps, the product space.
//! * [`functionals`] -- `φ_p`, `V_p`, `Λ_p` and checks of their inequalities.
//! * [`operators`] -- matrix, superposition and integral operators, the
//!   product operator `A(u, v) = (Fu − v, Kv + u)` and monotonicity estimates.
//! * [`solver`] -- step schedules, the iteration itself and a direct oracle
//!   for linear instances.
//! * [`pendulum`] -- Green-function reformulation of the forced pendulum.
//! * [`experiment`] -- the 2×2 matrix experiment with its three starts.

pub mod error;
pub mod experiment;
pub mod functionals;
pub mod operators;
pub mod pendulum;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
pub use operators::{MatrixOperator, Operator};
pub use solver::{IterationTrace, Schedule, SolveConfig};
pub use spaces::{ConjugatePair, GridVector, ProductVector};
