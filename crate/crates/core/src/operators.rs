//! Operators `E → E*` and `E* → E`, the coupled product operator
//! `A(u, v) = (Fu − v, Kv + u)` on `X = E × E*`, and sampled estimates of
//! strong-monotonicity constants.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::spaces::{norm_p, pairing, ConjugatePair, GridVector, ProductVector};

/// A map between grid-vector spaces of a fixed dimension.
pub trait Operator: Send + Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &GridVector) -> Result<GridVector>;
}

impl<T: Operator + ?Sized> Operator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &GridVector) -> Result<GridVector> {
        (**self).apply(x)
    }
}

impl<T: Operator + ?Sized> Operator for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn apply(&self, x: &GridVector) -> Result<GridVector> {
        (**self).apply(x)
    }
}

/// Dense square matrix acting on coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct MatrixOperator {
    entries: DMatrix<f64>,
    pub claimed_eta: Option<f64>,
    pub claimed_p: Option<f64>,
}

/// Row-major JSON form: `{"rows": [[7, 9], [-9, 25]], "claimed_eta": 7}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixRepr {
    rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    claimed_p: Option<f64>,
}

impl TryFrom<MatrixRepr> for MatrixOperator {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let mut op = MatrixOperator::from_rows(&repr.rows)?;
        op.claimed_eta = repr.claimed_eta;
        op.claimed_p = repr.claimed_p;
        Ok(op)
    }
}

impl From<MatrixOperator> for MatrixRepr {
    fn from(op: MatrixOperator) -> Self {
        MatrixRepr {
            rows: op.rows(),
            claimed_eta: op.claimed_eta,
            claimed_p: op.claimed_p,
        }
    }
}

impl MatrixOperator {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || !entries.is_square() {
            return Err(Error::InvalidInput(format!(
                "operator matrix must be square and non-empty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            entries,
            claimed_eta: None,
            claimed_p: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n)).expect("identity is square")
    }

    pub fn with_claim(mut self, eta: f64, p: f64) -> Self {
        self.claimed_eta = Some(eta);
        self.claimed_p = Some(p);
        self
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            entries: &self.entries * c,
            claimed_eta: self.claimed_eta.map(|e| e * c.abs()),
            claimed_p: self.claimed_p,
        }
    }
}

impl Operator for MatrixOperator {
    fn dim(&self) -> usize {
        self.entries.nrows()
    }

    fn apply(&self, x: &GridVector) -> Result<GridVector> {
        check_dim(self.dim(), x.len())?;
        let coords = (0..self.dim())
            .map(|i| {
                self.entries
                    .row(i)
                    .iter()
                    .zip(x.coords())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        x.with_coords(coords)
    }
}

/// Superposition operator `(Fu)_i = a² sin(u_i − g_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NemytskiiOperator {
    amplitude: f64,
    offset: Vec<f64>,
}

impl NemytskiiOperator {
    pub fn new(amplitude: f64, offset: Vec<f64>) -> Result<Self> {
        if offset.is_empty() {
            return Err(Error::InvalidInput("offset must be non-empty".into()));
        }
        Ok(Self { amplitude, offset })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }
}

impl Operator for NemytskiiOperator {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn apply(&self, x: &GridVector) -> Result<GridVector> {
        check_dim(self.dim(), x.len())?;
        let a2 = self.amplitude * self.amplitude;
        let coords = x
            .coords()
            .iter()
            .zip(&self.offset)
            .map(|(u, g)| a2 * (u - g).sin())
            .collect();
        x.with_coords(coords)
    }
}

/// Nyström discretization `(Kv)_i = Σ_j w_j k(t_i, x_j) v_j` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralOperator {
    kernel: DMatrix<f64>,
    weights: Vec<f64>,
}

impl IntegralOperator {
    pub fn new(kernel: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        if !kernel.is_square() {
            return Err(Error::InvalidInput("kernel matrix must be square".into()));
        }
        check_dim(kernel.ncols(), weights.len())?;
        // Validates positivity.
        GridVector::zeros(weights.clone())?;
        Ok(Self { kernel, weights })
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Operator for IntegralOperator {
    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn apply(&self, x: &GridVector) -> Result<GridVector> {
        check_dim(self.dim(), x.len())?;
        let weighted: Vec<f64> = x
            .coords()
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .collect();
        let coords = (0..self.dim())
            .map(|i| {
                self.kernel
                    .row(i)
                    .iter()
                    .zip(&weighted)
                    .map(|(k, v)| k * v)
                    .sum()
            })
            .collect();
        GridVector::new(coords, self.weights.clone())
    }
}

/// `A(u, v) = (Fu − v, Kv + u)` on `X = E × E*`.
pub struct ProductOperator<F, K> {
    pub f_op: F,
    pub k_op: K,
}

impl<F: Operator, K: Operator> ProductOperator<F, K> {
    pub fn new(f_op: F, k_op: K) -> Result<Self> {
        check_dim(f_op.dim(), k_op.dim())?;
        Ok(Self { f_op, k_op })
    }

    pub fn dim(&self) -> usize {
        self.f_op.dim()
    }

    pub fn apply_product(&self, z: &ProductVector) -> Result<ProductVector> {
        let (u, v) = (z.first(), z.second());
        let first = self.f_op.apply(u)?.sub(v)?;
        let second = self.k_op.apply(v)?.add(u)?;
        ProductVector::new(first, second)
    }
}

/// Where sampled monotonicity estimates draw their points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub samples: usize,
    pub seed: u64,
    /// Points are uniform in `[-half_width, half_width]^n`.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    /// Quadrature weights of the sampled vectors; unit weights when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

fn default_half_width() -> f64 {
    1.0
}

impl SampleSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            half_width: 1.0,
            weights: None,
        }
    }

    pub fn with_half_width(mut self, half_width: f64) -> Self {
        self.half_width = half_width;
        self
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = Some(weights);
        self
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::InvalidInput(
                "at least two samples are required".into(),
            ));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sampling half-width {} must be positive",
                self.half_width
            )));
        }
        if let Some(w) = &self.weights {
            check_dim(dim, w.len())?;
        }
        Ok(())
    }

    fn draw(&self, rng: &mut ChaCha8Rng, dim: usize) -> GridVector {
        let h = self.half_width;
        let coords: Vec<f64> = (0..dim).map(|_| rng.gen_range(-h..=h)).collect();
        let weights = self.weights.clone().unwrap_or_else(|| vec![1.0; dim]);
        GridVector::new(coords, weights).expect("validated sample spec")
    }
}

// Pairs closer than this are redrawn.
const MIN_SEPARATION: f64 = 1e-12;
const MAX_REDRAWS: usize = 1000;

/// Empirical strong-monotonicity constant
/// `min ⟨x − y, Tx − Ty⟩ / ‖x − y‖^p` over seeded random pairs.
///
/// A negative result means a monotonicity violation was observed.
pub fn estimate_monotonicity_constant(
    op: &dyn Operator,
    pair: &ConjugatePair,
    spec: &SampleSpec,
) -> Result<f64> {
    let dim = op.dim();
    spec.validate(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut eta = f64::INFINITY;
    for _ in 0..spec.samples {
        let (x, y, dist) = draw_distinct(|| {
            let x = spec.draw(&mut rng, dim);
            let y = spec.draw(&mut rng, dim);
            let dist = norm_p(&x.sub(&y)?, pair);
            Ok((x, y, dist))
        })?;
        let dx = x.sub(&y)?;
        let dt = op.apply(&x)?.sub(&op.apply(&y)?)?;
        eta = eta.min(pairing(&dx, &dt)? / dist.powf(pair.p()));
    }
    Ok(eta)
}

fn draw_distinct<T>(mut draw: impl FnMut() -> Result<(T, T, f64)>) -> Result<(T, T, f64)> {
    for _ in 0..MAX_REDRAWS {
        let (x, y, dist) = draw()?;
        if dist > MIN_SEPARATION {
            return Ok((x, y, dist));
        }
    }
    Err(Error::InvalidInput(
        "sampling box too small to draw distinct pairs".into(),
    ))
}

/// Exact `(2, η)` constant of a linear map: the smallest eigenvalue of the
/// symmetric part `(M + Mᵀ)/2`.
pub fn symmetric_part_min_eig(op: &MatrixOperator) -> f64 {
    let m = op.entries();
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// Sampled monotonicity estimate with a human-readable verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub eta_hat: f64,
    pub samples: usize,
    pub half_width: f64,
    pub monotone_on_box: bool,
    pub warning: Option<String>,
}

pub fn monotonicity_report(
    op: &dyn Operator,
    pair: &ConjugatePair,
    spec: &SampleSpec,
) -> Result<MonotonicityReport> {
    let eta_hat = estimate_monotonicity_constant(op, pair, spec)?;
    let monotone = eta_hat > 0.0;
    let warning = (!monotone).then(|| {
        format!(
            "estimated monotonicity constant {eta_hat:.6e} <= 0 on [-{h}, {h}]^{n}: \
             operator is not strongly monotone there",
            h = spec.half_width,
            n = op.dim()
        )
    });
    Ok(MonotonicityReport {
        eta_hat,
        samples: spec.samples,
        half_width: spec.half_width,
        monotone_on_box: monotone,
        warning,
    })
}

/// Sampled check that `A` is `(p, min(η₁, η₂))`-strongly monotone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductMonotonicityReport {
    pub eta_hat: f64,
    pub eta_expected: f64,
    /// Largest `|⟨Δz, AΔ⟩ − ⟨Δu, FΔ⟩ − ⟨Δv, KΔ⟩| / (1 + |⟨Δz, AΔ⟩|)`; the
    /// coupling terms `−v` and `+u` cancel in the pairing.
    pub cross_term_max_error: f64,
    pub samples: usize,
    pub satisfied: bool,
}

pub fn verify_product_monotonicity<F: Operator, K: Operator>(
    a: &ProductOperator<F, K>,
    pair: &ConjugatePair,
    spec: &SampleSpec,
    eta_f: f64,
    eta_k: f64,
) -> Result<ProductMonotonicityReport> {
    let dim = a.dim();
    spec.validate(dim)?;
    let p = pair.p();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut eta_hat = f64::INFINITY;
    let mut cross_err: f64 = 0.0;
    for _ in 0..spec.samples {
        let (z1, z2, norm_pow) = draw_distinct(|| {
            let z1 = ProductVector::new(spec.draw(&mut rng, dim), spec.draw(&mut rng, dim))?;
            let z2 = ProductVector::new(spec.draw(&mut rng, dim), spec.draw(&mut rng, dim))?;
            let d = z1.sub(&z2)?;
            let norm_pow = norm_p(d.first(), pair).powf(p) + norm_p(d.second(), pair).powf(p);
            Ok((z1, z2, norm_pow))
        })?;
        let dz = z1.sub(&z2)?;
        let da = a.apply_product(&z1)?.sub(&a.apply_product(&z2)?)?;
        let lhs = pairing(dz.first(), da.first())? + pairing(dz.second(), da.second())?;
        eta_hat = eta_hat.min(lhs / norm_pow);

        let df = a.f_op.apply(z1.first())?.sub(&a.f_op.apply(z2.first())?)?;
        let dk = a
            .k_op
            .apply(z1.second())?
            .sub(&a.k_op.apply(z2.second())?)?;
        let split = pairing(dz.first(), &df)? + pairing(dz.second(), &dk)?;
        cross_err = cross_err.max((lhs - split).abs() / (1.0 + lhs.abs()));
    }
    let eta_expected = eta_f.min(eta_k);
    Ok(ProductMonotonicityReport {
        eta_hat,
        eta_expected,
        cross_term_max_error: cross_err,
        samples: spec.samples,
        satisfied: eta_hat >= eta_expected - 1e-6,
    })
}
