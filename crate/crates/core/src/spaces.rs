//! Finite-dimensional realizations of `E`, `E*` and the product `X = E × E*`.
//!
//! Elements are weighted sequences: with unit weights these are the `ℓ^p`
//! spaces of `ℝ^n`, with quadrature weights they emulate `L^p[0, 1]` on a
//! grid. The duality pairing is always `⟨x, f⟩ = Σ w_i x_i f_i`.
//!
//! The generalized duality map uses the gauge `ν(t) = t^{p-1}`, which on
//! `ℓ^p` has the pointwise form `J(x)_i = |x_i|^{p-2} x_i`. Its inverse is the
//! duality map of the dual space, `|f_i|^{q-2} f_i`.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Conjugate exponents `(p, q)` with `1/p + 1/q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ConjugatePair {
    p: f64,
    q: f64,
}

impl ConjugatePair {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        Self::from_parts(p, p / (p - 1.0))
    }

    /// Builds a pair from both exponents, checking conjugacy.
    pub fn from_parts(p: f64, q: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent(p));
        }
        if !(q.is_finite() && q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() >= 1e-12 {
            return Err(Error::InvalidInput(format!(
                "exponents p = {p} and q = {q} are not conjugate"
            )));
        }
        Ok(Self { p, q })
    }

    /// The Hilbert case `p = q = 2`.
    pub fn hilbert() -> Self {
        Self { p: 2.0, q: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn is_hilbert(&self) -> bool {
        self.p == 2.0
    }
}

impl TryFrom<f64> for ConjugatePair {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ConjugatePair> for f64 {
    fn from(pair: ConjugatePair) -> f64 {
        pair.p
    }
}

/// Grid values together with their quadrature weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridVectorRepr")]
pub struct GridVector {
    coords: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct GridVectorRepr {
    coords: Vec<f64>,
    #[serde(default)]
    weights: Option<Vec<f64>>,
}

impl TryFrom<GridVectorRepr> for GridVector {
    type Error = Error;

    fn try_from(repr: GridVectorRepr) -> Result<Self> {
        match repr.weights {
            Some(w) => GridVector::new(repr.coords, w),
            None => GridVector::unit(repr.coords),
        }
    }
}

impl GridVector {
    pub fn new(coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("grid vector must be non-empty".into()));
        }
        check_dim(coords.len(), weights.len())?;
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
        }
        Ok(Self { coords, weights })
    }

    /// A vector of `ℓ^p` (all weights equal to one).
    pub fn unit(coords: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        Self::new(coords, vec![1.0; n])
    }

    pub fn zeros(weights: Vec<f64>) -> Result<Self> {
        Self::new(vec![0.0; weights.len()], weights)
    }

    /// Same weights, new coordinates.
    pub fn with_coords(&self, coords: Vec<f64>) -> Result<Self> {
        check_dim(self.len(), coords.len())?;
        Ok(Self {
            coords,
            weights: self.weights.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn has_unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    fn check_compatible(&self, other: &GridVector) -> Result<()> {
        check_dim(self.len(), other.len())?;
        if self.weights != other.weights {
            return Err(Error::InvalidWeights(
                "operands carry different quadrature weights".into(),
            ));
        }
        Ok(())
    }

    /// Elementwise combination of two vectors on the same grid.
    pub fn zip_with(&self, other: &GridVector, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_compatible(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            coords,
            weights: self.weights.clone(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            coords: self.coords.iter().map(|&c| f(c)).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn add(&self, other: &GridVector) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridVector) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|x| c * x)
    }

    /// `self + c·other`
    pub fn add_scaled(&self, c: f64, other: &GridVector) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }
}

/// Weighted duality pairing `⟨x, f⟩ = Σ w_i x_i f_i`.
pub fn pairing(x: &GridVector, f: &GridVector) -> Result<f64> {
    x.check_compatible(f)?;
    Ok(x.coords
        .iter()
        .zip(&f.coords)
        .zip(&x.weights)
        .map(|((a, b), w)| w * a * b)
        .sum())
}

fn weighted_power_sum(x: &GridVector, r: f64) -> f64 {
    x.coords
        .iter()
        .zip(&x.weights)
        .map(|(c, w)| w * c.abs().powf(r))
        .sum()
}

/// Weighted `r`-norm for an arbitrary exponent `r > 1`.
pub(crate) fn norm_r(x: &GridVector, r: f64) -> f64 {
    if r == 2.0 {
        return x
            .coords
            .iter()
            .zip(&x.weights)
            .map(|(c, w)| w * c * c)
            .sum::<f64>()
            .sqrt();
    }
    weighted_power_sum(x, r).powf(1.0 / r)
}

/// `(Σ w_i |x_i|^p)^{1/p}`, the norm of `E`.
pub fn norm_p(x: &GridVector, pair: &ConjugatePair) -> f64 {
    norm_r(x, pair.p())
}

/// The norm of the dual space `E*`, `(Σ w_i |f_i|^q)^{1/q}`.
pub fn norm_q(f: &GridVector, pair: &ConjugatePair) -> f64 {
    norm_r(f, pair.q())
}

fn pointwise_gauge(x: &GridVector, r: f64) -> GridVector {
    if r == 2.0 {
        return x.clone();
    }
    x.map(|c| {
        if c == 0.0 {
            0.0
        } else {
            c.abs().powf(r - 2.0) * c
        }
    })
}

fn require_supported_weights(x: &GridVector, pair: &ConjugatePair) -> Result<()> {
    if pair.is_hilbert() || x.has_unit_weights() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "weighted duality map requested for p = {}; only p = 2 is supported with quadrature weights",
            pair.p()
        )))
    }
}

/// Generalized duality map `J^E: E → E*` with gauge `t^{p-1}`.
///
/// Zero entries map to zero for every `p`, including `p < 2` where
/// `|x_i|^{p-2}` is singular.
pub fn duality_map(x: &GridVector, pair: &ConjugatePair) -> Result<GridVector> {
    require_supported_weights(x, pair)?;
    Ok(pointwise_gauge(x, pair.p()))
}

/// Inverse duality map `J^{E*}: E* → E`, i.e. the duality map of `E*`.
pub fn inverse_duality_map(f: &GridVector, pair: &ConjugatePair) -> Result<GridVector> {
    require_supported_weights(f, pair)?;
    Ok(pointwise_gauge(f, pair.q()))
}

/// An element `(u, v)` of `X = E × E*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductVector {
    first: GridVector,
    second: GridVector,
}

impl ProductVector {
    pub fn new(first: GridVector, second: GridVector) -> Result<Self> {
        first.check_compatible(&second)?;
        Ok(Self { first, second })
    }

    pub fn first(&self) -> &GridVector {
        &self.first
    }

    pub fn second(&self) -> &GridVector {
        &self.second
    }

    pub fn into_parts(self) -> (GridVector, GridVector) {
        (self.first, self.second)
    }

    pub fn sub(&self, other: &ProductVector) -> Result<Self> {
        Ok(Self {
            first: self.first.sub(&other.first)?,
            second: self.second.sub(&other.second)?,
        })
    }
}

/// `‖(u, v)‖ = (‖u‖_p^p + ‖v‖_p^p)^{1/p}`.
pub fn product_norm(z: &ProductVector, pair: &ConjugatePair) -> f64 {
    let p = pair.p();
    if pair.is_hilbert() {
        let a = norm_p(&z.first, pair);
        let b = norm_p(&z.second, pair);
        return (a * a + b * b).sqrt();
    }
    (weighted_power_sum(&z.first, p) + weighted_power_sum(&z.second, p)).powf(1.0 / p)
}

/// `J(u, v) = (J u, J v)`, the duality map of the product with the
/// `p`-gauge applied to each half.
pub fn product_duality(z: &ProductVector, pair: &ConjugatePair) -> Result<ProductVector> {
    Ok(ProductVector {
        first: duality_map(&z.first, pair)?,
        second: duality_map(&z.second, pair)?,
    })
}

/// Pairing between `X = E × E*` and `X* = E* × E`.
pub fn product_pairing(z: &ProductVector, w: &ProductVector) -> Result<f64> {
    Ok(pairing(&z.first, &w.first)? + pairing(&z.second, &w.second)?)
}
