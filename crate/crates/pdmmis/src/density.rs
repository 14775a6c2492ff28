//! Points, multivariate Gaussians, equal-weight mixtures, and an
//! instrumented target density.
//!
//! Every density works in the log domain: `logpdf` returns `-inf` where the
//! density vanishes and never returns NaN for validated inputs. Gaussians
//! factor their covariance once at construction and keep both the Cholesky
//! factor (for sampling) and its inverse (for allocation-free quadratic
//! forms in `logpdf`).

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;
use core::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{cholesky_lower, invert_lower};
use crate::math::{abs, ln, log_mean_exp};
use crate::{Error, Result};

/// Relative tolerance for covariance symmetry. Matrices inside the
/// tolerance are symmetrized by averaging with their transpose; matrices
/// outside it are rejected.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Point
// ---------------------------------------------------------------------------

/// A point in `R^n` with finite coordinates and `n >= 1`.
///
/// Dereferences to `[f64]`, so indexing and iteration work directly.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Validates and wraps a coordinate vector.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidSize("point dimension must be at least 1"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        Ok(Point { coords })
    }

    /// Number of coordinates.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The coordinates as a slice.
    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    /// Consumes the point, returning its coordinates.
    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.coords
    }
}

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

/// A multivariate Gaussian with a symmetric positive definite covariance.
#[derive(Debug, Clone)]
pub struct Gaussian {
    mean: Point,
    dim: usize,
    cov: Vec<f64>,
    chol: Vec<f64>,
    inv_chol: Vec<f64>,
    log_norm: f64,
}

impl Gaussian {
    /// Builds a Gaussian from a mean and a row-major `n x n` covariance.
    ///
    /// The covariance may deviate from exact symmetry by up to `1e-12`
    /// relative to its largest entry; such matrices are symmetrized before
    /// factorization. Larger deviations yield [`Error::NotSymmetric`], and a
    /// symmetric matrix without a strictly positive definite Cholesky
    /// factorization yields [`Error::NotPositiveDefinite`].
    pub fn new(mean: Point, cov: Vec<f64>) -> Result<Self> {
        let n = mean.dim();
        if cov.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: cov.len(),
            });
        }
        let cov = symmetrized(n, cov)?;
        let chol = cholesky_lower(n, &cov).ok_or(Error::NotPositiveDefinite)?;
        let inv_chol = invert_lower(n, &chol);
        let mut log_norm = -0.5 * n as f64 * ln(core::f64::consts::TAU);
        for r in 0..n {
            log_norm -= ln(chol[r * n + r]);
        }
        Ok(Gaussian {
            mean,
            dim: n,
            cov,
            chol,
            inv_chol,
            log_norm,
        })
    }

    /// Dimension of the distribution.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The mean vector.
    pub fn mean(&self) -> &Point {
        &self.mean
    }

    /// The (symmetrized) covariance, row-major.
    pub fn cov(&self) -> &[f64] {
        &self.cov
    }

    /// Logarithm of the normalizing constant, `-(n/2) ln(2 pi) - sum ln L_kk`.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// Log-density at `x`.
    pub fn logpdf(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(self.logpdf_unchecked(x))
    }

    /// Log-density for a slice already known to have the right length.
    ///
    /// The quadratic form is `|L^{-1}(x - mean)|^2` with the triangular
    /// solve materialized through the precomputed inverse factor, so the
    /// hot path performs no allocation.
    pub(crate) fn logpdf_unchecked(&self, x: &[f64]) -> f64 {
        let n = self.dim;
        let mut quad = 0.0;
        for r in 0..n {
            let row = &self.inv_chol[r * n..(r + 1) * n];
            let mut s = 0.0;
            for c in 0..=r {
                s += row[c] * (x[c] - self.mean.coords[c]);
            }
            quad += s * s;
        }
        self.log_norm - 0.5 * quad
    }

    /// Draws one point as `mean + L z` with `z` standard normal.
    ///
    /// Exactly `n` draws are taken from `rng`, in coordinate order, so a
    /// seeded generator reproduces the same point.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let n = self.dim;
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            z.push(rng.sample::<f64, _>(StandardNormal));
        }
        let mut coords = Vec::with_capacity(n);
        for r in 0..n {
            let mut s = self.mean.coords[r];
            for c in 0..=r {
                s += self.chol[r * n + c] * z[c];
            }
            coords.push(s);
        }
        Point { coords }
    }
}

fn symmetrized(n: usize, mut cov: Vec<f64>) -> Result<Vec<f64>> {
    let mut max_entry = 0.0f64;
    let mut max_gap = 0.0f64;
    for r in 0..n {
        for c in 0..r {
            let a = cov[r * n + c];
            let b = cov[c * n + r];
            let gap = abs(a - b);
            if gap > max_gap {
                max_gap = gap;
            }
        }
        for c in 0..n {
            let m = abs(cov[r * n + c]);
            if m > max_entry {
                max_entry = m;
            }
        }
    }
    if max_gap > SYMMETRY_TOLERANCE * max_entry {
        return Err(Error::NotSymmetric);
    }
    for r in 0..n {
        for c in 0..r {
            let avg = 0.5 * (cov[r * n + c] + cov[c * n + r]);
            cov[r * n + c] = avg;
            cov[c * n + r] = avg;
        }
    }
    Ok(cov)
}

// ---------------------------------------------------------------------------
// GaussianMixture
// ---------------------------------------------------------------------------

/// An equal-weight mixture of Gaussians sharing one dimension.
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    components: Vec<Gaussian>,
    dim: usize,
}

impl GaussianMixture {
    /// Wraps a nonempty list of same-dimension components.
    pub fn new(components: Vec<Gaussian>) -> Result<Self> {
        let first = components
            .first()
            .ok_or(Error::InvalidSize("mixture needs at least one component"))?;
        let dim = first.dim();
        for c in &components {
            if c.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: c.dim(),
                });
            }
        }
        Ok(GaussianMixture { components, dim })
    }

    /// Dimension of the mixture.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The components, in construction order.
    pub fn components(&self) -> &[Gaussian] {
        &self.components
    }

    /// Number of components.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    /// Always false: construction requires at least one component.
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Log-density `ln((1/M) sum_i q_i(x))`, evaluated by log-sum-exp.
    pub fn logpdf(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        Ok(self.logpdf_unchecked(x))
    }

    pub(crate) fn logpdf_unchecked(&self, x: &[f64]) -> f64 {
        let mut lps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            lps.push(c.logpdf_unchecked(x));
        }
        log_mean_exp(&lps)
    }

    /// Draws `count` i.i.d. points: for each, a component index uniform in
    /// `0..M`, then one draw from that component.
    pub fn sample_random<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let idx = rng.random_range(0..self.components.len());
            out.push(self.components[idx].sample(rng));
        }
        out
    }

    /// Draws exactly one point from every component, in component order.
    ///
    /// Pooling the `M` returned points gives draws whose marginal law is
    /// the mixture itself, without the multinomial noise of random
    /// component selection.
    pub fn sample_deterministic<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Point> {
        self.components.iter().map(|c| c.sample(rng)).collect()
    }

    /// Analytic mean: the average of the component means.
    pub fn mean(&self) -> Point {
        let m = self.components.len() as f64;
        let mut coords = alloc::vec![0.0f64; self.dim];
        for c in &self.components {
            for (acc, &x) in coords.iter_mut().zip(c.mean().iter()) {
                *acc += x;
            }
        }
        for acc in coords.iter_mut() {
            *acc /= m;
        }
        Point { coords }
    }

    /// Analytic covariance `(1/M) sum_i (C_i + mu_i mu_i^T) - mu mu^T`,
    /// row-major.
    pub fn covariance(&self) -> Vec<f64> {
        let n = self.dim;
        let m = self.components.len() as f64;
        let mean = self.mean();
        let mut cov = alloc::vec![0.0f64; n * n];
        for comp in &self.components {
            let mu = comp.mean();
            for r in 0..n {
                for c in 0..n {
                    cov[r * n + c] += (comp.cov()[r * n + c] + mu[r] * mu[c]) / m;
                }
            }
        }
        for r in 0..n {
            for c in 0..n {
                cov[r * n + c] -= mean[r] * mean[c];
            }
        }
        cov
    }
}

// ---------------------------------------------------------------------------
// TargetDensity
// ---------------------------------------------------------------------------

/// An unnormalized target known through its log-density, with a counter
/// recording how many times the log-density has been evaluated.
///
/// The wrapped function may return `-inf` (zero density) but never NaN or
/// `+inf`; those are reported as [`Error::NonFiniteDensity`]. The counter
/// increments once per wrapped-function call, including calls whose result
/// is then rejected.
pub struct TargetDensity {
    dim: usize,
    evals: AtomicU64,
    log_eval: Box<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl TargetDensity {
    /// Wraps a log-density function of the given dimension.
    pub fn new<F>(dim: usize, log_eval: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::InvalidSize("target dimension must be at least 1"));
        }
        Ok(TargetDensity {
            dim,
            evals: AtomicU64::new(0),
            log_eval: Box::new(log_eval),
        })
    }

    /// Uses a Gaussian mixture (already normalized) as the target.
    pub fn from_mixture(mixture: GaussianMixture) -> Self {
        let dim = mixture.dim();
        TargetDensity {
            dim,
            evals: AtomicU64::new(0),
            log_eval: Box::new(move |x| mixture.logpdf_unchecked(x)),
        }
    }

    /// Dimension of the target.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of log-density evaluations so far.
    pub fn eval_count(&self) -> u64 {
        self.evals.load(Ordering::Relaxed)
    }

    /// Log-density at `x`; counts the evaluation.
    pub fn logpdf(&self, x: &Point) -> Result<f64> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        self.evals.fetch_add(1, Ordering::Relaxed);
        let v = (self.log_eval)(x);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NonFiniteDensity);
        }
        Ok(v)
    }
}

impl fmt::Debug for TargetDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetDensity")
            .field("dim", &self.dim)
            .field("evals", &self.eval_count())
            .finish()
    }
}

// ---------------------------------------------------------------------------
// Benchmark target
// ---------------------------------------------------------------------------

/// The bivariate five-mode Gaussian mixture used as the benchmark target.
///
/// Modes sit far apart inside `[-20, 20]^2` with unequal, correlated
/// covariances, so no single local proposal covers the target. Its mean is
/// exactly `[1.6, 1.4]` and, being a normalized density, its integral is 1.
pub fn benchmark_mixture() -> GaussianMixture {
    let specs: [([f64; 2], [f64; 4]); 5] = [
        ([-10.0, -10.0], [2.0, 0.6, 0.6, 1.0]),
        ([0.0, 16.0], [2.0, -0.4, -0.4, 2.0]),
        ([13.0, 8.0], [2.0, 0.8, 0.8, 2.0]),
        ([-9.0, 7.0], [3.0, 0.0, 0.0, 0.5]),
        ([14.0, -14.0], [2.0, -0.1, -0.1, 2.0]),
    ];
    let components = specs
        .iter()
        .map(|(mean, cov)| {
            Gaussian::new(Point::new(mean.to_vec()).unwrap(), cov.to_vec()).unwrap()
        })
        .collect();
    GaussianMixture::new(components).unwrap()
}

// ---------------------------------------------------------------------------
