use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A real-valued, 2π-periodic function on `R^d`.
///
/// Functions built with [`PeriodicFn::separable`] remember their factors so
/// that Fourier coefficients can be computed axis by axis.
#[derive(Clone)]
pub struct PeriodicFn {
    dims: usize,
    eval: VectorFn,
    factors: Option<Vec<ScalarFn>>,
    smoothness: Option<f64>,
}

impl fmt::Debug for PeriodicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFn")
            .field("dims", &self.dims)
            .field("separable", &self.factors.is_some())
            .field("smoothness", &self.smoothness)
            .finish()
    }
}

impl PeriodicFn {
    pub fn univariate(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        let f: ScalarFn = Arc::new(f);
        let g = f.clone();
        PeriodicFn {
            dims: 1,
            eval: Arc::new(move |x: &[f64]| g(x[0])),
            factors: Some(vec![f]),
            smoothness: None,
        }
    }

    pub fn multivariate(dims: usize, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        assert!(dims >= 1, "a periodic function needs at least one coordinate");
        PeriodicFn { dims, eval: Arc::new(f), factors: None, smoothness: None }
    }

    /// `f(x) = Π_j f_j(x_j)`.
    pub fn separable(factors: Vec<ScalarFn>) -> Self {
        assert!(!factors.is_empty(), "a separable function needs at least one factor");
        let fs = factors.clone();
        PeriodicFn {
            dims: factors.len(),
            eval: Arc::new(move |x: &[f64]| fs.iter().zip(x).map(|(f, &xi)| f(xi)).product()),
            factors: Some(factors),
            smoothness: None,
        }
    }

    pub fn constant(dims: usize, value: f64) -> Self {
        let factors: Vec<ScalarFn> = (0..dims)
            .map(|j| -> ScalarFn { if j == 0 { Arc::new(move |_| value) } else { Arc::new(|_| 1.0) } })
            .collect();
        PeriodicFn::separable(factors)
    }

    /// Records the declared smoothness (e.g. number of continuous derivatives).
    pub fn with_smoothness(mut self, hint: f64) -> Self {
        self.smoothness = Some(hint);
        self
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    pub fn factors(&self) -> Option<&[ScalarFn]> {
        self.factors.as_deref()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dims);
        (self.eval)(x)
    }

    pub fn eval1(&self, x: f64) -> f64 {
        (self.eval)(&[x])
    }

    /// Spot-checks 2π-periodicity in every coordinate on random probes.
    pub fn is_periodic(&self, probes: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = vec![0.0; self.dims];
        for _ in 0..probes {
            for xi in x.iter_mut() {
                *xi = rng.gen_range(-PI..PI);
            }
            let base = self.eval(&x);
            for j in 0..self.dims {
                let mut shifted = x.clone();
                shifted[j] += 2.0 * PI;
                if (self.eval(&shifted) - base).abs() > 1e-9 {
                    return false;
                }
            }
        }
        true
    }
}
