//! End-to-end approximation: Jackson polynomial, scaling, compilation, and
//! the error-decay experiments.

mod experiment;
mod heat;
mod model;

pub use experiment::{fit_loglog_slope, run_cells, run_experiment, Cell, ErrorCurve, ErrorRow, Experiment};
pub use heat::{heat_convolution, heat_reference, heat_trunc};
pub use model::{
    approximate_multivariate, approximate_univariate, build_multivariate, build_univariate, MultiBuild,
    MultiQnnModel, QnnModel, UniBuild, UniQnnModel,
};

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::unravel;
use crate::trig_core::{uniform_grid, PeriodicFn};

/// Safety factor on grid estimates of `‖f‖_∞`.
pub const NORM_SAFETY: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxOptions {
    /// Compile tolerance handed to the circuit compiler.
    pub tol: f64,
    /// Quadrature points per axis; `None` uses the degree-based default.
    pub quadrature: Option<usize>,
    /// Grid for `‖f‖_∞`; `None` means 8192 (d = 1) or 512 per axis.
    pub norm_grid: Option<usize>,
    /// Grid for reported errors; `None` means 4096 (d = 1) or 256 per axis.
    pub error_grid: Option<usize>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions { tol: 1e-9, quadrature: None, norm_grid: None, error_grid: None }
    }
}

impl ApproxOptions {
    pub fn norm_grid_for(&self, d: usize) -> usize {
        self.norm_grid.unwrap_or(if d == 1 { 8192 } else { 512 })
    }

    pub fn error_grid_for(&self, d: usize) -> usize {
        self.error_grid.unwrap_or(default_error_grid(d))
    }
}

pub fn default_error_grid(d: usize) -> usize {
    if d == 1 { 4096 } else { 256 }
}

/// Evaluates `f` on the uniform tensor grid with `g` points per axis,
/// row-major with the last axis fastest.
pub fn grid_values(f: &(dyn Fn(&[f64]) -> f64 + Sync), d: usize, g: usize) -> Vec<f64> {
    let xs = uniform_grid(g);
    let total = g.pow(d as u32);
    (0..total)
        .into_par_iter()
        .map_init(
            || (vec![0usize; d], vec![0.0; d], vec![g; d]),
            |(pos, x, shape), flat| {
                unravel(flat, shape, pos);
                for j in 0..d {
                    x[j] = xs[pos[j]];
                }
                f(x)
            },
        )
        .collect()
}

/// `max |f − predict|` over the uniform tensor grid.
pub fn sup_error(predict: &(dyn Fn(&[f64]) -> f64 + Sync), f: &PeriodicFn, g: usize) -> f64 {
    let values = grid_values(predict, f.dims(), g);
    sup_gap(&values, f, g)
}

/// `max |f − v|` for precomputed grid values `v`.
pub fn sup_gap(values: &[f64], f: &PeriodicFn, g: usize) -> f64 {
    let target = grid_values(&|x| f.eval(x), f.dims(), g);
    assert_eq!(values.len(), target.len(), "grid size mismatch");
    values.iter().zip(&target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// `f(x) = f̃(M x / 2π)` for an `M`-periodic `f̃`.
pub fn rescale_period(ft: impl Fn(f64) -> f64 + Send + Sync + 'static, period: f64) -> Result<PeriodicFn> {
    if !(period > 0.0) || !period.is_finite() {
        return Err(Error::invalid(format!("period must be positive and finite, got {period}")));
    }
    let scale = period / (2.0 * PI);
    Ok(PeriodicFn::univariate(move |x| ft(scale * x)))
}

/// Maps a predictor on the 2π axis back to the `M`-periodic axis.
pub fn unwrap_period(predict: impl Fn(f64) -> f64 + Send + Sync + 'static, period: f64) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
    let scale = 2.0 * PI / period;
    Arc::new(move |s| predict(scale * s))
}
