//! Compilation of bounded trigonometric polynomials into rotation angles.

mod analytic;
mod fit;
mod roots;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::single_qubit_amplitude;
use crate::trig_core::{uniform_grid, TrigPoly1D};

pub use roots::polynomial_roots;

/// Largest polynomial degree accepted by the compiler.
pub const MAX_COMPILE_DEGREE: usize = 64;
/// Grid used for the boundedness precondition.
pub const BOUND_CHECK_GRID: usize = 4096;
/// Residual above which compilation is reported as failed.
pub const FAIL_RESIDUAL: f64 = 1e-4;

const BOUND_SLACK: f64 = 1e-12;
const PRESCALE: f64 = 1.0 - 1e-9;
const MONOMIAL_TOL: f64 = 1e-10;
const FIT_SEED: u64 = 0x6a61_636b;

/// Rotation angles of a depth-`2L` single-qubit circuit.
///
/// `phi[0]` is the leading global `R_Z` angle; `phi[l + 1]` belongs to
/// layer `l`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct QnnParams {
    pub depth: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

#[derive(Deserialize)]
struct RawParams {
    depth: usize,
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl TryFrom<RawParams> for QnnParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        QnnParams::new(raw.depth, raw.theta, raw.phi)
    }
}

impl QnnParams {
    pub fn new(depth: usize, theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if depth % 2 != 0 {
            return Err(Error::invalid(format!("depth must be even, got {depth}")));
        }
        if theta.len() != depth + 1 || phi.len() != depth + 2 {
            return Err(Error::invalid(format!(
                "depth {depth} needs {} theta and {} phi angles, got {} and {}",
                depth + 1,
                depth + 2,
                theta.len(),
                phi.len()
            )));
        }
        if theta.iter().chain(&phi).any(|a| !a.is_finite()) {
            return Err(Error::invalid("non-finite angle"));
        }
        Ok(QnnParams { depth, theta, phi })
    }

    /// Circuit whose amplitude vanishes identically: `R_Y(π)` followed by
    /// identity layers.
    pub fn zero(depth: usize) -> Self {
        let mut theta = vec![0.0; depth + 1];
        theta[0] = PI;
        QnnParams { depth, theta, phi: vec![0.0; depth + 2] }
    }

    /// `(2L+1) + (2L+2)`.
    pub fn param_count(&self) -> usize {
        self.theta.len() + self.phi.len()
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        single_qubit_amplitude(self, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CompileMethod {
    Analytic,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub residual: f64,
    pub method: CompileMethod,
    pub grid: usize,
}

/// Residual grid for a degree-`L` target.
pub fn residual_grid(degree: usize) -> usize {
    1024.max(32 * (degree + 1))
}

/// `sup_x |⟨0|U(x)|0⟩ − T(x)|` over a `g`-point uniform grid.
pub fn verify_params(p: &QnnParams, t: &TrigPoly1D, g: usize) -> f64 {
    uniform_grid(g)
        .into_iter()
        .map(|x| (single_qubit_amplitude(p, x) - t.eval(x)).norm())
        .fold(0.0, f64::max)
}

/// Angles of a depth-`2L` circuit whose amplitude reproduces `t`.
pub fn compile_trig_poly(t: &TrigPoly1D, tol: f64) -> Result<(QnnParams, CompileReport)> {
    let l = t.degree();
    if l > MAX_COMPILE_DEGREE {
        return Err(Error::DegreeTooLarge { degree: l, max: MAX_COMPILE_DEGREE });
    }
    let sup = t.sup_on_grid(BOUND_CHECK_GRID);
    if sup > 1.0 + BOUND_SLACK {
        return Err(Error::NotBounded { sup });
    }
    let mut a = t.coeffs().to_vec();
    if sup > PRESCALE {
        a.iter_mut().for_each(|c| *c *= PRESCALE);
    }

    let grid = residual_grid(l);
    let measure = |p: &QnnParams| verify_params(p, t, grid);

    let b = analytic::complete(&a);
    let analytic_params = analytic::peel(a, b);
    let analytic_residual = measure(&analytic_params);
    let report = |residual, method| CompileReport { residual, method, grid };
    if analytic_residual <= tol {
        return Ok((analytic_params, report(analytic_residual, CompileMethod::Analytic)));
    }

    let target = |x: f64| t.eval(x);
    let polished = fit::polish(&analytic_params, &target);
    let polished_residual = measure(&polished);
    let mut best = if polished_residual < analytic_residual {
        (polished, report(polished_residual, CompileMethod::Optimized))
    } else {
        (analytic_params, report(analytic_residual, CompileMethod::Analytic))
    };
    if best.1.residual > tol {
        let (p, r) = fit::multistart(2 * l, &target, FIT_SEED ^ l as u64, &measure);
        if r < best.1.residual {
            best = (p, report(r, CompileMethod::Optimized));
        }
    }
    if best.1.residual > FAIL_RESIDUAL {
        return Err(Error::CompileFailed { best_residual: best.1.residual, context: String::new() });
    }
    Ok(best)
}

/// Angles for `c·e^{inx}` at depth `2|n|`.
///
/// Non-positive frequencies need no mixing: every interior `R_Y` is the
/// identity and the `R_Z(x)` phases accumulate to `e^{-i|n|x}`.
pub fn compile_monomial(c: Complex64, n: i64) -> Result<(QnnParams, CompileReport)> {
    let modulus = c.norm();
    if !modulus.is_finite() || modulus > 1.0 + BOUND_SLACK {
        return Err(Error::NotBounded { sup: modulus });
    }
    let depth = 2 * n.unsigned_abs() as usize;
    if n > 0 {
        return compile_trig_poly(&TrigPoly1D::monomial(c, n), MONOMIAL_TOL);
    }
    let mut theta = vec![0.0; depth + 1];
    theta[0] = 2.0 * modulus.min(1.0).acos();
    let mut phi = vec![0.0; depth + 2];
    if modulus > 0.0 {
        phi[1] = -2.0 * c.arg();
    }
    let params = QnnParams { depth, theta, phi };
    let grid = residual_grid(depth / 2);
    let residual = verify_params(&params, &TrigPoly1D::monomial(c, n), grid);
    Ok((params, CompileReport { residual, method: CompileMethod::Analytic, grid }))
}
