use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{ApproxOptions, NORM_SAFETY};
use crate::error::{Error, Result};
use crate::qnn_compile::{compile_monomial, compile_trig_poly, CompileMethod, QnnParams};
use crate::qsim::{box_ordering, ceil_log2, lcu_amplitude_fast, single_qubit_amplitude, BlockSpec};
use crate::tensor::unravel;
use crate::trig_core::{
    default_quadrature_1d, default_quadrature_nd, jackson_approx_1d, jackson_approx_nd, jackson_degree,
    sup_norm_estimate, uniform_grid, PeriodicFn, TrigPoly1D, TrigPolyND,
};

/// Single-qubit model `x ↦ c·Re⟨0|U(x)|0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniQnnModel {
    pub k: usize,
    pub n: usize,
    pub l: usize,
    pub c: f64,
    pub params: QnnParams,
    /// Amplitude residual of the compiled circuit against `T/c`.
    pub residual: f64,
    pub method: CompileMethod,
}

impl UniQnnModel {
    pub fn zero(k: usize, n: usize) -> Self {
        let l = jackson_degree(n, k);
        UniQnnModel { k, n, l, c: 0.0, params: QnnParams::zero(2 * l), residual: 0.0, method: CompileMethod::Analytic }
    }

    pub fn predict(&self, x: f64) -> f64 {
        self.predict_complex(x).re
    }

    pub fn predict_complex(&self, x: f64) -> Complex64 {
        single_qubit_amplitude(&self.params, x) * self.c
    }

    pub fn predict_grid(&self, g: usize) -> Vec<f64> {
        uniform_grid(g).into_par_iter().map(|x| self.predict(x)).collect()
    }

    pub fn param_count(&self) -> usize {
        self.params.param_count()
    }
}

/// Multi-qubit model `x ↦ c·2^q·Re(amplitude)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiQnnModel {
    pub k: Vec<usize>,
    pub n: Vec<usize>,
    pub l: Vec<usize>,
    pub c: f64,
    pub spec: BlockSpec,
    /// Largest amplitude residual over all compiled blocks.
    pub residual: f64,
}

impl MultiQnnModel {
    pub fn zero(k: Vec<usize>, n: Vec<usize>) -> Result<Self> {
        let l: Vec<usize> = n.iter().zip(&k).map(|(&nj, &kj)| jackson_degree(nj, kj)).collect();
        let blocks = box_ordering(&l)
            .iter()
            .map(|idx| idx.iter().map(|nj| QnnParams::zero(2 * nj.unsigned_abs() as usize)).collect())
            .collect();
        let spec = BlockSpec::new(l.clone(), blocks)?;
        Ok(MultiQnnModel { k, n, l, c: 0.0, spec, residual: 0.0 })
    }

    pub fn q(&self) -> usize {
        self.spec.q
    }

    pub fn d(&self) -> usize {
        self.spec.d
    }

    pub fn n_blocks(&self) -> usize {
        self.spec.n_blocks()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predict_complex(x).re
    }

    pub fn predict_complex(&self, x: &[f64]) -> Complex64 {
        lcu_amplitude_fast(&self.spec, x) * (self.c * (1u64 << self.spec.q) as f64)
    }

    /// Predictions on the uniform tensor grid, row-major.
    ///
    /// Block amplitudes factor over axes, so each factor is tabulated once
    /// per grid coordinate.
    pub fn predict_grid(&self, g: usize) -> Vec<f64> {
        let d = self.d();
        let xs = uniform_grid(g);
        let tables: Vec<Vec<Vec<Complex64>>> = (0..d)
            .map(|j| {
                let mut cache: HashMap<Vec<u64>, usize> = HashMap::new();
                let mut distinct: Vec<&QnnParams> = Vec::new();
                let idx: Vec<usize> = self
                    .spec
                    .blocks
                    .iter()
                    .map(|row| {
                        *cache.entry(angle_bits(&row[j])).or_insert_with(|| {
                            distinct.push(&row[j]);
                            distinct.len() - 1
                        })
                    })
                    .collect();
                let vals: Vec<Vec<Complex64>> = distinct
                    .par_iter()
                    .map(|p| xs.iter().map(|&x| single_qubit_amplitude(p, x)).collect())
                    .collect();
                idx.into_iter().map(|i| vals[i].clone()).collect()
            })
            .collect();
        let scale = self.c;
        (0..g.pow(d as u32))
            .into_par_iter()
            .map_init(
                || (vec![0usize; d], vec![g; d]),
                |(pos, shape), flat| {
                    unravel(flat, shape, pos);
                    let sum: Complex64 = (0..self.n_blocks())
                        .map(|i| (0..d).map(|j| tables[j][i][pos[j]]).product::<Complex64>())
                        .sum();
                    sum.re * scale
                },
            )
            .collect()
    }

    pub fn param_count(&self) -> usize {
        self.spec.blocks.iter().flatten().map(QnnParams::param_count).sum()
    }
}

fn angle_bits(p: &QnnParams) -> Vec<u64> {
    p.theta.iter().chain(&p.phi).map(|a| a.to_bits()).collect()
}

/// Either kind of model, for code that handles both.
#[derive(Debug, Clone, PartialEq)]
pub enum QnnModel {
    Uni(UniQnnModel),
    Multi(MultiQnnModel),
}

impl QnnModel {
    pub fn dims(&self) -> usize {
        match self {
            QnnModel::Uni(_) => 1,
            QnnModel::Multi(m) => m.d(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            QnnModel::Uni(m) => m.predict(x[0]),
            QnnModel::Multi(m) => m.predict(x),
        }
    }

    pub fn predict_grid(&self, g: usize) -> Vec<f64> {
        match self {
            QnnModel::Uni(m) => m.predict_grid(g),
            QnnModel::Multi(m) => m.predict_grid(g),
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            QnnModel::Uni(m) => m.param_count(),
            QnnModel::Multi(m) => m.param_count(),
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            QnnModel::Uni(m) => m.residual,
            QnnModel::Multi(m) => m.residual,
        }
    }
}

/// A univariate model together with the polynomial it was compiled from.
#[derive(Debug, Clone)]
pub struct UniBuild {
    pub model: UniQnnModel,
    /// `T_{N,K} f`, unscaled.
    pub poly: TrigPoly1D,
}

#[derive(Debug, Clone)]
pub struct MultiBuild {
    pub model: MultiQnnModel,
    pub poly: TrigPolyND,
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    Ok(())
}

pub fn build_univariate(f: &PeriodicFn, k: usize, n: usize, opts: &ApproxOptions) -> Result<UniBuild> {
    if f.dims() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a univariate function, got d = {}", f.dims())));
    }
    check_n(n)?;
    let l = jackson_degree(n, k);
    let m = opts.quadrature.unwrap_or(default_quadrature_1d(l));
    let poly = jackson_approx_1d(f, n, k, m)?;
    let norm = sup_norm_estimate(f, opts.norm_grid_for(1));
    if norm == 0.0 {
        return Ok(UniBuild { model: UniQnnModel::zero(k, n), poly });
    }
    let c = ((1u64 << (k + 1)) - 1) as f64 * norm * NORM_SAFETY;
    let (params, report) = compile_trig_poly(&poly.scaled(1.0 / c), opts.tol).map_err(|e| with_context(e, &format!(" for N = {n}, K = {k}")))?;
    let model = UniQnnModel { k, n, l, c, params, residual: report.residual, method: report.method };
    Ok(UniBuild { model, poly })
}

/// Single-qubit approximation of a univariate periodic `f`.
pub fn approximate_univariate(f: &PeriodicFn, k: usize, n: usize, opts: &ApproxOptions) -> Result<UniQnnModel> {
    build_univariate(f, k, n, opts).map(|b| b.model)
}

fn with_context(e: Error, ctx: &str) -> Error {
    match e {
        Error::CompileFailed { best_residual, context } => {
            Error::CompileFailed { best_residual, context: format!("{ctx}{context}") }
        }
        other => other,
    }
}

pub fn build_multivariate(f: &PeriodicFn, k: &[usize], n: &[usize], opts: &ApproxOptions) -> Result<MultiBuild> {
    let d = f.dims();
    if k.len() != d || n.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "function has d = {d}, got K of length {} and N of length {}",
            k.len(),
            n.len()
        )));
    }
    for &nj in n {
        check_n(nj)?;
    }
    let l: Vec<usize> = n.iter().zip(k).map(|(&nj, &kj)| jackson_degree(nj, kj)).collect();
    let m: Vec<usize> = l.iter().map(|&lj| opts.quadrature.unwrap_or(default_quadrature_nd(lj))).collect();
    let poly = jackson_approx_nd(f, n, k, &m)?;
    let norm = sup_norm_estimate(f, opts.norm_grid_for(d));
    if norm == 0.0 {
        return Ok(MultiBuild { model: MultiQnnModel::zero(k.to_vec(), n.to_vec())?, poly });
    }
    let c = norm * k.iter().map(|&kj| ((1u64 << (kj + 1)) - 1) as f64).product::<f64>() * NORM_SAFETY;

    // Unit monomials e^{i n_j x_j} for the trailing axes, shared across blocks.
    let mut units: HashMap<i64, (QnnParams, f64)> = HashMap::new();
    for &lj in &l[1..] {
        for nj in -(lj as i64)..=lj as i64 {
            if let std::collections::hash_map::Entry::Vacant(e) = units.entry(nj) {
                let (p, r) = compile_monomial(Complex64::new(1.0, 0.0), nj)?;
                e.insert((p, r.residual));
            }
        }
    }

    let ordering = box_ordering(&l);
    let firsts: Vec<(QnnParams, f64)> = ordering
        .par_iter()
        .map(|idx| {
            let coeff = poly.coeff(idx) / c;
            compile_monomial(coeff, idx[0])
                .map(|(p, r)| (p, r.residual))
                .map_err(|e| with_context(e, &format!(" at n = {idx:?} (N = {n:?}, K = {k:?})")))
        })
        .collect::<Result<_>>()?;

    let mut residual: f64 = 0.0;
    let mut blocks = Vec::with_capacity(ordering.len());
    for (idx, (first, r)) in ordering.iter().zip(firsts) {
        residual = residual.max(r);
        let mut row = vec![first];
        for &nj in &idx[1..] {
            let (p, r) = &units[&nj];
            residual = residual.max(*r);
            row.push(p.clone());
        }
        blocks.push(row);
    }
    let spec = BlockSpec::new(l.clone(), blocks)?;
    debug_assert_eq!(spec.q, ceil_log2(spec.n_blocks()));
    let model = MultiQnnModel { k: k.to_vec(), n: n.to_vec(), l, c, spec, residual };
    Ok(MultiBuild { model, poly })
}

/// Linear-combination-of-unitaries approximation of a multivariate `f`.
pub fn approximate_multivariate(f: &PeriodicFn, k: &[usize], n: &[usize], opts: &ApproxOptions) -> Result<MultiQnnModel> {
    build_multivariate(f, k, n, opts).map(|b| b.model)
}
