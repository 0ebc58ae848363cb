use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::heat::{heat_convolution, heat_reference, heat_trunc};
use super::model::{build_multivariate, build_univariate, QnnModel};
use super::{sup_gap, ApproxOptions};
use crate::error::{Error, Result};
use crate::trig_core::{jackson_degree, PeriodicFn};

/// Heat-series tail tolerance for experiment targets.
const HEAT_TAIL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Experiment {
    /// `|sin x|`
    Fig1AbsSin,
    /// `|sin x|^{2.5}`
    Fig2AbsSin25,
    /// Two-dimensional heat solution at time `t`.
    Heat { t: f64 },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig1AbsSin => "fig1",
            Experiment::Fig2AbsSin25 => "fig2",
            Experiment::Heat { .. } => "heat",
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            Experiment::Heat { .. } => 2,
            _ => 1,
        }
    }

    pub fn target(&self) -> Result<PeriodicFn> {
        Ok(match *self {
            Experiment::Fig1AbsSin => PeriodicFn::univariate(|x: f64| x.sin().abs()).with_smoothness(1.0),
            Experiment::Fig2AbsSin25 => PeriodicFn::univariate(|x: f64| x.sin().abs().powf(2.5)).with_smoothness(2.5),
            Experiment::Heat { t } => heat_reference(t, 2, heat_trunc(t, HEAT_TAIL))?,
        })
    }

    /// Sweep ranges used when none are given.
    pub fn default_ranges(&self) -> (Vec<usize>, Vec<usize>) {
        match self {
            Experiment::Heat { .. } => ((2..=7).collect(), (0..=2).collect()),
            _ => ((1..=20).collect(), (0..=5).collect()),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Experiment::Heat { t } => write!(f, "heat(t = {t})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    /// Accepts `fig1`, `fig2`, `heat` (t = 0.5) and `heat:<t>`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" | "fig1_abssin" => Ok(Experiment::Fig1AbsSin),
            "fig2" | "fig2_abssin25" => Ok(Experiment::Fig2AbsSin25),
            "heat" => Ok(Experiment::Heat { t: 0.5 }),
            _ => match s.strip_prefix("heat:") {
                Some(t) => t
                    .parse()
                    .ok()
                    .filter(|t: &f64| *t > 0.0 && t.is_finite())
                    .map(|t| Experiment::Heat { t })
                    .ok_or_else(|| Error::invalid(format!("invalid heat time in {s:?}"))),
                None => Err(Error::invalid(format!("unknown experiment {s:?} (expected fig1, fig2 or heat)"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub param_count: usize,
    pub poly_sup_error: f64,
    pub qnn_sup_error: f64,
    pub compile_residual: f64,
}

/// Error measurements over an `(N, K)` sweep, sorted by `(N, K)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorCurve {
    pub rows: Vec<ErrorRow>,
}

pub const CSV_HEADER: &str = "N,K,L,param_count,poly_sup_error,qnn_sup_error,compile_residual";

impl ErrorCurve {
    pub fn new(mut rows: Vec<ErrorRow>) -> Self {
        rows.sort_by_key(|r| (r.n, r.k));
        ErrorCurve { rows }
    }

    pub fn for_k(&self, k: usize) -> impl Iterator<Item = &ErrorRow> {
        self.rows.iter().filter(move |r| r.k == k)
    }

    /// Rows with `lo ≤ N ≤ hi`.
    pub fn restrict_n(&self, lo: usize, hi: usize) -> ErrorCurve {
        ErrorCurve { rows: self.rows.iter().filter(|r| (lo..=hi).contains(&r.n)).cloned().collect() }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record(CSV_HEADER.split(','))
                .map_err(|e| Error::Format(e.to_string()))?;
        }
        for r in &self.rows {
            w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| Error::Format(e.to_string()))?;
        if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
            return Err(Error::Format(format!("unexpected CSV header, expected {CSV_HEADER}")));
        }
        let rows = r
            .deserialize()
            .collect::<std::result::Result<Vec<ErrorRow>, _>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        Ok(ErrorCurve { rows })
    }
}

/// One experiment cell: its row and the model that produced it.
#[derive(Debug, Clone)]
pub struct Cell {
    pub row: ErrorRow,
    pub model: QnnModel,
}

fn heat_cross_check(t: f64, target: &PeriodicFn) -> Result<()> {
    let (a, b) = (1.0, -2.0);
    let series = target.eval(&[a, b]);
    let direct = heat_convolution(t, a) * heat_convolution(t, b);
    if (series - direct).abs() > 1e-8 {
        return Err(Error::invalid(format!(
            "heat reference disagrees with the convolution oracle at ({a}, {b}): {series} vs {direct}"
        )));
    }
    Ok(())
}

fn run_cell(exp: Experiment, target: &PeriodicFn, n: usize, k: usize, opts: &ApproxOptions) -> Result<Cell> {
    let d = exp.dims();
    let g = opts.error_grid_for(d);
    if d == 1 {
        let b = build_univariate(target, k, n, opts)?;
        let poly_vals: Vec<f64> = b.poly.grid_values(g).iter().map(|z| z.re).collect();
        let qnn_vals = b.model.predict_grid(g);
        let row = ErrorRow {
            n,
            k,
            l: b.model.l,
            param_count: b.model.param_count(),
            poly_sup_error: sup_gap(&poly_vals, target, g),
            qnn_sup_error: sup_gap(&qnn_vals, target, g),
            compile_residual: b.model.residual,
        };
        Ok(Cell { row, model: QnnModel::Uni(b.model) })
    } else {
        let b = build_multivariate(target, &vec![k; d], &vec![n; d], opts)?;
        let poly_vals: Vec<f64> = b.poly.tensor_grid_values(g).iter().map(|z| z.re).collect();
        let qnn_vals = b.model.predict_grid(g);
        let row = ErrorRow {
            n,
            k,
            l: jackson_degree(n, k),
            param_count: b.model.param_count(),
            poly_sup_error: sup_gap(&poly_vals, target, g),
            qnn_sup_error: sup_gap(&qnn_vals, target, g),
            compile_residual: b.model.residual,
        };
        Ok(Cell { row, model: QnnModel::Multi(b.model) })
    }
}

/// Builds every `(N, K)` cell; cells run in parallel, results sorted by `(N, K)`.
pub fn run_cells(exp: Experiment, n_range: &[usize], k_range: &[usize], opts: &ApproxOptions) -> Result<Vec<Cell>> {
    if n_range.is_empty() || k_range.is_empty() {
        return Err(Error::invalid("experiment ranges must be nonempty"));
    }
    let target = exp.target()?;
    if let Experiment::Heat { t } = exp {
        heat_cross_check(t, &target)?;
    }
    let mut keys: Vec<(usize, usize)> = n_range.iter().flat_map(|&n| k_range.iter().map(move |&k| (n, k))).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.par_iter().map(|&(n, k)| run_cell(exp, &target, n, k, opts)).collect()
}

pub fn run_experiment(exp: Experiment, n_range: &[usize], k_range: &[usize], opts: &ApproxOptions) -> Result<ErrorCurve> {
    Ok(ErrorCurve::new(run_cells(exp, n_range, k_range, opts)?.into_iter().map(|c| c.row).collect()))
}

/// Least-squares slope of `log(qnn_sup_error)` against `log N` over the rows with this `K`.
pub fn fit_loglog_slope(curve: &ErrorCurve, k: usize) -> Result<f64> {
    let pts: Vec<(f64, f64)> = curve.for_k(k).map(|r| (r.n as f64, r.qnn_sup_error)).collect();
    let mut distinct: Vec<usize> = curve.for_k(k).map(|r| r.n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if pts.len() < 4 || distinct.len() < 2 {
        return Err(Error::invalid(format!(
            "slope fit for K = {k} needs at least 4 rows with distinct N, got {} rows",
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, e)| !(e > 0.0)) {
        return Err(Error::invalid(format!("slope fit for K = {k} needs positive errors")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}
