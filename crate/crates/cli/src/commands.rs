use std::fs;
use std::path::{Path, PathBuf};

use jqnn_core::io::{from_json, points_csv, to_json, write_atomic, ModelDump, PerAxis, RunReport, Source};
use jqnn_core::pipeline::{build_multivariate, build_univariate, run_cells, sup_gap, QnnModel};
use jqnn_core::qsim::{lcu_amplitude_fast, lcu_dense_unitary};
use jqnn_core::trig_core::{default_quadrature_nd, jackson_degree, uniform_grid};
use jqnn_core::{fit_loglog_slope, ApproxOptions, ErrorCurve, Experiment, PeriodicFn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fail::{CliError, Stage};
use crate::registry::resolve;

/// Largest stored-vs-recomputed error gap `verify` accepts.
pub const VERIFY_TOL: f64 = 1e-9;
/// Slopes are fitted on rows with at least this `N` when enough exist.
const SLOPE_N_MIN: usize = 4;
const DENSE_PROBES: usize = 4;
/// Cap on error-grid work, grid points times LCU blocks.
const GRID_WORK_LIMIT: u128 = 1 << 30;
/// Cap on tensor quadrature points for functions that are not separable.
const QUADRATURE_LIMIT: u128 = 1 << 24;

pub struct Common {
    pub grid: Option<usize>,
    pub tol: f64,
    pub out: PathBuf,
    pub seed: u64,
}

impl Common {
    fn options(&self) -> Result<ApproxOptions, CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::config(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.grid == Some(0) {
            return Err(CliError::config("--grid must be at least 1"));
        }
        Ok(ApproxOptions { tol: self.tol, error_grid: self.grid, ..ApproxOptions::default() })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::output(format!("cannot create {}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        write_atomic(&path, contents.as_bytes())
            .map_err(|e| CliError::output(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    to_json(v).map_err(|e| CliError::new(Stage::Output, e))
}

fn check_n(n: &[usize]) -> Result<(), CliError> {
    match n.iter().position(|&v| v == 0) {
        Some(axis) => Err(CliError::config(format!("N must be at least 1 on every axis, got N = 0 at axis {axis}"))),
        None => Ok(()),
    }
}

pub fn approx1d(func: &str, t: Option<f64>, k: usize, n: usize, common: &Common) -> Result<String, CliError> {
    check_n(&[n])?;
    let opts = common.options()?;
    let f = resolve(func, t, 1)?;
    let b = build_univariate(&f, k, n, &opts).map_err(|e| CliError::new(Stage::Approximation, e))?;
    let g = opts.error_grid_for(1);
    let poly_vals: Vec<f64> = b.poly.grid_values(g).iter().map(|z| z.re).collect();
    let qnn_vals = b.model.predict_grid(g);
    let report = RunReport {
        kind: "univariate".into(),
        func: func.into(),
        t,
        k: PerAxis::One(k),
        n: PerAxis::One(n),
        l: PerAxis::One(b.model.l),
        c: b.model.c,
        param_count: b.model.param_count(),
        poly_sup_error: sup_gap(&poly_vals, &f, g),
        qnn_sup_error: sup_gap(&qnn_vals, &f, g),
        compile_residual: b.model.residual,
        error_grid: g,
        q: None,
        n_blocks: None,
        dense_check_gap: None,
    };
    let model = QnnModel::Uni(b.model);
    finish_run(&model, &report, func, t, common)
}

pub fn approxnd(
    func: &str,
    t: Option<f64>,
    k: &[usize],
    n: &[usize],
    dense_check: bool,
    common: &Common,
) -> Result<String, CliError> {
    if k.len() != n.len() {
        return Err(CliError::config(format!("--K has {} entries but --N has {}", k.len(), n.len())));
    }
    if n.len() < 2 {
        return Err(CliError::config("approxnd needs at least two axes; use approx1d for d = 1"));
    }
    check_n(n)?;
    let opts = common.options()?;
    let d = n.len();
    let f = resolve(func, t, d)?;
    resource_guard(&f, k, n, opts.error_grid_for(d))?;
    let b = build_multivariate(&f, k, n, &opts).map_err(|e| CliError::new(Stage::Approximation, e))?;
    let dense_check_gap = if dense_check {
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        let mut gap: f64 = 0.0;
        for _ in 0..DENSE_PROBES {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
            let dense = lcu_dense_unitary(&b.model.spec, &x).map_err(|e| CliError::new(Stage::Simulation, e))?;
            gap = gap.max((dense.get(0, 0) - lcu_amplitude_fast(&b.model.spec, &x)).norm());
        }
        Some(gap)
    } else {
        None
    };
    let g = opts.error_grid_for(d);
    let poly_vals: Vec<f64> = b.poly.tensor_grid_values(g).iter().map(|z| z.re).collect();
    let qnn_vals = b.model.predict_grid(g);
    let report = RunReport {
        kind: "multivariate".into(),
        func: func.into(),
        t,
        k: PerAxis::Many(k.to_vec()),
        n: PerAxis::Many(n.to_vec()),
        l: PerAxis::Many(b.model.l.clone()),
        c: b.model.c,
        param_count: b.model.param_count(),
        poly_sup_error: sup_gap(&poly_vals, &f, g),
        qnn_sup_error: sup_gap(&qnn_vals, &f, g),
        compile_residual: b.model.residual,
        error_grid: g,
        q: Some(b.model.q()),
        n_blocks: Some(b.model.n_blocks()),
        dense_check_gap,
    };
    let model = QnnModel::Multi(b.model);
    finish_run(&model, &report, func, t, common)
}

/// Refuses runs whose evaluation cost would be prohibitive, before any work starts.
fn resource_guard(f: &PeriodicFn, k: &[usize], n: &[usize], g: usize) -> Result<(), CliError> {
    let l: Vec<usize> = n.iter().zip(k).map(|(&nj, &kj)| jackson_degree(nj, kj)).collect();
    let blocks: u128 = l.iter().map(|&lj| 2 * lj as u128 + 1).product();
    let work = (g as u128).saturating_pow(l.len() as u32).saturating_mul(blocks);
    if work > GRID_WORK_LIMIT {
        return Err(CliError::guard(format!(
            "error grid of {g}^{} points over {blocks} blocks exceeds the work limit 2^30; pass a smaller --grid",
            l.len()
        )));
    }
    if f.factors().is_none() {
        let points: u128 = l.iter().map(|&lj| default_quadrature_nd(lj) as u128).product();
        if points > QUADRATURE_LIMIT {
            return Err(CliError::guard(format!(
                "non-separable function needs {points} quadrature points, above the limit 2^24"
            )));
        }
    }
    Ok(())
}

fn finish_run(model: &QnnModel, report: &RunReport, func: &str, t: Option<f64>, common: &Common) -> Result<String, CliError> {
    let dump = ModelDump::from_model(model, &Source { func: func.into(), t });
    let model_path = common.write("model.json", &json(&dump)?)?;
    let report_path = common.write("report.json", &json(report)?)?;
    Ok(format!(
        "wrote {} and {} (qnn_sup_error {:e}, compile_residual {:e})",
        model_path.display(),
        report_path.display(),
        report.qnn_sup_error,
        report.compile_residual
    ))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SlopeEntry {
    #[serde(rename = "K")]
    pub k: usize,
    pub slope: f64,
    pub n_min: usize,
    pub n_max: usize,
}

/// Contents of `report.json` for an experiment.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub rows: usize,
    pub error_grid: usize,
    pub slopes: Vec<SlopeEntry>,
    pub points_cell: [usize; 2],
}

/// Per-`K` slopes over `N ≥ SLOPE_N_MIN`, falling back to every row when too few remain.
fn slopes(curve: &ErrorCurve, ks: &[usize]) -> Vec<SlopeEntry> {
    ks.iter()
        .filter_map(|&k| {
            let ns: Vec<usize> = curve.for_k(k).map(|r| r.n).collect();
            let (&lo, &hi) = (ns.first()?, ns.last()?);
            let restricted = curve.restrict_n(SLOPE_N_MIN.max(lo), hi);
            let (fit, from) = match fit_loglog_slope(&restricted, k) {
                Ok(s) => (Ok(s), SLOPE_N_MIN.max(lo)),
                Err(_) => (fit_loglog_slope(curve, k), lo),
            };
            fit.ok().map(|slope| SlopeEntry { k, slope, n_min: from, n_max: hi })
        })
        .collect()
}

pub fn experiment(exp: Experiment, ns: Vec<usize>, ks: Vec<usize>, common: &Common) -> Result<String, CliError> {
    check_n(&ns)?;
    let opts = common.options()?;
    let cells = run_cells(exp, &ns, &ks, &opts).map_err(|e| CliError::new(Stage::Approximation, e))?;
    let curve = ErrorCurve::new(cells.iter().map(|c| c.row.clone()).collect());
    let errors_path = common.write("errors.csv", &curve.to_csv().map_err(|e| CliError::new(Stage::Output, e))?)?;

    // cells come back sorted by (N, K), so the last one is the largest
    let largest = cells.last().expect("ranges are nonempty");
    let d = exp.dims();
    let g = opts.error_grid_for(d);
    let target = exp.target().map_err(|e| CliError::new(Stage::Target, e))?;
    let points = tensor_points(d, g);
    let f_vals: Vec<f64> = points.iter().map(|x| target.eval(x)).collect();
    let predict = largest.model.predict_grid(g);
    let points_text = points_csv(&points, &f_vals, &predict).map_err(|e| CliError::new(Stage::Output, e))?;
    common.write("points.csv", &points_text)?;

    let mut ks_sorted = ks.clone();
    ks_sorted.sort_unstable();
    ks_sorted.dedup();
    let report = ExperimentReport {
        experiment: exp.name().into(),
        t: match exp {
            Experiment::Heat { t } => Some(t),
            _ => None,
        },
        n: ns,
        k: ks,
        rows: curve.rows.len(),
        error_grid: g,
        slopes: slopes(&curve, &ks_sorted),
        points_cell: [largest.row.n, largest.row.k],
    };
    common.write("report.json", &json(&report)?)?;
    let slope_text: Vec<String> = report.slopes.iter().map(|s| format!("K={}: {:.3}", s.k, s.slope)).collect();
    let slope_text = if slope_text.is_empty() { "n/a (a fit needs 4 values of N)".to_string() } else { slope_text.join(", ") };
    Ok(format!("wrote {} rows to {}; slopes {}", report.rows, errors_path.display(), slope_text))
}

/// Row-major tensor grid, last axis fastest, matching `predict_grid`.
fn tensor_points(d: usize, g: usize) -> Vec<Vec<f64>> {
    let axis = uniform_grid(g);
    let total = g.pow(d as u32);
    (0..total)
        .map(|mut flat| {
            let mut x = vec![0.0; d];
            for j in (0..d).rev() {
                x[j] = axis[flat % g];
                flat /= g;
            }
            x
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct VerifyOutcome {
    pub model: String,
    pub func: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub error_grid: usize,
    pub stored_qnn_sup_error: f64,
    pub recomputed_qnn_sup_error: f64,
    pub deviation: f64,
    pub ok: bool,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

/// Reloads a model, recomputes its sup error and compares with the stored report.
pub fn verify(
    model_path: &Path,
    report_path: Option<&Path>,
    func: Option<&str>,
    t: Option<f64>,
) -> Result<(VerifyOutcome, String), CliError> {
    let model_path = if model_path.is_dir() { model_path.join("model.json") } else { model_path.to_path_buf() };
    let report_path = match report_path {
        Some(p) => p.to_path_buf(),
        None => model_path.with_file_name("report.json"),
    };
    let dump: ModelDump = from_json(&read(&model_path)?)
        .map_err(|e| CliError::verify(format!("{}: {e}", model_path.display())))?;
    let model = dump.to_model().map_err(|e| CliError::verify(format!("{}: {e}", model_path.display())))?;
    let report: RunReport = from_json(&read(&report_path)?)
        .map_err(|e| CliError::verify(format!("{}: {e}", report_path.display())))?;
    if report.param_count != model.param_count() {
        return Err(CliError::verify(format!(
            "report says {} parameters, model has {}",
            report.param_count,
            model.param_count()
        )));
    }

    let source = dump.source();
    let (func, t) = match func {
        Some(f) => (f.to_string(), t),
        None => (source.func, source.t),
    };
    let d = model.dims();
    let f: PeriodicFn = resolve(&func, t, d)?;
    let g = report.error_grid;
    let recomputed = sup_gap(&model.predict_grid(g), &f, g);
    let deviation = (recomputed - report.qnn_sup_error).abs();
    let outcome = VerifyOutcome {
        model: model_path.display().to_string(),
        func,
        t,
        error_grid: g,
        stored_qnn_sup_error: report.qnn_sup_error,
        recomputed_qnn_sup_error: recomputed,
        deviation,
        ok: deviation <= VERIFY_TOL,
    };
    let text = json(&outcome)?;
    Ok((outcome, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_points_are_row_major() {
        let p = tensor_points(2, 3);
        let axis = uniform_grid(3);
        assert_eq!(p.len(), 9);
        assert_eq!(p[1], vec![axis[0], axis[1]]);
        assert_eq!(p[3], vec![axis[1], axis[0]]);
    }

    #[test]
    fn zero_n_names_the_axis() {
        let e = check_n(&[0, 2]).unwrap_err();
        assert_eq!(e.code(), 1);
        assert!(e.to_string().contains("N = 0 at axis 0"));
    }
}
