//! Named target functions and coefficient files.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use jqnn_core::io::from_json;
use jqnn_core::pipeline::{heat_reference, heat_trunc};
use jqnn_core::trig_core::ScalarFn;
use jqnn_core::{Complex64, PeriodicFn, TrigPolyND};
use serde::Deserialize;

use crate::fail::{CliError, Stage};

pub const BUILTINS: [&str; 6] = ["abssin", "abssin25", "zero", "cos", "prodcos", "heat"];

/// Heat-series tail used for the `heat` target.
const HEAT_TAIL: f64 = 1e-10;

/// `{"degrees": [L_1, …], "coeffs": [[re, im], …]}`, row-major over `-L..=L`
/// per axis with the last axis fastest.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffFile {
    degrees: Vec<usize>,
    coeffs: Vec<[f64; 2]>,
}

fn univariate_only(name: &str, d: usize) -> Result<(), CliError> {
    if d != 1 {
        return Err(CliError::config(format!("--func {name} is univariate, but {d} axes were requested")));
    }
    Ok(())
}

/// Resolves `--func` for a `d`-dimensional run.
pub fn resolve(func: &str, t: Option<f64>, d: usize) -> Result<PeriodicFn, CliError> {
    if func != "heat" && t.is_some() {
        return Err(CliError::config(format!("--t only applies to --func heat, not {func}")));
    }
    match func {
        "abssin" => {
            univariate_only(func, d)?;
            Ok(PeriodicFn::univariate(|x: f64| x.sin().abs()))
        }
        "abssin25" => {
            univariate_only(func, d)?;
            Ok(PeriodicFn::univariate(|x: f64| x.sin().abs().powf(2.5)))
        }
        "cos" => {
            univariate_only(func, d)?;
            Ok(PeriodicFn::univariate(f64::cos))
        }
        "zero" => Ok(PeriodicFn::constant(d, 0.0)),
        "prodcos" => Ok(PeriodicFn::separable((0..d).map(|_| -> ScalarFn { Arc::new(f64::cos) }).collect())),
        "heat" => {
            let t = t.ok_or_else(|| CliError::config("--func heat needs --t"))?;
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::config(format!("--t must be positive and finite, got {t}")));
            }
            heat_reference(t, d, heat_trunc(t, HEAT_TAIL)).map_err(|e| CliError::new(Stage::Target, e))
        }
        path => from_file(Path::new(path), d),
    }
}

fn from_file(path: &Path, d: usize) -> Result<PeriodicFn, CliError> {
    if !path.exists() {
        return Err(CliError::config(format!(
            "--func {} is neither a built-in ({}) nor an existing coefficient file",
            path.display(),
            BUILTINS.join(", ")
        )));
    }
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let file: CoeffFile = from_json(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if file.degrees.len() != d {
        return Err(CliError::config(format!(
            "{} has {} axes, but {d} were requested",
            path.display(),
            file.degrees.len()
        )));
    }
    let coeffs = file.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
    let poly = TrigPolyND::new(file.degrees, coeffs).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    if !poly.is_hermitian() {
        return Err(CliError::config(format!(
            "{}: coefficients must satisfy c_(-n) = conj(c_n) so the function is real",
            path.display()
        )));
    }
    Ok(if d == 1 {
        PeriodicFn::univariate(move |x: f64| poly.eval(&[x]).re)
    } else {
        PeriodicFn::multivariate(d, move |x: &[f64]| poly.eval(x).re)
    })
}
