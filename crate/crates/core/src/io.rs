//! On-disk formats: model and report JSON, point CSV, atomic writes.
//!
//! Floats are written in shortest round-trip form, so parsing and
//! re-serializing a file reproduces it byte for byte.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::{MultiQnnModel, QnnModel, UniQnnModel};
use crate::qnn_compile::{CompileMethod, QnnParams};
use crate::qsim::BlockSpec;
use crate::trig_core::jackson_degree;

/// Where a model's target function came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub func: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniModelDump {
    pub func: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub c: f64,
    pub depth: usize,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub residual: f64,
    pub method: CompileMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiModelDump {
    pub func: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    #[serde(rename = "N")]
    pub n: Vec<usize>,
    #[serde(rename = "L")]
    pub l: Vec<usize>,
    pub c: f64,
    pub q: usize,
    pub d: usize,
    pub n_blocks: usize,
    pub residual: f64,
    pub ordering: Vec<Vec<i64>>,
    pub blocks: Vec<Vec<QnnParams>>,
}

/// Contents of `model.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelDump {
    Univariate(UniModelDump),
    Multivariate(MultiModelDump),
}

impl ModelDump {
    pub fn from_model(model: &QnnModel, source: &Source) -> Self {
        match model {
            QnnModel::Uni(m) => ModelDump::Univariate(UniModelDump {
                func: source.func.clone(),
                t: source.t,
                k: m.k,
                n: m.n,
                l: m.l,
                c: m.c,
                depth: m.params.depth,
                theta: m.params.theta.clone(),
                phi: m.params.phi.clone(),
                residual: m.residual,
                method: m.method,
            }),
            QnnModel::Multi(m) => ModelDump::Multivariate(MultiModelDump {
                func: source.func.clone(),
                t: source.t,
                k: m.k.clone(),
                n: m.n.clone(),
                l: m.l.clone(),
                c: m.c,
                q: m.q(),
                d: m.d(),
                n_blocks: m.n_blocks(),
                residual: m.residual,
                ordering: m.spec.ordering.clone(),
                blocks: m.spec.blocks.clone(),
            }),
        }
    }

    pub fn source(&self) -> Source {
        match self {
            ModelDump::Univariate(m) => Source { func: m.func.clone(), t: m.t },
            ModelDump::Multivariate(m) => Source { func: m.func.clone(), t: m.t },
        }
    }

    /// Rebuilds the model, checking every structural invariant.
    pub fn to_model(&self) -> Result<QnnModel> {
        match self {
            ModelDump::Univariate(m) => {
                if m.l != jackson_degree(m.n, m.k) || m.depth != 2 * m.l {
                    return Err(Error::Format(format!(
                        "model header inconsistent: N = {}, K = {} imply L = {}, file has L = {} and depth {}",
                        m.n,
                        m.k,
                        jackson_degree(m.n, m.k),
                        m.l,
                        m.depth
                    )));
                }
                check_scalar(m.c, "c")?;
                let params = QnnParams::new(m.depth, m.theta.clone(), m.phi.clone()).map_err(|e| Error::Format(e.to_string()))?;
                Ok(QnnModel::Uni(UniQnnModel { k: m.k, n: m.n, l: m.l, c: m.c, params, residual: m.residual, method: m.method }))
            }
            ModelDump::Multivariate(m) => {
                let l: Vec<usize> = m.n.iter().zip(&m.k).map(|(&n, &k)| jackson_degree(n, k)).collect();
                if m.k.len() != m.n.len() || l != m.l {
                    return Err(Error::Format("model header inconsistent: L does not match N and K".into()));
                }
                check_scalar(m.c, "c")?;
                let spec = BlockSpec::new(m.l.clone(), m.blocks.clone()).map_err(|e| Error::Format(e.to_string()))?;
                if spec.ordering != m.ordering || spec.q != m.q || spec.d != m.d || spec.n_blocks() != m.n_blocks {
                    return Err(Error::Format("block ordering, q, d or n_blocks inconsistent with L".into()));
                }
                Ok(QnnModel::Multi(MultiQnnModel {
                    k: m.k.clone(),
                    n: m.n.clone(),
                    l: m.l.clone(),
                    c: m.c,
                    spec,
                    residual: m.residual,
                }))
            }
        }
    }
}

fn check_scalar(v: f64, name: &str) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Format(format!("{name} must be finite and nonnegative, got {v}")));
    }
    Ok(())
}

/// A scalar for univariate runs, a per-axis vector otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerAxis {
    One(usize),
    Many(Vec<usize>),
}

/// Contents of `report.json` for a single approximation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: String,
    pub func: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(rename = "K")]
    pub k: PerAxis,
    #[serde(rename = "N")]
    pub n: PerAxis,
    #[serde(rename = "L")]
    pub l: PerAxis,
    pub c: f64,
    pub param_count: usize,
    pub poly_sup_error: f64,
    pub qnn_sup_error: f64,
    pub compile_residual: f64,
    pub error_grid: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_blocks: Option<usize>,
    /// Max |dense − fast| amplitude gap over the probe points, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dense_check_gap: Option<f64>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Format(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Parses JSON, reporting failures with the byte offset where they occur.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        Error::Format(format!("invalid JSON at byte {offset}: {e}"))
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// `x…, f, predict` rows for plotting.
pub fn points_csv(points: &[Vec<f64>], f: &[f64], predict: &[f64]) -> Result<String> {
    let d = points.first().map_or(1, Vec::len);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = if d == 1 { vec!["x".into()] } else { (1..=d).map(|j| format!("x{j}")).collect() };
    header.push("f".into());
    header.push("predict".into());
    w.write_record(&header).map_err(|e| Error::Format(e.to_string()))?;
    for ((x, fv), pv) in points.iter().zip(f).zip(predict) {
        // Debug keeps the shortest round-trip digits but switches to exponent form
        let mut rec: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
        rec.push(format!("{fv:?}"));
        rec.push(format!("{pv:?}"));
        w.write_record(&rec).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp.{}", std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{approximate_multivariate, approximate_univariate, ApproxOptions};
    use crate::trig_core::PeriodicFn;
    use std::sync::Arc;

    fn source() -> Source {
        Source { func: "abssin".into(), t: None }
    }

    #[test]
    fn univariate_round_trip_is_byte_identical() {
        let f = PeriodicFn::univariate(|x: f64| x.sin().abs());
        let m = approximate_univariate(&f, 1, 6, &ApproxOptions::default()).unwrap();
        let dump = ModelDump::from_model(&QnnModel::Uni(m.clone()), &source());
        let text = to_json(&dump).unwrap();
        assert!(text.contains("\"kind\": \"univariate\""));
        let back: ModelDump = from_json(&text).unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
        assert_eq!(back.to_model().unwrap(), QnnModel::Uni(m));
    }

    #[test]
    fn multivariate_round_trip_is_byte_identical() {
        let f = PeriodicFn::separable(vec![Arc::new(f64::cos), Arc::new(f64::sin)]);
        let m = approximate_multivariate(&f, &[0, 0], &[2, 2], &ApproxOptions::default()).unwrap();
        let src = Source { func: "heat".into(), t: Some(0.5) };
        let dump = ModelDump::from_model(&QnnModel::Multi(m.clone()), &src);
        let text = to_json(&dump).unwrap();
        let back: ModelDump = from_json(&text).unwrap();
        assert_eq!(to_json(&back).unwrap(), text);
        assert_eq!(back.source(), src);
        assert_eq!(back.to_model().unwrap(), QnnModel::Multi(m));
    }

    #[test]
    fn truncated_theta_is_rejected() {
        let text = r#"{"kind":"univariate","func":"cos","K":0,"N":2,"L":2,"c":1.0,"depth":4,
            "theta":[0.0,0.0],"phi":[0.0,0.0,0.0,0.0,0.0,0.0],"residual":0.0,"method":"analytic"}"#;
        let dump: ModelDump = from_json(text).unwrap();
        assert!(dump.to_model().is_err());
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        let text = "{\n  \"kind\": \"univariate\",\n  \"K\": oops\n}";
        let err = from_json::<ModelDump>(text).unwrap_err().to_string();
        let at = text.find("oops").unwrap();
        assert!(err.contains(&format!("byte {at}")), "{err}");
    }

    #[test]
    fn report_shapes() {
        let r = RunReport {
            kind: "multivariate".into(),
            func: "prodcos".into(),
            t: None,
            k: PerAxis::Many(vec![0, 0]),
            n: PerAxis::Many(vec![2, 2]),
            l: PerAxis::Many(vec![2, 2]),
            c: 1.000001,
            param_count: 150,
            poly_sup_error: 0.5555,
            qnn_sup_error: 0.5555,
            compile_residual: 1e-15,
            error_grid: 256,
            q: Some(5),
            n_blocks: Some(25),
            dense_check_gap: None,
        };
        let text = to_json(&r).unwrap();
        let back: RunReport = from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(to_json(&back).unwrap(), text);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("jqnn-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(&dir).unwrap().count(), 1);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn points_header() {
        let s = points_csv(&[vec![0.0, 1.0]], &[0.5], &[0.25]).unwrap();
        assert_eq!(s, "x1,x2,f,predict\n0.0,1.0,0.5,0.25\n");
    }
}
