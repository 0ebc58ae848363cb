//! Least-squares fit of circuit angles to sampled target values.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::QnnParams;
use crate::qsim::{circuit_gates, ry, rz, row_mul, M2};

type C = Complex64;

const LM_ITERS: usize = 300;
const STARTS: usize = 16;

struct Problem<'a> {
    depth: usize,
    xs: Vec<f64>,
    target: &'a dyn Fn(f64) -> C,
}

fn unpack(depth: usize, v: &[f64]) -> QnnParams {
    QnnParams { depth, theta: v[..depth + 1].to_vec(), phi: v[depth + 1..].to_vec() }
}

fn pack(p: &QnnParams) -> Vec<f64> {
    p.theta.iter().chain(&p.phi).copied().collect()
}

/// Parameter index for each gate, `None` for the data rotations.
fn gate_param(depth: usize, g: usize) -> Option<usize> {
    let theta = |l: usize| l;
    let phi = |l: usize| depth + 1 + l;
    match g {
        0 => Some(phi(0)),
        1 => Some(theta(0)),
        2 => Some(phi(1)),
        _ => match g % 3 {
            0 => None,
            1 => Some(theta(g / 3)),
            _ => Some(phi(g / 3 + 1)),
        },
    }
}

fn derivative(depth: usize, g: usize, v: &[f64]) -> M2 {
    let idx = gate_param(depth, g).expect("parameterized gate");
    let m = if g % 3 == 1 { ry(v[idx] + PI) } else { rz(v[idx] + PI) };
    m.map(|row| row.map(|z| z * 0.5))
}

impl Problem<'_> {
    fn residuals(&self, v: &[f64]) -> DVector<f64> {
        let p = unpack(self.depth, v);
        let mut r = DVector::zeros(2 * self.xs.len());
        for (i, &x) in self.xs.iter().enumerate() {
            let diff = crate::qsim::single_qubit_amplitude(&p, x) - (self.target)(x);
            r[2 * i] = diff.re;
            r[2 * i + 1] = diff.im;
        }
        r
    }

    fn jacobian(&self, v: &[f64]) -> DMatrix<f64> {
        let p = unpack(self.depth, v);
        let np = v.len();
        let mut jac = DMatrix::zeros(2 * self.xs.len(), np);
        let zero = C::new(0.0, 0.0);
        for (i, &x) in self.xs.iter().enumerate() {
            let gates = circuit_gates(&p, x);
            let n = gates.len();
            let mut prefix = Vec::with_capacity(n + 1);
            prefix.push([C::new(1.0, 0.0), zero]);
            for g in &gates {
                prefix.push(row_mul(*prefix.last().unwrap(), g));
            }
            // suffix[k] = G_k … G_{n-1} e_0
            let mut suffix = vec![[zero; 2]; n + 1];
            suffix[n] = [C::new(1.0, 0.0), zero];
            for k in (0..n).rev() {
                let g = &gates[k];
                let s = suffix[k + 1];
                suffix[k] = [g[0][0] * s[0] + g[0][1] * s[1], g[1][0] * s[0] + g[1][1] * s[1]];
            }
            for g in 0..n {
                let Some(col) = gate_param(self.depth, g) else { continue };
                let row = row_mul(prefix[g], &derivative(self.depth, g, v));
                let dz = row[0] * suffix[g + 1][0] + row[1] * suffix[g + 1][1];
                jac[(2 * i, col)] = dz.re;
                jac[(2 * i + 1, col)] = dz.im;
            }
        }
        jac
    }
}

/// Levenberg–Marquardt from `start`; returns the final parameters.
fn levenberg_marquardt(prob: &Problem, start: Vec<f64>) -> Vec<f64> {
    let mut v = start;
    let mut r = prob.residuals(&v);
    let mut cost = r.norm_squared();
    let mut mu = 1e-3;
    for _ in 0..LM_ITERS {
        if cost < 1e-30 {
            break;
        }
        let jac = prob.jacobian(&v);
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &r;
        let mut improved = false;
        for _ in 0..12 {
            let mut a = jtj.clone();
            for d in 0..a.nrows() {
                a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
            }
            let Some(chol) = a.cholesky() else {
                mu *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial: Vec<f64> = v.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let tr = prob.residuals(&trial);
            let tc = tr.norm_squared();
            if tc < cost {
                v = trial;
                r = tr;
                cost = tc;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    v
}

fn problem<'a>(depth: usize, target: &'a dyn Fn(f64) -> C) -> Problem<'a> {
    // A degree-L trigonometric difference vanishing at more than 2L+1
    // equispaced nodes vanishes identically.
    let l = depth / 2;
    let pts = 4 * l + 4;
    let xs = (0..pts).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / pts as f64).collect();
    Problem { depth, xs, target }
}

/// Local refinement of an existing parameter set.
pub(crate) fn polish(start: &QnnParams, target: &dyn Fn(f64) -> C) -> QnnParams {
    let prob = problem(start.depth, target);
    unpack(start.depth, &levenberg_marquardt(&prob, pack(start)))
}

/// Multi-start fit; `score` ranks candidates (lower is better).
pub(crate) fn multistart(
    depth: usize,
    target: &dyn Fn(f64) -> C,
    seed: u64,
    score: &dyn Fn(&QnnParams) -> f64,
) -> (QnnParams, f64) {
    let prob = problem(depth, target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(QnnParams, f64)> = None;
    for _ in 0..STARTS {
        let start: Vec<f64> = (0..2 * depth + 3).map(|_| rng.gen_range(-PI..PI)).collect();
        let p = unpack(depth, &levenberg_marquardt(&prob, start));
        let s = score(&p);
        if best.as_ref().map_or(true, |b| s < b.1) {
            best = Some((p, s));
        }
        if s < 1e-12 {
            break;
        }
    }
    best.expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobian_matches_finite_differences() {
        let target = |x: f64| C::new(0.3 * x.cos(), 0.1 * x.sin());
        let prob = problem(4, &target);
        let v: Vec<f64> = (0..11).map(|i| 0.3 * i as f64 - 1.0).collect();
        let jac = prob.jacobian(&v);
        let h = 1e-6;
        for c in 0..v.len() {
            let mut vp = v.clone();
            let mut vm = v.clone();
            vp[c] += h;
            vm[c] -= h;
            let fd = (prob.residuals(&vp) - prob.residuals(&vm)) / (2.0 * h);
            for r in 0..fd.len() {
                assert!((fd[r] - jac[(r, c)]).abs() < 1e-8, "entry ({r},{c})");
            }
        }
    }

    #[test]
    fn fits_a_reachable_target() {
        let target = |x: f64| C::new(0.4 * x.cos(), 0.0);
        let (p, _) = multistart(2, &target, 1, &|p| {
            (0..64)
                .map(|i| {
                    let x = -PI + 2.0 * PI * i as f64 / 64.0;
                    (crate::qsim::single_qubit_amplitude(p, x) - target(x)).norm()
                })
                .fold(0.0, f64::max)
        });
        let err = (0..64)
            .map(|i| {
                let x = -PI + 2.0 * PI * i as f64 / 64.0;
                (crate::qsim::single_qubit_amplitude(&p, x) - target(x)).norm()
            })
            .fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }
}
