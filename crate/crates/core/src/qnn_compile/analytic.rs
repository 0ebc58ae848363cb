//! Completion of `a` to a unitary row `(a, b)` and layer-by-layer peeling.
//!
//! Laurent arrays of length `m+1` hold the coefficient of `z^{-m+2k}` at
//! index `k`, with `z = e^{ix/2}`; for even `m = 2L` this is the ordinary
//! `e^{inx}` indexing with `n = k - L`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::roots::{poly_from_roots_on_circle, polynomial_roots};
use super::QnnParams;

type C = Complex64;

/// Top-coefficient mass below which `1 - |a|²` is treated as lower degree.
const TRIM_TOL: f64 = 1e-30;
/// Modulus below which a phase is treated as undefined.
const PHASE_EPS: f64 = 1e-15;

/// `F_k = δ_{k0} - Σ_j a_{j+k} conj(a_j)` for `k = 0..=2L`.
fn defect_coeffs(a: &[C]) -> Vec<C> {
    let len = a.len();
    (0..len)
        .map(|k| {
            let corr: C = (0..len - k).map(|j| a[j + k] * a[j].conj()).sum();
            if k == 0 { C::new(1.0, 0.0) - corr } else { -corr }
        })
        .collect()
}

/// A `b` with `|a|² + |b|² = 1` on the unit circle, same indexing as `a`.
pub(crate) fn complete(a: &[C]) -> Vec<C> {
    let l = (a.len() - 1) / 2;
    let f = defect_coeffs(a);

    let mut deg = f.len() - 1;
    let mut tail = 0.0;
    while deg > 0 {
        tail += f[deg].norm();
        if tail > TRIM_TOL {
            break;
        }
        deg -= 1;
    }

    let g: Vec<C> = if deg == 0 {
        vec![C::new(f[0].re.max(0.0).sqrt(), 0.0)]
    } else {
        // w^D F(w) in ascending powers
        let poly: Vec<C> = (0..=2 * deg)
            .map(|i| if i >= deg { f[i - deg] } else { f[deg - i].conj() })
            .collect();
        let mut roots = polynomial_roots(&poly);
        roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        let h = poly_from_roots_on_circle(&roots[..deg]);

        let grid = 256.max(8 * (deg + 1));
        let (mut num, mut den) = (0.0, 0.0);
        for t in 0..grid {
            let w = C::cis(2.0 * PI * t as f64 / grid as f64);
            let fv = f[0].re + 2.0 * (1..=deg).map(|k| (f[k] * w.powu(k as u32)).re).sum::<f64>();
            let hv = h.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * w + c).norm_sqr();
            num += fv * hv;
            den += hv * hv;
        }
        let scale = if den > 0.0 { (num / den).max(0.0).sqrt() } else { 0.0 };
        let mut g: Vec<C> = h.iter().map(|c| c * scale).collect();
        refine_factor(&mut g, &f[..=deg]);
        g
    };

    let shift = (2 * l - deg) / 2;
    let mut b = vec![C::new(0.0, 0.0); a.len()];
    for (i, gi) in g.iter().enumerate() {
        b[shift + i] = -gi;
    }
    b
}

fn autocorr_defect(g: &[C], f: &[C]) -> (Vec<C>, f64) {
    let r: Vec<C> = (0..g.len())
        .map(|k| f[k] - (0..g.len() - k).map(|j| g[j + k] * g[j].conj()).sum::<C>())
        .collect();
    let worst = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (r, worst)
}

/// Newton steps on `Σ_j g_{j+k} conj(g_j) = F_k` (Wilson's iteration).
///
/// Tiny extreme roots lose relative accuracy in the root finder; a few steps
/// restore the factor to working precision. The common phase of `g` is a
/// null direction, so each step is the minimum-norm least-squares solution.
fn refine_factor(g: &mut Vec<C>, f: &[C]) {
    let n = g.len();
    let (mut r, mut worst) = autocorr_defect(g, f);
    for _ in 0..8 {
        if worst <= 4.0 * f64::EPSILON {
            break;
        }
        // unknowns: Re δ_0..δ_{n-1}, then Im δ_0..δ_{n-1}
        let mut jac = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for k in 0..n {
            for i in 0..n {
                let mut add = |coef: C, conj: bool| {
                    let s = if conj { -1.0 } else { 1.0 };
                    jac[(2 * k, i)] += coef.re;
                    jac[(2 * k, n + i)] -= s * coef.im;
                    jac[(2 * k + 1, i)] += coef.im;
                    jac[(2 * k + 1, n + i)] += s * coef.re;
                };
                if i >= k {
                    add(g[i - k].conj(), false);
                }
                if i + k < n {
                    add(g[i + k], true);
                }
            }
        }
        let rhs = DVector::from_iterator(2 * n, r.iter().flat_map(|z| [z.re, z.im]));
        let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-13) else { break };
        let trial: Vec<C> = (0..n).map(|i| g[i] + C::new(step[i], step[n + i])).collect();
        let (tr, tw) = autocorr_defect(&trial, f);
        if tw >= worst {
            break;
        }
        *g = trial;
        r = tr;
        worst = tw;
    }
}

fn phase(z: C) -> f64 {
    if z.norm() < PHASE_EPS { 0.0 } else { z.arg() }
}

/// Peels `R_Z(x)R_Y(θ_m)R_Z(φ_m)` layers off the row `(p, q)` from the top.
pub(crate) fn peel(mut p: Vec<C>, mut q: Vec<C>) -> QnnParams {
    let depth = p.len() - 1;
    let mut theta = vec![0.0; depth + 1];
    let mut phi = vec![0.0; depth + 2];

    for m in (1..=depth).rev() {
        // The removed layer must annihilate the top term of p and the
        // bottom term of q; either pair determines it up to a phase.
        let v1 = (p[0].conj(), q[0].conj());
        let v2 = (q[m], -p[m]);
        let n1 = (v1.0.norm_sqr() + v1.1.norm_sqr()).sqrt();
        let n2 = (v2.0.norm_sqr() + v2.1.norm_sqr()).sqrt();
        let (alpha, beta) = if n1.max(n2) < PHASE_EPS {
            (C::new(1.0, 0.0), C::new(0.0, 0.0))
        } else if n1 >= n2 {
            (v1.0 / n1, v1.1 / n1)
        } else {
            (v2.0 / n2, v2.1 / n2)
        };
        let th = 2.0 * beta.norm().atan2(alpha.norm());
        let ph = if alpha.norm() < PHASE_EPS || beta.norm() < PHASE_EPS {
            0.0
        } else {
            alpha.arg() - beta.arg() + PI
        };
        let (s, c) = (th / 2.0).sin_cos();
        let e = C::cis(ph / 2.0);
        let np: Vec<C> = (0..m).map(|k| e * c * p[k] - e.conj() * s * q[k]).collect();
        let nq: Vec<C> = (1..=m).map(|k| e * s * p[k] + e.conj() * c * q[k]).collect();
        p = np;
        q = nq;
        theta[m] = th;
        phi[m + 1] = ph;
    }

    let (a, b) = (p[0], q[0]);
    theta[0] = 2.0 * b.norm().atan2(a.norm());
    let (arg_a, arg_mb) = (phase(a), phase(-b));
    let mut global = -arg_a - arg_mb;
    let mut first = -arg_a + arg_mb;
    let wraps = (global / (2.0 * PI)).floor();
    global -= 2.0 * PI * wraps;
    first += 2.0 * PI * wraps;
    phi[0] = global;
    phi[1] = first;
    QnnParams { depth, theta, phi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::single_qubit_unitary;

    fn eval(a: &[C], x: f64) -> C {
        let l = (a.len() - 1) as i64 / 2;
        a.iter().enumerate().map(|(k, c)| c * C::cis((k as i64 - l) as f64 * x)).sum()
    }

    #[test]
    fn completion_is_complementary() {
        let a = vec![C::new(0.1, 0.2), C::new(-0.3, 0.0), C::new(0.25, -0.1), C::new(0.0, 0.15), C::new(0.05, 0.0)];
        let b = complete(&a);
        for t in 0..97 {
            let x = -PI + 2.0 * PI * t as f64 / 97.0;
            let s = eval(&a, x).norm_sqr() + eval(&b, x).norm_sqr();
            assert!((s - 1.0).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn peel_reproduces_row() {
        let a = vec![C::new(0.2, 0.0), C::new(0.1, 0.3), C::new(-0.2, 0.1)];
        let b = complete(&a);
        let params = peel(a.clone(), b.clone());
        assert_eq!(params.depth, 2);
        for x in [-2.0, 0.0, 0.7, 2.9] {
            let u = single_qubit_unitary(&params, x);
            assert!((u.get(0, 0) - eval(&a, x)).norm() < 1e-12);
            assert!((u.get(0, 1) - eval(&b, x)).norm() < 1e-12);
        }
        assert!((0.0..2.0 * PI).contains(&params.phi[0]));
    }

    #[test]
    fn constant_half_has_zero_phases() {
        let a = vec![C::new(0.5, 0.0)];
        let params = peel(a.clone(), complete(&a));
        assert!((params.theta[0] - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!(params.phi[0].abs() < 1e-14 && params.phi[1].abs() < 1e-14);
    }

    // |a| ≤ 0.02 with outer coefficients near 1e-10: the extreme roots of
    // 1 - |a|² come out of the root finder with visible relative error
    #[test]
    fn small_amplitude_with_tiny_tail_peels_exactly() {
        let l = 20usize;
        let a: Vec<C> = (0..=2 * l)
            .map(|i| {
                let n = i as f64 - l as f64;
                C::new(0.02 * (-0.55 * n.abs()).exp(), 0.0)
            })
            .collect();
        let b = complete(&a);
        let params = peel(a.clone(), b.clone());
        for t in 0..101 {
            let x = -PI + 2.0 * PI * t as f64 / 101.0;
            assert!((eval(&a, x).norm_sqr() + eval(&b, x).norm_sqr() - 1.0).abs() < 1e-14);
            assert!((single_qubit_unitary(&params, x).get(0, 0) - eval(&a, x)).norm() < 1e-13);
        }
    }
}
