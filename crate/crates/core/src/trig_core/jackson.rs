use std::f64::consts::PI;

use num_complex::Complex64;

use super::fourier::{dirichlet_sum, fourier_coeffs_1d, fourier_coeffs_nd, HalfInteger};
use super::periodic::PeriodicFn;
use super::poly::{TrigPoly1D, TrigPolyND};
use crate::error::{Error, Result};

/// Largest `N` for which the weight counts are guaranteed to fit.
pub const MAX_SUPPORTED_N: usize = 64;
/// Largest `K` for which the weight counts are guaranteed to fit.
pub const MAX_SUPPORTED_K: usize = 8;

/// Combinatorial weights of the Jackson operator `T_{N,K}`.
///
/// `mtilde[l]` counts `2r`-tuples with entries in `{-h/2, …, h/2}` (step 1,
/// `h = ⌊N/2⌋`) summing to `l`; `m_nk[n]` folds in the `K+1` finite-difference
/// terms. Both are indexed by `-r·h ..= r·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacksonWeights {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub half: usize,
    pub mtilde: Vec<i128>,
    pub m_nk: Vec<i128>,
    pub lambda: f64,
}

impl JacksonWeights {
    /// Degree `r·⌊N/2⌋` of the resulting polynomial.
    pub fn degree(&self) -> usize {
        self.r * self.half
    }

    pub fn mtilde_at(&self, l: i64) -> i128 {
        let deg = self.degree() as i64;
        if l.abs() > deg { 0 } else { self.mtilde[(l + deg) as usize] }
    }

    pub fn m_at(&self, n: i64) -> i128 {
        let deg = self.degree() as i64;
        if n.abs() > deg { 0 } else { self.m_nk[(n + deg) as usize] }
    }

    /// Multiplier `(2π/λ)·m_{n,K}` applied to `f̂(n)`.
    pub fn multiplier(&self, n: i64) -> f64 {
        self.m_at(n) as f64 / self.mtilde[self.degree()] as f64
    }
}

/// `r_K = ⌈(K+3)/2⌉`.
pub fn r_k(k: usize) -> usize {
    (k + 4) / 2
}

/// `L = ⌈(K+3)/2⌉·⌊N/2⌋`.
pub fn jackson_degree(n: usize, k: usize) -> usize {
    r_k(k) * (n / 2)
}

fn binomial(n: usize, k: usize) -> Option<i128> {
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as i128)? / (i as i128 + 1);
    }
    Some(acc)
}

pub fn jackson_weights(n: usize, k: usize) -> Result<JacksonWeights> {
    if n == 0 {
        return Err(Error::invalid("N must be a positive integer"));
    }
    let overflow = || Error::Overflow { n, k };
    let r = r_k(k);
    let half = n / 2;
    let deg = r * half;

    // Entries shifted by +h/2 live in {0..=h}; 2r-fold self-convolution of the
    // all-ones vector counts tuples by shifted sum l + r·h.
    let ones = vec![1i128; half + 1];
    let mut counts = vec![1i128];
    for _ in 0..2 * r {
        let mut next = vec![0i128; counts.len() + half];
        for (i, &c) in counts.iter().enumerate() {
            for (j, &o) in ones.iter().enumerate() {
                next[i + j] = next[i + j].checked_add(c.checked_mul(o).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
        }
        counts = next;
    }
    debug_assert_eq!(counts.len(), 2 * deg + 1);
    let mtilde = counts;

    let mut m_nk = vec![0i128; 2 * deg + 1];
    for idx in 0..=2 * deg {
        let nn = (idx as i64 - deg as i64).unsigned_abs() as usize;
        let mut acc: i128 = 0;
        for kk in 1..=k + 1 {
            if kk * nn > deg {
                break;
            }
            let term = binomial(k + 1, kk)
                .ok_or_else(overflow)?
                .checked_mul(mtilde[deg + kk * nn])
                .ok_or_else(overflow)?;
            acc = if kk % 2 == 1 { acc.checked_add(term) } else { acc.checked_sub(term) }.ok_or_else(overflow)?;
        }
        m_nk[idx] = acc;
    }
    let lambda = 2.0 * PI * mtilde[deg] as f64;
    Ok(JacksonWeights { n, k, r, half, mtilde, m_nk, lambda })
}

/// Normalized Jackson kernel `J_{N,K}(t)` for a given normalizer `λ`.
pub fn jackson_kernel(n: usize, k: usize, lambda: f64, t: f64) -> f64 {
    let half = n / 2;
    let base = dirichlet_sum(HalfInteger::from_twice(half as u32), t).re;
    base.powi(2 * r_k(k) as i32) / lambda
}

/// Default quadrature size for univariate coefficients of degree `L`.
pub fn default_quadrature_1d(degree: usize) -> usize {
    4096.max(16 * (degree + 1))
}

/// Default per-axis quadrature size for multivariate coefficients.
pub fn default_quadrature_nd(degree: usize) -> usize {
    512.max(8 * (degree + 1))
}

fn check_quadrature(degree: usize, m: usize) -> Result<()> {
    let need = 8 * (degree + 1);
    if m < need {
        return Err(Error::invalid(format!(
            "quadrature grid M = {m} too small for degree {degree} (need M >= {need})"
        )));
    }
    Ok(())
}

/// `T_{N,K} f` as a trigonometric polynomial of degree `r_K⌊N/2⌋`.
pub fn jackson_approx_1d(f: &PeriodicFn, n: usize, k: usize, m: usize) -> Result<TrigPoly1D> {
    if f.dims() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a univariate function, got d = {}", f.dims())));
    }
    let w = jackson_weights(n, k)?;
    let deg = w.degree();
    check_quadrature(deg, m)?;
    let eval = |x: f64| f.eval1(x);
    let fhat = fourier_coeffs_1d(&eval, deg, m)?;
    let coeffs = fhat
        .iter()
        .enumerate()
        .map(|(i, c)| c * w.multiplier(i as i64 - deg as i64))
        .collect();
    TrigPoly1D::new(coeffs)
}

/// Multivariate `T_{N,K} f` with per-axis weights.
pub fn jackson_approx_nd(f: &PeriodicFn, n: &[usize], k: &[usize], m: &[usize]) -> Result<TrigPolyND> {
    let d = f.dims();
    if n.len() != d || k.len() != d || m.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "function has d = {d}, got N of length {}, K of length {}, M of length {}",
            n.len(),
            k.len(),
            m.len()
        )));
    }
    let weights: Vec<JacksonWeights> = n.iter().zip(k).map(|(&nj, &kj)| jackson_weights(nj, kj)).collect::<Result<_>>()?;
    let degrees: Vec<usize> = weights.iter().map(JacksonWeights::degree).collect();
    for (&deg, &mj) in degrees.iter().zip(m) {
        check_quadrature(deg, mj)?;
    }
    let fhat = fourier_coeffs_nd(f, &degrees, m)?;
    let mut poly = TrigPolyND::new(degrees.clone(), fhat)?;
    let scaled: Vec<Complex64> = poly
        .coeffs()
        .iter()
        .enumerate()
        .map(|(flat, c)| {
            let idx = poly.multi_index(flat);
            let mult: f64 = idx.iter().zip(&weights).map(|(&nj, w)| w.multiplier(nj)).product();
            c * mult
        })
        .collect();
    poly = TrigPolyND::new(degrees, scaled)?;
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trig_core::fourier::uniform_grid;
    use std::sync::Arc;

    /// Direct quadrature of `∫ J(t) Σ_k (-1)^{k+1} C(K+1,k) f(x+kt) dt` on an
    /// `M`-point grid in both `x` and `t`, followed by a DFT in `x`. The kernel
    /// normalizer is obtained by integrating the unnormalized kernel.
    fn operator_by_quadrature(f: &dyn Fn(f64) -> f64, n: usize, k: usize, m: usize) -> Vec<Complex64> {
        let grid = uniform_grid(m);
        let h = 2.0 * PI / m as f64;
        let raw: Vec<f64> = grid.iter().map(|&t| jackson_kernel(n, k, 1.0, t)).collect();
        let lambda: f64 = raw.iter().sum::<f64>() * h;
        let coef: Vec<f64> = (1..=k + 1)
            .map(|kk| {
                let b = binomial(k + 1, kk).unwrap() as f64;
                if kk % 2 == 1 { b } else { -b }
            })
            .collect();
        let values: Vec<f64> = grid
            .iter()
            .map(|&x| {
                grid.iter()
                    .zip(&raw)
                    .map(|(&t, &j)| {
                        let s: f64 = coef.iter().enumerate().map(|(i, &a)| a * f(x + (i + 1) as f64 * t)).sum();
                        j / lambda * s
                    })
                    .sum::<f64>()
                    * h
            })
            .collect();
        let deg = jackson_degree(n, k) as i64;
        (-deg..=deg)
            .map(|nn| {
                values.iter().zip(&grid).map(|(&v, &x)| Complex64::cis(-(nn as f64) * x) * v).sum::<Complex64>()
                    / m as f64
            })
            .collect()
    }

    #[test]
    fn weights_degenerate_n1() {
        let w = jackson_weights(1, 3).unwrap();
        assert_eq!(w.mtilde, vec![1]);
        assert!((w.lambda - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn weights_n2_k0() {
        let w = jackson_weights(2, 0).unwrap();
        assert_eq!(w.mtilde, vec![1, 4, 6, 4, 1]);
        assert_eq!(w.m_nk, vec![1, 4, 6, 4, 1]);
        assert!((w.lambda - 12.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn weights_n4_k0() {
        let w = jackson_weights(4, 0).unwrap();
        assert_eq!(w.mtilde, vec![1, 4, 10, 16, 19, 16, 10, 4, 1]);
        assert!((w.lambda - 38.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn weights_n2_k1() {
        let w = jackson_weights(2, 1).unwrap();
        assert_eq!(w.m_at(0), 6);
        assert_eq!(w.m_at(1), 7);
        assert_eq!(w.m_at(-1), 7);
        assert_eq!(w.m_at(2), 2);
        assert_eq!(w.m_at(-2), 2);
    }

    #[test]
    fn weights_cover_supported_range() {
        let w = jackson_weights(MAX_SUPPORTED_N, MAX_SUPPORTED_K).unwrap();
        let total: i128 = w.mtilde.iter().sum();
        assert_eq!(total, 33i128.pow(12));
    }

    #[test]
    fn weights_reject_n0() {
        assert!(jackson_weights(0, 1).is_err());
    }

    #[test]
    fn weights_report_overflow() {
        assert!(matches!(jackson_weights(4000, 60), Err(Error::Overflow { .. })));
    }

    #[test]
    fn cosine_closed_forms() {
        let f = PeriodicFn::univariate(f64::cos);
        let p = jackson_approx_1d(&f, 2, 0, 4096).unwrap();
        assert_eq!(p.degree(), 2);
        assert!((p.coeff(1).re - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.coeff(-1).re - 1.0 / 3.0).abs() < 1e-12);
        assert!(p.coeff(0).norm() < 1e-12 && p.coeff(2).norm() < 1e-12);
        let p = jackson_approx_1d(&f, 2, 1, 4096).unwrap();
        assert!((p.coeff(1).re - 7.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn constant_is_fixed_point() {
        let f = PeriodicFn::univariate(|_| 1.0);
        for n in [1, 2, 5, 9] {
            for k in 0..4 {
                let p = jackson_approx_1d(&f, n, k, 4096).unwrap();
                assert!((p.coeff(0).re - 1.0).abs() < 1e-13);
                for nn in 1..=p.degree() as i64 {
                    assert!(p.coeff(nn).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn operator_matches_direct_quadrature() {
        let fs: [(&str, fn(f64) -> f64); 2] = [("cos", f64::cos), ("abssin", |x: f64| x.sin().abs())];
        for (name, f) in fs {
            let pf = PeriodicFn::univariate(f);
            for n in [2, 4] {
                for k in [0, 1] {
                    let m = 256;
                    let direct = operator_by_quadrature(&f, n, k, m);
                    let p = jackson_approx_1d(&pf, n, k, m).unwrap();
                    for (a, b) in p.coeffs().iter().zip(&direct) {
                        assert!((a - b).norm() < 1e-10, "{name} N={n} K={k}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_is_normalized_and_nonnegative() {
        for n in 1..=10 {
            for k in 0..3 {
                let w = jackson_weights(n, k).unwrap();
                let grid = uniform_grid(4096);
                let vals: Vec<f64> = grid.iter().map(|&t| jackson_kernel(n, k, w.lambda, t)).collect();
                assert!(vals.iter().all(|&v| v >= -1e-12));
                let integral: f64 = vals.iter().sum::<f64>() * 2.0 * PI / 4096.0;
                assert!((integral - 1.0).abs() < 1e-8, "N={n} K={k}: {integral}");
            }
        }
    }

    #[test]
    fn multivariate_tensorizes() {
        let f = PeriodicFn::separable(vec![Arc::new(f64::cos), Arc::new(f64::cos)]);
        let p = jackson_approx_nd(&f, &[2, 2], &[0, 0], &[512, 512]).unwrap();
        assert!((p.coeff(&[1, 1]).re - 1.0 / 9.0).abs() < 1e-12);
        assert!((p.eval(&[0.0, 0.0]).re - 4.0 / 9.0).abs() < 1e-12);

        let one = PeriodicFn::constant(2, 1.0);
        let p = jackson_approx_nd(&one, &[3, 5], &[1, 2], &[512, 512]).unwrap();
        for (i, c) in p.coeffs().iter().enumerate() {
            let expect = if p.multi_index(i).iter().all(|&v| v == 0) { 1.0 } else { 0.0 };
            assert!((c.re - expect).abs() < 1e-13 && c.im.abs() < 1e-13);
        }
    }

    #[test]
    fn multivariate_product_matches_univariate() {
        let g = |x: f64| x.sin().abs();
        let f = PeriodicFn::separable(vec![Arc::new(g), Arc::new(g)]);
        let p = jackson_approx_nd(&f, &[4, 4], &[1, 1], &[4096, 4096]).unwrap();
        let q = jackson_approx_1d(&PeriodicFn::univariate(g), 4, 1, 4096).unwrap();
        assert!((p.coeff(&[0, 0]).re - q.coeff(0).re.powi(2)).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let f = PeriodicFn::multivariate(2, |_| 0.0);
        assert!(matches!(jackson_approx_nd(&f, &[2], &[0, 0], &[64, 64]), Err(Error::DimensionMismatch(_))));
    }
}
