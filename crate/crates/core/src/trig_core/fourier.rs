use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::periodic::PeriodicFn;
use crate::error::{Error, Result};
use crate::tensor::{contract_axis, unravel};

/// A nonnegative half-integer `a ∈ {0, ½, 1, …}`, stored as `2a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(u32);

impl HalfInteger {
    pub fn from_twice(twice: u32) -> Self {
        HalfInteger(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

/// `Σ_{n=-a}^{a} e^{int}` via the closed form `sin((2a+1)t/2) / sin(t/2)`,
/// with the removable singularity at `t = 0` filled by `2a+1`.
pub fn dirichlet_sum(a: HalfInteger, t: f64) -> Complex64 {
    let width = a.twice() as f64 + 1.0;
    let denom = (t / 2.0).sin();
    if denom == 0.0 {
        return Complex64::new(width, 0.0);
    }
    Complex64::new((width * t / 2.0).sin() / denom, 0.0)
}

/// Uniform grid `x_m = -π + 2πm/M`, `m = 0..M`.
pub fn uniform_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| -PI + 2.0 * PI * i as f64 / m as f64).collect()
}

fn check_grid(n: i64, m: usize) -> Result<()> {
    let need = 4 * (n.unsigned_abs() as usize + 1);
    if m < need {
        return Err(Error::invalid(format!(
            "quadrature grid M = {m} too small for frequency {n} (need M >= {need})"
        )));
    }
    Ok(())
}

/// Discrete Fourier coefficient `(1/M) Σ_m e^{-in x_m} f(x_m)`.
pub fn fourier_coeff_1d(f: &PeriodicFn, n: i64, m: usize) -> Result<Complex64> {
    if f.dims() != 1 {
        return Err(Error::DimensionMismatch(format!("expected a univariate function, got d = {}", f.dims())));
    }
    check_grid(n, m)?;
    let samples: Vec<f64> = uniform_grid(m).into_iter().map(|x| f.eval1(x)).collect();
    Ok(dft_coeff(&samples, n))
}

fn dft_coeff(samples: &[f64], n: i64) -> Complex64 {
    let m = samples.len();
    let grid = uniform_grid(m);
    let sum: Complex64 = samples
        .iter()
        .zip(&grid)
        .map(|(&v, &x)| Complex64::cis(-(n as f64) * x) * v)
        .sum();
    sum / m as f64
}

/// All coefficients `n = -L..=L` of a real univariate function from one
/// sampling pass. Negative frequencies are mirrored by conjugation, so the
/// result is exactly Hermitian.
pub fn fourier_coeffs_1d(f: &dyn Fn(f64) -> f64, degree: usize, m: usize) -> Result<Vec<Complex64>> {
    check_grid(degree as i64, m)?;
    let samples: Vec<f64> = uniform_grid(m).into_iter().map(f).collect();
    let positive: Vec<Complex64> = (0..=degree as i64).into_par_iter().map(|n| dft_coeff(&samples, n)).collect();
    let mut out = Vec::with_capacity(2 * degree + 1);
    out.extend(positive[1..].iter().rev().map(|c| c.conj()));
    out.push(Complex64::new(positive[0].re, 0.0));
    out.extend_from_slice(&positive[1..]);
    Ok(out)
}

/// Tensor-product discrete Fourier coefficient of a multivariate function.
///
/// Separable functions are handled as a product of univariate coefficients;
/// otherwise a dense tensor quadrature is used (limited to `d ≤ 3`).
pub fn fourier_coeff_nd(f: &PeriodicFn, n: &[i64], m: &[usize]) -> Result<Complex64> {
    let d = f.dims();
    if n.len() != d || m.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "function has d = {d}, frequency has {}, grid has {}",
            n.len(),
            m.len()
        )));
    }
    for (&nj, &mj) in n.iter().zip(m) {
        check_grid(nj, mj)?;
    }
    if let Some(factors) = f.factors() {
        let mut prod = Complex64::new(1.0, 0.0);
        for ((g, &nj), &mj) in factors.iter().zip(n).zip(m) {
            let samples: Vec<f64> = uniform_grid(mj).into_iter().map(|x| g(x)).collect();
            prod *= dft_coeff(&samples, nj);
        }
        return Ok(prod);
    }
    let degrees: Vec<usize> = n.iter().map(|v| v.unsigned_abs() as usize).collect();
    let all = dense_coeffs(f, &degrees, m)?;
    let mut flat = 0usize;
    for (&nj, &lj) in n.iter().zip(&degrees) {
        flat = flat * (2 * lj + 1) + (nj + lj as i64) as usize;
    }
    Ok(all[flat])
}

/// All coefficients over the box `-L ≤ n ≤ L`, row-major.
pub fn fourier_coeffs_nd(f: &PeriodicFn, degrees: &[usize], m: &[usize]) -> Result<Vec<Complex64>> {
    let d = f.dims();
    if degrees.len() != d || m.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "function has d = {d}, degrees has {}, grid has {}",
            degrees.len(),
            m.len()
        )));
    }
    for (&lj, &mj) in degrees.iter().zip(m) {
        check_grid(lj as i64, mj)?;
    }
    match f.factors() {
        Some(factors) => {
            let per_axis: Vec<Vec<Complex64>> = factors
                .iter()
                .zip(degrees.iter().zip(m))
                .map(|(g, (&lj, &mj))| fourier_coeffs_1d(g.as_ref(), lj, mj))
                .collect::<Result<_>>()?;
            let shape: Vec<usize> = degrees.iter().map(|l| 2 * l + 1).collect();
            let total: usize = shape.iter().product();
            let mut pos = vec![0usize; d];
            Ok((0..total)
                .map(|flat| {
                    unravel(flat, &shape, &mut pos);
                    pos.iter().zip(&per_axis).map(|(&p, c)| c[p]).product()
                })
                .collect())
        }
        None => dense_coeffs(f, degrees, m),
    }
}

fn dense_coeffs(f: &PeriodicFn, degrees: &[usize], m: &[usize]) -> Result<Vec<Complex64>> {
    let d = f.dims();
    if d > 3 {
        return Err(Error::invalid(format!(
            "dense tensor quadrature is limited to d <= 3 (got d = {d}); supply a separable function"
        )));
    }
    let grids: Vec<Vec<f64>> = m.iter().map(|&mj| uniform_grid(mj)).collect();
    let total: usize = m.iter().product();
    let samples: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map_init(
            || (vec![0usize; d], vec![0.0; d]),
            |(pos, x), flat| {
                unravel(flat, m, pos);
                for j in 0..d {
                    x[j] = grids[j][pos[j]];
                }
                Complex64::new(f.eval(x), 0.0)
            },
        )
        .collect();
    let mut data = samples;
    let mut shape = m.to_vec();
    for axis in 0..d {
        let l = degrees[axis] as i64;
        let mj = m[axis];
        let table: Vec<Complex64> = (-l..=l)
            .flat_map(|n| grids[axis].iter().map(move |&x| Complex64::cis(-(n as f64) * x) / mj as f64))
            .collect();
        (data, shape) = contract_axis(&data, &shape, axis, &table, (2 * l + 1) as usize);
    }
    Ok(data)
}

/// Largest `|f|` on the uniform tensor grid with `g` points per axis.
///
/// This is a lower bound for the true supremum; consumers that need a safe
/// upper bound multiply by a small safety factor.
///
/// # Panics
/// If the grid has fewer than 1024 points in total.
pub fn sup_norm_estimate(f: &PeriodicFn, g: usize) -> f64 {
    let d = f.dims();
    assert!(
        (g as f64).powi(d as i32) >= 1024.0,
        "sup-norm grid too coarse: {g} points per axis in d = {d}"
    );
    let xs = uniform_grid(g);
    if let Some(factors) = f.factors() {
        // the tensor-grid max of |Π f_j| is the product of per-axis maxima
        return factors.iter().map(|fj| xs.iter().map(|&x| fj(x).abs()).fold(0.0, f64::max)).product();
    }
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
                f.eval(x).abs()
            },
        )
        .reduce(|| 0.0, f64::max)
}

/// Grid estimate of `ω_f(δ) = sup_{x, |t|<δ} |f(x+t) - f(x)|` using
/// dyadic offsets `t = ±δ·j/2^12`.
pub fn modulus_of_continuity(f: &PeriodicFn, delta: f64, g: usize) -> f64 {
    assert!(delta >= 0.0, "delta must be nonnegative");
    if delta == 0.0 {
        return 0.0;
    }
    const LEVELS: u32 = 12;
    let steps = 1usize << LEVELS;
    let offsets: Vec<f64> = (1..steps)
        .flat_map(|j| {
            let t = delta * j as f64 / steps as f64;
            [t, -t]
        })
        .collect();
    uniform_grid(g)
        .into_par_iter()
        .map(|x| {
            let fx = f.eval1(x);
            offsets.iter().map(|&t| (f.eval1(x + t) - fx).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn brute_dirichlet(a: HalfInteger, t: f64) -> Complex64 {
        let two_a = a.twice() as i64;
        (0..=two_a).map(|j| Complex64::cis((j as f64 - a.value()) * t)).sum()
    }

    #[test]
    fn dirichlet_examples() {
        let v = dirichlet_sum(HalfInteger::from_twice(1), PI / 2.0);
        assert!((v.re - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(dirichlet_sum(HalfInteger::from_twice(2), 0.0).re, 3.0);
        let a = HalfInteger::from_twice(3);
        assert!((dirichlet_sum(a, 1.0) - brute_dirichlet(a, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn cosine_coefficient() {
        let f = PeriodicFn::univariate(f64::cos);
        let c = fourier_coeff_1d(&f, 1, 64).unwrap();
        assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn abs_sine_coefficients() {
        let f = PeriodicFn::univariate(|x: f64| x.sin().abs());
        let c0 = fourier_coeff_1d(&f, 0, 4096).unwrap();
        assert!((c0.re - 2.0 / PI).abs() < 1e-6);
        let c2 = fourier_coeff_1d(&f, 2, 4096).unwrap();
        assert!((c2.re + 2.0 / (3.0 * PI)).abs() < 1e-6);
        assert!(c2.im.abs() < 1e-12);
    }

    #[test]
    fn rejects_coarse_grid() {
        let f = PeriodicFn::univariate(f64::cos);
        assert!(matches!(fourier_coeff_1d(&f, 3, 15), Err(Error::InvalidInput(_))));
        assert!(fourier_coeff_1d(&f, 3, 16).is_ok());
    }

    #[test]
    fn multivariate_coefficients() {
        let sep = PeriodicFn::separable(vec![Arc::new(f64::cos), Arc::new(f64::cos)]);
        let c = fourier_coeff_nd(&sep, &[1, 1], &[64, 64]).unwrap();
        assert!((c.re - 0.25).abs() < 1e-15);

        let one = PeriodicFn::multivariate(2, |_| 1.0);
        let c = fourier_coeff_nd(&one, &[0, 0], &[64, 64]).unwrap();
        assert!((c.re - 1.0).abs() < 1e-14);

        let abs2 = PeriodicFn::separable(vec![
            Arc::new(|x: f64| x.sin().abs()),
            Arc::new(|x: f64| x.sin().abs()),
        ]);
        let c = fourier_coeff_nd(&abs2, &[0, 2], &[4096, 4096]).unwrap();
        assert!((c.re - (2.0 / PI) * (-2.0 / (3.0 * PI))).abs() < 1e-6);
    }

    #[test]
    fn dense_path_matches_separable_path() {
        let sep = PeriodicFn::separable(vec![
            Arc::new(|x: f64| x.sin().abs()),
            Arc::new(|x: f64| (2.0 * x).cos() + 0.3 * x.sin()),
        ]);
        let dense = PeriodicFn::multivariate(2, |x| x[0].sin().abs() * ((2.0 * x[1]).cos() + 0.3 * x[1].sin()));
        let a = fourier_coeffs_nd(&sep, &[2, 2], &[128, 128]).unwrap();
        let b = fourier_coeffs_nd(&dense, &[2, 2], &[128, 128]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-13);
        }
        let single = fourier_coeff_nd(&dense, &[-1, 2], &[128, 128]).unwrap();
        assert!((single - a[1 * 5 + 4]).norm() < 1e-13);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let f = PeriodicFn::multivariate(2, |_| 0.0);
        assert!(matches!(fourier_coeff_nd(&f, &[0], &[64, 64]), Err(Error::DimensionMismatch(_))));
        assert!(matches!(fourier_coeff_1d(&f, 0, 64), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn sup_norm_examples() {
        assert!((sup_norm_estimate(&PeriodicFn::univariate(f64::cos), 8192) - 1.0).abs() < 1e-6);
        let f = PeriodicFn::univariate(|x: f64| x.sin().abs().powf(2.5));
        assert!((sup_norm_estimate(&f, 8192) - 1.0).abs() < 1e-6);
        assert_eq!(sup_norm_estimate(&PeriodicFn::univariate(|_| 0.0), 8192), 0.0);
    }

    #[test]
    fn separable_sup_matches_tensor_scan() {
        let a = |x: f64| (x - 0.3).cos() * 0.7;
        let b = |x: f64| 0.2 + (2.0 * x).sin();
        let sep = PeriodicFn::separable(vec![Arc::new(a), Arc::new(b)]);
        let opaque = PeriodicFn::multivariate(2, move |x: &[f64]| a(x[0]) * b(x[1]));
        assert_eq!(sup_norm_estimate(&sep, 64), sup_norm_estimate(&opaque, 64));
    }

    #[test]
    fn modulus_examples() {
        let f = PeriodicFn::univariate(|x: f64| x.sin().abs());
        assert_eq!(modulus_of_continuity(&f, 0.0, 1024), 0.0);
        assert_eq!(modulus_of_continuity(&PeriodicFn::univariate(|_| 3.0), 0.5, 256), 0.0);
        let w = modulus_of_continuity(&f, 0.1, 1024);
        assert!((w - 0.1f64.sin()).abs() < 1e-4, "{w}");
    }
}
