use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::uniform_grid;
use crate::error::{Error, Result};
use crate::tensor::{contract_axis, unravel};

/// Symmetry tolerance for the Hermitian (real-valued) flag.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Univariate trigonometric polynomial `Σ_{n=-L}^{L} c_n e^{inx}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly1D {
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl TrigPoly1D {
    /// Builds a polynomial from `2L+1` coefficients ordered `n = -L..=L`.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() % 2 == 0 {
            return Err(Error::invalid(format!(
                "coefficient array must have odd length 2L+1, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let hermitian = is_hermitian(&coeffs);
        Ok(TrigPoly1D { coeffs, hermitian })
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPoly1D { coeffs: vec![c], hermitian: c.im.abs() <= HERMITIAN_TOL }
    }

    /// The single-term polynomial `c·e^{inx}`.
    pub fn monomial(c: Complex64, n: i64) -> Self {
        let l = n.unsigned_abs() as usize;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * l + 1];
        coeffs[(n + l as i64) as usize] = c;
        Self::new(coeffs).expect("monomial coefficients are well formed")
    }

    pub fn degree(&self) -> usize {
        (self.coeffs.len() - 1) / 2
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient `c_n`; zero outside `-L..=L`.
    pub fn coeff(&self, n: i64) -> Complex64 {
        let l = self.degree() as i64;
        if n.abs() > l {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + l) as usize]
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let l = self.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::cis((k as i64 - l) as f64 * x))
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigPoly1D { coeffs: self.coeffs.iter().map(|c| c * s).collect(), hermitian: self.hermitian }
    }

    /// Values on the uniform grid `x_m = -π + 2πm/G`.
    pub fn grid_values(&self, g: usize) -> Vec<Complex64> {
        uniform_grid(g).into_iter().map(|x| self.eval(x)).collect()
    }

    /// `max_m |T(x_m)|` over the uniform grid of size `g`.
    pub fn sup_on_grid(&self, g: usize) -> f64 {
        self.grid_values(g).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn to_nd(&self) -> TrigPolyND {
        TrigPolyND::new(vec![self.degree()], self.coeffs.clone()).expect("shape is consistent")
    }
}

/// d-variate trigonometric polynomial over the index box `-L ≤ n ≤ L`,
/// coefficients in row-major lexicographic order (first axis slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolyND {
    degrees: Vec<usize>,
    coeffs: Vec<Complex64>,
    hermitian: bool,
}

impl TrigPolyND {
    pub fn new(degrees: Vec<usize>, coeffs: Vec<Complex64>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::invalid("a multivariate polynomial needs at least one axis"));
        }
        let expected: usize = degrees.iter().map(|l| 2 * l + 1).product();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "degrees {degrees:?} require {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        // Row-major order over a symmetric box maps n ↦ -n onto the reversed array.
        let hermitian = is_hermitian(&coeffs);
        Ok(TrigPolyND { degrees, coeffs, hermitian })
    }

    pub fn dims(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn shape(&self) -> Vec<usize> {
        self.degrees.iter().map(|l| 2 * l + 1).collect()
    }

    pub fn flat_index(&self, n: &[i64]) -> Option<usize> {
        if n.len() != self.dims() {
            return None;
        }
        let mut flat = 0usize;
        for (&nj, &lj) in n.iter().zip(&self.degrees) {
            if nj.unsigned_abs() as usize > lj {
                return None;
            }
            flat = flat * (2 * lj + 1) + (nj + lj as i64) as usize;
        }
        Some(flat)
    }

    pub fn coeff(&self, n: &[i64]) -> Complex64 {
        self.flat_index(n).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Multi-index of the coefficient stored at `flat`.
    pub fn multi_index(&self, flat: usize) -> Vec<i64> {
        let shape = self.shape();
        let mut pos = vec![0usize; shape.len()];
        unravel(flat, &shape, &mut pos);
        pos.iter().zip(&self.degrees).map(|(&p, &l)| p as i64 - l as i64).collect()
    }

    /// Lexicographically ordered index box.
    pub fn multi_indices(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.coeffs.len()).map(move |i| self.multi_index(i))
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dims(), "evaluation point has wrong dimension");
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let n = self.multi_index(i);
                let phase: f64 = n.iter().zip(x).map(|(&nj, &xj)| nj as f64 * xj).sum();
                c * Complex64::cis(phase)
            })
            .sum()
    }

    /// Values on the tensor grid with `g` uniform points per axis, row-major.
    pub fn tensor_grid_values(&self, g: usize) -> Vec<Complex64> {
        let xs = uniform_grid(g);
        let mut data = self.coeffs.clone();
        let mut shape = self.shape();
        for axis in 0..self.dims() {
            let l = self.degrees[axis] as i64;
            let table: Vec<Complex64> = xs
                .iter()
                .flat_map(|&x| (-l..=l).map(move |n| Complex64::cis(n as f64 * x)))
                .collect();
            (data, shape) = contract_axis(&data, &shape, axis, &table, g);
        }
        data
    }

    pub fn scaled(&self, s: f64) -> Self {
        TrigPolyND {
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            hermitian: self.hermitian,
        }
    }
}

fn is_hermitian(coeffs: &[Complex64]) -> bool {
    let n = coeffs.len();
    (0..n).all(|i| (coeffs[i] - coeffs[n - 1 - i].conj()).norm() <= HERMITIAN_TOL)
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dims: usize,
    degrees: Vec<usize>,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for TrigPolyND {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            dims: self.dims(),
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPolyND {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        if raw.dims != raw.degrees.len() {
            return Err(serde::de::Error::custom(format!(
                "dims = {} but {} degrees given",
                raw.dims,
                raw.degrees.len()
            )));
        }
        let coeffs = raw.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        TrigPolyND::new(raw.degrees, coeffs).map_err(serde::de::Error::custom)
    }
}

impl Serialize for TrigPoly1D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_nd().serialize(s)
    }
}

impl<'de> Deserialize<'de> for TrigPoly1D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let nd = TrigPolyND::deserialize(d)?;
        if nd.dims() != 1 {
            return Err(serde::de::Error::custom(format!("expected dims = 1, got {}", nd.dims())));
        }
        TrigPoly1D::new(nd.coeffs).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_polynomial_evaluates_to_itself() {
        let p = TrigPoly1D::constant(c(1.0, 0.0));
        assert_eq!(p.eval(0.77), c(1.0, 0.0));
    }

    #[test]
    fn two_thirds_cosine_at_zero() {
        let p = TrigPoly1D::new(vec![c(1.0 / 3.0, 0.0), c(0.0, 0.0), c(1.0 / 3.0, 0.0)]).unwrap();
        assert!((p.eval(0.0) - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(p.is_hermitian());
    }

    #[test]
    fn sine_in_exponential_form() {
        let p = TrigPoly1D::new(vec![c(0.0, 0.5), c(0.0, 0.0), c(0.0, -0.5)]).unwrap();
        assert!((p.eval(PI / 2.0) - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_even_length() {
        assert!(TrigPoly1D::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn nd_indexing_is_row_major() {
        let coeffs: Vec<Complex64> = (0..15).map(|i| c(i as f64, 0.0)).collect();
        let p = TrigPolyND::new(vec![1, 2], coeffs).unwrap();
        assert_eq!(p.coeff(&[-1, -2]), c(0.0, 0.0));
        assert_eq!(p.coeff(&[-1, 2]), c(4.0, 0.0));
        assert_eq!(p.coeff(&[0, -2]), c(5.0, 0.0));
        assert_eq!(p.multi_index(7), vec![0, 0]);
        assert_eq!(p.coeff(&[2, 0]), c(0.0, 0.0));
    }

    #[test]
    fn nd_count_must_match_box() {
        assert!(TrigPolyND::new(vec![1, 1], vec![c(0.0, 0.0); 8]).is_err());
    }

    #[test]
    fn tensor_grid_matches_pointwise_eval() {
        let coeffs: Vec<Complex64> = (0..15).map(|i| c((i as f64).sin(), (i as f64).cos())).collect();
        let p = TrigPolyND::new(vec![1, 2], coeffs).unwrap();
        let g = 8;
        let xs = uniform_grid(g);
        let vals = p.tensor_grid_values(g);
        for (i, &x1) in xs.iter().enumerate() {
            for (j, &x2) in xs.iter().enumerate() {
                assert!((vals[i * g + j] - p.eval(&[x1, x2])).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn json_schema() {
        let p = TrigPoly1D::new(vec![c(0.25, 0.0), c(1.0, 0.0), c(0.25, 0.0)]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dims":1,"degrees":[1],"coeffs":[[0.25,0.0],[1.0,0.0],[0.25,0.0]]}"#);
        let back: TrigPoly1D = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
