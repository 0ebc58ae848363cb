use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gate_x, single_qubit_amplitude, single_qubit_unitary, ComplexMatrix};
use crate::error::{Error, Result};
use crate::qnn_compile::QnnParams;

/// Largest `q + d` accepted by the dense oracle.
pub const DENSE_QUBIT_LIMIT: usize = 14;

/// Block layout of the multi-qubit circuit.
///
/// Block `i` applies `⊗_j U^{(i,j)}(x_j)` on the data register when the
/// ancilla register reads `i`. Multi-indices run lexicographically over the
/// box `[-L_1, L_1] × … × [-L_d, L_d]`, last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub degrees: Vec<usize>,
    pub ordering: Vec<Vec<i64>>,
    pub blocks: Vec<Vec<QnnParams>>,
    pub q: usize,
    pub d: usize,
}

/// Lexicographic enumeration of `[-L, L]` as multi-indices.
pub fn box_ordering(degrees: &[usize]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(degrees.len())];
    for &l in degrees {
        let l = l as i64;
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-l..=l).map(move |n| {
                    let mut v = prefix.clone();
                    v.push(n);
                    v
                })
            })
            .collect();
    }
    out
}

/// `⌈log2 n⌉`, with `0` for `n ≤ 1`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 { 0 } else { (usize::BITS - (n - 1).leading_zeros()) as usize }
}

impl BlockSpec {
    pub fn new(degrees: Vec<usize>, blocks: Vec<Vec<QnnParams>>) -> Result<Self> {
        let d = degrees.len();
        if d == 0 {
            return Err(Error::invalid("block spec needs at least one data qubit"));
        }
        let ordering = box_ordering(&degrees);
        if blocks.len() != ordering.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} blocks for a box of {} multi-indices",
                blocks.len(),
                ordering.len()
            )));
        }
        for (n, row) in ordering.iter().zip(&blocks) {
            if row.len() != d {
                return Err(Error::DimensionMismatch(format!("block {n:?} has {} factors, expected {d}", row.len())));
            }
            for (nj, p) in n.iter().zip(row) {
                if p.depth != 2 * nj.unsigned_abs() as usize {
                    return Err(Error::DimensionMismatch(format!(
                        "block {n:?} factor has depth {}, expected {}",
                        p.depth,
                        2 * nj.unsigned_abs()
                    )));
                }
            }
        }
        let q = ceil_log2(ordering.len());
        Ok(BlockSpec { degrees, ordering, blocks, q, d })
    }

    /// Number of blocks `𝔫 = Π(2L_j + 1)`.
    pub fn n_blocks(&self) -> usize {
        self.ordering.len()
    }

    pub fn validate(&self) -> Result<()> {
        let rebuilt = BlockSpec::new(self.degrees.clone(), self.blocks.clone())?;
        if rebuilt.ordering != self.ordering || rebuilt.q != self.q || rebuilt.d != self.d {
            return Err(Error::invalid("block spec ordering, q or d inconsistent with degrees"));
        }
        Ok(())
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch(format!("expected {} inputs, got {}", self.d, x.len())));
        }
        Ok(())
    }
}

/// `(H^{⊗q} ⊗ I)† C (H^{⊗q} ⊗ I)` for the select operator `C`.
///
/// The Hadamard conjugation is applied as a butterfly over the ancilla bits
/// of the row and column indices.
pub fn lcu_dense_unitary(spec: &BlockSpec, x: &[f64]) -> Result<ComplexMatrix> {
    spec.check_x(x)?;
    let qubits = spec.q + spec.d;
    if qubits > DENSE_QUBIT_LIMIT {
        return Err(Error::TooLarge { qubits, limit: DENSE_QUBIT_LIMIT });
    }
    let dd = 1usize << spec.d;
    let dim = 1usize << qubits;

    let pad = (0..spec.d).fold(ComplexMatrix::identity(1), |acc, _| acc.kron(&gate_x()));
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..1usize << spec.q {
        let block = match spec.blocks.get(i) {
            Some(row) => row
                .iter()
                .zip(x)
                .fold(ComplexMatrix::identity(1), |acc, (p, &xj)| acc.kron(&single_qubit_unitary(p, xj))),
            None => pad.clone(),
        };
        for a in 0..dd {
            let dst = (i * dd + a) * dim + i * dd;
            data[dst..dst + dd].copy_from_slice(&block.data()[a * dd..(a + 1) * dd]);
        }
    }

    let s = std::f64::consts::FRAC_1_SQRT_2;
    for b in 0..spec.q {
        let stride = dd << b;
        // rows
        for r in 0..dim {
            if r & stride != 0 {
                continue;
            }
            for c in 0..dim {
                let (u, v) = (data[r * dim + c], data[(r + stride) * dim + c]);
                data[r * dim + c] = (u + v) * s;
                data[(r + stride) * dim + c] = (u - v) * s;
            }
        }
        // columns
        for r in 0..dim {
            let row = &mut data[r * dim..(r + 1) * dim];
            for c in 0..dim {
                if c & stride != 0 {
                    continue;
                }
                let (u, v) = (row[c], row[c + stride]);
                row[c] = (u + v) * s;
                row[c + stride] = (u - v) * s;
            }
        }
    }
    Ok(ComplexMatrix::from_raw(dim, dim, data))
}

/// `2^{-q} Σ_i Π_j ⟨0|U^{(i,j)}(x_j)|0⟩`; padding blocks contribute zero.
pub fn lcu_amplitude_fast(spec: &BlockSpec, x: &[f64]) -> Complex64 {
    assert_eq!(x.len(), spec.d, "input dimension mismatch");
    let sum: Complex64 = spec
        .blocks
        .iter()
        .map(|row| row.iter().zip(x).map(|(p, &xj)| single_qubit_amplitude(p, xj)).product::<Complex64>())
        .sum();
    sum / (1u64 << spec.q) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gate_h;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_params(rng: &mut ChaCha8Rng, depth: usize) -> QnnParams {
        let theta = (0..=depth).map(|_| rng.gen_range(-PI..PI)).collect();
        let phi = (0..depth + 2).map(|_| rng.gen_range(-PI..PI)).collect();
        QnnParams::new(depth, theta, phi).unwrap()
    }

    fn random_spec(rng: &mut ChaCha8Rng, degrees: Vec<usize>) -> BlockSpec {
        let blocks = box_ordering(&degrees)
            .iter()
            .map(|n| n.iter().map(|&nj| random_params(rng, 2 * nj.unsigned_abs() as usize)).collect())
            .collect();
        BlockSpec::new(degrees, blocks).unwrap()
    }

    /// Explicit construction by Kronecker products and matrix products.
    fn dense_by_products(spec: &BlockSpec, x: &[f64]) -> ComplexMatrix {
        let dd = 1usize << spec.d;
        let dim = 1usize << (spec.q + spec.d);
        let mut c = ComplexMatrix::zeros(dim, dim);
        let pad = (0..spec.d).fold(ComplexMatrix::identity(1), |acc, _| acc.kron(&gate_x()));
        for i in 0..1usize << spec.q {
            let mut proj = ComplexMatrix::zeros(1 << spec.q, 1 << spec.q);
            let mut raw = proj.data().to_vec();
            raw[i * (1 << spec.q) + i] = Complex64::new(1.0, 0.0);
            proj = ComplexMatrix::new(1 << spec.q, 1 << spec.q, raw).unwrap();
            let block = match spec.blocks.get(i) {
                Some(row) => row
                    .iter()
                    .zip(x)
                    .fold(ComplexMatrix::identity(1), |acc, (p, &xj)| acc.kron(&single_qubit_unitary(p, xj))),
                None => pad.clone(),
            };
            let term = proj.kron(&block);
            let sum: Vec<Complex64> = c.data().iter().zip(term.data()).map(|(a, b)| a + b).collect();
            c = ComplexMatrix::new(dim, dim, sum).unwrap();
        }
        let hq = (0..spec.q).fold(ComplexMatrix::identity(1), |acc, _| acc.kron(&gate_h()));
        let w = hq.kron(&ComplexMatrix::identity(dd));
        w.adjoint().matmul(&c).unwrap().matmul(&w).unwrap()
    }

    fn three_monomials() -> BlockSpec {
        use crate::qnn_compile::compile_monomial;
        let half = Complex64::new(0.5, 0.0);
        let blocks = (-1..=1).map(|n| vec![compile_monomial(half, n).unwrap().0]).collect();
        BlockSpec::new(vec![1], blocks).unwrap()
    }

    #[test]
    fn ordering_and_sizes() {
        let o = box_ordering(&[1, 2]);
        assert_eq!(o.len(), 15);
        assert_eq!(o[0], vec![-1, -2]);
        assert_eq!(o[1], vec![-1, -1]);
        assert_eq!(o[14], vec![1, 2]);
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(25), 5);
        assert_eq!(ceil_log2(32), 5);
        assert_eq!(ceil_log2(361), 9);
    }

    #[test]
    fn single_identity_block() {
        let p = QnnParams::new(0, vec![0.0], vec![0.0, 0.0]).unwrap();
        let spec = BlockSpec::new(vec![0], vec![vec![p]]).unwrap();
        assert_eq!(spec.q, 0);
        let u = lcu_dense_unitary(&spec, &[0.8]).unwrap();
        assert!(u.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!((lcu_amplitude_fast(&spec, &[0.8]) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn three_monomial_average() {
        let spec = three_monomials();
        assert_eq!((spec.q, spec.n_blocks()), (2, 3));
        assert!((lcu_amplitude_fast(&spec, &[0.0]) - 0.375).norm() < 1e-10);
        for x in [-2.5f64, -0.3, 0.0, 1.1, 3.0] {
            let want = 0.25 * (0.5 + x.cos());
            let dense = lcu_dense_unitary(&spec, &[x]).unwrap();
            assert!((dense.get(0, 0) - want).norm() < 1e-10);
            assert!((lcu_amplitude_fast(&spec, &[x]) - want).norm() < 1e-10);
        }
    }

    #[test]
    fn butterfly_matches_explicit_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for degrees in [vec![1], vec![2], vec![1, 1], vec![0, 2]] {
            let spec = random_spec(&mut rng, degrees);
            let x: Vec<f64> = (0..spec.d).map(|_| rng.gen_range(-PI..PI)).collect();
            let fast = lcu_dense_unitary(&spec, &x).unwrap();
            let slow = dense_by_products(&spec, &x);
            assert!(fast.max_abs_diff(&slow) < 1e-13);
            assert!(fast.unitarity_defect() < 1e-11);
        }
    }

    #[test]
    fn fast_matches_dense_and_respects_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..6 {
            let d = rng.gen_range(1..=2);
            let degrees: Vec<usize> = (0..d).map(|_| rng.gen_range(0..=2)).collect();
            let spec = random_spec(&mut rng, degrees);
            for _ in 0..5 {
                let x: Vec<f64> = (0..spec.d).map(|_| rng.gen_range(-PI..PI)).collect();
                let dense = lcu_dense_unitary(&spec, &x).unwrap().get(0, 0);
                let fast = lcu_amplitude_fast(&spec, &x);
                assert!((dense - fast).norm() < 1e-10);
                let bound = spec.n_blocks() as f64 / (1u64 << spec.q) as f64;
                assert!(fast.norm() <= bound + 1e-12);
            }
        }
    }

    #[test]
    fn dense_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = random_spec(&mut rng, vec![6, 6]);
        assert_eq!(spec.q + spec.d, 10);
        let mut big = spec.clone();
        big.q = 13;
        assert!(matches!(lcu_dense_unitary(&big, &[0.0, 0.0]), Err(Error::TooLarge { qubits: 15, .. })));
    }

    #[test]
    fn rejects_bad_depths() {
        let p = QnnParams::new(0, vec![0.0], vec![0.0, 0.0]).unwrap();
        assert!(BlockSpec::new(vec![1], vec![vec![p.clone()], vec![p.clone()], vec![p]]).is_err());
    }
}
