//! Dense state-vector simulation of the rotation circuits.

mod lcu;
mod matrix;

pub use lcu::{box_ordering, ceil_log2, lcu_amplitude_fast, lcu_dense_unitary, BlockSpec, DENSE_QUBIT_LIMIT};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;

use crate::qnn_compile::QnnParams;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

pub fn gate_ry(theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_2x2(ry(theta))
}

pub fn gate_rz(theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_2x2(rz(theta))
}

pub fn gate_h() -> ComplexMatrix {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexMatrix::from_2x2([[h, h], [h, -h]])
}

pub fn gate_x() -> ComplexMatrix {
    ComplexMatrix::from_2x2([[ZERO, ONE], [ONE, ZERO]])
}

/// Entry `(0, 0)` of a square matrix.
pub fn amplitude00(u: &ComplexMatrix) -> Complex64 {
    u.get(0, 0)
}

pub(crate) type M2 = [[C; 2]; 2];

pub(crate) fn ry(theta: f64) -> M2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]]
}

pub(crate) fn rz(theta: f64) -> M2 {
    [[C::cis(-theta / 2.0), ZERO], [ZERO, C::cis(theta / 2.0)]]
}

pub(crate) fn mul2(a: &M2, b: &M2) -> M2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Row vector times 2×2 matrix.
pub(crate) fn row_mul(v: [C; 2], m: &M2) -> [C; 2] {
    [v[0] * m[0][0] + v[1] * m[1][0], v[0] * m[0][1] + v[1] * m[1][1]]
}

/// The gate sequence of the circuit, left to right.
pub(crate) fn circuit_gates(p: &QnnParams, x: f64) -> Vec<M2> {
    let mut gates = Vec::with_capacity(3 * p.theta.len());
    gates.push(rz(p.phi[0]));
    gates.push(ry(p.theta[0]));
    gates.push(rz(p.phi[1]));
    let zx = rz(x);
    for l in 1..=p.depth {
        gates.push(zx);
        gates.push(ry(p.theta[l]));
        gates.push(rz(p.phi[l + 1]));
    }
    gates
}

fn single_qubit_m2(p: &QnnParams, x: f64) -> M2 {
    circuit_gates(p, x).iter().fold([[ONE, ZERO], [ZERO, ONE]], |acc, g| mul2(&acc, g))
}

/// `U = R_Z(φ)R_Y(θ_0)R_Z(φ_0) Π_l R_Z(x)R_Y(θ_l)R_Z(φ_l)`.
pub fn single_qubit_unitary(p: &QnnParams, x: f64) -> ComplexMatrix {
    ComplexMatrix::from_2x2(single_qubit_m2(p, x))
}

/// `⟨0|U(x)|0⟩` by propagating the first row only.
pub fn single_qubit_amplitude(p: &QnnParams, x: f64) -> Complex64 {
    let zx = rz(x);
    let mut v = row_mul([C::cis(-p.phi[0] / 2.0), ZERO], &ry(p.theta[0]));
    v = row_mul(v, &rz(p.phi[1]));
    for l in 1..=p.depth {
        v = row_mul(v, &zx);
        v = row_mul(v, &ry(p.theta[l]));
        v = row_mul(v, &rz(p.phi[l + 1]));
    }
    v[0]
}
