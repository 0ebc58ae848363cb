//! Periodic heat equation `∂_t u = Δu` with square-wave initial data.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::trig_core::{PeriodicFn, ScalarFn};

/// Smallest odd cutoff whose series tail bound `(4/π)e^{-(m+2)²t}` is below `tail`.
pub fn heat_trunc(t: f64, tail: f64) -> usize {
    let mut m = 1usize;
    while 4.0 / PI * (-((m + 2) as f64).powi(2) * t).exp() >= tail {
        m += 2;
    }
    m
}

fn series(t: f64, trunc: usize) -> Vec<(f64, f64)> {
    (1..=trunc).step_by(2).map(|m| (m as f64, 4.0 / (PI * m as f64) * (-((m * m) as f64) * t).exp())).collect()
}

/// `u(t, x) = Π_j u_1(t, x_j)` with the odd-harmonic sine series of `u_1`.
pub fn heat_reference(t: f64, d: usize, trunc: usize) -> Result<PeriodicFn> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("heat time must be positive, got {t}")));
    }
    if trunc == 0 || d == 0 {
        return Err(Error::invalid("heat reference needs trunc >= 1 and d >= 1"));
    }
    let terms = Arc::new(series(t, trunc));
    let factors: Vec<ScalarFn> = (0..d)
        .map(|_| {
            let terms = terms.clone();
            Arc::new(move |s: f64| terms.iter().map(|&(m, a)| a * (m * s).sin()).sum::<f64>()) as ScalarFn
        })
        .collect();
    Ok(PeriodicFn::separable(factors))
}

/// Periodized heat kernel `Σ_k (4πt)^{-1/2} e^{-(z+2πk)²/4t}`.
fn heat_kernel(t: f64, z: f64) -> f64 {
    let norm = (4.0 * PI * t).sqrt();
    (-8..=8).map(|k| (-(z + 2.0 * PI * k as f64).powi(2) / (4.0 * t)).exp()).sum::<f64>() / norm
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / (2 * panels) as f64;
    let mut acc = f(a) + f(b);
    for i in 1..2 * panels {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// `u_1(t, s)` by direct convolution of the square wave with the heat kernel.
pub fn heat_convolution(t: f64, s: f64) -> f64 {
    let panels = 2000;
    simpson(|y| heat_kernel(t, s - y), 0.0, PI, panels) - simpson(|y| heat_kernel(t, s - y), -PI, 0.0, panels)
}
