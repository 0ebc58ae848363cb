//! Simultaneous polynomial root finding (Aberth–Ehrlich).

use num_complex::Complex64;

type C = Complex64;

/// `p(z)` and `p'(z)` by Horner; coefficients in ascending powers.
fn horner(c: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton correction `p(z)/p'(z)`, evaluated on the reversed polynomial
/// outside the unit disc to keep the Horner sums bounded.
fn newton_ratio(c: &[C], rev: &[C], z: C) -> Option<C> {
    let n = (c.len() - 1) as f64;
    if z.norm() <= 1.0 {
        let (p, dp) = horner(c, z);
        if p == C::new(0.0, 0.0) {
            return None;
        }
        Some(p / dp)
    } else {
        let y = z.inv();
        let (r, dr) = horner(rev, y);
        if r == C::new(0.0, 0.0) {
            return None;
        }
        Some(z * r / (r * n - y * dr))
    }
}

/// All roots of `Σ c_i z^i`. The leading coefficient must be nonzero.
pub fn polynomial_roots(c: &[C]) -> Vec<C> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    assert!(c[n] != C::new(0.0, 0.0), "leading coefficient must be nonzero");
    if n == 1 {
        return vec![-c[0] / c[1]];
    }
    let rev: Vec<C> = c.iter().rev().copied().collect();

    // Start on a circle whose radius is the geometric mean root modulus.
    let radius = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64).max(1e-8);
    let mut z: Vec<C> = (0..n)
        .map(|k| C::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();

    let mut done = vec![false; n];
    for _ in 0..1000 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let Some(ratio) = newton_ratio(c, &rev, z[i]) else {
                done[i] = true;
                continue;
            };
            let repulsion: C = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (C::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            if step.norm() <= 1e-15 * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            match newton_ratio(c, &rev, *zi) {
                Some(r) if r.norm() <= 1e-6 * zi.norm().max(1.0) => *zi -= r,
                _ => break,
            }
        }
    }
    z
}

/// Ascending coefficients of `Π (z - r_i)`, one factor at a time.
#[cfg(test)]
pub fn poly_from_roots(roots: &[C]) -> Vec<C> {
    let mut out = vec![C::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![C::new(0.0, 0.0); out.len() + 1];
        for (i, &a) in out.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        out = next;
    }
    out
}

/// Ascending coefficients of `Π (z - r_i)` for roots near or inside the unit
/// circle, by evaluating the product on the circle and transforming back.
///
/// Expanding factor by factor passes through partial products whose
/// coefficients can be ~2^n larger than the final polynomial, so cancellation
/// destroys the result at high degree. Point values of the product are
/// accurate to relative rounding, and the inverse DFT of exact-degree data
/// loses at most `eps·max|p|` per coefficient.
pub fn poly_from_roots_on_circle(roots: &[C]) -> Vec<C> {
    let n = roots.len();
    let m = (4 * (n + 1)).next_power_of_two().max(64);
    let values: Vec<C> = (0..m)
        .map(|j| {
            let w = C::cis(2.0 * std::f64::consts::PI * j as f64 / m as f64);
            roots.iter().map(|&r| w - r).product()
        })
        .collect();
    (0..=n)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(j, v)| v * C::cis(-2.0 * std::f64::consts::PI * ((j * k) % m) as f64 / m as f64))
                .sum::<C>()
                / m as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn companion_eigenvalues(c: &[C]) -> Vec<C> {
        let n = c.len() - 1;
        let mut m = DMatrix::<C>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = C::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -c[i] / c[n];
        }
        m.schur().eigenvalues().expect("complex Schur form is triangular").iter().copied().collect()
    }

    fn matched_distance(a: &[C], b: &[C]) -> f64 {
        let mut used = vec![false; b.len()];
        let mut worst: f64 = 0.0;
        for &x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, &y)| (j, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }

    #[test]
    fn known_roots() {
        let roots = vec![C::new(0.5, 0.1), C::new(-2.0, 0.0), C::new(0.0, 3.0), C::new(0.3, -0.3)];
        let found = polynomial_roots(&poly_from_roots(&roots));
        assert!(matched_distance(&roots, &found) < 1e-12);
    }

    #[test]
    fn matches_companion_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 5, 12, 30, 48] {
            let c: Vec<C> = (0..=n).map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let ours = polynomial_roots(&c);
            let eig = companion_eigenvalues(&c);
            assert!(matched_distance(&ours, &eig) < 1e-8, "degree {n}");
            for z in &ours {
                let (p, _) = horner(&c, *z);
                let scale: f64 = c.iter().enumerate().map(|(i, a)| a.norm() * z.norm().powi(i as i32)).sum();
                assert!(p.norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn reciprocal_pairs() {
        // w^2 F(w) for F = 1 - |0.3 + 0.4 e^{ix}|^2
        let a0 = C::new(0.3, 0.0);
        let a1 = C::new(0.4, 0.0);
        let f1 = -(a1 * a0.conj());
        let f0 = C::new(1.0, 0.0) - a0.norm_sqr() - a1.norm_sqr();
        let c = vec![f1.conj(), f0, f1];
        let r = polynomial_roots(&c);
        assert!((r[0].norm() * r[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_expansion_is_stable_at_high_degree() {
        // Π (w - ρ e^{i(θ0 + 2πk/n)}) = w^n - ρ^n e^{inθ0}. Multiplying the
        // factors in angle order passes through partial products with
        // coefficients near 2^{n/2}.
        let (n, rho, theta0) = (80usize, 0.95f64, 0.3f64);
        let roots: Vec<C> =
            (0..n).map(|k| C::from_polar(rho, theta0 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
        let mut exact = vec![C::new(0.0, 0.0); n + 1];
        exact[0] = -C::from_polar(rho.powi(n as i32), n as f64 * theta0);
        exact[n] = C::new(1.0, 0.0);
        let err = |h: &[C]| h.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err(&poly_from_roots_on_circle(&roots)) < 1e-13);
        assert!(err(&poly_from_roots(&roots)) > 1e-6);
    }
}
