use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jqnn_core::pipeline::build_multivariate;
use jqnn_core::qsim::lcu_amplitude_fast;
use jqnn_core::{
    approximate_univariate, compile_trig_poly, jackson_approx_1d, jackson_weights, ApproxOptions, Complex64,
    Experiment, PeriodicFn, TrigPoly1D,
};

/// Deterministic Hermitian polynomial with decaying coefficients, sup 0.9.
fn test_poly(l: usize) -> TrigPoly1D {
    let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * l + 1];
    coeffs[l] = Complex64::new(0.3, 0.0);
    for k in 1..=l {
        let z = Complex64::from_polar(1.0 / k as f64, 0.7 * k as f64);
        coeffs[l + k] = z;
        coeffs[l - k] = z.conj();
    }
    let p = TrigPoly1D::new(coeffs).unwrap();
    p.scaled(0.9 / p.sup_on_grid(4096))
}

fn weights(c: &mut Criterion) {
    let mut g = c.benchmark_group("jackson_weights");
    for (n, k) in [(20, 2), (64, 5)] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("N{n}_K{k}")), &(n, k), |b, &(n, k)| {
            b.iter(|| jackson_weights(black_box(n), black_box(k)).unwrap())
        });
    }
    g.finish();
}

fn operator(c: &mut Criterion) {
    let f = PeriodicFn::univariate(|x: f64| x.sin().abs().powf(2.5));
    c.bench_function("jackson_approx_1d/N20_K2", |b| b.iter(|| jackson_approx_1d(&f, black_box(20), 2, 4096).unwrap()));
}

fn compile(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile_trig_poly");
    for l in [4, 16, 40] {
        let t = test_poly(l);
        g.bench_with_input(BenchmarkId::from_parameter(l), &t, |b, t| b.iter(|| compile_trig_poly(t, 1e-10).unwrap()));
    }
    g.finish();
}

fn end_to_end(c: &mut Criterion) {
    let opts = ApproxOptions::default();
    let f = Experiment::Fig2AbsSin25.target().unwrap();
    let mut g = c.benchmark_group("end_to_end");
    g.sample_size(10);
    g.bench_function("approx1d_fig2_N12_K2", |b| b.iter(|| approximate_univariate(&f, 2, black_box(12), &opts).unwrap()));
    let heat = Experiment::Heat { t: 0.5 }.target().unwrap();
    g.bench_function("approxnd_heat_N4_K1", |b| b.iter(|| build_multivariate(&heat, &[1, 1], &[4, 4], &opts).unwrap()));
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let opts = ApproxOptions::default();
    let heat = Experiment::Heat { t: 0.5 }.target().unwrap();
    let model = build_multivariate(&heat, &[2, 2], &[6, 6], &opts).unwrap().model;
    c.bench_function("lcu_amplitude_fast/361_blocks", |b| b.iter(|| lcu_amplitude_fast(&model.spec, black_box(&[0.4, -1.2]))));
    let mut g = c.benchmark_group("predict_grid");
    g.sample_size(10);
    g.bench_function("heat_N6_K2_256x256", |b| b.iter(|| model.predict_grid(black_box(256))));
    g.finish();
}

criterion_group!(benches, weights, operator, compile, end_to_end, simulation);
criterion_main!(benches);
