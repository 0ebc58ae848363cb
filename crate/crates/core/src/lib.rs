//! Approximation of periodic functions by quantum neural networks.
//!
//! A target `f` is first replaced by its Jackson-kernel trigonometric
//! approximant `T_{N,K} f` ([`trig_core`]). The bounded polynomial `T/c` is
//! then compiled into the rotation angles of a single-qubit circuit whose
//! `⟨0|U(x)|0⟩` amplitude reproduces it ([`qnn_compile`]). Multivariate
//! targets are assembled from per-monomial circuits in a linear combination
//! of unitaries ([`qsim`]). [`pipeline`] runs the two end-to-end algorithms
//! and the error-decay experiments; [`io`] holds the on-disk formats.

pub mod error;
pub mod io;
pub mod pipeline;
pub mod qnn_compile;
pub mod qsim;
pub mod trig_core;

mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use pipeline::{
    approximate_multivariate, approximate_univariate, fit_loglog_slope, heat_reference,
    rescale_period, run_experiment, sup_error, ApproxOptions, ErrorCurve, ErrorRow, Experiment,
    MultiQnnModel, UniQnnModel,
};
pub use qnn_compile::{compile_monomial, compile_trig_poly, verify_params, CompileMethod, CompileReport, QnnParams};
pub use qsim::{BlockSpec, ComplexMatrix};
pub use trig_core::{
    dirichlet_sum, fourier_coeff_1d, fourier_coeff_nd, jackson_approx_1d, jackson_approx_nd,
    jackson_weights, modulus_of_continuity, sup_norm_estimate, HalfInteger, JacksonWeights,
    PeriodicFn, TrigPoly1D, TrigPolyND,
};
