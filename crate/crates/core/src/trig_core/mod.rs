//! Fourier analysis and the Jackson approximation operator.

mod fourier;
mod jackson;
mod periodic;
mod poly;

pub use fourier::{
    dirichlet_sum, fourier_coeff_1d, fourier_coeff_nd, fourier_coeffs_1d, fourier_coeffs_nd,
    modulus_of_continuity, sup_norm_estimate, uniform_grid, HalfInteger,
};
pub use jackson::{
    default_quadrature_1d, default_quadrature_nd, jackson_approx_1d, jackson_approx_nd,
    jackson_degree, jackson_kernel, jackson_weights, JacksonWeights, MAX_SUPPORTED_K,
    MAX_SUPPORTED_N,
};
pub use periodic::{PeriodicFn, ScalarFn};
pub use poly::{TrigPoly1D, TrigPolyND, HERMITIAN_TOL};
