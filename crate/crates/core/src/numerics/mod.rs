//! Deterministic numerical kernels shared by the simulator.

mod bessel;
mod cholesky;
mod rng;

pub use bessel::bessel_j0;
pub use cholesky::{cholesky_lower, CorrelationMatrix, LowerTriangular, PSD_TOLERANCE};
pub use rng::{sample_standard_complex_gaussian, RngStream};
