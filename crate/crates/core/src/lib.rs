//! Numerical laboratory for Fourier multipliers, martingale transforms and
//! their stochastic integral representations.

pub mod config;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod fft;
pub mod martingale;
pub mod matrix;
pub mod multiplier;
pub mod quadrature;
pub mod report;
pub mod rng;
pub mod spectral;
pub mod stochastic;

pub use error::{Error, Result};
pub use exec::Exec;
