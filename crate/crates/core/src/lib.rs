//! Spectra of periodic Jacobi operators in `O(K^2)` time, and the spectral
//! covers, fractal-dimension estimates and gap statistics of quasiperiodic
//! Schrodinger operators generated by substitutions.
//!
//! Every numerical routine is generic over [`Real`]: `f64` for double
//! precision and [`DoubleDouble`] for roughly 32 significant digits.

pub mod bandeig;
pub mod cli;
pub mod coverset;
pub mod error;
pub mod fractal;
pub mod monodromy;
pub mod operator;
pub mod realnum;
pub mod substitution;

pub use error::{Error, Result};
pub use realnum::{givens, parse_real, DoubleDouble, Precision, Real};
