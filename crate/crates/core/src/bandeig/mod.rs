//! Symmetric band eigenvalue pipeline.
//!
//! A pentadiagonal matrix is reduced to tridiagonal form by chasing bulges
//! with plane rotations, after which every eigenvalue is isolated by inertia
//! counts. A dense Jacobi solver and a Householder reduction are provided for
//! cross-checking and timing comparisons.

mod band;
mod dense;
mod sturm;

pub use band::{penta_to_tridiag, penta_to_tridiag_counted, DenseSym, Reduction, SymPentadiag, SymTridiag};
pub use dense::{dense_eig, householder_tridiag};
pub use sturm::{default_tolerance, tridiag_eigenvalues, tridiag_eigenvalues_bisection, SturmCounter};
