//! The free Laplacian: eigenvalues at periodic and antiperiodic boundary
//! conditions against the closed form `2 cos(2 pi j / K)`.

use jacobi_spectra::bandeig::dense_eig;
use jacobi_spectra::operator::{assemble_dense, spectrum, Boundary, PeriodicJacobi};

fn main() -> jacobi_spectra::Result<()> {
    let k = 64;
    let op = PeriodicJacobi::<f64>::free(k)?;
    let s = spectrum(&op)?;
    let mut exact: Vec<f64> = (0..k).map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / k as f64).cos()).collect();
    exact.sort_by(f64::total_cmp);
    let err = s.eigs_plus.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("K = {k}: banded vs closed form, max error {err:.2e}");

    let dense = dense_eig(&assemble_dense(&op, Boundary::Periodic))?;
    let err = s.eigs_plus.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("banded vs dense Jacobi sweep, max difference {err:.2e}");
    println!("spectrum {:?}, rotations {}", s.merged.hull(), s.rotations);
    Ok(())
}
