//! Dimension of the Fibonacci spectrum from the band widths of two
//! consecutive covers, next to the known bounds.

use jacobi_spectra::coverset::build_cover;
use jacobi_spectra::fractal::{default_root_tol, fibonacci_dimension_bounds, hausdorff_from_covers};
use jacobi_spectra::substitution::Model;

fn main() -> jacobi_spectra::Result<()> {
    for lambda in [4.0, 8.0, 16.0] {
        let model = Model::fibonacci(lambda);
        let (c10, c11) = (build_cover(&model, 10)?, build_cover(&model, 11)?);
        let est = hausdorff_from_covers(&c10, &c11, default_root_tol())?;
        let bounds = fibonacci_dimension_bounds(lambda);
        println!("lambda = {lambda:>4}: alpha = {:.6} ({:?}), bounds {bounds:.4?}", est.alpha, est.status);
    }
    Ok(())
}
