//! Largest gap of the level-8 Thue-Morse cover as the coupling grows.

use jacobi_spectra::coverset::build_cover;
use jacobi_spectra::fractal::largest_gap;
use jacobi_spectra::substitution::Model;

fn main() -> jacobi_spectra::Result<()> {
    for e in -8..=2 {
        let lambda = 2f64.powi(e);
        let gap = largest_gap(&build_cover(&Model::thue_morse(lambda), 8)?);
        println!("lambda = 2^{e:<3} largest gap {gap:.6e}");
    }
    Ok(())
}
