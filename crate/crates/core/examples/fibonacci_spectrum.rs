//! Bands of a periodic Fibonacci approximant.

use jacobi_spectra::operator::spectrum;
use jacobi_spectra::substitution::Model;

fn main() -> jacobi_spectra::Result<()> {
    let model = Model::fibonacci(2.0);
    let op = model.level_operator('a', 8, 1 << 20)?;
    let s = spectrum(&op)?;
    println!("period {}, {} bands, {} intervals after merging", op.period(), s.bands.len(), s.merged.len());
    for band in s.bands.iter().take(5) {
        println!("  [{:+.12}, {:+.12}]  width {:.3e}", band.lo, band.hi, band.width());
    }
    println!("  ...");
    println!("total measure {:.6}", s.merged.measure());
    Ok(())
}
