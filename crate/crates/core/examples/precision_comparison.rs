//! Narrow bands of the period-doubling model lose all accuracy in double
//! precision long before they do in double-double.

use jacobi_spectra::fractal::min_band_width;
use jacobi_spectra::coverset::build_cover;
use jacobi_spectra::substitution::Model;
use jacobi_spectra::{DoubleDouble, Real};

fn main() -> jacobi_spectra::Result<()> {
    for k in [4, 6, 8] {
        let d = build_cover(&Model::period_doubling(4.0), k)?;
        let x = build_cover(&Model::period_doubling(DoubleDouble::from_f64(4.0)), k)?;
        let (wd, rd) = min_band_width(&d);
        let (wx, rx) = min_band_width(&x);
        println!(
            "k = {k}: narrowest band {wd:.3e} (double, repaired {rd}), {:.3e} (extended, repaired {rx})",
            wx.to_f64()
        );
    }
    Ok(())
}
