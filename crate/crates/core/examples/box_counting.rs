use jacobi_spectra::coverset::IntervalSet;
use jacobi_spectra::fractal::{box_count, loglog_fit};

// Middle-thirds Cantor set at depth d, stretched to [0, 3^d] so that every
// endpoint and every triadic box size is an exact integer.
fn cantor(depth: u32) -> IntervalSet<f64> {
    let mut starts = vec![0i64];
    for _ in 0..depth {
        starts = starts.iter().flat_map(|&s| [3 * s, 3 * s + 2]).collect();
    }
    IntervalSet::from_intervals(starts.iter().map(|&s| (s as f64, (s + 1) as f64)).collect()).unwrap()
}

fn main() -> jacobi_spectra::Result<()> {
    let depth = 12;
    let set = cantor(depth);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for d in 1..=8 {
        let eps = 3f64.powi(depth as i32 - d);
        let n = box_count(&set, eps)?.count;
        println!("box size 3^-{d} of the whole: {n} boxes");
        xs.push(3f64.powi(d));
        ys.push(n as f64);
    }
    let (slope, _) = loglog_fit(&xs, &ys)?;
    println!("box dimension {slope:.6} (ln 2 / ln 3 = {:.6})", 2f64.ln() / 3f64.ln());
    Ok(())
}
