use jacobi_spectra::coverset::{build_cover, IntervalSet};
use jacobi_spectra::substitution::Model;

fn main() -> jacobi_spectra::Result<()> {
    let a = IntervalSet::from_intervals(vec![(0.0, 1.0), (2.0, 2.5)])?;
    let b = IntervalSet::from_intervals(vec![(0.0, 0.25), (10.0, 10.5)])?;
    println!("{:?} + {:?} = {:?}", a.intervals(), b.intervals(), a.minkowski_sum(&b)?.intervals());

    // a Cantor-like cover added to itself fills in most of its gaps
    let cover = build_cover(&Model::period_doubling(1.0), 5)?.cover;
    let sum = cover.minkowski_sum(&cover)?;
    println!(
        "period doubling k = 5: {} intervals, measure {:.4}; sum with itself: {} intervals, measure {:.4}",
        cover.len(),
        cover.measure(),
        sum.len(),
        sum.measure()
    );
    Ok(())
}
