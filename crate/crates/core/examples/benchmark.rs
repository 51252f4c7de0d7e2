//! Timing of the banded pipeline against the dense one on small periods.

use jacobi_spectra::cli::{run_bench, BenchConfig, Method};
use jacobi_spectra::Precision;

fn main() -> jacobi_spectra::Result<()> {
    let config = BenchConfig {
        k_exps: (6..=10).collect(),
        dense_cap: 512,
        reps: 3,
        precisions: vec![Precision::Double],
        ..BenchConfig::default()
    };
    let report = run_bench(&config)?;
    for r in &report.records {
        println!("{:5} {:?} {:.3e} s, {} rotations", r.k, r.method, r.wall_seconds, r.rotation_count);
    }
    for method in [Method::Banded, Method::Dense] {
        if let Some(slope) = report.slope(method, Precision::Double) {
            println!("{method:?} log-log slope {slope:.2}");
        }
    }
    Ok(())
}
