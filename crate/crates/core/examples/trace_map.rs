//! Transfer-matrix traces decide band membership, and for substitution
//! potentials they obey a polynomial recursion across levels.

use jacobi_spectra::coverset::{build_cover, check_trace_map, default_trace_samples};
use jacobi_spectra::monodromy::{default_slack, monodromy_at, trace_test};
use jacobi_spectra::substitution::Model;

fn main() -> jacobi_spectra::Result<()> {
    let model = Model::period_doubling(1.0);
    let op = model.level_operator('a', 4, 1 << 20)?;
    let slack = default_slack(&op);
    for e in [-2.5, -1.0, 0.0, 0.7, 3.0] {
        let m = monodromy_at(&op, e)?;
        println!("E = {e:+}: tr = {:+.6}, det = {:.3}, {:?}", m.trace(), m.det(), trace_test(&op, e, slack)?);
    }

    for k in 2..=6 {
        let samples = default_trace_samples(&build_cover(&model, k)?.cover);
        let r = check_trace_map(&model, k, &samples)?;
        println!(
            "k = {k}: {} energies, trace residual {:.2e}, matrix residual {:.2e}",
            r.evaluated, r.trace_residual, r.matrix_residual
        );
    }
    Ok(())
}
