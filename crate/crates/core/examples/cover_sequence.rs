use jacobi_spectra::coverset::build_cover_sequence;
use jacobi_spectra::substitution::Model;

// Covers of the Thue-Morse spectrum shrink as the level grows.
fn main() -> jacobi_spectra::Result<()> {
    let covers = build_cover_sequence(&Model::thue_morse(1.5), 1, 8, 1 << 20)?;
    for c in &covers {
        println!(
            "k = {}: {:4} intervals, measure {:.6}, largest gap {:.6}",
            c.k,
            c.cover.len(),
            c.cover.measure(),
            c.cover.largest_gap()
        );
    }
    for pair in covers.windows(2) {
        assert!(pair[0].cover.contains(&pair[1].cover, pair[1].tolerance()));
    }
    println!("each cover contains the next");
    Ok(())
}
