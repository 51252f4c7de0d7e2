use jacobi_spectra::substitution::{Primitivity, SubstitutionRule};

fn main() -> jacobi_spectra::Result<()> {
    for (name, rule) in [
        ("fibonacci", SubstitutionRule::fibonacci()),
        ("period doubling", SubstitutionRule::period_doubling()),
        ("thue-morse", SubstitutionRule::thue_morse()),
    ] {
        let w = rule.iterate(0, 5)?;
        println!("{name}: {} (length {}, incidence {:?})", rule.render(&w), w.len(), rule.incidence());
        assert!(matches!(rule.check_primitive(), Primitivity::Primitive(_)));
    }
    let custom = SubstitutionRule::new(vec![('x', "1"), ('y', "-1")], vec!["xyy", "x"])?;
    println!("custom: {} at level 20 has length {}", custom.render(&custom.iterate(0, 3)?), custom.iterate_len(0, 20));
    Ok(())
}
