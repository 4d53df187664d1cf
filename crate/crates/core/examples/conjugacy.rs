//! A certificate and an obstruction for changes of tile length.

use subtile::conjugacy::{analyze_conjugacy, ConjugacyConfig};
use subtile::{LengthVector, Substitution};

fn main() -> subtile::Result<()> {
    let s = Substitution::parse("a -> aaaabb, b -> babbba")?;
    let l = LengthVector::from_ints(&[1, 1])?;
    let cfg = ConjugacyConfig::default();
    for l2 in [l.times_power(&s.matrix(), 1), LengthVector::from_ints(&[1, 2])?] {
        let v = analyze_conjugacy(&s, &l, &l2, &cfg)?;
        println!("{l} vs {l2}: {} (re-verified: {})", v.tag(), v.recheck(&s, &l, &l2, None)?);
    }
    Ok(())
}
