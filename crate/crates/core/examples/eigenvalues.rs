//! Point spectrum of the Dekking-Keane substitution for rational and
//! irrational tile lengths.

use subtile::algebra::NumberField;
use subtile::spectrum::{classify_spectrum, Candidate, SpectrumOptions};
use subtile::{LengthVector, Scalar, Substitution};

fn main() -> subtile::Result<()> {
    let dk = Substitution::parse("a -> abab, b -> bbba")?;
    let half = Scalar::rational(subtile::algebra::field::q(1, 2));
    let opts = SpectrumOptions {
        candidates: Some(vec![Candidate::Exact(Scalar::int(1)), Candidate::Exact(half)]),
        ..Default::default()
    };
    let rational = LengthVector::from_ints(&[2, 1])?;
    let sqrt2 = NumberField::sqrt(2)?.generator();
    let irrational = LengthVector::new(vec![sqrt2, Scalar::int(1)])?;
    for l in [rational, irrational] {
        let r = classify_spectrum(&dk, &l, &opts)?;
        println!("L = {l}: {}", r.case.tag());
        for c in &r.candidates {
            println!("  k/2pi = {}: {:?}", c.k_over_2pi, c.verdict);
        }
    }
    Ok(())
}
