//! Repetition vectors of high degree and the families they form.

use subtile::conjugacy::{choose_degree, repetition_families, repetition_vectors};
use subtile::{LengthVector, Substitution};

fn main() -> subtile::Result<()> {
    let s = Substitution::parse("a -> aaaabb, b -> bbbbaa")?;
    let choice = choose_degree(&s, 300)?;
    println!("degree threshold p = {} (next lower {})", choice.p, choice.p0);
    let vs = repetition_vectors(&s, &LengthVector::from_ints(&[1, 1])?, &choice.p, 300)?;
    for v in &vs {
        println!("  {} from {} (degree {})", v.vector, v.word, v.degree);
    }
    for f in repetition_families(&vs, &s.matrix())? {
        println!("family generated by {}: {} members", f.generator, f.members.len());
    }
    Ok(())
}
