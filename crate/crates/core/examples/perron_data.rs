//! Matrix, root classes and Perron data of the Fibonacci substitution.

use subtile::algebra::{Field, Spectral};
use subtile::Substitution;

fn main() -> subtile::Result<()> {
    let fib = Substitution::parse("a -> b, b -> ab")?;
    let spec = Spectral::new(&fib.matrix())?;
    println!("characteristic polynomial: {}", spec.char_poly);
    for c in spec.classes() {
        println!("factor {}: {} small, {} unit, {} large", c.factor, c.small, c.unit, c.large);
    }
    println!("lambda = {} ~ {:.9}", spec.lambda(), spec.lambda().approx());
    let left: Vec<String> = spec.perron.left.iter().map(|x| x.to_string()).collect();
    println!("natural lengths: ({})", left.join(", "));
    Ok(())
}
