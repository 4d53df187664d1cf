use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::LengthVector;
use crate::algebra::{Field, Scalar, Q};
use crate::subst::{population_vector, FixedPoint, Substitution, DEFAULT_LENGTH_CAP};
use crate::{Error, Result};

/// A point of the tiling built from the fixed point: the origin sits
/// `offset` into tile number `tile`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingPoint {
    pub tile: usize,
    pub offset: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenfunctionValue {
    pub re: f64,
    pub im: f64,
    /// The value is `exp(2 pi i phase)`, with `phase` in `[0, 1)`.
    pub phase: Scalar,
    /// Every order-`m` supertile length is a multiple of this.
    pub modulus: Scalar,
    /// Coordinate of the order-`m` supertile endpoint used.
    pub endpoint: Scalar,
    /// Whether the previous endpoint gives the same value (exact check);
    /// `None` at the first supertile.
    pub endpoints_agree: Option<bool>,
}

fn gcd_q(xs: &[Q]) -> Q {
    let den = xs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let num = xs.iter().fold(BigInt::zero(), |g, x| g.gcd(&(x.numer() * (&den / x.denom()))));
    Q::new(num, den)
}

/// The largest `g` dividing every order-`m` supertile length: `n^m L_1` for
/// equal lengths under a constant-length rule, `c z^m`-type values in the
/// rational-ratio case. Needs rational length ratios.
pub fn supertile_modulus(sigma: &Substitution, l: &LengthVector, m: u32) -> Result<Scalar> {
    if !l.ratios_rational() {
        return Err(Error::Precondition("supertile eigenfunctions need rational length ratios".into()));
    }
    let l1 = l.get(0).clone();
    let sup = l.times_power(&sigma.matrix(), m);
    let ratios: Vec<Q> = sup.entries().iter().map(|x| (x.clone() / &l1).as_rational().expect("rational ratio")).collect();
    Ok(l1 * &Scalar::rational(gcd_q(&ratios)))
}

fn frac(x: &Scalar) -> Result<Scalar> {
    Ok(x.clone() - &Scalar::rational(Q::from_integer(x.floor()?)))
}

/// Evaluates the eigenfunction `x -> exp(2 pi i j p / g_m)` with eigenvalue
/// `2 pi j / g_m`, where `g_m` is [`supertile_modulus`] and `p` the distance
/// from the nearest order-`m` supertile endpoint at or left of the origin.
/// Any other endpoint differs by a multiple of `g_m`, which is re-checked
/// against the previous endpoint.
pub fn supertile_eigenfunction(
    sigma: &Substitution,
    l: &LengthVector,
    j: i64,
    m: u32,
    x: &TilingPoint,
) -> Result<EigenfunctionValue> {
    let g = supertile_modulus(sigma, l, m)?;
    let fp = FixedPoint::new(sigma)?;
    let u = fp.prefix(x.tile + 1);
    if u.len() <= x.tile {
        return Err(Error::Invalid("tile index beyond the generated segment".into()));
    }
    let here = l.get(u[x.tile] as usize);
    if x.offset.signum_exact()? == std::cmp::Ordering::Less || x.offset.cmp_exact(here)? != std::cmp::Ordering::Less {
        return Err(Error::Invalid(format!("offset {} outside [0, {here})", x.offset)));
    }
    let coord = l.pair_int(&population_vector(&u[..x.tile], sigma.n()).to_bigint()) + &x.offset;

    // The fixed point is a concatenation of order-m supertiles of the word
    // sigma^r(u) with r = p k - m >= 0 (p the fixed-point power).
    let p = fp.power();
    let r = m.div_ceil(p) * p - m;
    let sup_len: Vec<BigInt> = sigma.image_lengths(m);
    if sup_len.iter().any(|s| *s > BigInt::from(DEFAULT_LENGTH_CAP)) {
        return Err(Error::Invalid(format!("order-{m} supertiles exceed the segment cap")));
    }
    let base = sigma.apply(&u, r as usize)?;
    let sup = l.times_power(&sigma.matrix(), m);
    let mut e = Scalar::zero();
    let mut prev: Option<Scalar> = None;
    let mut letters = BigInt::zero();
    let target = BigInt::from(x.tile);
    for &a in &base {
        let next_letters = &letters + &sup_len[a as usize];
        if next_letters > target {
            break;
        }
        prev = Some(e.clone());
        e = e + sup.get(a as usize);
        letters = next_letters;
    }
    let scale = Scalar::int(j) / &g;
    let phase = frac(&((coord.clone() - &e) * &scale))?;
    let endpoints_agree = prev.map(|pe| ((e.clone() - &pe) * &scale).is_integer());
    let angle = 2.0 * std::f64::consts::PI * phase.approx();
    Ok(EigenfunctionValue { re: angle.cos(), im: angle.sin(), phase, modulus: g, endpoint: e, endpoints_agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn dk_equal_lengths() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[1, 1]).unwrap();
        assert_eq!(supertile_modulus(&dk, &l, 2).unwrap(), Scalar::int(16));
        let v = supertile_eigenfunction(&dk, &l, 1, 0, &TilingPoint { tile: 3, offset: Scalar::int(0) }).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
        for tile in [17, 40, 100, 255] {
            let v = supertile_eigenfunction(&dk, &l, 1, 2, &TilingPoint { tile, offset: Scalar::rational(q(1, 3)) }).unwrap();
            assert_eq!(v.endpoints_agree, Some(true));
            assert_eq!(v.phase, Scalar::rational(q(3 * (tile as i64 % 16) + 1, 48)));
        }
    }

    #[test]
    fn dk_rational_lengths() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        for m in 0..4 {
            assert_eq!(supertile_modulus(&dk, &l, m).unwrap(), Scalar::int(1));
        }
        let v = supertile_eigenfunction(&dk, &l, 1, 3, &TilingPoint { tile: 70, offset: Scalar::rational(q(1, 2)) }).unwrap();
        assert_eq!(v.endpoints_agree, Some(true));
    }
}
