use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Result;

pub type Q = BigRational;

/// An exact ordered field embedded in the reals.
///
/// Zero tests are always exact; the sign of a nonzero element may require
/// interval refinement, which is why it is fallible.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
{
    fn from_rational(q: &Q) -> Self;

    fn signum_exact(&self) -> Result<Ordering>;

    fn approx(&self) -> f64;

    fn from_int(k: i64) -> Self {
        Self::from_rational(&Q::from_integer(BigInt::from(k)))
    }
}

impl Field for Q {
    fn from_rational(q: &Q) -> Self {
        q.clone()
    }

    fn signum_exact(&self) -> Result<Ordering> {
        Ok(self.cmp(&Q::zero()))
    }

    fn approx(&self) -> f64 {
        q_to_f64(self)
    }
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Float approximation of a rational that survives huge numerators and
/// denominators (plain `to_f64` on the parts would overflow to inf/inf).
pub fn q_to_f64(x: &Q) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let nb = x.numer().bits() as i64;
    let db = x.denom().bits() as i64;
    let shift = nb - db - 60;
    let scaled = if shift >= 0 {
        x.numer().abs() / (x.denom() << (shift as usize))
    } else {
        (x.numer().abs() << ((-shift) as usize)) / x.denom()
    };
    let mag = scaled.to_f64().unwrap_or(0.0) * 2f64.powi(shift as i32);
    if x.is_negative() {
        -mag
    } else {
        mag
    }
}

/// Exact dyadic rational equal to a finite float.
pub fn f64_to_q(x: f64) -> Option<Q> {
    Q::from_float(x)
}
