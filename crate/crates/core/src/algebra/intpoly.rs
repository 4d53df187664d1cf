use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::Q;
use super::poly::{write_poly, QPoly};

/// Integer polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn x_minus(r: i64) -> Self {
        Self::from_i64(&[-r, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Q::from_integer(c.clone())).collect())
    }

    /// Primitive integer polynomial proportional to a rational one.
    pub fn from_qpoly(p: &QPoly) -> Self {
        let l = p.coeffs().iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        Self::new(p.coeffs().iter().map(|c| (c * Q::from_integer(l.clone())).to_integer()).collect())
            .primitive_part()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_q(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Q::from_integer(c.clone());
        }
        acc
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(vec![]);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::from_i64(&[1]);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact quotient if `d` divides `self` over the integers.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.to_qpoly().divrem(&d.to_qpoly());
        if !r.is_zero() || q.coeffs().iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(Self::new(q.coeffs().iter().map(|c| c.to_integer()).collect()))
    }

    pub fn reversal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    pub fn is_monic(&self) -> bool {
        self.lead().is_one()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q: Vec<Q> = self.coeffs.iter().map(|c| Q::from_integer(c.clone())).collect();
        write_poly(f, &q, "x")
    }
}

#[derive(Serialize, Deserialize)]
struct IntPolyRepr {
    coeffs: Vec<String>,
    display: String,
}

impl Serialize for IntPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntPolyRepr {
            coeffs: self.coeffs.iter().map(|c| c.to_string()).collect(),
            display: self.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = IntPolyRepr::deserialize(d)?;
        let coeffs = r
            .coeffs
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(serde::de::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let p = IntPolynomial::from_i64(&[6, -4, -2]);
        assert_eq!(p.primitive_part(), IntPolynomial::from_i64(&[-3, 2, 1]));
    }

    #[test]
    fn exact_division() {
        let a = IntPolynomial::x_minus(6).mul(&IntPolynomial::x_minus(2));
        assert_eq!(a, IntPolynomial::from_i64(&[12, -8, 1]));
        assert_eq!(a.div_exact(&IntPolynomial::x_minus(2)), Some(IntPolynomial::x_minus(6)));
        assert_eq!(a.div_exact(&IntPolynomial::from_i64(&[1, 2])), None);
    }
}
