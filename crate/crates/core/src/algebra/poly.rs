use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use super::field::{Field, Q};
use crate::Result;

/// Dense univariate polynomial over a field, coefficients in ascending degree.
/// Trailing zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

pub type QPoly = Poly<Q>;

impl<T: Field> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![T::one()] }
    }

    pub fn x() -> Self {
        Poly { coeffs: vec![T::zero(), T::one()] }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: T, k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn lead(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = T::one() / &self.lead();
        self.scale(&inv)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * &T::from_int(i as i64))
                .collect(),
        )
    }

    /// `x^n p(1/x)` where `n` is the degree.
    pub fn reversal(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// `p(s x)`.
    pub fn scale_arg(&self, s: &T) -> Self {
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.clone() * &pow);
            pow = pow * s;
        }
        Self::new(out)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.deg();
        if self.coeffs.len() < d.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let inv = T::one() / &d.lead();
        let mut rem = self.coeffs.clone();
        let mut quo = vec![T::zero(); rem.len() - dd];
        for i in (0..quo.len()).rev() {
            let c = rem[i + dd].clone() * &inv;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[i + j] = rem[i + j].clone() - &(c.clone() * dc);
                }
            }
            quo[i] = c;
        }
        rem.truncate(dd);
        (Self::new(quo), Self::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: returns `(g, s, t)` with `s a + t b = g`, `g` monic.
    pub fn xgcd(&self, other: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&qt * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&qt * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = T::one() / &r0.lead();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn map<U: Field>(&self, f: impl Fn(&T) -> U) -> Poly<U> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Sign of the leading coefficient.
    pub fn lead_sign(&self) -> Result<Ordering> {
        self.lead().signum_exact()
    }
}

impl<T: Field> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl<T: Field> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, o: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl<T: Field> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, o: &Poly<T>) -> Poly<T> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + &(a.clone() * b);
            }
        }
        Poly::new(out)
    }
}

impl<T: Field> Neg for &Poly<T> {
    type Output = Poly<T>;
    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Field + fmt::Display> fmt::Display for Poly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs, "x")
    }
}

/// Writes `sum c_i var^i` from the highest degree down, e.g. `x^2 - 8*x + 12`.
pub(crate) fn write_poly<T: Field + fmt::Display>(
    f: &mut impl fmt::Write,
    coeffs: &[T],
    var: &str,
) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.signum_exact().map(|s| s == Ordering::Less).unwrap_or(false);
        let mag = if neg { -c.clone() } else { c.clone() };
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        let unit = mag.is_one();
        match i {
            0 => write!(f, "{mag}")?,
            _ => {
                if !unit {
                    write!(f, "{mag}*")?;
                }
                if i == 1 {
                    f.write_str(var)?;
                } else {
                    write!(f, "{var}^{i}")?;
                }
            }
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::{q, qi};

    fn p(c: &[i64]) -> QPoly {
        Poly::new(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[12, -8, 1, 3]);
        let b = p(&[-2, 1]);
        let (qt, r) = a.divrem(&b);
        assert_eq!(&(&qt * &b) + &r, a);
        assert_eq!(r.degree(), Some(0));
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let a = &p(&[-2, 1]) * &p(&[1, 1]);
        let b = &p(&[-2, 1]) * &p(&[5, 0, 1]);
        assert_eq!(a.gcd(&b), p(&[-2, 1]));
        let (g, s, t) = a.xgcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(p(&[12, -8, 1]).to_string(), "x^2 - 8*x + 12");
        let half = Poly::new(vec![q(1, 2), q(-3, 4)]);
        assert_eq!(half.to_string(), "-3/4*x + 1/2");
        assert_eq!(QPoly::zero().to_string(), "0");
    }
}
