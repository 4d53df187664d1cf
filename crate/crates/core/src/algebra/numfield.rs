use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::field::{q_to_f64, qi, Field, Q};
use super::interval::Interval;
use super::poly::{write_poly, QPoly};
use super::roots::{count_real_roots, sign_at};
use crate::{Error, Result};

const MAX_REFINEMENTS: usize = 4000;

/// A real number field `Q(theta)` given by the minimal polynomial of `theta`
/// and an isolating interval selecting one of its real roots.
///
/// The interval is tightened in place whenever a sign query needs more
/// precision, so later queries start from the best bracket found so far.
pub struct NumberField {
    minpoly: QPoly,
    initial: Interval,
    root: Mutex<Interval>,
    approx: f64,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NumberField({} ~ {})", self.minpoly, self.approx)
    }
}

impl NumberField {
    /// `minpoly` must be irreducible over Q; `interval` must contain exactly
    /// one of its real roots.
    pub fn new(minpoly: &QPoly, interval: Interval) -> Result<Arc<Self>> {
        let minpoly = minpoly.monic();
        if minpoly.deg() < 1 {
            return Err(Error::Invalid("field generator needs a polynomial of degree >= 1".into()));
        }
        if count_real_roots(&minpoly, &interval.lo, &interval.hi) != 1 {
            return Err(Error::Invalid(format!(
                "interval {interval} does not isolate a single root of {minpoly}"
            )));
        }
        let nf = NumberField { minpoly, initial: interval.clone(), root: Mutex::new(interval), approx: 0.0 };
        let approx = nf.refined(&qi(1) / &Q::from_integer(BigInt::one() << 60usize)).mid();
        Ok(Arc::new(NumberField { approx: q_to_f64(&approx), ..nf }))
    }

    /// `Q(sqrt d)` for a positive non-square integer `d`.
    pub fn sqrt(d: i64) -> Result<Arc<Self>> {
        if d <= 1 {
            return Err(Error::Invalid(format!("sqrt {d}: need an integer d >= 2")));
        }
        let r = (d as f64).sqrt().round() as i64;
        if r * r == d {
            return Err(Error::Invalid(format!("sqrt {d}: d is a perfect square")));
        }
        let minpoly = QPoly::new(vec![qi(-d), qi(0), qi(1)]);
        NumberField::new(&minpoly, Interval::new(qi(1), qi(d)))
    }

    pub fn minpoly(&self) -> &QPoly {
        &self.minpoly
    }

    pub fn degree(&self) -> usize {
        self.minpoly.deg()
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    /// The isolating interval the field was created with; unlike the working
    /// bracket it does not depend on how many queries have been answered.
    pub fn isolating_interval(&self) -> &Interval {
        &self.initial
    }

    pub fn root_interval(&self) -> Interval {
        self.root.lock().unwrap().clone()
    }

    /// Bisects the stored bracket until its width is at most `width`.
    pub fn refined(&self, width: Q) -> Interval {
        let mut iv = self.root.lock().unwrap();
        while iv.width() > width {
            bisect(&self.minpoly, &mut iv);
        }
        iv.clone()
    }

    fn bisect_once(&self) -> Interval {
        let mut iv = self.root.lock().unwrap();
        bisect(&self.minpoly, &mut iv);
        iv.clone()
    }

    /// Same generator polynomial and the same selected root.
    pub fn same_as(&self, other: &NumberField) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.minpoly != other.minpoly {
            return false;
        }
        let mut a = self.root_interval();
        let mut b = other.root_interval();
        for _ in 0..MAX_REFINEMENTS {
            if !a.overlaps(&b) {
                return false;
            }
            // Each bracket holds one root; a single root in the overlap must be
            // both of them.
            let lo = a.lo.clone().max(b.lo.clone());
            let hi = a.hi.clone().min(b.hi.clone());
            if count_real_roots(&self.minpoly, &lo, &hi) == 1 {
                return true;
            }
            a = self.bisect_once();
            b = other.bisect_once();
        }
        false
    }

    pub fn generator(self: &Arc<Self>) -> Scalar {
        Scalar::from_coeffs(Some(self.clone()), vec![qi(0), qi(1)])
    }
}

fn bisect(f: &QPoly, iv: &mut Interval) {
    if iv.lo == iv.hi {
        return;
    }
    let mid = iv.mid();
    let sm = sign_at(f, &mid);
    if sm == Ordering::Equal {
        *iv = Interval::point(mid);
        return;
    }
    let sl = sign_at(f, &iv.lo);
    if sl == Ordering::Equal {
        *iv = Interval::point(iv.lo.clone());
    } else if sl != sm {
        iv.hi = mid;
    } else {
        iv.lo = mid;
    }
}

/// An exact real number: a rational, or an element of a real number field
/// written as a polynomial in the generator of degree below the field degree.
///
/// Rationals carry no field and combine freely with elements of any field.
#[derive(Clone)]
pub struct Scalar {
    field: Option<Arc<NumberField>>,
    coeffs: Vec<Q>,
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Scalar {
    pub fn rational(q: Q) -> Self {
        Scalar::from_coeffs(None, vec![q])
    }

    pub fn int(k: i64) -> Self {
        Scalar::rational(qi(k))
    }

    /// Builds `sum coeffs[i] theta^i` reduced modulo the minimal polynomial.
    pub fn from_coeffs(field: Option<Arc<NumberField>>, coeffs: Vec<Q>) -> Self {
        match field {
            None => {
                let p = QPoly::new(coeffs);
                assert!(p.deg() == 0, "polynomial value without a number field");
                Scalar { field: None, coeffs: p.into_coeffs() }
            }
            Some(nf) => {
                let p = QPoly::new(coeffs).rem(nf.minpoly());
                let coeffs = p.into_coeffs();
                if coeffs.len() <= 1 {
                    Scalar { field: None, coeffs }
                } else {
                    Scalar { field: Some(nf), coeffs }
                }
            }
        }
    }

    pub fn from_poly(field: &Arc<NumberField>, p: &QPoly) -> Self {
        Scalar::from_coeffs(Some(field.clone()), p.coeffs().to_vec())
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    /// Coefficients in the power basis of the generator (empty for zero).
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.field.is_some() {
            return None;
        }
        Some(self.coeffs.first().cloned().unwrap_or_else(Q::zero))
    }

    pub fn is_rational(&self) -> bool {
        self.field.is_none()
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    fn poly(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    fn join(&self, o: &Scalar) -> Option<Arc<NumberField>> {
        match (&self.field, &o.field) {
            (None, None) => None,
            (Some(f), None) | (None, Some(f)) => Some(f.clone()),
            (Some(f), Some(g)) => {
                assert!(f.same_as(g), "mixing elements of different number fields: {f:?} and {g:?}");
                Some(f.clone())
            }
        }
    }

    /// True when both values can be combined arithmetically.
    pub fn compatible(&self, o: &Scalar) -> bool {
        match (&self.field, &o.field) {
            (Some(f), Some(g)) => f.same_as(g),
            _ => true,
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::Invalid("division by zero".into()));
        }
        match &self.field {
            None => Ok(Scalar::rational(self.coeffs[0].recip())),
            Some(nf) => {
                let (g, s, _) = self.poly().xgcd(nf.minpoly());
                if g.deg() != 0 {
                    return Err(Error::Invalid(format!(
                        "generator polynomial {} is reducible",
                        nf.minpoly()
                    )));
                }
                Ok(Scalar::from_poly(nf, &s))
            }
        }
    }

    /// Bracket for the value, refining the generator until the width is
    /// below `width` (rationals give a point interval).
    pub fn enclosure(&self, width: &Q) -> Result<Interval> {
        let Some(nf) = &self.field else {
            return Ok(Interval::point(self.coeffs.first().cloned().unwrap_or_else(Q::zero)));
        };
        let mut theta = nf.root_interval();
        for _ in 0..MAX_REFINEMENTS {
            let v = theta.eval_poly(&self.coeffs);
            if &v.width() <= width {
                return Ok(v);
            }
            theta = nf.bisect_once();
        }
        Err(Error::RefinementCap)
    }

    /// Bracket that excludes zero (the value must be nonzero).
    fn sign_enclosure(&self) -> Result<Interval> {
        let nf = self.field.as_ref().expect("field element");
        let mut theta = nf.root_interval();
        for _ in 0..MAX_REFINEMENTS {
            let v = theta.eval_poly(&self.coeffs);
            if !v.contains_zero() {
                return Ok(v);
            }
            theta = nf.bisect_once();
        }
        Err(Error::RefinementCap)
    }

    pub fn floor(&self) -> Result<BigInt> {
        let Some(nf) = &self.field else {
            return Ok(self.coeffs.first().cloned().unwrap_or_else(Q::zero).floor().to_integer());
        };
        // A field element outside Q is irrational, so it is never an integer
        // and the bracket eventually lies strictly between two integers.
        let mut theta = nf.root_interval();
        for _ in 0..MAX_REFINEMENTS {
            let v = theta.eval_poly(&self.coeffs);
            let a = v.lo.floor();
            if a == v.hi.floor() && v.hi != a + qi(1) {
                return Ok(v.lo.floor().to_integer());
            }
            theta = nf.bisect_once();
        }
        Err(Error::RefinementCap)
    }

    /// Distance to the nearest integer, to about 1e-15 absolute accuracy.
    pub fn dist_to_integer(&self) -> Result<f64> {
        let fl = self.floor()?;
        let frac = self.clone() - &Scalar::rational(Q::from_integer(fl));
        let tiny = Q::new(BigInt::one(), BigInt::one() << 60usize);
        let iv = frac.enclosure(&tiny)?;
        let x = q_to_f64(&iv.mid());
        Ok(x.min(1.0 - x).max(0.0))
    }

    pub fn abs(&self) -> Result<Scalar> {
        Ok(match self.signum_exact()? {
            Ordering::Less => -self.clone(),
            _ => self.clone(),
        })
    }

    pub fn cmp_exact(&self, o: &Scalar) -> Result<Ordering> {
        (self.clone() - o).signum_exact()
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }

    /// Common denominator of the power-basis coefficients.
    pub fn denominator(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        if self.coeffs != o.coeffs {
            return false;
        }
        match (&self.field, &o.field) {
            (Some(f), Some(g)) => f.same_as(g),
            (None, None) => true,
            _ => false,
        }
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar { field: None, coeffs: vec![] }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::int(1)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { field: self.field, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self * &o
    }
}

impl<'a> Add<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let f = self.join(o);
        Scalar::from_coeffs_unreduced(f, (&self.poly() + &o.poly()).into_coeffs())
    }
}

impl<'a> Sub<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        let f = self.join(o);
        Scalar::from_coeffs_unreduced(f, (&self.poly() - &o.poly()).into_coeffs())
    }
}

impl<'a> Mul<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let f = self.join(o);
        match f {
            None => Scalar::from_coeffs(None, (&self.poly() * &o.poly()).into_coeffs()),
            Some(_) => Scalar::from_coeffs(f, (&self.poly() * &o.poly()).into_coeffs()),
        }
    }
}

impl<'a> Div<&'a Scalar> for Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero")
    }
}

impl Scalar {
    /// Sums and differences never raise the degree, so no reduction is
    /// needed; only the field tag has to follow the coefficient count.
    fn from_coeffs_unreduced(field: Option<Arc<NumberField>>, coeffs: Vec<Q>) -> Self {
        let p = QPoly::new(coeffs).into_coeffs();
        if p.len() <= 1 {
            Scalar { field: None, coeffs: p }
        } else {
            Scalar { field, coeffs: p }
        }
    }
}

impl Field for Scalar {
    fn from_rational(q: &Q) -> Self {
        Scalar::rational(q.clone())
    }

    fn signum_exact(&self) -> Result<Ordering> {
        if self.field.is_none() {
            return Ok(self.coeffs.first().map(|c| c.cmp(&Q::zero())).unwrap_or(Ordering::Equal));
        }
        let v = self.sign_enclosure()?;
        Ok(if v.is_positive() { Ordering::Greater } else { Ordering::Less })
    }

    fn approx(&self) -> f64 {
        match &self.field {
            None => self.coeffs.first().map(q_to_f64).unwrap_or(0.0),
            Some(_) => {
                let tiny = Q::new(BigInt::one(), BigInt::one() << 60usize);
                let scale = self
                    .coeffs
                    .iter()
                    .fold(Q::one(), |m, c| m.max(c.abs()));
                match self.enclosure(&(tiny * scale)) {
                    Ok(iv) => q_to_f64(&iv.mid()),
                    Err(_) => f64::NAN,
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        write_poly(f, &self.coeffs, "x")
    }
}

impl From<Q> for Scalar {
    fn from(q: Q) -> Self {
        Scalar::rational(q)
    }
}

impl From<i64> for Scalar {
    fn from(k: i64) -> Self {
        Scalar::int(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    fn golden() -> Arc<NumberField> {
        let p = QPoly::new(vec![qi(-1), qi(-1), qi(1)]);
        NumberField::new(&p, Interval::new(qi(1), qi(2))).unwrap()
    }

    #[test]
    fn golden_ratio_arithmetic() {
        let nf = golden();
        let t = nf.generator();
        // tau^2 = tau + 1
        assert_eq!(t.clone() * &t, t.clone() + &Scalar::int(1));
        // 1/tau = tau - 1
        assert_eq!(Scalar::int(1) / &t, t.clone() - &Scalar::int(1));
        assert_eq!(t.signum_exact().unwrap(), Ordering::Greater);
        let small = Scalar::int(1) - &t;
        assert_eq!(small.signum_exact().unwrap(), Ordering::Less);
        assert!((t.approx() - 1.618_033_988_749_895).abs() < 1e-14);
    }

    #[test]
    fn floor_and_distance() {
        let nf = golden();
        let t = nf.generator();
        let x = t.pow(10);
        // tau^10 = 122.99..., distance to 123 equals tau^-10
        assert_eq!(x.floor().unwrap(), BigInt::from(122));
        let d = x.dist_to_integer().unwrap();
        assert!((d - 1.618_033_988_749_895f64.powi(-10)).abs() < 1e-12);
        assert_eq!(Scalar::rational(q(7, 2)).floor().unwrap(), BigInt::from(3));
    }

    #[test]
    fn sqrt_two_field() {
        let nf = NumberField::sqrt(2).unwrap();
        let r = nf.generator();
        assert_eq!(r.clone() * &r, Scalar::int(2));
        assert!(NumberField::sqrt(4).is_err());
        assert!(r.as_rational().is_none());
        assert_eq!((r.clone() - &r).as_rational(), Some(qi(0)));
    }
}
