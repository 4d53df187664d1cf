//! Serialization of exact values: integers as JSON numbers when they fit in
//! 64 bits and as decimal strings otherwise, rationals as
//! `{numerator, denominator}`, number-field elements as
//! `{coeffs, minpoly, root_interval}`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::field::Q;
use crate::algebra::interval::Interval;
use crate::algebra::matrix::Matrix;
use crate::algebra::poly::QPoly;
use crate::algebra::{NumberField, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(i64),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(v) => Ok(Int(BigInt::from(v))),
            Repr::S(s) => s.parse().map(Int).map_err(D::Error::custom),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RationalRepr {
    numerator: Int,
    denominator: Int,
}

impl RationalRepr {
    fn from_q(q: &Q) -> Self {
        RationalRepr { numerator: Int(q.numer().clone()), denominator: Int(q.denom().clone()) }
    }

    fn into_q<E: serde::de::Error>(self) -> Result<Q, E> {
        if self.denominator.0 == BigInt::from(0) {
            return Err(E::custom("zero denominator"));
        }
        Ok(Q::new(self.numerator.0, self.denominator.0))
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        RationalRepr::from_q(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        RationalRepr::deserialize(d)?.into_q()
    }
}

pub mod opt_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
        q.as_ref().map(RationalRepr::from_q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
        Option::<RationalRepr>::deserialize(d)?.map(|r| r.into_q()).transpose()
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(RationalRepr::from_q).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        Vec::<RationalRepr>::deserialize(d)?.into_iter().map(|r| r.into_q()).collect()
    }
}

pub mod rational_vecs {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|r| r.iter().map(RationalRepr::from_q).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
        Vec::<Vec<RationalRepr>>::deserialize(d)?
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.into_q()).collect())
            .collect()
    }
}

pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(m: &Matrix<Q>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Q>> = (0..m.rows()).map(|i| m.row(i)).collect();
        super::rational_vecs::serialize(&rows, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix<Q>, D::Error> {
        let rows = super::rational_vecs::deserialize(d)?;
        let c = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != c) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(Matrix::from_rows(rows))
    }
}

#[derive(Serialize, Deserialize)]
struct FieldElementRepr {
    #[serde(with = "rational_vec")]
    coeffs: Vec<Q>,
    #[serde(with = "rational_vec")]
    minpoly: Vec<Q>,
    root_interval: Interval,
    display: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Rational(RationalRepr),
    Field(FieldElementRepr),
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.field() {
            None => RationalRepr::from_q(&self.as_rational().unwrap()).serialize(s),
            Some(nf) => FieldElementRepr {
                coeffs: self.coeffs().to_vec(),
                minpoly: nf.minpoly().coeffs().to_vec(),
                root_interval: nf.isolating_interval().clone(),
                display: self.to_string(),
            }
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ScalarRepr::deserialize(d)? {
            ScalarRepr::Rational(r) => Ok(Scalar::rational(r.into_q()?)),
            ScalarRepr::Field(f) => {
                let nf = NumberField::new(&QPoly::new(f.minpoly), f.root_interval).map_err(D::Error::custom)?;
                Ok(Scalar::from_coeffs(Some(nf), f.coeffs))
            }
        }
    }
}

/// Floats in reports are advisory and always wrapped as `{"approx": x}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approx {
    pub approx: f64,
}

impl Approx {
    pub fn new(x: f64) -> Self {
        Approx { approx: x }
    }
}
