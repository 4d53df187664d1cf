//! Point spectrum of the translation flow on a substitution tiling space:
//! candidate verification through the mod-1 behaviour of supertile lengths,
//! the classification decision tree, closed forms for two-letter
//! constant-length rules, eigenfunctions built from supertile endpoints,
//! and measure-theoretic diagnostics (frequencies, cylinder measures,
//! return overlaps).

mod classify;
mod eigenfunction;
mod measure;
mod verify;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use classify::{
    classify_spectrum, classify_spectrum_general, constant_length_data, constant_length_spectrum, CandidateReport,
    ConstantLengthData, Hypotheses, LengthRatio, SearchBounds, SmallBlock, SpectrumCase, SpectrumOptions,
    SpectrumReport,
};
pub use eigenfunction::{supertile_eigenfunction, supertile_modulus, EigenfunctionValue, TilingPoint};
pub use measure::{
    letter_frequencies, measure_cylinder, mixing_overlap_estimate, CylinderMeasure, CylinderSet, OverlapEstimate,
    OverlapOptions,
};
pub use verify::{default_vectors, M_MAX_CAP, verify_eigenvalue_candidate, Candidate, TraceSummary, Verdict, VerifyConfig, VerifyReport};

use crate::algebra::{Field, IntMatrix, NumberField, Scalar};
use crate::{Error, Result};

/// Where a tile length came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthOrigin {
    Input,
    /// Entry of the left Perron eigenvector.
    Perron,
    /// Obtained from other lengths (matrix powers, permutations).
    Derived,
}

/// Tile lengths as a row vector, one positive exact entry per letter. All
/// entries are rational or lie in one common real number field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthVector {
    entries: Vec<Scalar>,
    origin: Vec<LengthOrigin>,
}

impl LengthVector {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        let n = entries.len();
        Self::with_origin(entries, vec![LengthOrigin::Input; n])
    }

    pub fn with_origin(entries: Vec<Scalar>, origin: Vec<LengthOrigin>) -> Result<Self> {
        if entries.is_empty() || origin.len() != entries.len() {
            return Err(Error::Invalid("length vector must have one entry per letter".into()));
        }
        for (i, a) in entries.iter().enumerate() {
            if !entries[..i].iter().all(|b| a.compatible(b)) {
                return Err(Error::Invalid("tile lengths live in different number fields".into()));
            }
            if a.signum_exact()? != Ordering::Greater {
                return Err(Error::Invalid(format!("tile length {a} is not positive")));
            }
        }
        Ok(LengthVector { entries, origin })
    }

    pub fn from_ints(v: &[i64]) -> Result<Self> {
        Self::new(v.iter().map(|&x| Scalar::int(x)).collect())
    }

    /// The natural lengths: the left Perron eigenvector, first entry 1.
    pub fn perron(spec: &crate::algebra::Spectral) -> Self {
        let l = spec.perron.left.clone();
        let n = l.len();
        LengthVector { entries: l, origin: vec![LengthOrigin::Perron; n] }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn origin(&self) -> &[LengthOrigin] {
        &self.origin
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.entries[i]
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.entries.iter().find_map(|x| x.field())
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|x| x.is_rational())
    }

    pub fn approx(&self) -> Vec<f64> {
        self.entries.iter().map(|x| x.approx()).collect()
    }

    /// `L . v` for an integer column vector.
    pub fn pair_int(&self, v: &[num_bigint::BigInt]) -> Scalar {
        let mut acc = Scalar::zero();
        for (l, c) in self.entries.iter().zip(v) {
            if !c.is_zero() {
                acc = acc + &(l.clone() * &Scalar::rational(c.clone().into()));
            }
        }
        acc
    }

    /// `L M^k`, for `k >= 0`.
    pub fn times_power(&self, m: &IntMatrix, k: u32) -> LengthVector {
        let mut cur = self.entries.clone();
        for _ in 0..k {
            cur = (0..m.cols())
                .map(|j| {
                    let col: Vec<_> = (0..m.rows()).map(|i| m[(i, j)].clone()).collect();
                    let mut acc = Scalar::zero();
                    for (l, c) in cur.iter().zip(&col) {
                        if !c.is_zero() {
                            acc = acc + &(l.clone() * &Scalar::rational(c.clone().into()));
                        }
                    }
                    acc
                })
                .collect();
        }
        let n = cur.len();
        let origin = if k == 0 { self.origin.clone() } else { vec![LengthOrigin::Derived; n] };
        LengthVector { entries: cur, origin }
    }

    /// Lengths after relabelling: entry `i` of the result is entry `perm[i]`.
    pub fn permuted(&self, perm: &[u8]) -> LengthVector {
        let entries = perm.iter().map(|&p| self.entries[p as usize].clone()).collect();
        let identity = perm.iter().enumerate().all(|(i, &p)| i == p as usize);
        let origin = if identity { self.origin.clone() } else { vec![LengthOrigin::Derived; perm.len()] };
        LengthVector { entries, origin }
    }

    /// `L_i / L_j` for every pair is rational.
    pub fn ratios_rational(&self) -> bool {
        let l0 = &self.entries[0];
        self.entries.iter().all(|x| (x.clone() / l0).is_rational())
    }

    /// Total length of a word.
    pub fn word_length(&self, w: &[u8]) -> Scalar {
        let mut counts = vec![0i64; self.n()];
        for &c in w {
            counts[c as usize] += 1;
        }
        let mut acc = Scalar::zero();
        for (l, c) in self.entries.iter().zip(counts) {
            if c != 0 {
                acc = acc + &(l.clone() * &Scalar::int(c));
            }
        }
        acc
    }
}

impl fmt::Display for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{NumberField, Spectral};

    #[test]
    fn lengths_basics() {
        let m = IntMatrix::from_rows(&[vec![2, 1], vec![2, 3]]);
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        assert_eq!(l.times_power(&m, 1), LengthVector::from_ints(&[6, 5]).unwrap().permuted(&[0, 1]).relabel_derived());
        assert!(l.ratios_rational());
        let r2 = NumberField::sqrt(2).unwrap();
        let irr = LengthVector::new(vec![r2.generator(), Scalar::int(1)]).unwrap();
        assert!(!irr.ratios_rational());
        assert!(LengthVector::from_ints(&[1, 0]).is_err());
        let fib = Spectral::new(&IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]])).unwrap();
        let l0 = LengthVector::perron(&fib);
        assert_eq!(l0.get(1), fib.lambda());
    }

    impl LengthVector {
        fn relabel_derived(mut self) -> Self {
            self.origin = vec![LengthOrigin::Derived; self.n()];
            self
        }
    }
}
