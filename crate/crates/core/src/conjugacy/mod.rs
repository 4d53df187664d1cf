//! Topological conjugacy between tiling spaces built from one substitution
//! with two tile-length vectors `L` and `L'`.
//!
//! Two directions are covered. A sufficient condition: if
//! `(L M^k - L') M^m -> 0`, possibly after relabelling letters by a
//! permutation that commutes with the substitution, the spaces are
//! conjugate. A necessary condition: long repeated words give families of
//! repetition vectors whose supertile lengths must be matched between the
//! two spaces; an unmatched family is an obstruction. Between the two the
//! verdict is undecided.

mod obstruction;
mod repetition;

use std::ops::RangeInclusive;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

pub use obstruction::{
    compare_pair, conjugacy_obstruction, recheck_obstruction, GeneratorTrace, ObstructionOptions, ObstructionReport,
    PairCheck, PairOutcome, TracePoint,
};
pub use repetition::{
    choose_degree, recognition_length_estimate, repetition_families, repetition_vectors, DegreeChoice, FamilyMember,
    RecognitionEstimate, RepetitionFamily, RepetitionVector,
};

use crate::algebra::{large_component, Field, LargeComponent, Scalar, Spectral};
use crate::spectrum::LengthVector;
use crate::subst::Substitution;
use crate::{Error, Result};

/// Carries a point of `T_L` to `T_L'`: the origin sits `t` into a tile
/// `a`, and lands at the same proportion of the rescaled tile. Returns
/// `t' = L'(a) t / L(a)`.
pub fn convert_point(letter: u8, t: &Scalar, l: &LengthVector, l2: &LengthVector) -> Result<Scalar> {
    let a = letter as usize;
    if a >= l.n() || a >= l2.n() {
        return Err(Error::Invalid(format!("letter index {a} outside the alphabet")));
    }
    let f = l.get(a);
    if t.signum_exact()? == std::cmp::Ordering::Less || t.cmp_exact(f)? != std::cmp::Ordering::Less {
        return Err(Error::Invalid(format!("offset {t} outside [0, {f})")));
    }
    Ok(t.clone() * l2.get(a) / f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `L' = (L M^k)` relabelled, up to a difference that dies out.
    pub k: i64,
    /// Entry `i` of the relabelled lengths is entry `permutation[i]`.
    pub permutation: Vec<u8>,
    /// The relabelling written as `ab->ba`, or `id`.
    pub relabelling: String,
    pub remainder: String,
    /// The difference is exactly zero.
    pub exact: bool,
    /// When set, `k` counts powers of a root substitution whose
    /// `root_power`-th power is the given one.
    pub root_power: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConjugacyVerdict {
    Certificate(Certificate),
    Obstructed {
        generator: crate::subst::PopulationVector,
        report: Box<ObstructionReport>,
    },
    Undecided {
        reason: String,
        notes: Vec<String>,
        obstruction: Option<Box<ObstructionReport>>,
    },
}

impl ConjugacyVerdict {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, ConjugacyVerdict::Undecided { .. })
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            ConjugacyVerdict::Certificate(c) => Some(c),
            _ => None,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConjugacyVerdict::Certificate(_) => "certificate",
            ConjugacyVerdict::Obstructed { .. } => "obstructed",
            ConjugacyVerdict::Undecided { .. } => "undecided",
        }
    }

    /// Re-derives a decisive verdict from scratch; `root` is needed for
    /// certificates found through a root substitution.
    pub fn recheck(
        &self,
        sigma: &Substitution,
        l: &LengthVector,
        l2: &LengthVector,
        root: Option<&Substitution>,
    ) -> Result<bool> {
        match self {
            ConjugacyVerdict::Certificate(c) => {
                let base = match (c.root_power, root) {
                    (None, _) => sigma,
                    (Some(_), Some(r)) => r,
                    (Some(_), None) => return Err(Error::Precondition("certificate refers to a root substitution".into())),
                };
                let spec = Spectral::new(&base.matrix())?;
                let r = residual(&spec, l, l2, c.k, &c.permutation);
                Ok(large_component(&r, &spec)?.is_zero())
            }
            ConjugacyVerdict::Obstructed { generator, report } => recheck_obstruction(sigma, l, l2, generator, report),
            ConjugacyVerdict::Undecided { .. } => Ok(true),
        }
    }
}

/// Checks that both length vectors can be combined with the Perron data.
pub(crate) fn lengths_fit(spec: &Spectral, l: &LengthVector, l2: &LengthVector) -> std::result::Result<(), String> {
    if l.n() != spec.n() || l2.n() != spec.n() {
        return Err("length vectors and alphabet differ in size".into());
    }
    let lam = spec.lambda();
    let ok = l.entries().iter().chain(l2.entries()).all(|x| x.compatible(lam))
        && l.entries().iter().all(|x| l2.entries().iter().all(|y| x.compatible(y)));
    if ok {
        Ok(())
    } else {
        Err("lengths lie outside the field of the Perron eigenvalue".into())
    }
}

/// The integer `k` with `lambda^k = ratio`, if any.
pub(crate) fn perron_power(spec: &Spectral, ratio: &Scalar) -> Option<i64> {
    let lam = spec.lambda().approx();
    let r = ratio.approx();
    if !(lam > 1.0) || !(r > 0.0) || !r.is_finite() {
        return None;
    }
    let k0 = (r.ln() / lam.ln()).round() as i64;
    (k0 - 1..=k0 + 1).find(|&k| spec.lambda_pow(k) == *ratio)
}

/// `(L M^k) o pi - L'` for `k >= 0`, or `L o pi - L' M^|k|` for `k < 0`.
fn residual(spec: &Spectral, l: &LengthVector, l2: &LengthVector, k: i64, perm: &[u8]) -> Vec<Scalar> {
    let m = &spec.matrix;
    let (a, b) = if k >= 0 {
        (l.times_power(m, k as u32), l2.clone())
    } else {
        (l.clone(), l2.times_power(m, k.unsigned_abs() as u32))
    };
    let a = a.permuted(perm);
    a.entries().iter().zip(b.entries()).map(|(x, y)| x.clone() - y).collect()
}

fn relabelling(sigma: &Substitution, perm: &[u8]) -> String {
    if perm.iter().enumerate().all(|(i, &p)| i == p as usize) {
        return "id".into();
    }
    let from: String = sigma.alphabet().iter().collect();
    let to: String = perm.iter().map(|&p| sigma.letter(p)).collect();
    format!("{from}->{to}")
}

/// Searches for `k` and a letter permutation `pi` commuting with the
/// substitution such that `(L M^k) o pi - L'` lies in the span of the
/// small-eigenvalue generalized eigenvectors. The Perron pairings pin `k`
/// (`lambda^k` must equal their ratio), so the search is finite and exact.
/// Failure is undecided: the condition is sufficient only.
pub fn sufficient_certificate(
    sigma: &Substitution,
    l: &LengthVector,
    l2: &LengthVector,
    k_range: Option<RangeInclusive<i64>>,
    allow_permutations: bool,
) -> Result<ConjugacyVerdict> {
    sigma.require_primitive()?;
    let spec = Spectral::new(&sigma.matrix())?;
    let undecided = |reason: String, notes: Vec<String>| ConjugacyVerdict::Undecided { reason, notes, obstruction: None };
    if let Err(why) = lengths_fit(&spec, l, l2) {
        return Ok(undecided(why, Vec::new()));
    }
    let perms = if allow_permutations {
        sigma.commuting_permutations()
    } else {
        vec![(0..sigma.n() as u8).collect()]
    };
    let mut notes = Vec::new();
    for perm in perms {
        let lp = l.permuted(&perm);
        let ratio = spec.perron_pairing(l2.entries()) / &spec.perron_pairing(lp.entries());
        let label = relabelling(sigma, &perm);
        let Some(k) = perron_power(&spec, &ratio) else {
            notes.push(format!("{label}: Perron pairing ratio {:.6} is not a power of the Perron eigenvalue", ratio.approx()));
            continue;
        };
        if let Some(range) = &k_range {
            if !range.contains(&k) {
                notes.push(format!("{label}: pairing ratio gives k = {k}, outside the search range"));
                continue;
            }
        }
        let r = residual(&spec, l, l2, k, &perm);
        let exact = r.iter().all(|x| x.is_zero());
        match large_component(&r, &spec)? {
            LargeComponent::Zero => {
                let remainder = if exact {
                    "zero".to_string()
                } else {
                    "nonzero, inside the small-eigenvalue subspace (decays under M)".to_string()
                };
                return Ok(ConjugacyVerdict::Certificate(Certificate {
                    k,
                    permutation: perm,
                    relabelling: label,
                    remainder,
                    exact,
                    root_power: None,
                }));
            }
            LargeComponent::Nonzero { witness } => notes.push(format!("{label}, k = {k}: difference has an {witness}")),
            LargeComponent::Undecided { reason } => notes.push(format!("{label}, k = {k}: {reason}")),
        }
    }
    Ok(undecided("no certificate: no power of M and relabelling brings the lengths together".into(), notes))
}

/// The smallest `r <= 6` with `root^r = sigma`.
pub fn root_power(sigma: &Substitution, root: &Substitution) -> Option<u32> {
    let mut cur = root.clone();
    for r in 1..=6 {
        if cur == *sigma {
            return Some(r);
        }
        cur = cur.compose(root).ok()?;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyConfig {
    pub k_range: Option<RangeInclusive<i64>>,
    pub allow_permutations: bool,
    /// Repetition degree; chosen from the data when absent.
    pub degree: Option<Scalar>,
    pub obstruction: ObstructionOptions,
    /// A substitution with some power equal to the given one; its matrix
    /// powers are searched as well.
    pub root: Option<Substitution>,
}

impl Default for ConjugacyConfig {
    fn default() -> Self {
        ConjugacyConfig {
            k_range: None,
            allow_permutations: true,
            degree: None,
            obstruction: ObstructionOptions::default(),
            root: None,
        }
    }
}

/// Certificate search first (also through the root, if given), then the
/// repetition-family obstruction; undecided with both accounts otherwise.
pub fn analyze_conjugacy(
    sigma: &Substitution,
    l: &LengthVector,
    l2: &LengthVector,
    cfg: &ConjugacyConfig,
) -> Result<ConjugacyVerdict> {
    let first = sufficient_certificate(sigma, l, l2, cfg.k_range.clone(), cfg.allow_permutations)?;
    if first.is_decisive() {
        return Ok(first);
    }
    let mut notes = match first {
        ConjugacyVerdict::Undecided { reason, notes, .. } => std::iter::once(reason).chain(notes).collect(),
        _ => Vec::new(),
    };
    if let Some(root) = &cfg.root {
        match root_power(sigma, root) {
            None => notes.push("the supplied root has no power equal to the substitution".into()),
            Some(r) => match sufficient_certificate(root, l, l2, None, cfg.allow_permutations)? {
                ConjugacyVerdict::Certificate(mut c) => {
                    c.root_power = Some(r);
                    return Ok(ConjugacyVerdict::Certificate(c));
                }
                ConjugacyVerdict::Undecided { reason, notes: more, .. } => {
                    notes.push(format!("root substitution: {reason}"));
                    notes.extend(more);
                }
                ConjugacyVerdict::Obstructed { .. } => unreachable!("certificate search never obstructs"),
            },
        }
    }
    let degree = match &cfg.degree {
        Some(p) => p.clone(),
        None => {
            let choice = choose_degree(sigma, cfg.obstruction.max_word_len)?;
            notes.push(format!(
                "degree p = {} (next lower degree p0 = {}, epsilon = {}, from words up to {} letters)",
                choice.p, choice.p0, choice.epsilon, choice.scan_word_len
            ));
            choice.p
        }
    };
    match conjugacy_obstruction(sigma, l, l2, &degree, &cfg.obstruction)? {
        ConjugacyVerdict::Undecided { reason, notes: more, obstruction } => {
            notes.push(format!("obstruction: {reason}"));
            notes.extend(more);
            Ok(ConjugacyVerdict::Undecided {
                reason: "neither a certificate nor an obstruction was found".into(),
                notes,
                obstruction,
            })
        }
        decisive => Ok(decisive),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    fn fib() -> (Substitution, Spectral) {
        let s = Substitution::parse("a -> b, b -> ab").unwrap();
        let spec = Spectral::new(&s.matrix()).unwrap();
        (s, spec)
    }

    #[test]
    fn point_conversion() {
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let l2 = LengthVector::from_ints(&[1, 1]).unwrap();
        let h = Scalar::rational(q(1, 2));
        assert_eq!(convert_point(0, &h, &l, &l2).unwrap(), Scalar::rational(q(1, 4)));
        assert_eq!(convert_point(0, &Scalar::int(0), &l, &l2).unwrap(), Scalar::int(0));
        assert_eq!(convert_point(1, &h, &l, &l).unwrap(), h);
        assert!(convert_point(1, &Scalar::int(1), &l, &l2).is_err());
    }

    #[test]
    fn fibonacci_pairing_certificate() {
        let (s, spec) = fib();
        let x = spec.lambda().clone();
        let l = LengthVector::from_ints(&[1, 1]).unwrap();
        let half = Scalar::rational(q(1, 2));
        let l2 = LengthVector::new(vec![Scalar::int(1) + &(x * &half), half]).unwrap();
        let v = sufficient_certificate(&s, &l, &l2, None, true).unwrap();
        let c = v.certificate().expect("certificate");
        assert_eq!((c.k, c.exact, c.relabelling.as_str()), (0, false, "id"));
        assert!(v.recheck(&s, &l, &l2, None).unwrap());

        let lm = l.times_power(&s.matrix(), 1);
        let c = sufficient_certificate(&s, &l, &lm, None, true).unwrap();
        assert_eq!(c.certificate().map(|c| (c.k, c.exact)), Some((1, true)));
        let back = sufficient_certificate(&s, &lm, &l, None, true).unwrap();
        assert_eq!(back.certificate().map(|c| c.k), Some(-1));
    }

    #[test]
    fn certificates_compose() {
        let (s, _) = fib();
        let l = LengthVector::from_ints(&[2, 3]).unwrap();
        let l1 = l.times_power(&s.matrix(), 1);
        let l2 = l.times_power(&s.matrix(), 3);
        let k = |a: &LengthVector, b: &LengthVector| sufficient_certificate(&s, a, b, None, true).unwrap().certificate().unwrap().k;
        assert_eq!(k(&l, &l1) + k(&l1, &l2), k(&l, &l2));
    }

    #[test]
    fn swap_needs_the_permutation() {
        let s = Substitution::parse("a -> aaaabb, b -> bbbbaa").unwrap();
        let l = LengthVector::from_ints(&[1, 2]).unwrap();
        let l2 = LengthVector::from_ints(&[2, 1]).unwrap();
        let v = sufficient_certificate(&s, &l, &l2, None, true).unwrap();
        assert_eq!(v.certificate().map(|c| (c.k, c.permutation.clone())), Some((0, vec![1, 0])));
        assert!(!sufficient_certificate(&s, &l, &l2, None, false).unwrap().is_decisive());
    }

    #[test]
    fn root_substitution_workflow() {
        let s = Substitution::parse("a -> aabaabbba, b -> bbabbaaab").unwrap();
        let root = Substitution::parse("a -> aab, b -> bba").unwrap();
        assert_eq!(root_power(&s, &root), Some(2));
        let l = LengthVector::from_ints(&[1, 1]).unwrap();
        let l2 = l.times_power(&root.matrix(), 1);
        let plain = sufficient_certificate(&s, &l, &l2, None, true).unwrap();
        assert!(!plain.is_decisive());
        let cfg = ConjugacyConfig { root: Some(root.clone()), ..Default::default() };
        let v = analyze_conjugacy(&s, &l, &l2, &cfg).unwrap();
        let c = v.certificate().expect("certificate through the root");
        assert_eq!((c.k, c.root_power), (1, Some(2)));
        assert!(v.recheck(&s, &l, &l2, Some(&root)).unwrap());
    }
}
