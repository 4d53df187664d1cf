use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::verify::{default_vectors, verify_eigenvalue_candidate, Candidate, VerifyConfig, VerifyReport};
use super::LengthVector;
use crate::algebra::{IntPolynomial, Scalar, Spectral, Q};
use crate::subst::{aperiodicity_check, is_full, recurrence_vectors, Aperiodicity, RecurrenceVector, Substitution};
use crate::{Error, Result};

pub type CandidateReport = VerifyReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthRatio {
    Equal,
    Rational,
    Irrational,
}

/// Closed-form data for a two-letter substitution whose images have a
/// common length `n`: `n_a` and `n_b` count the letter `a` in the images of
/// `a` and `b`, `z = gcd(n, n_a - n_b)` and `N = n + n_b - n_a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantLengthData {
    pub n: usize,
    pub n_a: usize,
    pub n_b: usize,
    pub z: u64,
    pub big_n: i64,
    pub ratio: LengthRatio,
    /// `L_1 / L_2 = N_1 / N_2` when rational.
    pub ratio_value: Option<Scalar>,
    /// The two scalar constraints any eigenvalue `k` satisfies for large `m`.
    pub equations: Vec<String>,
    /// The group bounds on `L_1 sigma_pp / 2 pi`.
    pub group: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallBlock {
    pub factor: IntPolynomial,
    pub multiplicity: usize,
    pub small_roots: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SpectrumCase {
    /// The point spectrum is `{0}`.
    Trivial { reason: String },
    RationalSandwich { data: ConstantLengthData },
    /// Every eigenvalue lies in `2 pi Q / L_1`.
    ContainedIn2piQOverL1,
    /// Every eigenvalue `k` has `k L / 2 pi` in `Q^n + S`, with `S` the span
    /// of the generalized left eigenvectors for eigenvalues of modulus below
    /// one.
    Constrained { small_dimension: usize, small_blocks: Vec<SmallBlock>, tunable_parameters: usize },
    /// Without a full recurrence vector: the eigenvalues lie in a countable
    /// union of spaces of dimension at most `bound`.
    DimensionBound { bound: usize, codimension: usize },
    Unknown { reason: String },
}

impl SpectrumCase {
    pub fn tag(&self) -> &'static str {
        match self {
            SpectrumCase::Trivial { .. } => "trivial",
            SpectrumCase::RationalSandwich { .. } => "rational_sandwich",
            SpectrumCase::ContainedIn2piQOverL1 => "contained_in_2piQ_over_L1",
            SpectrumCase::Constrained { .. } => "constrained",
            SpectrumCase::DimensionBound { .. } => "dimension_bound",
            SpectrumCase::Unknown { .. } => "unknown",
        }
    }
}

/// Which hypotheses of the classification were checked, and how.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub primitive_power: u32,
    pub aperiodicity: Aperiodicity,
    pub full_recurrence_vector: Option<RecurrenceVector>,
    pub all_eigenvalues_large: bool,
    pub small_dimension: usize,
    /// Eigenvalues of modulus at least one, with multiplicity.
    pub d_b: usize,
    pub b_pf: usize,
    pub s_pf: usize,
    pub salem_factor: bool,
    pub constant_length: Option<usize>,
    pub length_ratios_rational: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub prefix_len: usize,
    pub max_word_len: usize,
    pub m_max: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    #[serde(flatten)]
    pub case: SpectrumCase,
    pub results_applied: Vec<String>,
    pub hypotheses: Hypotheses,
    pub constant_length: Option<ConstantLengthData>,
    pub candidates: Vec<CandidateReport>,
    pub never_mixing: String,
    pub notes: Vec<String>,
    pub bounds: SearchBounds,
}

impl SpectrumReport {
    /// Decisive unless the case is unknown or a candidate was inconclusive.
    pub fn is_decisive(&self) -> bool {
        !matches!(self.case, SpectrumCase::Unknown { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOptions {
    pub prefix_len: usize,
    pub max_word_len: usize,
    pub aperiodicity_depth: usize,
    pub verify: VerifyConfig,
    /// Candidates `k / 2 pi` to verify; `None` picks probes from the case.
    pub candidates: Option<Vec<Candidate>>,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            prefix_len: 100_000,
            max_word_len: 40,
            aperiodicity_depth: 20_000,
            verify: VerifyConfig::default(),
            candidates: None,
        }
    }
}

const NEVER_MIXING: &str = "No substitution tiling space of this kind is topologically mixing, whatever the \
tile lengths: along the supertile return times t_m = L M^m v of a recurrence vector v, a cylinder set keeps \
overlapping its translates in measure bounded below. The overlap estimator is an illustration of that bound, \
not a proof.";

/// Constant-length data, or `None` when the preconditions fail (two
/// letters, common image length `n`, `1 <= n_a, n_b <= n - 1`, `n_a != n_b`).
pub fn constant_length_data(sigma: &Substitution, l: &LengthVector) -> Option<ConstantLengthData> {
    if sigma.n() != 2 {
        return None;
    }
    let n = sigma.constant_length()?;
    let count_a = |w: &[u8]| w.iter().filter(|&&c| c == 0).count();
    let n_a = count_a(sigma.image(0));
    let n_b = count_a(sigma.image(1));
    if n_a == 0 || n_b == 0 || n_a >= n || n_b >= n || n_a == n_b {
        return None;
    }
    let diff = n_a as i64 - n_b as i64;
    let z = (n as u64).gcd(&diff.unsigned_abs());
    let big_n = n as i64 + n_b as i64 - n_a as i64;
    let r = l.get(0).clone() / l.get(1);
    let (ratio, ratio_value) = match r.as_rational() {
        Some(q) if q.is_one() => (LengthRatio::Equal, Some(r)),
        Some(_) => (LengthRatio::Rational, Some(r)),
        None => (LengthRatio::Irrational, None),
    };
    let nma = n - n_a;
    let equations = vec![
        format!("k (L1 - L2) ({diff})^m = 2 pi (n t_m - t_(m+1)) / {nma}  with n = {n}"),
        format!("k ({n_b} L1 + {nma} L2) {n}^m = 2 pi ({} t_m + t_(m+1))", n_b as i64 - n_a as i64),
    ];
    let group = match ratio {
        LengthRatio::Equal => format!(
            "{big_n} L1 k / 2 pi lies in Z[1/{n}] for every eigenvalue k, and every k with L1 k / 2 pi in Z[1/{n}] is an eigenvalue"
        ),
        LengthRatio::Rational => format!(
            "an integer multiple of L1 k / 2 pi lies in Z[1/{z}] for every eigenvalue k, and L1 sigma_pp / 2 pi contains a rational multiple of Z[1/{z}]"
        ),
        LengthRatio::Irrational => "only k = 0: the two constraints force (L1 - L2)/(n_b L1 + (n - n_a) L2) to be rational".into(),
    };
    Some(ConstantLengthData { n, n_a, n_b, z, big_n, ratio, ratio_value, equations, group })
}

/// Rational gcd of nonzero rationals: the largest `g` with every `x_i / g`
/// an integer.
fn gcd_q(xs: &[Q]) -> Q {
    let den = xs.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let num = xs.iter().fold(BigInt::zero(), |g, x| g.gcd(&(x.numer() * (&den / x.denom()))));
    Q::new(num, den)
}

/// `g` with every tile length an integer multiple of `g`, when the length
/// ratios are rational: `L = g * (integers)` with the integers coprime.
fn length_unit(l: &LengthVector) -> Option<Scalar> {
    let l1 = l.get(0);
    let ratios: Option<Vec<Q>> = l.entries().iter().map(|x| (x.clone() / l1).as_rational()).collect();
    Some(l1.clone() * &Scalar::rational(gcd_q(&ratios?)))
}

fn probe(g: &Scalar, div: i64) -> Candidate {
    Candidate::Exact(Scalar::one() / &(g.clone() * &Scalar::int(div)))
}

fn default_candidates(case: &SpectrumCase, l: &LengthVector, data: Option<&ConstantLengthData>) -> Vec<Candidate> {
    let l1 = l.get(0).clone();
    let mut out = Vec::new();
    match case {
        SpectrumCase::RationalSandwich { data } if data.ratio == LengthRatio::Equal => {
            out.push(probe(&l1, 1));
            out.push(probe(&l1, data.n as i64));
            if data.big_n.abs() > 1 {
                out.push(probe(&l1, data.big_n.abs()));
            }
        }
        SpectrumCase::RationalSandwich { .. } | SpectrumCase::ContainedIn2piQOverL1 => {
            let g = length_unit(l).expect("rational ratios");
            out.extend([probe(&g, 1), probe(&g, 2), probe(&g, 3)]);
        }
        SpectrumCase::Trivial { .. } => {
            out.push(probe(&l1, 1));
            out.push(Candidate::Exact(Scalar::one()));
            out.push(Candidate::Exact(Scalar::rational(Q::new(1.into(), 2.into()))));
            if data.is_some() {
                out.push(probe(l.get(1), 1));
            }
        }
        SpectrumCase::Constrained { .. } | SpectrumCase::DimensionBound { .. } | SpectrumCase::Unknown { .. } => {
            out.push(Candidate::Exact(Scalar::one()));
            out.push(probe(&l1, 1));
        }
    }
    let mut dedup: Vec<Candidate> = Vec::new();
    for c in out {
        if !dedup.contains(&c) {
            dedup.push(c);
        }
    }
    dedup
}

struct Context {
    spec: Spectral,
    hyp: Hypotheses,
}

fn context(sigma: &Substitution, l: &LengthVector, opts: &SpectrumOptions) -> Result<Context> {
    if l.n() != sigma.n() {
        return Err(Error::Invalid(format!("{} tile lengths for {} letters", l.n(), sigma.n())));
    }
    let primitive_power = sigma.require_primitive()?;
    let spec = Spectral::new(&sigma.matrix())?;
    let aperiodicity = aperiodicity_check(sigma, opts.aperiodicity_depth)?;
    let m = sigma.matrix();
    let full_recurrence_vector = recurrence_vectors(sigma, opts.prefix_len, opts.max_word_len)?
        .into_iter()
        .find(|r| is_full(&r.vector, &m));
    let hyp = Hypotheses {
        primitive_power,
        aperiodicity,
        full_recurrence_vector,
        all_eigenvalues_large: spec.all_eigenvalues_large(),
        small_dimension: spec.small_dimension(),
        d_b: spec.d_b(),
        b_pf: spec.blocks.b_pf,
        s_pf: spec.blocks.s_pf,
        salem_factor: spec.has_salem_factor(),
        constant_length: sigma.constant_length(),
        length_ratios_rational: l.ratios_rational(),
    };
    Ok(Context { spec, hyp })
}

fn general_case(ctx: &Context) -> (SpectrumCase, Vec<String>, Vec<String>) {
    let hyp = &ctx.hyp;
    let mut notes = Vec::new();
    if hyp.salem_factor {
        notes.push("an irreducible factor has roots on the unit circle together with roots off it (Salem type); they are grouped with the large eigenvalues".into());
    }
    if !hyp.aperiodicity.is_aperiodic() {
        return (
            SpectrumCase::Unknown { reason: "no evidence that the subshift is aperiodic".into() },
            vec![],
            notes,
        );
    }
    if hyp.full_recurrence_vector.is_none() {
        return (
            SpectrumCase::DimensionBound { bound: hyp.s_pf + 1, codimension: hyp.b_pf.saturating_sub(1) },
            vec!["dimension bound from the Perron block: eigenvalue sets lie in a countable union of spaces of dimension s_PF + 1, each of codimension b_PF - 1".into()],
            notes,
        );
    }
    if hyp.all_eigenvalues_large {
        let applied = vec!["all eigenvalues of modulus >= 1 with a full recurrence vector: the traces t_m must be eventually integral".into()];
        if hyp.length_ratios_rational {
            (SpectrumCase::ContainedIn2piQOverL1, applied, notes)
        } else {
            (
                SpectrumCase::Trivial { reason: "some length ratio L_i / L_j is irrational while every eigenvalue of M has modulus >= 1".into() },
                applied,
                notes,
            )
        }
    } else {
        let small_blocks = ctx
            .spec
            .blocks
            .blocks
            .iter()
            .filter(|b| b.class.small > 0)
            .map(|b| SmallBlock { factor: b.factor.clone(), multiplicity: b.multiplicity, small_roots: b.class.small })
            .collect();
        let tunable = hyp.d_b.saturating_sub(1);
        notes.push(format!(
            "the lengths can be tuned along {tunable} parameters (d_b - 1 with d_b = {}) so that the spectrum grows; this describes a countable union of subspaces, not enumerated here",
            hyp.d_b
        ));
        (
            SpectrumCase::Constrained { small_dimension: hyp.small_dimension, small_blocks, tunable_parameters: tunable },
            vec!["small eigenvalues present with a full recurrence vector: k L / 2 pi is a rational vector plus an element of the small-eigenvalue subspace".into()],
            notes,
        )
    }
}

fn finish(
    sigma: &Substitution,
    l: &LengthVector,
    opts: &SpectrumOptions,
    ctx: Context,
    (case, results_applied, notes): (SpectrumCase, Vec<String>, Vec<String>),
    constant_length: Option<ConstantLengthData>,
) -> Result<SpectrumReport> {
    let candidates = match &opts.candidates {
        Some(c) => c.clone(),
        None => default_candidates(&case, l, constant_length.as_ref()),
    };
    let mut reports = Vec::new();
    if !candidates.is_empty() {
        let vectors = default_vectors(sigma, opts.prefix_len, opts.max_word_len)?;
        for c in &candidates {
            reports.push(verify_eigenvalue_candidate(c, l, sigma, &vectors, &opts.verify)?);
        }
    }
    Ok(SpectrumReport {
        case,
        results_applied,
        hypotheses: ctx.hyp,
        constant_length,
        candidates: reports,
        never_mixing: NEVER_MIXING.into(),
        notes,
        bounds: SearchBounds { prefix_len: opts.prefix_len, max_word_len: opts.max_word_len, m_max: opts.verify.m_max },
    })
}

/// The classification decision tree; two-letter constant-length rules go
/// to the closed form.
pub fn classify_spectrum(sigma: &Substitution, l: &LengthVector, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    if constant_length_data(sigma, l).is_some() {
        return constant_length_spectrum(sigma, l, opts);
    }
    classify_spectrum_general(sigma, l, opts)
}

/// The decision tree without the constant-length shortcut.
pub fn classify_spectrum_general(sigma: &Substitution, l: &LengthVector, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let ctx = context(sigma, l, opts)?;
    let verdict = general_case(&ctx);
    finish(sigma, l, opts, ctx, verdict, None)
}

/// Closed form for two letters with images of a common length; falls back
/// to the general tree (with a note) when the preconditions fail.
pub fn constant_length_spectrum(sigma: &Substitution, l: &LengthVector, opts: &SpectrumOptions) -> Result<SpectrumReport> {
    let Some(data) = constant_length_data(sigma, l) else {
        let mut r = classify_spectrum_general(sigma, l, opts)?;
        r.notes.push("constant-length preconditions fail (two letters, common length n, 1 <= n_a, n_b <= n - 1, n_a != n_b); general classification used".into());
        return Ok(r);
    };
    let ctx = context(sigma, l, opts)?;
    let applied = vec!["two-letter constant-length closed form: the eigenvalue constraints reduce to two scalar equations in t_m".into()];
    let case = match data.ratio {
        LengthRatio::Irrational => SpectrumCase::Trivial { reason: "L1 / L2 is irrational for a two-letter constant-length rule".into() },
        _ => SpectrumCase::RationalSandwich { data: data.clone() },
    };
    finish(sigma, l, opts, ctx, (case, applied, vec![]), Some(data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::NumberField;

    fn quick() -> SpectrumOptions {
        SpectrumOptions { prefix_len: 5000, max_word_len: 20, aperiodicity_depth: 4000, ..Default::default() }
    }

    #[test]
    fn dk_constant_length() {
        let s = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let d = constant_length_data(&s, &l).unwrap();
        assert_eq!((d.n, d.n_a, d.n_b, d.z, d.big_n), (4, 2, 1, 1, 3));
        assert_eq!(d.ratio, LengthRatio::Rational);
        let r = classify_spectrum(&s, &l, &quick()).unwrap();
        assert_eq!(r.case.tag(), "rational_sandwich");
        assert!(r.candidates[0].verdict.is_consistent());
        assert!(r.candidates[1..].iter().all(|c| c.verdict.is_refuted()));
    }

    #[test]
    fn dk_irrational_is_trivial() {
        let s = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let r2 = NumberField::sqrt(2).unwrap();
        let l = LengthVector::new(vec![r2.generator(), Scalar::int(1)]).unwrap();
        let r = classify_spectrum(&s, &l, &quick()).unwrap();
        assert_eq!(r.case.tag(), "trivial");
        assert!(r.candidates.iter().all(|c| c.verdict.is_refuted()), "{:?}", r.candidates);
    }

    #[test]
    fn general_cases() {
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        let r = classify_spectrum(&fib, &LengthVector::from_ints(&[1, 1]).unwrap(), &quick()).unwrap();
        match &r.case {
            SpectrumCase::Constrained { small_dimension, .. } => assert_eq!(*small_dimension, 1),
            other => panic!("{other:?}"),
        }
        assert_eq!((r.hypotheses.s_pf, r.hypotheses.b_pf), (1, 1));
        let s = Substitution::parse("a -> aaaabb, b -> babbba").unwrap();
        let r = classify_spectrum_general(&s, &LengthVector::from_ints(&[1, 1]).unwrap(), &quick()).unwrap();
        assert_eq!(r.case, SpectrumCase::ContainedIn2piQOverL1);
        assert!(r.hypotheses.full_recurrence_vector.is_some());
    }

    #[test]
    fn rational_gcd() {
        let g = gcd_q(&[Q::new(2.into(), 3.into()), Q::new(1.into(), 2.into())]);
        assert_eq!(g, Q::new(1.into(), 6.into()));
    }
}
