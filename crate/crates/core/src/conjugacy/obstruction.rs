use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::repetition::{repetition_families, repetition_vectors};
use super::{lengths_fit, perron_power, ConjugacyVerdict};
use crate::algebra::eigenspace::{all_roots_small, berlekamp_massey, recurrence_holds};
use crate::algebra::{Field, LargeComponent, Scalar, Spectral};
use crate::spectrum::LengthVector;
use crate::subst::{PopulationVector, Substitution};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionOptions {
    pub max_word_len: usize,
    /// Relative tolerance of the finite trace.
    pub delta: f64,
    pub m_max: u32,
}

impl Default for ObstructionOptions {
    fn default() -> Self {
        ObstructionOptions { max_word_len: 300, delta: 1e-6, m_max: 30 }
    }
}

/// How the supertile lengths `L M^m v_i` compare with `L' M^m' v_j` for
/// large `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum PairOutcome {
    /// The dominant terms grow at ratios that are never a power of the
    /// Perron eigenvalue, so the difference is unbounded along every shift.
    PerronMismatch { ratio_approx: f64 },
    /// The dominant terms agree for `m' = m - shift`; `difference` says
    /// whether what remains tends to zero (a match) or not (a mismatch).
    Shift { shift: i64, difference: LargeComponent },
    Undecided { reason: String },
}

impl PairOutcome {
    pub fn is_mismatch(&self) -> bool {
        match self {
            PairOutcome::PerronMismatch { .. } => true,
            PairOutcome::Shift { difference, .. } => matches!(difference, LargeComponent::Nonzero { .. }),
            PairOutcome::Undecided { .. } => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairCheck {
    pub i: usize,
    pub j: usize,
    pub outcome: PairOutcome,
}

/// Closest match to `L M^m v_i` among `L' M^m' v_j`, relative to the
/// former.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub m: u32,
    pub j: usize,
    pub m_prime: u32,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorTrace {
    pub generator: PopulationVector,
    pub points: Vec<TracePoint>,
    /// Indices `m` with no match within `delta`.
    pub unmatched: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub degree: Scalar,
    pub delta: f64,
    pub m_max: u32,
    pub max_word_len: usize,
    /// Family generators at this degree, ordered by natural length. Found
    /// within the word-length budget, so not a proof of completeness.
    pub generators: Vec<PopulationVector>,
    pub pairs: Vec<PairCheck>,
    pub traces: Vec<GeneratorTrace>,
    pub notes: Vec<String>,
}

/// Compares `t_m = L M^m v` with `t'_m' = L' M^m' u` for all large `m`.
pub fn compare_pair(
    spec: &Spectral,
    l: &LengthVector,
    l2: &LengthVector,
    v: &PopulationVector,
    u: &PopulationVector,
) -> Result<PairOutcome> {
    let left = &spec.perron.left;
    let dot = |p: &PopulationVector| {
        left.iter().zip(&p.0).fold(Scalar::zero(), |s, (a, &c)| s + &(a.clone() * &Scalar::int(c as i64)))
    };
    // Asymptotically L M^m v ~ lambda^m (L.w)(l0.v) / (l0.w).
    let a = spec.perron_pairing(l.entries()) * &dot(v);
    let b = spec.perron_pairing(l2.entries()) * &dot(u);
    let ratio = b / &a;
    let Some(k) = perron_power(spec, &ratio) else {
        return Ok(PairOutcome::PerronMismatch { ratio_approx: ratio.approx() });
    };
    // d_t = L M^(t + max(k,0)) v - L' M^(t + max(-k,0)) u is a linear
    // recurrence of order at most n; its minimal polynomial decides whether
    // it tends to zero.
    let m = spec.matrix.clone();
    let n = spec.n();
    let terms = 2 * n + 4;
    let (mut x, mut y): (Vec<BigInt>, Vec<BigInt>) = (v.to_bigint(), u.to_bigint());
    for _ in 0..k.max(0) {
        x = m.apply(&x);
    }
    for _ in 0..(-k).max(0) {
        y = m.apply(&y);
    }
    let mut d = Vec::with_capacity(terms);
    for _ in 0..terms {
        d.push(l.pair_int(&x) - &l2.pair_int(&y));
        x = m.apply(&x);
        y = m.apply(&y);
    }
    let mu = berlekamp_massey(&d);
    if mu.deg() > n || !recurrence_holds(&mu, &d) {
        return Ok(PairOutcome::Undecided { reason: "difference sequence has no recurrence of order n".into() });
    }
    let difference = if d.iter().all(|t| t.is_zero()) { LargeComponent::Zero } else { all_roots_small(&mu, spec)? };
    Ok(PairOutcome::Shift { shift: k, difference })
}

fn supertile_lengths(l: &LengthVector, spec: &Spectral, v: &PopulationVector, count: u32) -> Vec<f64> {
    let mut x = v.to_bigint();
    let mut out = Vec::with_capacity(count as usize + 1);
    for _ in 0..=count {
        out.push(l.pair_int(&x).approx());
        x = spec.matrix.apply(&x);
    }
    out
}

/// Looks for a family of repetition vectors whose asymptotic lengths under
/// `L` are matched by no family under `L'`. Such a family rules out any
/// conjugacy between the two tiling spaces.
pub fn conjugacy_obstruction(
    sigma: &Substitution,
    l: &LengthVector,
    l2: &LengthVector,
    p: &Scalar,
    opts: &ObstructionOptions,
) -> Result<ConjugacyVerdict> {
    let undecided = |reason: String, report: Option<ObstructionReport>| ConjugacyVerdict::Undecided {
        reason,
        notes: Vec::new(),
        obstruction: report.map(Box::new),
    };
    sigma.require_primitive()?;
    let spec = Spectral::new(&sigma.matrix())?;
    if let Err(why) = lengths_fit(&spec, l, l2) {
        return Ok(undecided(why, None));
    }
    let l0 = LengthVector::perron(&spec);
    let mut gens: Vec<Vec<PopulationVector>> = Vec::new();
    for metric in [&l0, l, l2] {
        let vecs = repetition_vectors(sigma, metric, p, opts.max_word_len)?;
        let fams = repetition_families(&vecs, &sigma.matrix())?;
        gens.push(fams.into_iter().map(|f| f.generator).collect());
    }
    let mut report = ObstructionReport {
        degree: p.clone(),
        delta: opts.delta,
        m_max: opts.m_max,
        max_word_len: opts.max_word_len,
        generators: gens[0].clone(),
        pairs: Vec::new(),
        traces: Vec::new(),
        notes: Vec::new(),
    };
    let sets: Vec<BTreeSet<&PopulationVector>> = gens.iter().map(|g| g.iter().collect()).collect();
    if sets[0] != sets[1] || sets[0] != sets[2] {
        let show = |g: &[PopulationVector]| g.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        report.notes.push(format!(
            "generators natural [{}], first lengths [{}], second lengths [{}]",
            show(&gens[0]),
            show(&gens[1]),
            show(&gens[2])
        ));
        return Ok(undecided(format!("repetition families of degree {p} differ between the three metrics"), Some(report)));
    }
    if report.generators.is_empty() {
        return Ok(undecided(format!("no repetition vectors of degree {p} within {} letters", opts.max_word_len), Some(report)));
    }
    let g = report.generators.clone();
    let mut witness = None;
    for (i, vi) in g.iter().enumerate() {
        let mut all_mismatch = true;
        for (j, vj) in g.iter().enumerate() {
            let outcome = compare_pair(&spec, l, l2, vi, vj)?;
            all_mismatch &= outcome.is_mismatch();
            report.pairs.push(PairCheck { i, j, outcome });
        }
        if all_mismatch && witness.is_none() {
            witness = Some(i);
        }
    }
    // Finite trace, for the record.
    let extra = opts.m_max + 8;
    let theirs: Vec<Vec<f64>> = g.iter().map(|u| supertile_lengths(l2, &spec, u, extra)).collect();
    for vi in &g {
        let ours = supertile_lengths(l, &spec, vi, opts.m_max);
        let mut points = Vec::new();
        let mut unmatched = Vec::new();
        for (m, &t) in ours.iter().enumerate() {
            let mut best = TracePoint { m: m as u32, j: 0, m_prime: 0, relative_gap: f64::INFINITY };
            for (j, row) in theirs.iter().enumerate() {
                for (mp, &s) in row.iter().enumerate() {
                    let gap = (t - s).abs() / t;
                    if gap < best.relative_gap {
                        best = TracePoint { m: m as u32, j, m_prime: mp as u32, relative_gap: gap };
                    }
                }
            }
            if best.relative_gap >= opts.delta {
                unmatched.push(m as u32);
            }
            points.push(best);
        }
        report.traces.push(GeneratorTrace { generator: vi.clone(), points, unmatched });
    }
    match witness {
        Some(i) => Ok(ConjugacyVerdict::Obstructed { generator: g[i].clone(), report: Box::new(report) }),
        None => {
            let open = report.pairs.iter().any(|c| matches!(c.outcome, PairOutcome::Undecided { .. }));
            let reason = if open {
                "some length comparisons could not be decided exactly".to_string()
            } else {
                format!("every family of degree {p} has an asymptotic match")
            };
            Ok(undecided(reason, Some(report)))
        }
    }
}

/// Re-derives an obstruction: the generator mismatches every generator.
pub fn recheck_obstruction(
    sigma: &Substitution,
    l: &LengthVector,
    l2: &LengthVector,
    generator: &PopulationVector,
    report: &ObstructionReport,
) -> Result<bool> {
    let spec = Spectral::new(&sigma.matrix())?;
    for u in &report.generators {
        if !compare_pair(&spec, l, l2, generator, u)?.is_mismatch() {
            return Ok(false);
        }
    }
    Ok(report.generators.contains(generator))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn babbba() -> Substitution {
        Substitution::parse("a -> aaaabb, b -> babbba").unwrap()
    }

    #[test]
    fn babbba_unequal_lengths_obstructed() {
        let s = babbba();
        let l = LengthVector::from_ints(&[1, 1]).unwrap();
        let l2 = LengthVector::from_ints(&[1, 2]).unwrap();
        let v = conjugacy_obstruction(&s, &l, &l2, &Scalar::int(5), &ObstructionOptions::default()).unwrap();
        match &v {
            ConjugacyVerdict::Obstructed { generator, report } => {
                assert_eq!(generator.0, vec![1, 0]);
                assert!(recheck_obstruction(&s, &l, &l2, generator, report).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn never_obstructs_matrix_images() {
        let s = babbba();
        let l = LengthVector::from_ints(&[1, 1]).unwrap();
        for k in 0..3 {
            let l2 = l.times_power(&s.matrix(), k);
            let v = conjugacy_obstruction(&s, &l, &l2, &Scalar::int(5), &ObstructionOptions::default()).unwrap();
            assert!(matches!(v, ConjugacyVerdict::Undecided { .. }), "k = {k}: {v:?}");
        }
    }
}
