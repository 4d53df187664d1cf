use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::LengthVector;
use crate::algebra::field::f64_to_q;
use crate::algebra::{IntMatrix, Scalar};
use crate::subst::{recurrence_vectors, PopulationVector, Substitution};
use crate::{Error, Result};

/// A candidate eigenvalue, given as `k / 2 pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Candidate {
    Exact(Scalar),
    /// Converted to the exact dyadic rational it denotes before use.
    Float(f64),
}

impl Candidate {
    pub fn exact(&self) -> Result<Scalar> {
        match self {
            Candidate::Exact(s) => Ok(s.clone()),
            Candidate::Float(x) => f64_to_q(*x)
                .map(Scalar::rational)
                .ok_or_else(|| Error::Invalid(format!("candidate {x} is not a finite number"))),
        }
    }
}

impl From<Scalar> for Candidate {
    fn from(s: Scalar) -> Self {
        Candidate::Exact(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub m_max: u32,
    /// A tail point counts against the candidate above this distance.
    pub threshold: f64,
    /// Tail points above the threshold needed for a refutation.
    pub hits: usize,
    /// Width of the tail window `[m_max - tail, m_max]`.
    pub tail: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { m_max: 40, threshold: 0.1, hits: 3, tail: 5 }
    }
}

pub const M_MAX_CAP: u32 = 64;

/// Distances below this are indistinguishable from zero in the float
/// readout of an exact value.
const FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Every trace tends to an integer: exactly integral on the tail, or a
    /// geometric decay with fitted ratio `rho < 1`.
    Consistent { rho: f64, exact_integer_tail: bool },
    Refuted { m: u32, vector: PopulationVector },
    /// `k = 0` lies in every point spectrum.
    Degenerate,
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }
}

/// The distance of `t_m = kappa L M^m v` to the nearest integer for
/// `m = 0..=m_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub vector: PopulationVector,
    pub dist: Vec<f64>,
    /// Indices `m` at which `t_m` is exactly an integer.
    pub exact_integer: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub k_over_2pi: Scalar,
    pub verdict: Verdict,
    pub vectors_checked: usize,
    pub m_max: u32,
    /// The deciding trace: the refuting one, or the slowest decaying one.
    pub trace: Option<TraceSummary>,
}

/// Recurrence vectors from a prefix scan together with their first `n`
/// images under `M`, deduplicated.
pub fn default_vectors(sigma: &Substitution, prefix_len: usize, max_word_len: usize) -> Result<Vec<PopulationVector>> {
    let m = sigma.matrix();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for r in recurrence_vectors(sigma, prefix_len, max_word_len)? {
        let mut v = r.vector;
        for _ in 0..sigma.n() {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
            v = v.mapped(&m);
        }
    }
    Ok(out)
}

fn trace(kappa: &Scalar, l: &LengthVector, m: &IntMatrix, v: &PopulationVector, m_max: u32) -> Result<TraceSummary> {
    let mut w: Vec<BigInt> = v.to_bigint();
    let mut dist = Vec::with_capacity(m_max as usize + 1);
    let mut exact_integer = Vec::new();
    for step in 0..=m_max {
        let t = kappa.clone() * &l.pair_int(&w);
        if t.is_integer() {
            dist.push(0.0);
            exact_integer.push(step);
        } else {
            dist.push(t.dist_to_integer()?);
        }
        w = m.apply(&w);
    }
    Ok(TraceSummary { vector: v.clone(), dist, exact_integer })
}

/// Least-squares slope of `ln d` against `m`, with the largest deviation of
/// a point from the fitted line (in log units).
fn geometric_fit(points: &[(u32, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let dev = xs.iter().zip(&ys).map(|(x, y)| (y - (my + slope * (x - mx))).abs()).fold(0.0, f64::max);
    (slope.exp(), dev)
}

enum TraceVerdict {
    Refuted(u32),
    Exact,
    Geometric(f64),
    Decayed,
    Unclear(String),
}

fn judge(t: &TraceSummary, cfg: &VerifyConfig) -> TraceVerdict {
    let m_max = cfg.m_max;
    let lo = m_max.saturating_sub(cfg.tail);
    let tail: Vec<(u32, f64)> = (lo..=m_max).map(|m| (m, t.dist[m as usize])).collect();
    let over: Vec<u32> = tail.iter().filter(|p| p.1 > cfg.threshold).map(|p| p.0).collect();
    if over.len() >= cfg.hits {
        return TraceVerdict::Refuted(over[0]);
    }
    if (lo..=m_max).all(|m| t.exact_integer.contains(&m)) {
        return TraceVerdict::Exact;
    }
    if tail.iter().all(|p| p.1 <= FLOOR) {
        return TraceVerdict::Decayed;
    }
    // Fit on the second half of the trace, above the float floor.
    let window: Vec<(u32, f64)> = (m_max / 2..=m_max)
        .map(|m| (m, t.dist[m as usize]))
        .filter(|p| p.1 > FLOOR)
        .collect();
    if window.len() < 3 {
        return TraceVerdict::Unclear("too few nonzero tail distances to fit a decay".into());
    }
    let (rho, dev) = geometric_fit(&window);
    if rho < 1.0 && dev <= std::f64::consts::LN_2 {
        TraceVerdict::Geometric(rho)
    } else {
        TraceVerdict::Unclear(format!("tail distances do not fit a geometric decay (ratio {rho:.3})"))
    }
}

/// Tests whether `k` (given as `k / 2 pi`) can be an eigenvalue for the
/// lengths `L`: for every recurrence vector `v`, `t_m = k L M^m v / 2 pi`
/// must tend to an integer. A trace staying away from the integers on the
/// tail refutes; integral or geometrically decaying tails are consistent
/// (evidence only, since both `v` and `m` are bounded).
pub fn verify_eigenvalue_candidate(
    k_over_2pi: &Candidate,
    l: &LengthVector,
    sigma: &Substitution,
    vectors: &[PopulationVector],
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    if cfg.m_max > M_MAX_CAP {
        return Err(Error::Invalid(format!("m_max {} exceeds the cap of {M_MAX_CAP}", cfg.m_max)));
    }
    if cfg.tail > cfg.m_max {
        return Err(Error::Invalid("tail window longer than the trace".into()));
    }
    let kappa = k_over_2pi.exact()?;
    if kappa.is_zero() {
        return Ok(VerifyReport {
            k_over_2pi: kappa,
            verdict: Verdict::Degenerate,
            vectors_checked: 0,
            m_max: cfg.m_max,
            trace: None,
        });
    }
    if let Some(f) = l.field() {
        if kappa.field().is_some_and(|g| !g.same_as(f)) {
            return Err(Error::Invalid("candidate and lengths live in different number fields".into()));
        }
    }
    if vectors.is_empty() {
        return Err(Error::Precondition("no recurrence vectors to test against".into()));
    }
    let m = sigma.matrix();
    let mut rho: f64 = 0.0;
    let mut all_exact = true;
    let mut slowest: Option<(f64, TraceSummary)> = None;
    for v in vectors {
        let t = trace(&kappa, l, &m, v, cfg.m_max)?;
        match judge(&t, cfg) {
            TraceVerdict::Refuted(at) => {
                return Ok(VerifyReport {
                    k_over_2pi: kappa,
                    verdict: Verdict::Refuted { m: at, vector: v.clone() },
                    vectors_checked: vectors.len(),
                    m_max: cfg.m_max,
                    trace: Some(t),
                })
            }
            TraceVerdict::Exact => {}
            TraceVerdict::Decayed => all_exact = false,
            TraceVerdict::Geometric(r) => {
                all_exact = false;
                rho = rho.max(r);
                if slowest.as_ref().is_none_or(|(s, _)| r > *s) {
                    slowest = Some((r, t.clone()));
                }
            }
            TraceVerdict::Unclear(reason) => {
                return Ok(VerifyReport {
                    k_over_2pi: kappa,
                    verdict: Verdict::Inconclusive { reason },
                    vectors_checked: vectors.len(),
                    m_max: cfg.m_max,
                    trace: Some(t),
                })
            }
        }
        if slowest.is_none() && all_exact {
            slowest = Some((0.0, t));
        }
    }
    Ok(VerifyReport {
        k_over_2pi: kappa,
        verdict: Verdict::Consistent { rho, exact_integer_tail: all_exact },
        vectors_checked: vectors.len(),
        m_max: cfg.m_max,
        trace: slowest.map(|s| s.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    fn dk() -> (Substitution, LengthVector, Vec<PopulationVector>) {
        let s = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let v = default_vectors(&s, 5000, 20).unwrap();
        (s, LengthVector::from_ints(&[2, 1]).unwrap(), v)
    }

    #[test]
    fn dk_candidates() {
        let (s, l, v) = dk();
        let cfg = VerifyConfig::default();
        let r = verify_eigenvalue_candidate(&Candidate::Exact(Scalar::int(1)), &l, &s, &v, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Consistent { rho: 0.0, exact_integer_tail: true });
        for k in [q(1, 2), q(1, 3)] {
            let r = verify_eigenvalue_candidate(&Candidate::Exact(Scalar::rational(k)), &l, &s, &v, &cfg).unwrap();
            assert!(r.verdict.is_refuted(), "{:?}", r.verdict);
        }
        let r = verify_eigenvalue_candidate(&Candidate::Float(0.0), &l, &s, &v, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Degenerate);
    }

    #[test]
    fn fibonacci_decay_fits() {
        // kappa = 1 with L = (1, tau): L M^m v = tau^m (L v), whose distance to
        // the integers decays like |1 - tau|^m.
        let s = Substitution::parse("a -> b, b -> ab").unwrap();
        let spec = crate::algebra::Spectral::new(&s.matrix()).unwrap();
        let l = LengthVector::perron(&spec);
        let v = default_vectors(&s, 3000, 12).unwrap();
        let r = verify_eigenvalue_candidate(&Candidate::Exact(Scalar::int(1)), &l, &s, &v, &VerifyConfig::default()).unwrap();
        match r.verdict {
            Verdict::Consistent { rho, exact_integer_tail } => {
                assert!(!exact_integer_tail);
                assert!((rho - 0.618).abs() < 0.05, "rho = {rho}");
            }
            other => panic!("{other:?}"),
        }
    }
}
