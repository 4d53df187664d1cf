use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::algebra::{Field, IntMatrix, Scalar, Spectral};
use crate::spectrum::LengthVector;
use crate::subst::{cover_texts, population_vector, FixedPoint, PopulationVector, Substitution};
use crate::{Error, Result};

/// A population vector `v` of a word `w` that sits inside a longer
/// admissible word `w'` with letter period `|w|`. The degree is
/// `L(w') / L(w)`: how many times `w` is repeated, measured in the metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionVector {
    pub vector: PopulationVector,
    pub word: String,
    pub containing: String,
    pub degree: Scalar,
    pub metric: LengthVector,
}

impl RepetitionVector {
    /// Recomputes the degree from the two words, checking periodicity.
    pub fn recompute_degree(&self, sigma: &Substitution) -> Result<Scalar> {
        let w = sigma.word(&self.word)?;
        let big = sigma.word(&self.containing)?;
        let p = w.len();
        if p == 0 || big.len() < p || big[..p] != w[..] || (p..big.len()).any(|i| big[i] != big[i - p]) {
            return Err(Error::Invalid(format!("{} is not {}-periodic from {}", self.containing, p, self.word)));
        }
        Ok(self.metric.word_length(&big) / &self.metric.word_length(&w))
    }
}

fn is_primitive_word(w: &[u8]) -> bool {
    let p = w.len();
    (1..p).filter(|d| p % d == 0).all(|d| (d..p).any(|i| w[i] != w[i - d]))
}

/// All repetition vectors of degree at least `min_degree` witnessed by
/// maximal periodic admissible words of at most `max_word_len` letters,
/// one entry per vector carrying its largest witnessed degree. Period words
/// that are proper powers are skipped (their runs are found with the root).
pub fn repetition_vectors(
    sigma: &Substitution,
    l: &LengthVector,
    min_degree: &Scalar,
    max_word_len: usize,
) -> Result<Vec<RepetitionVector>> {
    sigma.require_primitive()?;
    if l.n() != sigma.n() {
        return Err(Error::Invalid("length vector and alphabet differ in size".into()));
    }
    let n = sigma.n();
    // Any word of length max_word_len + 2 (a run with both blocking
    // letters) occurs strictly inside one of these texts.
    let texts = cover_texts(sigma, max_word_len + 2)?;
    let lens = l.approx();
    let min_f = min_degree.approx();
    let mut seen: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
    let mut best: BTreeMap<PopulationVector, RepetitionVector> = BTreeMap::new();
    for text in &texts {
        let mut pre = Vec::with_capacity(text.len() + 1);
        pre.push(0.0f64);
        for &a in text {
            pre.push(pre.last().unwrap() + lens[a as usize]);
        }
        for p in 1..max_word_len {
            let mut i = 0;
            while i + p < text.len() {
                if text[i] != text[i + p] {
                    i += 1;
                    continue;
                }
                let s = i;
                while i + p < text.len() && text[i] == text[i + p] {
                    i += 1;
                }
                let e = i + p;
                if s == 0 || e >= text.len() || e - s > max_word_len {
                    continue;
                }
                let approx = (pre[e] - pre[s]) / (pre[s + p] - pre[s]);
                if approx < min_f - 1e-6 {
                    continue;
                }
                let run = &text[s..e];
                if !seen.insert((p, run.to_vec())) || !is_primitive_word(&run[..p]) {
                    continue;
                }
                let degree = l.word_length(run) / &l.word_length(&run[..p]);
                if degree.cmp_exact(min_degree)? == Ordering::Less {
                    continue;
                }
                let v = population_vector(&run[..p], n);
                let better = match best.get(&v) {
                    None => true,
                    Some(old) => degree.cmp_exact(&old.degree)? == Ordering::Greater,
                };
                if better {
                    best.insert(
                        v.clone(),
                        RepetitionVector {
                            vector: v,
                            word: sigma.show(&run[..p]),
                            containing: sigma.show(run),
                            degree,
                            metric: l.clone(),
                        },
                    );
                }
            }
        }
    }
    let mut out: Vec<RepetitionVector> = best.into_values().collect();
    out.sort_by(|a, b| (a.vector.total(), &a.vector).cmp(&(b.vector.total(), &b.vector)));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    /// The member is `M^k` applied to the generator.
    pub k: u32,
    pub vector: PopulationVector,
    pub degree: Scalar,
}

/// Repetition vectors related by powers of the substitution matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionFamily {
    pub generator: PopulationVector,
    pub members: Vec<FamilyMember>,
    /// Degree of the longest member found, as an estimate of the limit
    /// along the family.
    pub limit_degree: Scalar,
    /// Natural length `L_0 v` of the generator, approximately.
    pub natural_length: f64,
}

/// Partitions repetition vectors into families `v, Mv, M^2 v, ...`. A vector
/// is a generator when no found vector maps onto it, so generators are the
/// shortest members within the found set. Families are ordered by the
/// natural length of their generators.
pub fn repetition_families(vectors: &[RepetitionVector], m: &IntMatrix) -> Result<Vec<RepetitionFamily>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let spec = Spectral::new(m)?;
    let index: HashMap<&PopulationVector, usize> = vectors.iter().enumerate().map(|(i, r)| (&r.vector, i)).collect();
    let mut parent: Vec<Option<usize>> = vec![None; vectors.len()];
    for (i, r) in vectors.iter().enumerate() {
        if let Some(&j) = index.get(&r.vector.mapped(m)) {
            if j != i && parent[j].is_none_or(|p| vectors[p].vector > r.vector) {
                parent[j] = Some(i);
            }
        }
    }
    let mut fams: BTreeMap<usize, Vec<(u32, usize)>> = BTreeMap::new();
    for i in 0..vectors.len() {
        let (mut g, mut k) = (i, 0u32);
        while let Some(p) = parent[g] {
            g = p;
            k += 1;
            if k as usize > vectors.len() {
                return Err(Error::Invalid("cycle among repetition vectors under M".into()));
            }
        }
        fams.entry(g).or_default().push((k, i));
    }
    let l0 = LengthVector::perron(&spec);
    let mut out = Vec::new();
    for (g, mut members) in fams {
        members.sort();
        let members: Vec<FamilyMember> = members
            .into_iter()
            .map(|(k, i)| FamilyMember { k, vector: vectors[i].vector.clone(), degree: vectors[i].degree.clone() })
            .collect();
        let generator = vectors[g].vector.clone();
        let natural_length = l0.pair_int(&generator.to_bigint()).approx();
        out.push(RepetitionFamily {
            limit_degree: members.last().unwrap().degree.clone(),
            generator,
            members,
            natural_length,
        });
    }
    out.sort_by(|a, b| a.natural_length.total_cmp(&b.natural_length).then_with(|| a.generator.cmp(&b.generator)));
    Ok(out)
}

/// Degree threshold used when none is given: `p` is the largest degree
/// found among short words (a quarter of the budget, natural metric), `p0`
/// the next lower degree found (or 1), `epsilon` half the gap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeChoice {
    pub p: Scalar,
    pub p0: Scalar,
    pub epsilon: Scalar,
    pub scan_word_len: usize,
}

pub fn choose_degree(sigma: &Substitution, max_word_len: usize) -> Result<DegreeChoice> {
    let spec = Spectral::new(&sigma.matrix())?;
    let l0 = LengthVector::perron(&spec);
    let scan = (max_word_len / 4).max(8);
    let found = repetition_vectors(sigma, &l0, &Scalar::int(2), scan)?;
    let mut degrees: Vec<Scalar> = Vec::new();
    for r in found {
        if !degrees.contains(&r.degree) {
            degrees.push(r.degree);
        }
    }
    let mut sorted = Vec::with_capacity(degrees.len());
    for d in degrees {
        let pos = sorted.iter().position(|x: &Scalar| x.cmp_exact(&d).map(|o| o == Ordering::Greater).unwrap_or(false));
        sorted.insert(pos.unwrap_or(sorted.len()), d);
    }
    let Some(p) = sorted.last().cloned() else {
        return Err(Error::Precondition(format!("no repeated words within {scan} letters")));
    };
    let p0 = if sorted.len() >= 2 { sorted[sorted.len() - 2].clone() } else { Scalar::int(1) };
    let epsilon = (p.clone() - &p0) / &Scalar::int(2);
    Ok(DegreeChoice { p, p0, epsilon, scan_word_len: scan })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecognitionEstimate {
    /// Window radius, in letters, that determined the order-1 supertile
    /// decomposition at every scanned position.
    pub radius: usize,
    pub scan_len: usize,
    pub positions_checked: usize,
}

/// Smallest radius `D` such that, over a prefix of the fixed point, the
/// window of radius `D` around a position always determines which letter's
/// image covers it and at which offset. Empirical: a larger scan can only
/// raise the estimate.
pub fn recognition_length_estimate(sigma: &Substitution, scan_len: usize) -> Result<RecognitionEstimate> {
    let fp = FixedPoint::new(sigma)?;
    // u = sigma(u'') with u'' = sigma^(p-1)(u); desubstitute along u''.
    let base = fp.prefix(scan_len);
    let pre = sigma.apply(&base, fp.power() as usize - 1)?;
    let mut text = Vec::with_capacity(scan_len);
    let mut label = Vec::with_capacity(scan_len);
    'outer: for &c in &pre {
        for (off, &a) in sigma.image(c).iter().enumerate() {
            if text.len() == scan_len {
                break 'outer;
            }
            text.push(a);
            label.push((c, off));
        }
    }
    debug_assert_eq!(&text[..], &fp.prefix(text.len())[..]);
    let len = text.len();
    let ok = |d: usize| -> (bool, usize) {
        let mut seen: HashMap<&[u8], (u8, usize)> = HashMap::new();
        let mut count = 0;
        for i in d..len.saturating_sub(d) {
            count += 1;
            let w = &text[i - d..=i + d];
            if let Some(prev) = seen.insert(w, label[i]) {
                if prev != label[i] {
                    return (false, count);
                }
            }
        }
        (true, count)
    };
    let cap = len / 4;
    let mut hi = 1;
    while hi <= cap && !ok(hi).0 {
        hi *= 2;
    }
    if hi > cap {
        if cap == 0 || !ok(cap).0 {
            return Err(Error::Invalid(format!(
                "no recognition radius up to {cap} in a {len}-letter scan (not recognizable, or scan too short)"
            )));
        }
        hi = cap;
    }
    let mut lo = hi / 2;
    if lo == 0 && ok(0).0 {
        hi = 0;
    }
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if ok(mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(RecognitionEstimate { radius: hi, scan_len: len, positions_checked: ok(hi).1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(s: &Substitution) -> LengthVector {
        LengthVector::perron(&Spectral::new(&s.matrix()).unwrap())
    }

    fn generators(s: &str, p: i64) -> Vec<Vec<u64>> {
        let s = Substitution::parse(s).unwrap();
        let v = repetition_vectors(&s, &natural(&s), &Scalar::int(p), 300).unwrap();
        repetition_families(&v, &s.matrix()).unwrap().into_iter().map(|f| f.generator.0).collect()
    }

    #[test]
    fn families_of_the_symmetric_rules() {
        assert_eq!(generators("a -> aaaabb, b -> babbba", 5), vec![vec![1, 0]]);
        assert_eq!(generators("a -> aaaabb, b -> bbbbaa", 6), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(generators("a -> aaaaabbbb, b -> abbbbbaaa", 8), vec![vec![1, 0]]);
    }

    #[test]
    fn fractional_degree() {
        // ababa is admissible for a -> ab, b -> a.
        let s = Substitution::parse("a -> ab, b -> a").unwrap();
        let l = LengthVector::from_ints(&[3, 2]).unwrap();
        let v = repetition_vectors(&s, &l, &Scalar::int(2), 40).unwrap();
        let r = v.iter().find(|r| r.vector.0 == vec![1, 1]).unwrap();
        assert_eq!(r.degree, Scalar::int(2) + &(Scalar::int(3) / &Scalar::int(5)));
        assert_eq!(r.recompute_degree(&s).unwrap(), r.degree);
        assert_eq!(r.containing.len(), 5);
    }

    #[test]
    fn families_follow_the_matrix() {
        let s = Substitution::parse("a -> aaaabb, b -> babbba").unwrap();
        let l0 = natural(&s);
        let v = repetition_vectors(&s, &l0, &Scalar::int(5), 300).unwrap();
        let f = &repetition_families(&v, &s.matrix()).unwrap()[0];
        assert!(f.members.len() >= 2);
        for w in f.members.windows(2) {
            assert_eq!(w[0].vector.mapped(&s.matrix()), w[1].vector);
            assert!(w[1].degree.cmp_exact(&w[0].degree).unwrap() != Ordering::Less);
        }
        let lower = repetition_vectors(&s, &l0, &Scalar::int(4), 300).unwrap();
        assert!(v.iter().all(|r| lower.iter().any(|x| x.vector == r.vector)));
    }

    #[test]
    fn recognition() {
        for (rule, bound) in [("a -> b, b -> ab", 3), ("a -> abab, b -> bbba", 40), ("a -> ab, b -> aa", 40)] {
            let s = Substitution::parse(rule).unwrap();
            let d = recognition_length_estimate(&s, 20_000).unwrap();
            assert!(d.radius <= bound, "{rule}: {d:?}");
        }
    }
}
