use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::{FixedPoint, Substitution, Word};
use crate::{Error, Result};

const CLOSURE_CAP: usize = 10_000;

/// Admissible two-letter words, computed as the least set containing the
/// two-letter factors of every `sigma(a)` and closed under taking two-letter
/// factors of `sigma(w)`. Iteration stops once a round adds nothing and a
/// further confirmation round also adds nothing.
pub fn admissible_pairs(sigma: &Substitution) -> Result<Vec<(u8, u8)>> {
    let mut set: BTreeSet<(u8, u8)> = BTreeSet::new();
    for a in 0..sigma.n() as u8 {
        for w in sigma.image(a).windows(2) {
            set.insert((w[0], w[1]));
        }
    }
    let mut stable_rounds = 0;
    for _ in 0..CLOSURE_CAP {
        let mut next = set.clone();
        for &(x, y) in &set {
            let img = sigma.apply_capped(&[x, y], 1, usize::MAX)?;
            for w in img.windows(2) {
                next.insert((w[0], w[1]));
            }
        }
        if next.len() == set.len() {
            stable_rounds += 1;
            if stable_rounds == 2 {
                return Ok(set.into_iter().collect());
            }
        } else {
            stable_rounds = 0;
        }
        set = next;
    }
    Err(Error::IterationCap(CLOSURE_CAP))
}

/// Texts whose factors of length at most `len` are exactly the admissible
/// words of length at most `len`: `sigma^k(cd)` for every admissible pair
/// `cd`, with `k` the least power making every `sigma^k(a)` at least `len`
/// long. (A word of length `len` meets at most two consecutive
/// `k`-supertiles.)
pub fn cover_texts(sigma: &Substitution, len: usize) -> Result<Vec<Word>> {
    let pairs = admissible_pairs(sigma)?;
    if pairs.is_empty() {
        // Degenerate one-letter rules.
        return Ok(vec![vec![0; len.max(1)]]);
    }
    let mut k = 0usize;
    loop {
        let lens = sigma.image_lengths(k as u32);
        if lens.iter().all(|l| *l >= num_bigint::BigInt::from(len)) {
            break;
        }
        k += 1;
        if k > 64 {
            // No growth: the one-letter rule a -> a.
            return Ok(vec![vec![0; len.max(1)]]);
        }
    }
    pairs
        .iter()
        .map(|&(c, d)| sigma.apply(&[c, d], k))
        .collect::<Result<Vec<_>>>()
}

/// The set of admissible words of length `1..=max_len`.
pub fn language(sigma: &Substitution, max_len: usize) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::new();
    for text in cover_texts(sigma, max_len)? {
        for l in 1..=max_len {
            for w in text.windows(l) {
                if !out.contains(w) {
                    out.insert(w.to_vec());
                }
            }
        }
    }
    Ok(out)
}

/// Admissible words of length exactly `len`.
pub fn words_of_length(sigma: &Substitution, len: usize) -> Result<BTreeSet<Word>> {
    let mut out = BTreeSet::new();
    for text in cover_texts(sigma, len)? {
        for w in text.windows(len) {
            if !out.contains(w) {
                out.insert(w.to_vec());
            }
        }
    }
    Ok(out)
}

/// All factors of length `1..=max_len` of a text.
pub fn brute_force_factors(text: &[u8], max_len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for l in 1..=max_len {
        for w in text.windows(l) {
            out.insert(w.to_vec());
        }
    }
    out
}

/// Number of distinct factors of length `len` in a text.
pub fn factor_complexity(text: &[u8], len: usize) -> usize {
    text.windows(len).collect::<HashSet<_>>().len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Aperiodicity {
    /// Factor counts `p(l) > l` at every sampled length (pairs `(l, p(l))`,
    /// counted in the fixed-point prefix, hence lower bounds).
    AperiodicEvidence { samples: Vec<(usize, usize)> },
    /// The subshift is the orbit of `period^infinity`.
    Periodic { period: String },
    Inconclusive { reason: String },
}

impl Aperiodicity {
    pub fn is_aperiodic(&self) -> bool {
        matches!(self, Aperiodicity::AperiodicEvidence { .. })
    }
}

/// Looks for a period of the fixed-point prefix of length `depth`; a period
/// `P <= depth / 4` is confirmed exactly by checking that every admissible
/// word of length `P + 1` occurs in `period^infinity`. Otherwise, factor
/// counts above `l` at `l = 1, 2, 4, ...` are reported as evidence of
/// aperiodicity (a count `p(l) <= l` would force eventual periodicity).
pub fn aperiodicity_check(sigma: &Substitution, depth: usize) -> Result<Aperiodicity> {
    let depth = depth.max(8);
    let fp = FixedPoint::new(sigma)?;
    let u = fp.prefix(depth);
    if u.len() < depth {
        return Ok(Aperiodicity::Inconclusive { reason: "fixed point prefix too short".into() });
    }
    if let Some(p) = (1..=depth / 4).find(|&p| (0..depth - p).all(|i| u[i] == u[i + p])) {
        let period = &u[..p];
        let mut periodic_text = Vec::with_capacity(3 * p + 2);
        while periodic_text.len() < 2 * p + 2 {
            periodic_text.extend_from_slice(period);
        }
        let allowed: HashSet<&[u8]> = periodic_text.windows(p + 1).collect();
        let words = words_of_length(sigma, p + 1)?;
        if words.iter().all(|w| allowed.contains(w.as_slice())) {
            return Ok(Aperiodicity::Periodic { period: sigma.show(period) });
        }
    }
    let mut samples = Vec::new();
    let mut l = 1;
    while l <= depth / 8 {
        let c = factor_complexity(&u, l);
        samples.push((l, c));
        if c <= l {
            return Ok(Aperiodicity::Inconclusive {
                reason: format!("only {c} distinct factors of length {l} in a prefix of length {depth}"),
            });
        }
        l *= 2;
    }
    Ok(Aperiodicity::AperiodicEvidence { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(t: &str) -> Substitution {
        Substitution::parse(t).unwrap()
    }

    #[test]
    fn fibonacci_language() {
        let fib = s("a -> b, b -> ab");
        let l2: BTreeSet<String> = language(&fib, 2).unwrap().iter().map(|w| fib.show(w)).collect();
        let expect: BTreeSet<String> = ["a", "b", "ab", "ba", "bb"].iter().map(|x| x.to_string()).collect();
        assert_eq!(l2, expect);
        for l in 1..=10 {
            assert_eq!(words_of_length(&fib, l).unwrap().len(), l + 1);
        }
        let brute = brute_force_factors(&fib.apply(&[1], 16).unwrap(), 8);
        assert_eq!(language(&fib, 8).unwrap(), brute);
    }

    #[test]
    fn single_letter_level() {
        let dk = s("a -> abab, b -> bbba");
        assert_eq!(language(&dk, 1).unwrap().len(), 2);
    }

    #[test]
    fn periodicity() {
        let p = s("a -> ab, b -> ab");
        assert_eq!(aperiodicity_check(&p, 1000).unwrap(), Aperiodicity::Periodic { period: "ab".into() });
        assert!(aperiodicity_check(&s("a -> b, b -> ab"), 1000).unwrap().is_aperiodic());
        let dk = aperiodicity_check(&s("a -> abab, b -> bbba"), 1000).unwrap();
        match dk {
            Aperiodicity::AperiodicEvidence { samples } => assert_eq!(samples[1], (2, 4)),
            other => panic!("{other:?}"),
        }
        assert!(!aperiodicity_check(&s("a -> a"), 100).unwrap().is_aperiodic());
    }
}
