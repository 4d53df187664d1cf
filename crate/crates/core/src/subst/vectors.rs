use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{FixedPoint, Substitution};
use crate::algebra::{IntMatrix, Matrix, Q};
use crate::Result;

/// Letter counts of a word, in alphabet order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PopulationVector(pub Vec<u64>);

impl PopulationVector {
    pub fn zero(n: usize) -> Self {
        PopulationVector(vec![0; n])
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the counts, i.e. the word length.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn to_bigint(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    pub fn to_q(&self) -> Vec<Q> {
        self.0.iter().map(|&x| Q::from_integer(x.into())).collect()
    }

    /// `M v`, the population of `sigma(w)` when `v` is the population of `w`.
    pub fn mapped(&self, m: &IntMatrix) -> PopulationVector {
        let out = m.apply_u64(&self.0);
        PopulationVector(out.iter().map(|x| u64::try_from(x).expect("population count overflow")).collect())
    }
}

impl fmt::Display for PopulationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

pub fn population_vector(w: &[u8], n: usize) -> PopulationVector {
    let mut v = vec![0u64; n];
    for &c in w {
        v[c as usize] += 1;
    }
    PopulationVector(v)
}

/// Population of a word `u_r..u_s` of the fixed point followed by
/// `u_{s+1} = u_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceVector {
    pub vector: PopulationVector,
    pub witness: String,
    pub position: usize,
    pub letter: char,
}

impl RecurrenceVector {
    /// Re-checks the witness against a text (normally a fixed-point prefix).
    pub fn verify(&self, sigma: &Substitution, text: &[u8]) -> bool {
        let Ok(w) = sigma.word(&self.witness) else { return false };
        let r = self.position;
        let s1 = r + w.len();
        s1 < text.len()
            && text[r..s1] == w[..]
            && text[s1] == text[r]
            && sigma.letter(text[r]) == self.letter
            && population_vector(&w, sigma.n()) == self.vector
    }
}

/// Every recurrence vector witnessed in `text` by a word of length at most
/// `max_word_len`, one per distinct vector (first occurrence wins), sorted
/// by word length and then by vector.
pub fn recurrence_vectors_in(sigma: &Substitution, text: &[u8], max_word_len: usize) -> Vec<RecurrenceVector> {
    let n = sigma.n();
    let mut seen: HashMap<Vec<u64>, (usize, usize)> = HashMap::new();
    for r in 0..text.len() {
        let mut counts = vec![0u64; n];
        let end = (r + max_word_len).min(text.len() - 1);
        for t in r + 1..=end {
            counts[text[t - 1] as usize] += 1;
            if text[t] == text[r] && !seen.contains_key(&counts) {
                seen.insert(counts.clone(), (r, t));
            }
        }
    }
    let mut out: Vec<RecurrenceVector> = seen
        .into_iter()
        .map(|(v, (r, t))| RecurrenceVector {
            vector: PopulationVector(v),
            witness: sigma.show(&text[r..t]),
            position: r,
            letter: sigma.letter(text[r]),
        })
        .collect();
    out.sort_by(|a, b| (a.vector.total(), &a.vector).cmp(&(b.vector.total(), &b.vector)));
    out
}

/// Recurrence vectors of the fixed point, scanning its first `prefix_len`
/// letters.
pub fn recurrence_vectors(sigma: &Substitution, prefix_len: usize, max_word_len: usize) -> Result<Vec<RecurrenceVector>> {
    let fp = FixedPoint::new(sigma)?;
    let text = fp.prefix(prefix_len);
    Ok(recurrence_vectors_in(sigma, &text, max_word_len))
}

/// True when `v, Mv, ..., M^{n-1} v` span `Q^n`.
pub fn is_full(v: &PopulationVector, m: &IntMatrix) -> bool {
    let n = m.rows();
    let mut cols: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut cur = v.to_bigint();
    for _ in 0..n {
        cols.push(cur.iter().map(|x| Q::from_integer(x.clone())).collect());
        cur = m.apply(&cur);
    }
    Matrix::from_cols(&cols).rank() == n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn populations() {
        let s = Substitution::parse("a -> abc, b -> b, c -> ca").unwrap();
        assert_eq!(population_vector(&s.word("abbcb").unwrap(), 3), PopulationVector(vec![1, 3, 1]));
        assert!(population_vector(&[], 3).is_zero());
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let v = population_vector(&dk.word("a").unwrap(), 2);
        assert_eq!(v.mapped(&dk.matrix()), PopulationVector(vec![2, 2]));
        assert_eq!(population_vector(&dk.apply(&[0], 1).unwrap(), 2), PopulationVector(vec![2, 2]));
    }

    #[test]
    fn successive_b_vectors() {
        let s = Substitution::parse("a -> abc, b -> b, c -> ca").unwrap();
        let text = s.word("abbcba").unwrap();
        let vs: Vec<PopulationVector> = recurrence_vectors_in(&s, &text, 10).into_iter().map(|r| r.vector).collect();
        for want in [vec![0, 1, 0], vec![0, 1, 1], vec![0, 2, 1]] {
            assert!(vs.contains(&PopulationVector(want)));
        }
    }

    #[test]
    fn fullness() {
        let m = IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]]);
        assert!(is_full(&PopulationVector(vec![1, 0]), &m));
        assert!(!is_full(&PopulationVector(vec![1, 1]), &m));
        let fib = IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]);
        assert!(is_full(&PopulationVector(vec![0, 1]), &fib));
    }

    #[test]
    fn fixed_point_vectors_verify() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let vs = recurrence_vectors(&dk, 2000, 20).unwrap();
        let text = FixedPoint::new(&dk).unwrap().prefix(2000);
        assert!(vs.iter().all(|r| r.verify(&dk, &text)));
        assert!(vs.iter().any(|r| r.vector.0 == vec![1, 0] || r.vector.0 == vec![0, 1]));
    }
}
