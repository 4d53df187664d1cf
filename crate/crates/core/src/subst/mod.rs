//! Substitutions on small alphabets: rules, matrices, fixed points,
//! languages, and population and recurrence vectors.
//!
//! Letters are stored as indices into the alphabet (`u8`); a word is a
//! `Vec<u8>`. The alphabet order fixes all vector and matrix indexing.

mod fixed;
mod language;
mod vectors;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use fixed::{FixedPoint, FixedPointInfo};
pub use language::{
    admissible_pairs, aperiodicity_check, brute_force_factors, cover_texts, factor_complexity, language, words_of_length,
    Aperiodicity,
};
pub use vectors::{is_full, population_vector, recurrence_vectors, recurrence_vectors_in, PopulationVector, RecurrenceVector};

use crate::algebra::IntMatrix;
use crate::{Error, Result};

pub type Word = Vec<u8>;

pub const MAX_ALPHABET: usize = 8;
pub const MAX_IMAGE_LEN: usize = 64;
pub const DEFAULT_LENGTH_CAP: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    alphabet: Vec<char>,
    images: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Primitivity {
    Primitive { power: u32 },
    NotPrimitive,
    Inconclusive,
}

impl Substitution {
    /// Builds a substitution from `(letter, image)` pairs in alphabet order.
    pub fn new(rules: &[(char, &str)]) -> Result<Self> {
        let n = rules.len();
        if n == 0 || n > MAX_ALPHABET {
            return Err(Error::AlphabetSize(n));
        }
        let mut alphabet = Vec::with_capacity(n);
        for &(c, _) in rules {
            if alphabet.contains(&c) {
                return Err(Error::DuplicateLetter(c));
            }
            alphabet.push(c);
        }
        let mut images = Vec::with_capacity(n);
        for &(c, img) in rules {
            if img.is_empty() {
                return Err(Error::EmptyImage(c));
            }
            let len = img.chars().count();
            if len > MAX_IMAGE_LEN {
                return Err(Error::ImageTooLong { letter: c, len });
            }
            let mut w = Vec::with_capacity(len);
            for x in img.chars() {
                match alphabet.iter().position(|&a| a == x) {
                    Some(i) => w.push(i as u8),
                    None => return Err(Error::UnknownLetter { letter: x, source_letter: c }),
                }
            }
            images.push(w);
        }
        Ok(Substitution { alphabet, images })
    }

    /// Parses rules such as `a→b, b→ab` or one `a -> abab` per line. Arrows
    /// may be written `→`, `->` or `=`; rules are separated by commas,
    /// semicolons or newlines.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules: Vec<(char, String)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for part in line.split([',', ';']) {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (lhs, rhs) = split_rule(part)
                    .ok_or_else(|| Error::Parse { line: lineno + 1, msg: format!("expected `letter -> word`, got `{part}`") })?;
                let mut lc = lhs.chars();
                let letter = match (lc.next(), lc.next()) {
                    (Some(c), None) => c,
                    _ => {
                        return Err(Error::Parse {
                            line: lineno + 1,
                            msg: format!("left side `{lhs}` must be a single letter"),
                        })
                    }
                };
                let img: String = rhs.chars().filter(|c| !c.is_whitespace()).collect();
                rules.push((letter, img));
            }
        }
        let refs: Vec<(char, &str)> = rules.iter().map(|(c, s)| (*c, s.as_str())).collect();
        Substitution::new(&refs)
    }

    pub fn n(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn letter(&self, i: u8) -> char {
        self.alphabet[i as usize]
    }

    pub fn index_of(&self, c: char) -> Option<u8> {
        self.alphabet.iter().position(|&a| a == c).map(|i| i as u8)
    }

    pub fn image(&self, i: u8) -> &[u8] {
        &self.images[i as usize]
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(|w| w.len()).min().unwrap_or(0)
    }

    /// Common image length if all images have the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let l = self.images[0].len();
        self.images.iter().all(|w| w.len() == l).then_some(l)
    }

    pub fn word(&self, s: &str) -> Result<Word> {
        s.chars()
            .map(|c| {
                self.index_of(c).ok_or_else(|| Error::Invalid(format!("letter '{c}' is not in the alphabet")))
            })
            .collect()
    }

    pub fn show(&self, w: &[u8]) -> String {
        w.iter().map(|&i| self.letter(i)).collect()
    }

    /// `sigma^times(w)`, failing if the result would exceed `cap` letters.
    pub fn apply_capped(&self, w: &[u8], times: usize, cap: usize) -> Result<Word> {
        let mut cur = w.to_vec();
        for _ in 0..times {
            let len: usize = cur.iter().map(|&c| self.images[c as usize].len()).sum();
            if len > cap {
                return Err(Error::LengthCap { cap });
            }
            let mut next = Vec::with_capacity(len);
            for &c in &cur {
                next.extend_from_slice(&self.images[c as usize]);
            }
            cur = next;
        }
        Ok(cur)
    }

    pub fn apply(&self, w: &[u8], times: usize) -> Result<Word> {
        self.apply_capped(w, times, DEFAULT_LENGTH_CAP)
    }

    /// Lengths `|sigma^k(a)|` for every letter, without building the words.
    pub fn image_lengths(&self, k: u32) -> Vec<num_bigint::BigInt> {
        let ones = vec![num_bigint::BigInt::from(1); self.n()];
        // |sigma^k(a_j)| = (1,...,1) M^k e_j
        let mk = self.matrix().pow(k);
        (0..self.n()).map(|j| (0..self.n()).map(|i| &ones[i] * &mk[(i, j)]).sum()).collect()
    }

    /// Entry `(i, j)` counts letter `i` in the image of letter `j`.
    pub fn matrix(&self) -> IntMatrix {
        let n = self.n();
        let mut m = IntMatrix::zeros(n, n);
        for (j, img) in self.images.iter().enumerate() {
            for &c in img {
                m[(c as usize, j)] += 1;
            }
        }
        m
    }

    /// Searches `k <= max_power` with `M^k` entrywise positive. The default
    /// bound `n^2 - 2n + 2` (Wielandt) makes a negative answer definitive.
    pub fn is_primitive(&self, max_power: Option<u32>) -> Primitivity {
        let n = self.n();
        let wielandt = (n * n - 2 * n + 2) as u32;
        let bound = max_power.unwrap_or(wielandt);
        let base: Vec<Vec<bool>> = {
            let m = self.matrix();
            (0..n).map(|i| (0..n).map(|j| m[(i, j)] > 0.into()).collect()).collect()
        };
        let mut cur = base.clone();
        for k in 1..=bound {
            if cur.iter().all(|r| r.iter().all(|&x| x)) {
                return Primitivity::Primitive { power: k };
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for l in 0..n {
                    if cur[i][l] {
                        for j in 0..n {
                            next[i][j] |= base[l][j];
                        }
                    }
                }
            }
            cur = next;
        }
        if bound >= wielandt {
            Primitivity::NotPrimitive
        } else {
            Primitivity::Inconclusive
        }
    }

    pub fn require_primitive(&self) -> Result<u32> {
        match self.is_primitive(None) {
            Primitivity::Primitive { power } => Ok(power),
            _ => Err(Error::NotPrimitive),
        }
    }

    /// `self ∘ other`: first apply `other`, then `self`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.alphabet != other.alphabet {
            return Err(Error::Invalid("composition needs a common alphabet".into()));
        }
        let images: Vec<Word> = other.images.iter().map(|w| self.apply_capped(w, 1, usize::MAX).unwrap()).collect();
        if let Some((i, w)) = images.iter().enumerate().find(|(_, w)| w.len() > MAX_IMAGE_LEN) {
            return Err(Error::ImageTooLong { letter: self.alphabet[i], len: w.len() });
        }
        Ok(Substitution { alphabet: self.alphabet.clone(), images })
    }

    /// True when relabelling letters by `perm` commutes with the substitution.
    pub fn commutes_with_permutation(&self, perm: &[u8]) -> bool {
        (0..self.n()).all(|a| {
            let lhs: Word = self.images[a].iter().map(|&c| perm[c as usize]).collect();
            lhs == self.images[perm[a] as usize]
        })
    }

    /// All letter permutations that commute with the substitution, identity
    /// first.
    pub fn commuting_permutations(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        let mut perm: Vec<u8> = (0..self.n() as u8).collect();
        permutations(&mut perm, 0, &mut |p| {
            if self.commutes_with_permutation(p) {
                out.push(p.to_vec());
            }
        });
        out.sort();
        out
    }
}

fn split_rule(part: &str) -> Option<(&str, &str)> {
    for arrow in ["→", "->", "="] {
        if let Some((l, r)) = part.split_once(arrow) {
            return Some((l.trim(), r.trim()));
        }
    }
    None
}

fn permutations(p: &mut Vec<u8>, k: usize, f: &mut impl FnMut(&[u8])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} -> {}", self.alphabet[i], self.show(img))?;
        }
        Ok(())
    }
}

impl Serialize for Substitution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Substitution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Substitution::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let fib = Substitution::parse("a→b, b→ab").unwrap();
        assert_eq!(fib.n(), 2);
        assert_eq!(fib.show(fib.image(1)), "ab");
        let one = Substitution::parse("a→a").unwrap();
        assert_eq!(one.n(), 1);
        assert_eq!(
            Substitution::parse("a→ab, b→cb").unwrap_err(),
            Error::UnknownLetter { letter: 'c', source_letter: 'b' }
        );
        assert_eq!(Substitution::parse("a -> ab\na -> b").unwrap_err(), Error::DuplicateLetter('a'));
        assert!(matches!(Substitution::parse("a ->, b -> a").unwrap_err(), Error::EmptyImage('a')));
        let round = Substitution::parse(&fib.to_string()).unwrap();
        assert_eq!(round, fib);
    }

    #[test]
    fn matrices() {
        let s = Substitution::parse("a -> aaaabb, b -> babbba").unwrap();
        assert_eq!(s.matrix(), IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]]));
        let s = Substitution::parse("a -> aabaabbba, b -> bbabbaaab").unwrap();
        assert_eq!(s.matrix(), IntMatrix::from_rows(&[vec![5, 4], vec![4, 5]]));
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        assert_eq!(fib.matrix(), IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]));
        let sq = fib.compose(&fib).unwrap();
        assert_eq!(sq.matrix(), fib.matrix().pow(2));
    }

    #[test]
    fn primitivity() {
        let s = Substitution::parse("a -> aaaabb, b -> babbba").unwrap();
        assert_eq!(s.is_primitive(None), Primitivity::Primitive { power: 1 });
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        assert_eq!(fib.is_primitive(None), Primitivity::Primitive { power: 2 });
        let t = Substitution::parse("a -> a, b -> ab").unwrap();
        assert_eq!(t.is_primitive(None), Primitivity::NotPrimitive);
        assert_eq!(fib.is_primitive(Some(1)), Primitivity::Inconclusive);
    }

    #[test]
    fn apply_examples() {
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        assert_eq!(fib.show(&fib.apply(&fib.word("b").unwrap(), 2).unwrap()), "bab");
        assert_eq!(fib.apply(&fib.word("ab").unwrap(), 0).unwrap(), fib.word("ab").unwrap());
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        assert_eq!(dk.show(&dk.apply(&[0], 1).unwrap()), "abab");
        assert_eq!(dk.apply_capped(&[0], 20, 1000), Err(Error::LengthCap { cap: 1000 }));
    }

    #[test]
    fn swap_commutes_for_symmetric_rule() {
        let s = Substitution::parse("a -> aaaabb, b -> bbbbaa").unwrap();
        assert_eq!(s.commuting_permutations(), vec![vec![0, 1], vec![1, 0]]);
        let t = Substitution::parse("a -> aaaabb, b -> babbba").unwrap();
        assert_eq!(t.commuting_permutations(), vec![vec![0, 1]]);
    }
}
