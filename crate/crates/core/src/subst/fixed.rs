use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{Substitution, Word};
use crate::{Error, Result};

/// A right-infinite word fixed by a power of the substitution, generated
/// lazily. Prefixes are memoized, so a handle can be shared between threads
/// and asked repeatedly for longer prefixes.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    sigma: Substitution,
    seed: u8,
    power: u32,
    two_sided: Option<(u8, u8)>,
    memo: Arc<Mutex<Word>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointInfo {
    pub seed: char,
    pub power: u32,
    /// `(left, right)`: `sigma^p(left)` ends with `left`, `sigma^p(right)`
    /// begins with `right`, and `left right` is admissible.
    pub two_sided: Option<(char, char)>,
}

impl FixedPoint {
    /// Finds the smallest `p <= n * max|sigma(a)|` and the first letter `a`
    /// with `sigma^p(a)` beginning with `a`.
    pub fn new(sigma: &Substitution) -> Result<Self> {
        let n = sigma.n();
        let bound = (n * sigma.max_image_len()).max(1) as u32;
        let first: Vec<u8> = (0..n as u8).map(|a| sigma.image(a)[0]).collect();
        let last: Vec<u8> = (0..n as u8).map(|a| *sigma.image(a).last().unwrap()).collect();
        let iterate = |map: &[u8], a: u8, p: u32| (0..p).fold(a, |x, _| map[x as usize]);
        let mut found = None;
        'outer: for p in 1..=bound {
            for a in 0..n as u8 {
                if iterate(&first, a, p) == a {
                    found = Some((a, p));
                    break 'outer;
                }
            }
        }
        let (seed, power) = found.ok_or_else(|| Error::Precondition("no letter is fixed by a power of the substitution".into()))?;
        let pairs = super::language::admissible_pairs(sigma)?;
        let mut two_sided = None;
        'two: for p in 1..=bound {
            for &(l, r) in &pairs {
                if iterate(&last, l, p) == l && iterate(&first, r, p) == r {
                    two_sided = Some((l, r));
                    break 'two;
                }
            }
        }
        Ok(FixedPoint {
            sigma: sigma.clone(),
            seed,
            power,
            two_sided,
            memo: Arc::new(Mutex::new(vec![seed])),
        })
    }

    pub fn seed(&self) -> u8 {
        self.seed
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn info(&self) -> FixedPointInfo {
        FixedPointInfo {
            seed: self.sigma.letter(self.seed),
            power: self.power,
            two_sided: self.two_sided.map(|(l, r)| (self.sigma.letter(l), self.sigma.letter(r))),
        }
    }

    /// The first `len` letters of the fixed point.
    pub fn prefix(&self, len: usize) -> Word {
        let mut memo = self.memo.lock().unwrap();
        if memo.len() < len {
            let grown = self.grow(&memo, len);
            *memo = grown;
        }
        memo[..len.min(memo.len())].to_vec()
    }

    fn grow(&self, start: &[u8], len: usize) -> Word {
        let mut cur = start.to_vec();
        loop {
            let mut next = Vec::with_capacity(len + 64);
            // apply sigma^p, keeping only what is needed
            let mut layer = cur.clone();
            for _ in 0..self.power {
                next.clear();
                for &c in &layer {
                    next.extend_from_slice(self.sigma.image(c));
                    if next.len() >= len {
                        break;
                    }
                }
                layer = std::mem::take(&mut next);
            }
            if layer.len() <= cur.len() {
                // No growth: the fixed point is the periodic word seed^infinity
                // (only possible for the one-letter rule a -> a).
                let period = cur.clone();
                while cur.len() < len {
                    cur.extend_from_slice(&period);
                }
                cur.truncate(len);
                return cur;
            }
            cur = layer;
            if cur.len() >= len {
                cur.truncate(len);
                return cur;
            }
        }
    }

    /// Letters `u_{-k}..u_{-1}` of a two-sided fixed point (left of the
    /// origin), when a two-sided seed exists.
    pub fn left_part(&self, len: usize) -> Option<Word> {
        let (l, _) = self.two_sided?;
        let mut cur = vec![l];
        while cur.len() < len {
            let mut layer = cur.clone();
            for _ in 0..self.power {
                let mut next = Vec::new();
                for &c in layer.iter() {
                    next.extend_from_slice(self.sigma.image(c));
                }
                // keep only the rightmost `len` letters
                if next.len() > len {
                    next.drain(..next.len() - len);
                }
                layer = next;
            }
            if layer.len() <= cur.len() {
                return None;
            }
            cur = layer;
        }
        let start = cur.len() - len;
        Some(cur[start..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_and_powers() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let fp = FixedPoint::new(&dk).unwrap();
        assert_eq!((fp.seed(), fp.power()), (0, 1));
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        let fp = FixedPoint::new(&fib).unwrap();
        // sigma^2(a) = ab and sigma^2(b) = bab both qualify; the first letter wins
        assert_eq!((fib.letter(fp.seed()), fp.power()), ('a', 2));
        assert_eq!(fib.show(&fp.prefix(5)), "abbab");
        let tm = Substitution::parse("a -> ba, b -> ab").unwrap();
        let fp = FixedPoint::new(&tm).unwrap();
        assert_eq!(fp.power(), 2);
        assert_eq!(tm.show(&fp.prefix(4)), "abba");
    }

    #[test]
    fn prefixes_are_nested() {
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        let fp = FixedPoint::new(&fib).unwrap();
        let long = fp.prefix(1000);
        let short = fp.prefix(37);
        assert_eq!(&long[..37], &short[..]);
        let direct = fib.apply(&[fp.seed()], 20).unwrap();
        assert_eq!(&direct[..1000], &long[..]);
    }

    #[test]
    fn two_sided_seed() {
        let fib = Substitution::parse("a -> b, b -> ab").unwrap();
        let fp = FixedPoint::new(&fib).unwrap();
        let info = fp.info();
        let (l, r) = info.two_sided.unwrap();
        assert!(fib.word(&format!("{l}{r}")).is_ok());
        assert!(fp.left_part(10).unwrap().len() == 10);
    }
}
