use std::cmp::Ordering;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::LengthVector;
use crate::algebra::{Field, Scalar, Spectral};
use crate::subst::{words_of_length, FixedPoint, PopulationVector, Substitution};
use crate::{Error, Result};

/// Letter frequencies: the right Perron eigenvector normalized to sum 1,
/// exact in the Perron field.
pub fn letter_frequencies(sigma: &Substitution) -> Result<Vec<Scalar>> {
    sigma.require_primitive()?;
    let spec = Spectral::new(&sigma.matrix())?;
    Ok(normalized_right(&spec))
}

fn normalized_right(spec: &Spectral) -> Vec<Scalar> {
    let total = spec.perron.right.iter().fold(Scalar::zero(), |s, x| s + x);
    spec.perron.right.iter().map(|x| x.clone() / &total).collect()
}

/// Points whose origin tile starts an occurrence of `word` and whose offset
/// into that tile lies in `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSet {
    pub word: String,
    pub lo: Scalar,
    pub hi: Scalar,
}

impl CylinderSet {
    pub fn new(word: &str, lo: Scalar, hi: Scalar) -> Self {
        CylinderSet { word: word.into(), lo, hi }
    }

    fn check(&self, sigma: &Substitution, l: &LengthVector) -> Result<Vec<u8>> {
        let w = sigma.word(&self.word)?;
        if w.is_empty() {
            return Err(Error::Invalid("cylinder word is empty".into()));
        }
        let first = l.get(w[0] as usize);
        if self.lo.signum_exact()? == Ordering::Less
            || self.hi.cmp_exact(&self.lo)? == Ordering::Less
            || self.hi.cmp_exact(first)? == Ordering::Greater
        {
            return Err(Error::Invalid(format!("interval [{}, {}) is not inside [0, {first})", self.lo, self.hi)));
        }
        Ok(w)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderMeasure {
    /// Exact value for one-letter words.
    pub exact: Option<Scalar>,
    pub approx: f64,
    /// For longer words: the empirical frequency window `[lo, hi]` at two
    /// binomial standard errors, and the prefix it was sampled from.
    pub sample_interval: Option<(f64, f64)>,
    pub prefix_len: Option<usize>,
}

/// Measure of a cylinder set for the translation-invariant measure on the
/// tiling space: word frequency times `|I|` divided by the mean tile length.
pub fn measure_cylinder(sigma: &Substitution, l: &LengthVector, c: &CylinderSet, prefix_len: usize) -> Result<CylinderMeasure> {
    let w = c.check(sigma, l)?;
    let spec = Spectral::new(&sigma.matrix())?;
    let freq = normalized_right(&spec);
    let mean = freq.iter().zip(l.entries()).fold(Scalar::zero(), |s, (f, x)| s + &(f.clone() * x));
    let width = c.hi.clone() - &c.lo;
    if w.len() == 1 {
        let v = freq[w[0] as usize].clone() * &width / &mean;
        return Ok(CylinderMeasure { approx: v.approx(), exact: Some(v), sample_interval: None, prefix_len: None });
    }
    if !words_of_length(sigma, w.len())?.contains(&w) {
        return Ok(CylinderMeasure { exact: Some(Scalar::zero()), approx: 0.0, sample_interval: None, prefix_len: None });
    }
    let text = FixedPoint::new(sigma)?.prefix(prefix_len);
    let slots = text.len().saturating_sub(w.len()) + 1;
    let hits = text.windows(w.len()).filter(|x| *x == &w[..]).count();
    let p = hits as f64 / slots as f64;
    let se = 2.0 * (p * (1.0 - p) / slots as f64).sqrt();
    let scale = width.approx() / mean.approx();
    Ok(CylinderMeasure {
        exact: None,
        approx: p * scale,
        sample_interval: Some(((p - se).max(0.0) * scale, (p + se) * scale)),
        prefix_len: Some(text.len()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub m: u32,
    /// `t_m = L M^m v`, approximately.
    pub t_m: f64,
    /// Estimated measure of the cylinder intersected with its translate by
    /// `-t_m`.
    pub overlap: f64,
    /// Estimated measure of the cylinder over the same scan region.
    pub cylinder: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverlapOptions {
    pub prefix_len: usize,
    /// Letters of the fixed point skipped before the scan starts.
    pub scan_start: usize,
    pub m_cap: u32,
}

impl Default for OverlapOptions {
    fn default() -> Self {
        OverlapOptions { prefix_len: 1_000_000, scan_start: 0, m_cap: 12 }
    }
}

/// Estimates `mu(c ∩ T_{-t_m} c)` for the supertile return times
/// `t_m = L M^m v` by scanning a generated tiling segment: the occupation
/// length of points `x` in `c` with `x + t_m` also in `c`, over the segment
/// length. A positive floor across `m` is what rules out mixing.
pub fn mixing_overlap_estimate(
    sigma: &Substitution,
    l: &LengthVector,
    c: &CylinderSet,
    v: &PopulationVector,
    m_range: std::ops::RangeInclusive<u32>,
    opts: &OverlapOptions,
) -> Result<Vec<OverlapEstimate>> {
    let w = c.check(sigma, l)?;
    if *m_range.end() > opts.m_cap {
        return Err(Error::Invalid(format!("m = {} exceeds the cap of {}", m_range.end(), opts.m_cap)));
    }
    let text = FixedPoint::new(sigma)?.prefix(opts.scan_start + opts.prefix_len);
    let text = &text[opts.scan_start.min(text.len())..];
    let lens = l.approx();
    let mut pos = Vec::with_capacity(text.len() + 1);
    let mut x = 0.0;
    for &a in text {
        pos.push(x);
        x += lens[a as usize];
    }
    let total = x;
    let (lo, hi) = (c.lo.approx(), c.hi.approx());
    // Left ends of the cylinder pieces, increasing.
    let starts: Vec<f64> = (0..text.len().saturating_sub(w.len() - 1))
        .filter(|&j| text[j..j + w.len()] == w[..])
        .map(|j| pos[j] + lo)
        .collect();
    let piece = hi - lo;
    let m = sigma.matrix();
    let mut out = Vec::new();
    for mm in m_range {
        let t = l.times_power(&m, mm).pair_int(&v.to_bigint()).approx();
        if t >= total / 2.0 {
            return Err(Error::Invalid(format!("segment of length {total:.0} too short for t_{mm} = {t:.0}")));
        }
        let region = total - t;
        let mut overlap = 0.0;
        let mut cyl = 0.0;
        let mut k = 0;
        for &s in &starts {
            if s + piece > region {
                break;
            }
            cyl += piece;
            let (a, b) = (s + t, s + t + piece);
            while k < starts.len() && starts[k] + piece <= a {
                k += 1;
            }
            let mut q = k;
            while q < starts.len() && starts[q] < b {
                overlap += (b.min(starts[q] + piece) - a.max(starts[q])).max(0.0);
                q += 1;
            }
        }
        let (overlap, cylinder) = (overlap / region, cyl / region);
        let ratio = if cylinder > 0.0 { overlap / cylinder } else { 0.0 };
        out.push(OverlapEstimate { m: mm, t_m: t, overlap, cylinder, ratio });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    #[test]
    fn frequencies() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        assert_eq!(letter_frequencies(&dk).unwrap(), vec![Scalar::rational(q(1, 3)), Scalar::rational(q(2, 3))]);
        let sym = Substitution::parse("a -> aaaabb, b -> bbbbaa").unwrap();
        assert_eq!(letter_frequencies(&sym).unwrap(), vec![Scalar::rational(q(1, 2)); 2]);
    }

    #[test]
    fn dk_cylinder() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let c = CylinderSet::new("a", Scalar::int(0), Scalar::int(2));
        assert_eq!(measure_cylinder(&dk, &l, &c, 1000).unwrap().exact, Some(Scalar::rational(q(1, 2))));
        let empty = CylinderSet::new("ab", Scalar::int(1), Scalar::int(1));
        assert_eq!(measure_cylinder(&dk, &l, &empty, 1000).unwrap().approx, 0.0);
    }

    #[test]
    fn overlap_floor() {
        let dk = Substitution::parse("a -> abab, b -> bbba").unwrap();
        let l = LengthVector::from_ints(&[2, 1]).unwrap();
        let c = CylinderSet::new("a", Scalar::int(0), Scalar::int(1));
        let opts = OverlapOptions { prefix_len: 100_000, ..Default::default() };
        let est = mixing_overlap_estimate(&dk, &l, &c, &PopulationVector(vec![1, 0]), 0..=5, &opts).unwrap();
        assert!(est.iter().all(|e| e.ratio > 0.01 && e.overlap <= e.cylinder));
    }
}
