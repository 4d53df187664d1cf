//! Certified root location: Sturm sequences for real roots and Schur–Cohn
//! recursions for counting roots inside discs.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::field::{qi, Field, Q};
use super::interval::Interval;
use super::intpoly::IntPolynomial;
use super::poly::{Poly, QPoly};
use crate::{Error, Result};

pub fn sign_at(f: &QPoly, x: &Q) -> Ordering {
    f.eval(x).cmp(&Q::zero())
}

/// Square-free part `f / gcd(f, f')`.
pub fn squarefree(f: &QPoly) -> QPoly {
    if f.deg() == 0 {
        return f.clone();
    }
    let g = f.gcd(&f.derivative());
    f.divrem(&g).0
}

fn sturm_chain(f: &QPoly) -> Vec<QPoly> {
    let f = squarefree(f);
    let mut chain = vec![f.clone(), f.derivative()];
    while !chain.last().unwrap().is_zero() {
        let n = chain.len();
        let r = -&chain[n - 2].rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r);
    }
    chain.retain(|p| !p.is_zero());
    chain
}

fn variations(chain: &[QPoly], x: &Q) -> usize {
    let mut last = Ordering::Equal;
    let mut v = 0;
    for p in chain {
        let s = sign_at(p, x);
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            v += 1;
        }
        last = s;
    }
    v
}

/// Number of distinct real roots in the closed interval `[lo, hi]`.
pub fn count_real_roots(f: &QPoly, lo: &Q, hi: &Q) -> usize {
    if lo > hi || f.is_zero() {
        return 0;
    }
    let at_lo = usize::from(sign_at(f, lo) == Ordering::Equal);
    if lo == hi {
        return at_lo;
    }
    let chain = sturm_chain(f);
    variations(&chain, lo) - variations(&chain, hi) + at_lo
}

/// Cauchy bound: every complex root has modulus below the returned value.
pub fn cauchy_bound(f: &QPoly) -> Q {
    let lead = f.lead().abs();
    let m = f.coeffs()[..f.deg()].iter().fold(Q::zero(), |m, c| m.max(c.abs() / &lead));
    m + qi(1)
}

/// Disjoint closed intervals, sorted, each containing exactly one real root.
pub fn isolate_real_roots(f: &QPoly) -> Vec<Interval> {
    if f.deg() == 0 {
        return vec![];
    }
    let f = squarefree(f);
    let chain = sturm_chain(&f);
    let b = cauchy_bound(&f);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    // Each entry is a half-open interval (lo, hi].
    while let Some((lo, hi)) = stack.pop() {
        let c = variations(&chain, &lo) - variations(&chain, &hi);
        match c {
            0 => {}
            1 => out.push(tighten_open(&f, &chain, lo, hi)),
            _ => {
                let mid = (&lo + &hi) / qi(2);
                stack.push((mid.clone(), hi));
                stack.push((lo, mid));
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    out
}

/// Turns a half-open bracket with one root into a closed one whose left
/// endpoint is not a root.
fn tighten_open(f: &QPoly, chain: &[QPoly], mut lo: Q, mut hi: Q) -> Interval {
    if sign_at(f, &hi) == Ordering::Equal {
        return Interval::point(hi);
    }
    while sign_at(f, &lo) == Ordering::Equal {
        let mid = (&lo + &hi) / qi(2);
        if sign_at(f, &mid) == Ordering::Equal {
            return Interval::point(mid);
        }
        if variations(chain, &lo) - variations(chain, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Interval::new(lo, hi)
}

/// Bisects an isolating interval of a root of `f` down to `width`.
pub fn refine_root(f: &QPoly, iv: &mut Interval, width: &Q) {
    while &iv.width() > width {
        let mid = iv.mid();
        let sm = sign_at(f, &mid);
        if sm == Ordering::Equal {
            *iv = Interval::point(mid);
            return;
        }
        if sign_at(f, &iv.lo) == sm {
            iv.lo = mid;
        } else {
            iv.hi = mid;
        }
    }
}

/// Orders two real roots given by isolating brackets of distinct roots.
pub fn compare_roots(f: &QPoly, a: &mut Interval, g: &QPoly, b: &mut Interval) -> Ordering {
    loop {
        if a.hi < b.lo {
            return Ordering::Less;
        }
        if b.hi < a.lo {
            return Ordering::Greater;
        }
        if a.lo == a.hi && b.lo == b.hi {
            return a.lo.cmp(&b.lo);
        }
        let wa = a.width() / qi(2);
        let wb = b.width() / qi(2);
        refine_root(f, a, &wa);
        refine_root(g, b, &wb);
    }
}

/// Number of roots of `f` strictly inside the unit disc, or `None` when the
/// Schur–Cohn recursion meets a singular step (which happens in particular
/// when `f` has a root on the unit circle).
pub fn schur_cohn_inside<T: Field>(f: &Poly<T>) -> Result<Option<usize>> {
    let mut f = f.clone();
    let mut acc: isize = 0;
    // Each step records inside(f) = sign * inside(next) + base.
    let mut flip_base: Vec<(isize, isize)> = Vec::new();
    loop {
        if f.is_zero() {
            return Ok(None);
        }
        while f.degree() > Some(0) && f.coeff(0).is_zero() {
            f = Poly::new(f.coeffs()[1..].to_vec());
            flip_base.push((1, 1));
        }
        let n = f.deg();
        if n == 0 {
            break;
        }
        let a0 = f.coeff(0);
        let an = f.lead();
        let gamma = an.clone() * &an - &(a0.clone() * &a0);
        let s = gamma.signum_exact()?;
        let mut rev: Vec<T> = f.coeffs().to_vec();
        rev.reverse();
        let fstar = Poly::new(rev);
        let g = match s {
            Ordering::Equal => return Ok(None),
            Ordering::Greater => &f.scale(&an) - &fstar.scale(&a0),
            Ordering::Less => &fstar.scale(&a0) - &f.scale(&an),
        };
        // g(0) = 0 by construction; g = z h.
        // Rescaling does not move roots and keeps coefficients from growing.
        let h = if g.is_zero() { g } else { Poly::new(g.coeffs()[1..].to_vec()).monic() };
        match s {
            // inside(f) = 1 + inside(h)
            Ordering::Greater => flip_base.push((1, 1)),
            // inside(f) = n - 1 - inside(h)
            _ => flip_base.push((-1, n as isize - 1)),
        }
        f = h;
    }
    // Unwind: inside_k = sign_k * inside_{k+1} + base_k, innermost is 0.
    for (sign, base) in flip_base.into_iter().rev() {
        acc = sign * acc + base;
    }
    if acc < 0 {
        return Err(Error::Invalid("Schur–Cohn recursion produced a negative count".into()));
    }
    Ok(Some(acc as usize))
}

/// Roots of `f` with modulus strictly below `r` (`None` if singular).
pub fn count_inside_radius<T: Field>(f: &Poly<T>, r: &Q) -> Result<Option<usize>> {
    schur_cohn_inside(&f.scale_arg(&T::from_rational(r)))
}

fn pow2_inv(j: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << j as usize)
}

/// Counts roots of modulus below `r`, nudging the radius slightly (within a
/// fraction of `slack`) if the recursion is singular at `r`. Returns the
/// radius actually used.
fn count_near<T: Field>(f: &Poly<T>, r: &Q, slack: &Q) -> Result<Option<(Q, usize)>> {
    for k in 0..8u32 {
        let rr = if k == 0 { r.clone() } else { r + slack * Q::new(BigInt::from(k), BigInt::from(17)) };
        if let Some(c) = count_inside_radius(f, &rr)? {
            return Ok(Some((rr, c)));
        }
    }
    Ok(None)
}

/// One group of roots whose moduli lie in `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusBracket {
    #[serde(with = "crate::io::serde_exact::rational")]
    pub lo: Q,
    #[serde(with = "crate::io::serde_exact::rational")]
    pub hi: Q,
    pub count: usize,
}

/// Magnitude classification of the roots of one irreducible factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootClass {
    pub factor: IntPolynomial,
    pub small: usize,
    pub unit: usize,
    pub large: usize,
    /// Isolating intervals of the real roots, increasing.
    pub real_roots: Vec<Interval>,
    /// Brackets on the moduli of the roots off the unit circle.
    pub moduli: Vec<ModulusBracket>,
    /// A rational radius below one enclosing every small root (absent when
    /// there are no small roots).
    #[serde(with = "crate::io::serde_exact::opt_rational")]
    pub small_radius: Option<Q>,
    /// A rational radius above one below every large root.
    #[serde(with = "crate::io::serde_exact::opt_rational")]
    pub large_radius: Option<Q>,
    pub reciprocal: bool,
    /// Unit-modulus roots together with roots off the circle: a factor of
    /// Salem type, which cannot be cyclotomic.
    pub salem_type: bool,
    pub cyclotomic: bool,
    pub conjugate_to_perron: bool,
}

impl RootClass {
    pub fn degree(&self) -> usize {
        self.factor.degree()
    }

    /// Roots with modulus at least one.
    pub fn large_or_unit(&self) -> usize {
        self.large + self.unit
    }
}

/// Classifies the roots of an irreducible integer polynomial by modulus.
pub fn classify_roots(f: &IntPolynomial) -> Result<RootClass> {
    let n = f.degree();
    if n == 0 {
        return Err(Error::Precondition("classify_roots needs a nonconstant polynomial".into()));
    }
    let fq = f.to_qpoly();
    let real_roots = isolate_real_roots(&fq);
    let rev = f.reversal();
    let reciprocal = n >= 1 && (rev == *f || rev == IntPolynomial::new(f.coeffs().iter().map(|c| -c).collect()));

    let (small, unit, large);
    if n == 1 {
        let root = Q::new(-f.coeff(0), f.coeff(1));
        let m = root.abs();
        small = usize::from(m < qi(1));
        unit = usize::from(m == qi(1));
        large = usize::from(m > qi(1));
    } else if reciprocal {
        if n % 2 == 1 {
            return Err(Error::Precondition(format!("{f} is reciprocal of odd degree, hence reducible")));
        }
        let g = trace_polynomial(&fq);
        let on_circle = count_real_roots(&g, &qi(-2), &qi(2));
        unit = 2 * on_circle;
        small = (n - unit) / 2;
        large = small;
    } else {
        unit = 0;
        let eps_small = find_unit_split(&fq)?;
        small = eps_small;
        large = n - small;
    }

    let bound = cauchy_bound(&fq);
    let small_radius = if small > 0 { Some(find_radius(&fq, small, true)?) } else { None };
    let large_radius = if large > 0 { Some(find_radius(&fq, small + unit, false)?) } else { None };
    let mut moduli = Vec::new();
    if let Some(r) = &small_radius {
        bracket_moduli(&fq, Q::zero(), 0, r.clone(), small, &mut moduli)?;
    }
    if let Some(r) = &large_radius {
        bracket_moduli(&fq, r.clone(), small + unit, bound.clone(), n, &mut moduli)?;
    }
    Ok(RootClass {
        factor: f.clone(),
        small,
        unit,
        large,
        real_roots,
        moduli,
        small_radius,
        large_radius,
        reciprocal,
        salem_type: unit > 0 && unit < n,
        cyclotomic: unit == n,
        conjugate_to_perron: false,
    })
}

/// For palindromic `f` of degree 2m, the polynomial `g` with
/// `f(x) = x^m g(x + 1/x)`.
pub fn trace_polynomial(f: &QPoly) -> QPoly {
    let m = f.deg() / 2;
    // x^k + x^-k = P_k(x + 1/x) with P_0 = 2, P_1 = y.
    let y = QPoly::x();
    let mut p: Vec<QPoly> = vec![QPoly::constant(qi(2)), y.clone()];
    for k in 2..=m {
        let next = &(&y * &p[k - 1]) - &p[k - 2];
        p.push(next);
    }
    let mut g = QPoly::constant(f.coeff(m));
    for k in 1..=m {
        g = &g + &p[k].scale(&f.coeff(m + k));
    }
    g
}

/// Number of roots inside the unit disc for a polynomial with no roots on
/// the circle, using nearby radii when the recursion is singular at 1.
fn find_unit_split(f: &QPoly) -> Result<usize> {
    if let Some(c) = schur_cohn_inside(f)? {
        return Ok(c);
    }
    for j in 4..200u32 {
        let e = pow2_inv(j);
        let below = count_inside_radius(f, &(qi(1) - &e))?;
        let above = count_inside_radius(f, &(qi(1) + &e))?;
        if let (Some(a), Some(b)) = (below, above) {
            if a == b {
                return Ok(a);
            }
        }
    }
    Err(Error::RefinementCap)
}

/// A rational radius `r` with exactly `target` roots of modulus below it,
/// approaching 1 from below (`inner`) or above.
fn find_radius(f: &QPoly, target: usize, inner: bool) -> Result<Q> {
    for j in 1..400u32 {
        let e = pow2_inv(j);
        let r = if inner { qi(1) - e } else { qi(1) + e };
        if count_inside_radius(f, &r)? == Some(target) {
            return Ok(r);
        }
    }
    Err(Error::RefinementCap)
}

/// Bisects the annulus `lo <= |z| < hi` (containing `c_hi - c_lo` roots) into
/// brackets of relative width below 1/1024.
fn bracket_moduli(
    f: &QPoly,
    lo: Q,
    c_lo: usize,
    hi: Q,
    c_hi: usize,
    out: &mut Vec<ModulusBracket>,
) -> Result<()> {
    let mut stack = vec![(lo, c_lo, hi, c_hi)];
    let mut found = Vec::new();
    while let Some((lo, cl, hi, ch)) = stack.pop() {
        if ch == cl {
            continue;
        }
        let width = &hi - &lo;
        let tol = hi.clone().max(qi(1)) / qi(1024);
        if width <= tol {
            found.push(ModulusBracket { lo, hi, count: ch - cl });
            continue;
        }
        let mid = (&lo + &hi) / qi(2);
        match count_near(f, &mid, &(&width / qi(4)))? {
            Some((m, cm)) => {
                stack.push((lo, cl, m.clone(), cm));
                stack.push((m, cm, hi, ch));
            }
            None => found.push(ModulusBracket { lo, hi, count: ch - cl }),
        }
    }
    found.sort_by(|a, b| a.lo.cmp(&b.lo));
    out.extend(found);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::q;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn sturm_counts() {
        let f = ip(&[-1, -1, 1]).to_qpoly();
        assert_eq!(count_real_roots(&f, &qi(-2), &qi(2)), 2);
        assert_eq!(count_real_roots(&f, &qi(0), &qi(2)), 1);
        let iv = isolate_real_roots(&f);
        assert_eq!(iv.len(), 2);
        assert!(iv[0].hi <= iv[1].lo);
        let g = ip(&[-6, 1]).to_qpoly();
        assert_eq!(count_real_roots(&g, &qi(6), &qi(6)), 1);
        assert_eq!(count_real_roots(&g, &qi(1), &qi(6)), 1);
        assert_eq!(count_real_roots(&g, &qi(6), &qi(7)), 1);
    }

    #[test]
    fn schur_cohn_small_cases() {
        let f = ip(&[-1, 2]).to_qpoly(); // root 1/2
        assert_eq!(schur_cohn_inside(&f).unwrap(), Some(1));
        let f = ip(&[-2, 1]).to_qpoly();
        assert_eq!(schur_cohn_inside(&f).unwrap(), Some(0));
        let f = ip(&[1, 0, 4]).to_qpoly(); // roots +-i/2
        assert_eq!(schur_cohn_inside(&f).unwrap(), Some(2));
        let f = ip(&[1, 0, 1]).to_qpoly();
        assert_eq!(schur_cohn_inside(&f).unwrap(), None);
        let f = ip(&[0, 0, -1, 1]).to_qpoly(); // 0, 0, 1 -> singular
        assert_eq!(count_inside_radius(&f, &q(1, 2)).unwrap(), Some(2));
    }

    #[test]
    fn classify_examples() {
        let c = classify_roots(&ip(&[-6, 1])).unwrap();
        assert_eq!((c.small, c.unit, c.large), (0, 0, 1));
        let c = classify_roots(&ip(&[-1, -1, 1])).unwrap();
        assert_eq!((c.small, c.unit, c.large), (1, 0, 1));
        assert!(c.small_radius.unwrap() > q(618, 1000));
        let c = classify_roots(&ip(&[1, 0, 1])).unwrap();
        assert_eq!((c.small, c.unit, c.large), (0, 2, 0));
        assert!(c.cyclotomic);
        // Lehmer's polynomial: one Salem root, its inverse, eight on the circle.
        let lehmer = ip(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let c = classify_roots(&lehmer).unwrap();
        assert_eq!((c.small, c.unit, c.large), (1, 8, 1));
        assert!(c.salem_type);
        // x^3 - x - 1: plastic number plus a complex pair inside the disc.
        let c = classify_roots(&ip(&[-1, -1, 0, 1])).unwrap();
        assert_eq!((c.small, c.unit, c.large), (2, 0, 1));
        assert_eq!(c.moduli.iter().map(|m| m.count).sum::<usize>(), 3);
    }

    #[test]
    fn trace_polynomial_of_cyclotomic() {
        // x^2 + x + 1 = x (y + 1) with y = x + 1/x
        let g = trace_polynomial(&ip(&[1, 1, 1]).to_qpoly());
        assert_eq!(g, ip(&[1, 1]).to_qpoly());
    }
}
