//! Factorization of integer polynomials of small degree over the rationals.
//!
//! Square-free parts are split using a modular degree filter (distinct-degree
//! factorization modulo several primes) to restrict candidate factor degrees,
//! then numerically located roots suggest candidate factors which are
//! accepted only after exact division.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::field::Q;
use super::intpoly::IntPolynomial;
use super::poly::QPoly;

/// One irreducible factor with its multiplicity. `certified` is false only
/// when the modular filter allowed a proper factor that the numeric search
/// could not find; the factor is then irreducible with high confidence but
/// not proven so.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub poly: IntPolynomial,
    pub multiplicity: usize,
    pub certified: bool,
}

/// Complete factorization of `p` into primitive irreducible factors with
/// positive leading coefficients, ordered by degree then coefficients. The
/// sign and content are dropped.
pub fn factor_int_poly(p: &IntPolynomial) -> Vec<Factor> {
    if p.degree() == 0 {
        return vec![];
    }
    let prim = p.primitive_part();
    let mut out: Vec<Factor> = Vec::new();
    for (part, mult) in yun(&prim.to_qpoly()) {
        let part = IntPolynomial::from_qpoly(&part);
        for (f, certified) in split_squarefree(&part) {
            out.push(Factor { poly: f, multiplicity: mult, certified });
        }
    }
    out.sort_by(|a, b| {
        a.poly.degree().cmp(&b.poly.degree()).then_with(|| a.poly.coeffs().cmp(b.poly.coeffs()))
    });
    out
}

/// Product of the factors raised to their multiplicities.
pub fn expand(factors: &[Factor]) -> IntPolynomial {
    factors
        .iter()
        .fold(IntPolynomial::from_i64(&[1]), |acc, f| acc.mul(&f.poly.pow(f.multiplicity)))
}

/// Yun's square-free decomposition: pairs `(a_i, i)` with `f = prod a_i^i`.
fn yun(f: &QPoly) -> Vec<(QPoly, usize)> {
    let mut out = Vec::new();
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.divrem(&a0).0;
    let mut c = fp.divrem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    loop {
        let a = b.gcd(&d);
        if a.deg() > 0 {
            out.push((a.clone(), i));
        }
        b = b.divrem(&a).0;
        if b.deg() == 0 {
            break;
        }
        c = d.divrem(&a).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn split_squarefree(f: &IntPolynomial) -> Vec<(IntPolynomial, bool)> {
    let mut out = Vec::new();
    let mut f = f.clone();
    if f.coeff(0).is_zero() {
        out.push((IntPolynomial::from_i64(&[0, 1]), true));
        f = IntPolynomial::new(f.coeffs()[1..].to_vec());
    }
    if f.degree() == 0 {
        return out;
    }
    let mut work = vec![f];
    while let Some(g) = work.pop() {
        if g.degree() == 1 {
            out.push((g.primitive_part(), true));
            continue;
        }
        let allowed = allowed_factor_degrees(&g);
        if allowed.is_empty() {
            out.push((g.primitive_part(), true));
            continue;
        }
        match find_factor(&g, &allowed) {
            Some(h) => {
                let rest = g.div_exact(&h).expect("verified factor");
                work.push(h.primitive_part());
                work.push(rest.primitive_part());
            }
            None => out.push((g.primitive_part(), false)),
        }
    }
    out
}

/// Turns `f` with leading coefficient `a` into the monic `a^(d-1) f(x / a)`;
/// factors of the monic version map back through `g(a x)` and primitive part.
fn monic_transform(f: &IntPolynomial) -> IntPolynomial {
    let a = f.lead();
    let d = f.degree();
    let mut c = Vec::with_capacity(d + 1);
    let mut pw = BigInt::one();
    // coefficient i becomes f_i a^(d-1-i)
    let mut pows = vec![BigInt::one(); d + 1];
    for i in 1..=d {
        pw *= &a;
        pows[i] = pw.clone();
    }
    for i in 0..=d {
        if i == d {
            c.push(BigInt::one());
        } else {
            c.push(f.coeff(i) * &pows[d - 1 - i]);
        }
    }
    IntPolynomial::new(c)
}

fn find_factor(f: &IntPolynomial, allowed: &BTreeSet<usize>) -> Option<IntPolynomial> {
    let monic = if f.is_monic() { f.clone() } else { monic_transform(f) };
    let a = f.lead();
    let roots = aberth(&monic)?;
    let n = roots.len();
    for &k in allowed {
        if k > n / 2 {
            break;
        }
        let mut found = None;
        for_each_subset(n, k, &mut |idx| {
            if found.is_some() {
                return;
            }
            if let Some(g) = product_poly(&roots, idx) {
                if monic.div_exact(&g).is_some() {
                    found = Some(g);
                }
            }
        });
        if let Some(g) = found {
            if f.is_monic() {
                return Some(g);
            }
            // back-substitute x -> a x
            let mut c = Vec::new();
            let mut pw = BigInt::one();
            for i in 0..=g.degree() {
                c.push(g.coeff(i) * &pw);
                pw *= &a;
            }
            let h = IntPolynomial::new(c).primitive_part();
            if f.div_exact(&h).is_some() {
                return Some(h);
            }
        }
    }
    None
}

fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Monic integer polynomial with the given roots, if the numerically
/// expanded coefficients are close to integers.
fn product_poly(roots: &[Complex64], idx: &[usize]) -> Option<IntPolynomial> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &i in idx {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (j, cj) in c.iter().enumerate() {
            next[j + 1] += cj;
            next[j] -= cj * roots[i];
        }
        c = next;
    }
    let mut out = Vec::with_capacity(c.len());
    for z in c {
        let r = z.re.round();
        let tol = 1e-6 * (1.0 + z.re.abs());
        if (z.re - r).abs() > tol.max(1e-3) || z.im.abs() > tol.max(1e-3) || r.abs() > 9.0e15 {
            return None;
        }
        out.push(BigInt::from(r as i64));
    }
    Some(IntPolynomial::new(out))
}

/// Aberth–Ehrlich simultaneous root finding on a monic polynomial.
fn aberth(f: &IntPolynomial) -> Option<Vec<Complex64>> {
    let n = f.degree();
    let c: Vec<f64> = f.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect();
    if c.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let r0 = bound.min(1e6).powf(0.5).max(0.5);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    Some(z)
}

const PRIMES: [u64; 24] =
    [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

/// Degrees `1..=deg/2` that a proper rational factor could have, judging by
/// the distinct-degree factorization modulo small primes of good reduction.
fn allowed_factor_degrees(f: &IntPolynomial) -> BTreeSet<usize> {
    let n = f.degree();
    let mut allowed: BTreeSet<usize> = (1..=n / 2).collect();
    let mut used = 0;
    for &p in &PRIMES {
        if allowed.is_empty() || used >= 8 {
            break;
        }
        let Some(pattern) = degree_pattern_mod_p(f, p) else { continue };
        used += 1;
        let mut sums = BTreeSet::from([0usize]);
        for d in pattern {
            let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(next);
        }
        allowed.retain(|d| sums.contains(d) || sums.contains(&(n - d)));
    }
    allowed
}

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

fn fp_rem(a: &Fp, m: &Fp, p: u64) -> Fp {
    let mut r = a.clone();
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while r.len() > dm {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let c = lead * inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
            }
        }
        r.pop();
        r = fp_trim(r);
        if r.is_empty() {
            break;
        }
    }
    fp_trim(r)
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_trim(out)
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let inv = fp_inv(l, p);
        a = a.into_iter().map(|x| x * inv % p).collect();
    }
    a
}

fn fp_div(a: &Fp, b: &Fp, p: u64) -> Fp {
    let db = b.len() - 1;
    let inv = fp_inv(b[db], p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len().saturating_sub(db)];
    while r.len() > db && !r.is_empty() {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        let c = lead * inv % p;
        q[shift] = c;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * bi % p) % p;
        }
        r.pop();
    }
    fp_trim(q)
}

fn fp_powmod(base: &Fp, mut e: u64, m: &Fp, p: u64) -> Fp {
    let mut acc: Fp = vec![1];
    let mut b = fp_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// Degrees of the irreducible factors of `f mod p`, or `None` when `p`
/// divides the leading coefficient or `f mod p` is not square-free.
fn degree_pattern_mod_p(f: &IntPolynomial, p: u64) -> Option<Vec<usize>> {
    let pb = BigInt::from(p);
    let reduce = |c: &BigInt| -> u64 {
        let r = ((c % &pb) + &pb) % &pb;
        r.to_u64().unwrap()
    };
    let fp: Fp = fp_trim(f.coeffs().iter().map(reduce).collect());
    if fp.len() != f.coeffs().len() {
        return None;
    }
    let dfp: Fp = fp_trim(fp.iter().enumerate().skip(1).map(|(i, &c)| c * (i as u64 % p) % p).collect());
    if dfp.is_empty() || fp_gcd(&fp, &dfp, p).len() != 1 {
        return None;
    }
    let x: Fp = vec![0, 1];
    let mut rest = fp.clone();
    let mut h = x.clone();
    let mut pattern = Vec::new();
    let mut i = 0;
    while rest.len() > 1 {
        i += 1;
        if 2 * i > rest.len() - 1 {
            pattern.push(rest.len() - 1);
            break;
        }
        h = fp_powmod(&h, p, &rest, p);
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = (hx[1] + p - 1) % p;
        let hx = fp_trim(hx);
        let g = fp_gcd(&rest, &hx, p);
        let dg = g.len() - 1;
        if dg > 0 {
            for _ in 0..dg / i {
                pattern.push(i);
            }
            rest = fp_div(&rest, &g, p);
            h = fp_rem(&h, &rest, p);
        }
    }
    Some(pattern)
}

/// Integer roots of `f` given as rationals (used to strip linear factors
/// quickly in callers that only need them).
pub fn rational_roots(f: &IntPolynomial) -> Vec<Q> {
    factor_int_poly(f)
        .into_iter()
        .filter(|fa| fa.poly.degree() == 1)
        .map(|fa| Q::new(-fa.poly.coeff(0), fa.poly.coeff(1)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn factor_examples() {
        let f = factor_int_poly(&ip(&[12, -8, 1]));
        assert_eq!(f.iter().map(|x| x.poly.clone()).collect::<Vec<_>>(), vec![ip(&[-6, 1]), ip(&[-2, 1])]);
        let f = factor_int_poly(&ip(&[-1, -1, 1]));
        assert_eq!(f.len(), 1);
        assert!(f[0].certified);
        let f = factor_int_poly(&ip(&[-1, 0, 0, 0, 1]));
        let polys: Vec<_> = f.iter().map(|x| x.poly.clone()).collect();
        assert_eq!(polys, vec![ip(&[-1, 1]), ip(&[1, 1]), ip(&[1, 0, 1])]);
        let sq = factor_int_poly(&ip(&[1, -2, 1]));
        assert_eq!(sq, vec![Factor { poly: ip(&[-1, 1]), multiplicity: 2, certified: true }]);
    }

    #[test]
    fn factor_products_of_quadratics_and_nonmonic() {
        let a = ip(&[-1, -1, 1]);
        let b = ip(&[2, 0, 1]);
        let c = ip(&[1, 3]);
        let p = a.mul(&b).mul(&b).mul(&c).mul(&ip(&[0, 1]));
        let f = factor_int_poly(&p);
        assert_eq!(expand(&f), p.primitive_part());
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|x| x.certified));
        let x4p1 = factor_int_poly(&ip(&[1, 0, 0, 0, 1]));
        assert_eq!(x4p1.len(), 1);
    }

    #[test]
    fn mod_p_patterns() {
        // x^2 + 1 splits mod 5, stays irreducible mod 3
        assert_eq!(degree_pattern_mod_p(&ip(&[1, 0, 1]), 3), Some(vec![2]));
        assert_eq!(degree_pattern_mod_p(&ip(&[1, 0, 1]), 5), Some(vec![1, 1]));
    }
}
