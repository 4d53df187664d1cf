//! Membership in the span of generalized eigenspaces for eigenvalues of
//! modulus below one, decided exactly through minimal polynomials.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::field::{qi, Field, Q};
use super::matrix::Matrix;
use super::numfield::Scalar;
use super::poly::Poly;
use super::roots::count_inside_radius;
use super::spectral::Spectral;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LargeComponent {
    /// The vector lies in the small-eigenvalue subspace.
    Zero,
    /// The vector has a component along an eigenvalue of modulus >= 1; the
    /// witness names the responsible factor of the characteristic polynomial.
    Nonzero { witness: String },
    Undecided { reason: String },
}

impl LargeComponent {
    pub fn is_zero(&self) -> bool {
        matches!(self, LargeComponent::Zero)
    }
}

/// Minimal polynomial of the row vector `r` under `r -> r M`: the monic
/// polynomial `mu` of least degree with `r mu(M) = 0`.
pub fn krylov_minpoly<T: Field>(r: &[T], m: &Matrix<T>) -> Poly<T> {
    let mut vecs: Vec<Vec<T>> = Vec::new();
    let mut cur = r.to_vec();
    loop {
        if let Some(c) = express_in_span(&vecs, &cur) {
            let k = vecs.len();
            let mut coeffs: Vec<T> = c.into_iter().map(|x| -x).collect();
            coeffs.push(T::one());
            debug_assert_eq!(coeffs.len(), k + 1);
            return Poly::new(coeffs);
        }
        let next = m.row_apply(&cur);
        vecs.push(cur);
        cur = next;
    }
}

/// Coefficients `c` with `target = sum c_i vecs[i]`, if any.
fn express_in_span<T: Field>(vecs: &[Vec<T>], target: &[T]) -> Option<Vec<T>> {
    if vecs.is_empty() {
        return target.iter().all(|x| x.is_zero()).then(Vec::new);
    }
    let n = target.len();
    let k = vecs.len();
    let mut aug = Matrix::zeros(n, k + 1);
    for (j, v) in vecs.iter().enumerate() {
        for i in 0..n {
            aug[(i, j)] = v[i].clone();
        }
    }
    for i in 0..n {
        aug[(i, k)] = target[i].clone();
    }
    let (r, pivots) = aug.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut c = vec![T::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        c[pc] = r[(row, k)].clone();
    }
    Some(c)
}

/// Decides whether every root of `mu` (a divisor of some power of the
/// characteristic polynomial, over `Q` or the field of the Perron
/// eigenvalue) has modulus below one.
pub fn all_roots_small(mu: &Poly<Scalar>, spec: &Spectral) -> Result<LargeComponent> {
    if mu.deg() == 0 {
        return Ok(LargeComponent::Zero);
    }
    let mut covered = 0;
    for block in &spec.blocks.blocks {
        let fe: Poly<Scalar> = block
            .factor
            .pow(block.multiplicity)
            .to_qpoly()
            .map(|c| Scalar::rational(c.clone()));
        let h = mu.gcd(&fe);
        let dh = h.deg();
        if dh == 0 {
            continue;
        }
        covered += dh;
        let class = &block.class;
        if class.large_or_unit() == 0 {
            continue;
        }
        let witness = format!("eigenvalue of modulus >= 1 with minimal polynomial {}", block.factor);
        if class.small == 0 {
            return Ok(LargeComponent::Nonzero { witness });
        }
        // Mixed factor: count the roots of h inside a radius that separates
        // the small roots of the factor from the rest.
        let s0 = class.small_radius.clone().expect("factor with small roots has a radius");
        let mut decided = None;
        for j in 0..16 {
            let r = &s0 + (qi(1) - &s0) * Q::new(j.into(), 16.into());
            if let Some(c) = count_inside_radius(&h, &r)? {
                decided = Some(c);
                break;
            }
        }
        match decided {
            Some(c) if c == dh => {}
            Some(_) => return Ok(LargeComponent::Nonzero { witness }),
            None => {
                return Ok(LargeComponent::Undecided {
                    reason: format!("root count for a divisor of {} stayed singular", block.factor),
                })
            }
        }
    }
    if covered != mu.deg() {
        return Ok(LargeComponent::Undecided {
            reason: "minimal polynomial does not divide the characteristic polynomial".into(),
        });
    }
    Ok(LargeComponent::Zero)
}

/// Decides whether the row vector `r` lies in the span of the generalized
/// left eigenvectors of `M` for eigenvalues of modulus below one, i.e.
/// whether `r M^m -> 0`.
pub fn large_component(r: &[Scalar], spec: &Spectral) -> Result<LargeComponent> {
    if r.iter().all(|x| x.is_zero()) {
        return Ok(LargeComponent::Zero);
    }
    let m: Matrix<Scalar> = spec.matrix_over();
    let mu = krylov_minpoly(r, &m);
    all_roots_small(&mu, spec)
}

/// Berlekamp–Massey: the monic characteristic polynomial of the shortest
/// linear recurrence generating `s`.
pub fn berlekamp_massey<T: Field>(s: &[T]) -> Poly<T> {
    let mut c: Vec<T> = vec![T::one()];
    let mut b: Vec<T> = vec![T::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = T::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l {
            if i < c.len() {
                d = d + &(c[i].clone() * &s[n - i]);
            }
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = d.clone() / &bd;
        let t = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, T::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            c[i + m] = c[i + m].clone() - &(coef.clone() * bi);
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = t;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, T::zero());
    c.reverse();
    Poly::new(c)
}

/// True when `mu` annihilates the whole sequence `s` as a recurrence.
pub fn recurrence_holds<T: Field>(mu: &Poly<T>, s: &[T]) -> bool {
    let d = mu.deg();
    (0..s.len().saturating_sub(d)).all(|t| {
        let mut acc = T::zero();
        for (i, c) in mu.coeffs().iter().enumerate() {
            acc = acc + &(c.clone() * &s[t + i]);
        }
        acc.is_zero()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::IntMatrix;

    fn spec(rows: &[Vec<i64>]) -> Spectral {
        Spectral::new(&IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn fibonacci_pairing_zero() {
        let s = spec(&[vec![0, 1], vec![1, 1]]);
        let tau = s.lambda().clone();
        let half = Scalar::rational(crate::algebra::field::q(1, 2));
        let r = vec![-(tau * &half), half];
        assert_eq!(large_component(&r, &s).unwrap(), LargeComponent::Zero);
        let r = vec![Scalar::int(1), Scalar::int(0)];
        assert!(matches!(large_component(&r, &s).unwrap(), LargeComponent::Nonzero { .. }));
    }

    #[test]
    fn all_large_matrix() {
        let s = spec(&[vec![4, 2], vec![2, 4]]);
        let r = vec![Scalar::int(1), Scalar::int(-1)];
        assert!(matches!(large_component(&r, &s).unwrap(), LargeComponent::Nonzero { .. }));
        let r = vec![Scalar::zero(), Scalar::zero()];
        assert_eq!(large_component(&r, &s).unwrap(), LargeComponent::Zero);
    }

    #[test]
    fn berlekamp_massey_fibonacci() {
        let s: Vec<Q> = [0, 1, 1, 2, 3, 5, 8, 13].iter().map(|&x| qi(x)).collect();
        let mu = berlekamp_massey(&s);
        assert_eq!(mu, Poly::new(vec![qi(-1), qi(-1), qi(1)]));
        assert!(recurrence_holds(&mu, &s));
        let g: Vec<Q> = (0..8).map(|k| qi(3 * 2i64.pow(k))).collect();
        assert_eq!(berlekamp_massey(&g), Poly::new(vec![qi(-2), qi(1)]));
    }
}
