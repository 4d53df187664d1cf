//! Perron data, rational block decomposition, and the bundle of spectral
//! facts about a substitution matrix that the analyses share.

use std::cmp::Ordering;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::factor::{factor_int_poly, Factor};
use super::field::{Field, Q};
use super::interval::Interval;
use super::intpoly::IntPolynomial;
use super::matrix::{IntMatrix, Matrix};
use super::numfield::{NumberField, Scalar};
use super::roots::{classify_roots, compare_roots, isolate_real_roots, RootClass};
use crate::{Error, Result};

/// Perron–Frobenius eigenvalue with positive left and right eigenvectors,
/// both normalized so that their first entry is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerronData {
    pub lambda: Scalar,
    /// Minimal polynomial of the eigenvalue.
    pub factor: IntPolynomial,
    pub left: Vec<Scalar>,
    pub right: Vec<Scalar>,
}

impl PerronData {
    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.lambda.field()
    }

    pub fn approx(&self) -> f64 {
        self.lambda.approx()
    }
}

/// The Perron eigenvalue of a primitive matrix and its eigenvectors, exact
/// in `Q(lambda)`.
pub fn perron_data(m: &IntMatrix) -> Result<PerronData> {
    let factors = factor_int_poly(&m.char_poly());
    perron_from_factors(m, &factors)
}

fn perron_from_factors(m: &IntMatrix, factors: &[Factor]) -> Result<PerronData> {
    let mut best: Option<(usize, Interval)> = None;
    for (idx, f) in factors.iter().enumerate() {
        let fq = f.poly.to_qpoly();
        let Some(mut top) = isolate_real_roots(&fq).pop() else { continue };
        best = match best {
            None => Some((idx, top)),
            Some((bi, mut biv)) => {
                let bq = factors[bi].poly.to_qpoly();
                if compare_roots(&fq, &mut top, &bq, &mut biv) == Ordering::Greater {
                    Some((idx, top))
                } else {
                    Some((bi, biv))
                }
            }
        };
    }
    let (idx, iv) = best.ok_or(Error::NotPrimitive)?;
    let factor = factors[idx].poly.clone();
    let lambda = if factor.degree() == 1 {
        Scalar::rational(Q::new(-factor.coeff(0), factor.coeff(1)))
    } else {
        NumberField::new(&factor.to_qpoly(), iv)?.generator()
    };
    let n = m.rows();
    let ms: Matrix<Scalar> = m.to_field();
    let shifted = ms.sub(&Matrix::identity(n).scale(&lambda));
    let right = normalized_kernel_vector(&shifted)?;
    let left = normalized_kernel_vector(&shifted.transpose())?;
    for x in left.iter().chain(&right) {
        if x.signum_exact()? != Ordering::Greater {
            return Err(Error::NotPrimitive);
        }
    }
    Ok(PerronData { lambda, factor, left, right })
}

fn normalized_kernel_vector(a: &Matrix<Scalar>) -> Result<Vec<Scalar>> {
    let ns = a.nullspace();
    if ns.len() != 1 {
        return Err(Error::NotPrimitive);
    }
    let v = &ns[0];
    if v[0].is_zero() {
        return Err(Error::NotPrimitive);
    }
    let inv = Scalar::one() / &v[0];
    Ok(v.iter().map(|x| x.clone() * &inv).collect())
}

/// One primary component: the kernel of `f(M)^e` for an irreducible factor
/// `f` of multiplicity `e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub factor: IntPolynomial,
    pub multiplicity: usize,
    pub class: RootClass,
    /// Basis vectors (columns of the change of basis) spanning the block.
    #[serde(with = "crate::io::serde_exact::rational_vecs")]
    pub basis: Vec<Vec<Q>>,
    /// The restriction of `M` to the block in that basis.
    #[serde(with = "crate::io::serde_exact::rational_matrix")]
    pub matrix: Matrix<Q>,
    pub is_perron: bool,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDecomposition {
    /// `P`, whose columns are the concatenated block bases.
    #[serde(with = "crate::io::serde_exact::rational_matrix")]
    pub change_of_basis: Matrix<Q>,
    /// `P^-1 M P`, block diagonal.
    #[serde(with = "crate::io::serde_exact::rational_matrix")]
    pub conjugated: Matrix<Q>,
    pub blocks: Vec<Block>,
    pub perron_block: Option<usize>,
    /// Roots of the Perron factor of modulus at least one.
    pub b_pf: usize,
    /// Roots of the Perron factor of modulus below one.
    pub s_pf: usize,
}

impl BlockDecomposition {
    /// Reassembles `P A P^-1`; equals `M` exactly.
    pub fn reconstruct(&self) -> Matrix<Q> {
        let inv = self.change_of_basis.inverse().expect("change of basis is invertible");
        self.change_of_basis.mul(&self.conjugated).mul(&inv)
    }
}

pub fn block_decomposition(m: &IntMatrix) -> Result<BlockDecomposition> {
    let factors = factor_int_poly(&m.char_poly());
    let perron = perron_from_factors(m, &factors).ok().map(|p| p.factor);
    let classes = factors.iter().map(|f| classify_roots(&f.poly)).collect::<Result<Vec<_>>>()?;
    blocks_from_factors(m, &factors, &classes, perron.as_ref())
}

fn blocks_from_factors(
    m: &IntMatrix,
    factors: &[Factor],
    classes: &[RootClass],
    perron: Option<&IntPolynomial>,
) -> Result<BlockDecomposition> {
    let n = m.rows();
    let mq: Matrix<Q> = m.to_field();
    let mut cols: Vec<Vec<Q>> = Vec::new();
    let mut spans = Vec::new();
    for f in factors {
        let fe = f.poly.pow(f.multiplicity).to_qpoly();
        let k = mq.eval_poly(&fe);
        let basis = k.nullspace();
        if basis.len() != f.poly.degree() * f.multiplicity {
            return Err(Error::Invalid(format!(
                "kernel of ({})^{} has dimension {} instead of {}",
                f.poly,
                f.multiplicity,
                basis.len(),
                f.poly.degree() * f.multiplicity
            )));
        }
        spans.push((cols.len(), basis.len()));
        cols.extend(basis);
    }
    let p = Matrix::from_cols(&cols);
    let pinv = p.inverse().ok_or_else(|| Error::Invalid("block bases are dependent".into()))?;
    let a = pinv.mul(&mq).mul(&p);
    let mut blocks = Vec::new();
    let mut perron_block = None;
    for (bi, (f, &(start, len))) in factors.iter().zip(&spans).enumerate() {
        for i in 0..n {
            for j in 0..n {
                let inside = (start..start + len).contains(&i) && (start..start + len).contains(&j);
                let diag = (start..start + len).contains(&j);
                if diag && !inside && !a[(i, j)].is_zero() {
                    return Err(Error::Invalid("conjugated matrix is not block diagonal".into()));
                }
            }
        }
        let mut bm = Matrix::zeros(len, len);
        for i in 0..len {
            for j in 0..len {
                bm[(i, j)] = a[(start + i, start + j)].clone();
            }
        }
        let is_perron = perron == Some(&f.poly);
        if is_perron {
            perron_block = Some(bi);
        }
        let mut class = classes[bi].clone();
        class.conjugate_to_perron = is_perron;
        blocks.push(Block {
            factor: f.poly.clone(),
            multiplicity: f.multiplicity,
            class,
            basis: cols[start..start + len].to_vec(),
            matrix: bm,
            is_perron,
        });
    }
    let (b_pf, s_pf) = perron_block
        .map(|i| (blocks[i].class.large_or_unit(), blocks[i].class.small))
        .unwrap_or((0, 0));
    Ok(BlockDecomposition { change_of_basis: p, conjugated: a, blocks, perron_block, b_pf, s_pf })
}

/// Everything the analyses need to know about a primitive substitution
/// matrix, computed once.
#[derive(Clone, Debug)]
pub struct Spectral {
    pub matrix: IntMatrix,
    pub char_poly: IntPolynomial,
    pub factors: Vec<Factor>,
    pub perron: PerronData,
    pub blocks: BlockDecomposition,
}

impl Spectral {
    pub fn new(m: &IntMatrix) -> Result<Spectral> {
        let char_poly = m.char_poly();
        let factors = factor_int_poly(&char_poly);
        let perron = perron_from_factors(m, &factors)?;
        let classes = factors.iter().map(|f| classify_roots(&f.poly)).collect::<Result<Vec<_>>>()?;
        let blocks = blocks_from_factors(m, &factors, &classes, Some(&perron.factor))?;
        Ok(Spectral { matrix: m.clone(), char_poly, factors, perron, blocks })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn lambda(&self) -> &Scalar {
        &self.perron.lambda
    }

    pub fn classes(&self) -> impl Iterator<Item = &RootClass> {
        self.blocks.blocks.iter().map(|b| &b.class)
    }

    /// True when no eigenvalue has modulus below one.
    pub fn all_eigenvalues_large(&self) -> bool {
        self.classes().all(|c| c.small == 0)
    }

    /// Eigenvalues of modulus at least one, counted with multiplicity.
    pub fn d_b(&self) -> usize {
        self.blocks.blocks.iter().map(|b| b.class.large_or_unit() * b.multiplicity).sum()
    }

    /// Dimension of the sum of generalized eigenspaces for small eigenvalues.
    pub fn small_dimension(&self) -> usize {
        self.blocks.blocks.iter().map(|b| b.class.small * b.multiplicity).sum()
    }

    pub fn has_salem_factor(&self) -> bool {
        self.classes().any(|c| c.salem_type)
    }

    pub fn matrix_over<T: Field>(&self) -> Matrix<T> {
        self.matrix.to_field()
    }

    /// Row vector `L M^k` for `k >= 0`.
    pub fn row_times_power(&self, l: &[Scalar], k: u32) -> Vec<Scalar> {
        let m: Matrix<Scalar> = self.matrix_over();
        let mut r = l.to_vec();
        for _ in 0..k {
            r = m.row_apply(&r);
        }
        r
    }

    /// The Perron pairing `L . w` with the right Perron vector.
    pub fn perron_pairing(&self, l: &[Scalar]) -> Scalar {
        l.iter().zip(&self.perron.right).fold(Scalar::zero(), |s, (a, b)| s + &(a.clone() * b))
    }

    pub fn is_perron_rational(&self) -> bool {
        self.perron.lambda.is_rational()
    }

    /// `lambda^k` for any integer `k`.
    pub fn lambda_pow(&self, k: i64) -> Scalar {
        let p = self.perron.lambda.pow(k.unsigned_abs() as u32);
        if k >= 0 {
            p
        } else {
            Scalar::one() / &p
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn perron_examples() {
        let p = perron_data(&IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]])).unwrap();
        assert_eq!(p.lambda, Scalar::int(6));
        assert_eq!(p.left, vec![Scalar::int(1), Scalar::int(1)]);
        let dk = perron_data(&IntMatrix::from_rows(&[vec![2, 1], vec![2, 3]])).unwrap();
        assert_eq!(dk.lambda, Scalar::int(4));
        assert_eq!(dk.left, vec![Scalar::int(1), Scalar::int(1)]);
        assert_eq!(dk.right, vec![Scalar::int(1), Scalar::int(2)]);
        let fib = perron_data(&IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]])).unwrap();
        let tau = fib.lambda.clone();
        assert_eq!(fib.left, vec![Scalar::int(1), tau.clone()]);
        assert!((tau.approx() - 1.618_033_988_749_895).abs() < 1e-12);
    }

    #[test]
    fn blocks_examples() {
        let b = block_decomposition(&IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]])).unwrap();
        assert_eq!(b.blocks.len(), 2);
        assert_eq!((b.b_pf, b.s_pf), (1, 0));
        assert_eq!(b.reconstruct(), IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]]).to_field());
        let f = block_decomposition(&IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]])).unwrap();
        assert_eq!(f.blocks.len(), 1);
        assert_eq!((f.b_pf, f.s_pf), (1, 1));
        let id = block_decomposition(&IntMatrix::identity(2)).unwrap();
        assert_eq!(id.blocks.len(), 1);
        assert_eq!(id.blocks[0].multiplicity, 2);
        assert_eq!(id.blocks[0].matrix, Matrix::identity(2));
        let _ = qi(0);
    }
}
