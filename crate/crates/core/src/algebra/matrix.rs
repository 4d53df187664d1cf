use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::field::{Field, Q};
use super::intpoly::IntPolynomial;
use super::poly::Poly;

/// Square or rectangular integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = BigInt::from(*v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.data[i * self.cols..(i + 1) * self.cols].to_vec()).collect()
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    out[(i, j)] += a * &o[(k, j)];
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        let mut acc = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// `M v` for a column vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn apply_u64(&self, v: &[u64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.apply(&v)
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn map<T: Field>(&self, f: impl Fn(&BigInt) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_field<T: Field>(&self) -> Matrix<T> {
        self.map(|x| T::from_rational(&Q::from_integer(x.clone())))
    }

    /// Characteristic polynomial `det(x I - M)` by Faddeev–LeVerrier, exact
    /// over the rationals (the divisions are exact in the integers).
    pub fn char_poly(&self) -> IntPolynomial {
        assert_eq!(self.rows, self.cols, "char_poly needs a square matrix");
        let n = self.rows;
        let a: Matrix<Q> = self.to_field();
        let mut coeffs = vec![Q::zero(); n + 1];
        coeffs[n] = Q::one();
        let mut mk = Matrix::<Q>::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
            let mut next = a.mul(&mk);
            for i in 0..n {
                next[(i, i)] = next[(i, i)].clone() + &coeffs[n - k + 1];
            }
            let am = a.mul(&next);
            let tr = (0..n).fold(Q::zero(), |s, i| s + &am[(i, i)]);
            coeffs[n - k] = -tr / Q::from_integer(BigInt::from(k));
            mk = next;
        }
        IntPolynomial::new(coeffs.into_iter().map(|c| c.to_integer()).collect())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.to_rows().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<crate::io::serde_exact::Int>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(crate::io::serde_exact::Int).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<crate::io::serde_exact::Int>> = Vec::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(serde::de::Error::custom("ragged matrix"));
            }
            for (j, x) in row.into_iter().enumerate() {
                m[(i, j)] = x.0;
            }
        }
        Ok(m)
    }
}

/// Dense matrix over an exact field, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Field> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<T> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged matrix");
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, o: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, o.rows);
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let t = a.clone() * &o[(k, j)];
                    out[(i, j)] = out[(i, j)].clone() + &t;
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Matrix<T>) -> Matrix<T> {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Matrix<T>) -> Matrix<T> {
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.clone() - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * c).collect() }
    }

    /// `M v` for a column vector.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    /// `r M` for a row vector.
    pub fn row_apply(&self, r: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |s, i| s + &(r[i].clone() * &self[(i, j)])))
            .collect()
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// `p(M)` by Horner's rule.
    pub fn eval_poly(&self, p: &Poly<T>) -> Matrix<T> {
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::identity(n).scale(c));
        }
        acc
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = T::one() / &m[(r, c)];
            for j in 0..m.cols {
                m[(r, j)] = m[(r, j)].clone() * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let t = f.clone() * &m[(r, j)];
                        m[(i, j)] = m[(i, j)].clone() - &t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(&self) -> Option<Matrix<T>> {
        let n = self.rows;
        if n != self.cols {
            return None;
        }
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = T::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Solves `x A = b` for a row vector `x` when `A` is square and invertible.
    pub fn solve_row(&self, b: &[T]) -> Option<Vec<T>> {
        let inv = self.inverse()?;
        Some(inv.row_apply(b))
    }
}

pub fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (x, y)| s + &(x.clone() * y))
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::qi;

    #[test]
    fn char_poly_examples() {
        let m = IntMatrix::from_rows(&[vec![4, 2], vec![2, 4]]);
        assert_eq!(m.char_poly(), IntPolynomial::from_i64(&[12, -8, 1]));
        let f = IntMatrix::from_rows(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(f.char_poly(), IntPolynomial::from_i64(&[-1, -1, 1]));
        assert_eq!(IntMatrix::identity(2).char_poly(), IntPolynomial::from_i64(&[1, -2, 1]));
        let m3 = IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 3], vec![4, 0, 1]]);
        // det(xI - M) = (x-1)^3 - 24
        assert_eq!(m3.char_poly(), IntPolynomial::from_i64(&[-25, 3, -3, 1]));
    }

    #[test]
    fn nullspace_and_inverse() {
        let m: Matrix<Q> = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]).to_field();
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![qi(-2), qi(1)]]);
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_none());
        let a: Matrix<Q> = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]).to_field();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
    }
}
