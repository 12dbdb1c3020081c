//! Dense matrices over any [`Ring`], with exact linear algebra over `ℚ`.

use crate::error::{Error, Result};
use crate::ring::{rat, Ring};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RationalMatrix = Matrix<BigRational>;

impl<T: Ring> Matrix<T> {
    /// Panics on ragged input; callers that parse untrusted data check first.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(proto: &T, rows: usize, cols: usize) -> Self {
        let z = proto.zero_like();
        Self {
            rows,
            cols,
            data: vec![z; rows * cols],
        }
    }

    pub fn identity(proto: &T, n: usize) -> Self {
        let mut m = Self::zeros(proto, n, n);
        for i in 0..n {
            m.data[i * n + i] = proto.one_like();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.plus(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_exact_zero() {
                *a = a.plus(b);
            }
        }
    }

    pub fn neg(&self) -> Self {
        self.map(Ring::negated)
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        self.map(|x| x.scaled(factor))
    }

    pub fn scale_by(&self, factor: &T) -> Self {
        self.map(|x| x.times(factor))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let proto = self.data.first().or(other.data.first());
        let mut out: Vec<Option<T>> = vec![None; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_exact_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_exact_zero() {
                        continue;
                    }
                    let slot = &mut out[i * other.cols + j];
                    let term = a.times(b);
                    *slot = Some(match slot.take() {
                        Some(acc) => acc.plus(&term),
                        None => term,
                    });
                }
            }
        }
        let zero = proto.map(Ring::zero_like);
        Matrix {
            rows: self.rows,
            cols: other.cols,
            data: out
                .into_iter()
                .map(|x| x.unwrap_or_else(|| zero.clone().expect("empty matrix product")))
                .collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = v[0].zero_like();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_exact_zero() && !x.is_exact_zero() {
                        acc = acc.plus(&a.times(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.data.iter().all(Ring::is_exact_zero)
    }

    pub fn trace(&self) -> T {
        assert!(self.is_square());
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows {
            acc = acc.plus(self.get(i, i));
        }
        acc
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(&self.data[0], self.rows);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }
}

impl RationalMatrix {
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::zeros(&BigRational::zero(), rows, cols)
    }

    pub fn eye(n: usize) -> Self {
        Self::identity(&BigRational::zero(), n)
    }

    pub fn diagonal(values: &[BigRational]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i].clone() } else { BigRational::zero() })
    }

    /// Row-reduced echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            for j in 0..m.cols {
                m.data.swap(r * m.cols + j, pr * m.cols + j);
            }
            let inv = m.get(r, c).recip();
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in 0..m.cols {
                    let v = m.get(i, j) - &f * m.get(r, j);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn determinant(&self) -> BigRational {
        assert!(self.is_square());
        let n = self.rows;
        let mut m = self.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return BigRational::zero();
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(c * n + j, pr * n + j);
                }
                det = -det;
            }
            let piv = m.get(c, c).clone();
            det *= &piv;
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c) / &piv;
                for j in c..n {
                    let v = m.get(i, j) - &f * m.get(c, j);
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    /// Solves `self · X = rhs`; errors unless the solution exists and is unique.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} system with {} right-hand rows",
                self.rows, self.cols, rhs.rows
            )));
        }
        let aug = Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                rhs.get(i, j - self.cols).clone()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() != self.cols || pivots.iter().any(|&c| c >= self.cols) {
            return Err(Error::NotInvertible(
                "linear system has no unique solution".to_string(),
            ));
        }
        for i in self.cols..self.rows {
            if (0..rhs.cols).any(|j| !red.get(i, self.cols + j).is_zero()) {
                return Err(Error::NotInvertible("linear system is inconsistent".to_string()));
            }
        }
        Ok(Self::from_fn(self.cols, rhs.cols, |i, j| red.get(i, self.cols + j).clone()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".to_string()));
        }
        self.solve(&Self::eye(self.rows))
    }

    pub fn is_nilpotent(&self) -> bool {
        self.is_square() && self.pow(self.rows as u32).is_exact_zero()
    }

    pub fn column(values: &[BigRational]) -> Self {
        Self::from_fn(values.len(), 1, |i, _| values[i].clone())
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ratio;
    use proptest::prelude::*;

    #[test]
    fn determinant_and_inverse() {
        let m = RationalMatrix::from_ints(&[&[2, 1], &[7, 4]]);
        assert_eq!(m.determinant(), rat(1));
        let inv = m.inverse().unwrap();
        assert_eq!(inv, RationalMatrix::from_ints(&[&[4, -1], &[-7, 2]]));
        let s = RationalMatrix::from_ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.rank(), 1);
        assert!(matches!(s.inverse(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn nilpotency() {
        assert!(RationalMatrix::from_ints(&[&[0, 0], &[1, 0]]).is_nilpotent());
        assert!(!RationalMatrix::eye(2).is_nilpotent());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec((-9i64..10, 1i64..4), n * n).prop_map(move |v| {
            RationalMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| ratio(a, b)).collect())
        })
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative(a in small_matrix(3), b in small_matrix(3)) {
            prop_assert_eq!(a.mul(&b).determinant(), a.determinant() * b.determinant());
        }

        #[test]
        fn inverse_round_trips(a in small_matrix(3)) {
            if let Ok(inv) = a.inverse() {
                prop_assert_eq!(a.mul(&inv), RationalMatrix::eye(3));
            } else {
                prop_assert!(a.determinant().is_zero());
            }
        }
    }
}
