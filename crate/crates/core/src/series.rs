//! Truncated power series: scalar series (themselves a [`Ring`]) and matrix series.

use crate::matrix::{Matrix, RationalMatrix};
use crate::ring::{rat, Ring};
use num_rational::BigRational;
use std::fmt;

/// `c_0 + c_1 x + ⋯ + c_N x^N + O(x^{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> Series<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least its constant term");
        Self { coeffs }
    }

    pub fn constant(value: T, order: usize) -> Self {
        let z = value.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> &T {
        &self.coeffs[m]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn map<U: Ring>(&self, f: impl FnMut(&T) -> U) -> Series<U> {
        Series {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

impl<T: Ring> Ring for Series<T> {
    fn zero_like(&self) -> Self {
        Self {
            coeffs: vec![self.coeffs[0].zero_like(); self.coeffs.len()],
        }
    }
    fn one_like(&self) -> Self {
        Self::constant(self.coeffs[0].one_like(), self.order())
    }
    fn plus(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].plus(&other.coeffs[i])).collect(),
        }
    }
    fn minus(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].minus(&other.coeffs[i])).collect(),
        }
    }
    fn times(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let mut out = vec![self.coeffs[0].zero_like(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if !b.is_exact_zero() {
                    out[i + j] = out[i + j].plus(&a.times(b));
                }
            }
        }
        Self { coeffs: out }
    }
    fn negated(&self) -> Self {
        self.map(Ring::negated)
    }
    fn scaled(&self, factor: &BigRational) -> Self {
        self.map(|c| c.scaled(factor))
    }
    fn is_exact_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_exact_zero)
    }
}

impl<T: fmt::Display> fmt::Display for Series<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})q^{i}")?;
        }
        write!(f, " + O(q^{})", self.coeffs.len())
    }
}

/// Name of the series variable: `q` for the normalized coordinate, `t` for the original one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    Q,
    T,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variable::Q => "q",
            Variable::T => "t",
        })
    }
}

/// A truncated series with square matrix coefficients `M_0 + M_1 x + ⋯ + M_N x^N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixSeries<T> {
    coeffs: Vec<Matrix<T>>,
    variable: Variable,
}

impl<T: Ring> MatrixSeries<T> {
    pub fn new(coeffs: Vec<Matrix<T>>, variable: Variable) -> Self {
        assert!(!coeffs.is_empty());
        let n = coeffs[0].rows();
        assert!(
            coeffs.iter().all(|m| m.rows() == n && m.cols() == n),
            "matrix series coefficients must share one square shape"
        );
        Self { coeffs, variable }
    }

    pub fn constant(m: Matrix<T>, order: usize, variable: Variable) -> Self {
        let z = Matrix::zeros(&m.entries()[0], m.rows(), m.cols());
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = m;
        Self { coeffs, variable }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].rows()
    }

    pub fn variable(&self) -> Variable {
        self.variable
    }

    pub fn coeffs(&self) -> &[Matrix<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> &Matrix<T> {
        &self.coeffs[m]
    }

    pub fn into_coeffs(self) -> Vec<Matrix<T>> {
        self.coeffs
    }

    fn proto(&self) -> &T {
        &self.coeffs[0].entries()[0]
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
            variable: self.variable,
        }
    }

    pub fn map<U: Ring>(&self, mut f: impl FnMut(&T) -> U) -> MatrixSeries<U> {
        MatrixSeries {
            coeffs: self.coeffs.iter().map(|m| m.map(&mut f)).collect(),
            variable: self.variable,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
            variable: self.variable,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Self {
            coeffs: (0..=n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect(),
            variable: self.variable,
        }
    }

    /// Truncated product at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        let d = self.dim();
        let mut out = vec![Matrix::zeros(self.proto(), d, d); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_exact_zero() {
                continue;
            }
            for j in 0..=n - i {
                if !other.coeffs[j].is_exact_zero() {
                    out[i + j].add_assign(&self.coeffs[i].mul(&other.coeffs[j]));
                }
            }
        }
        Self {
            coeffs: out,
            variable: self.variable,
        }
    }

    /// `x·d/dx` applied coefficientwise: `M_m ↦ m·M_m`.
    pub fn euler_derivative(&self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| c.scale(&rat(m as i64)))
                .collect(),
            variable: self.variable,
        }
    }

    /// Substitution `q ↦ −q^p/p`, truncated at the same order.
    pub fn pullback(&self, p: u32) -> Self {
        let n = self.order();
        let d = self.dim();
        let mut out = vec![Matrix::zeros(self.proto(), d, d); n + 1];
        let step = -BigRational::new(1.into(), p.into());
        let mut factor = rat(1);
        for j in 0..=n {
            let target = j * p as usize;
            if target > n {
                break;
            }
            out[target] = self.coeffs[j].scale(&factor);
            factor *= &step;
        }
        Self {
            coeffs: out,
            variable: self.variable,
        }
    }

    /// Inverse of a series whose constant term has the given inverse.
    pub fn inverse_with(&self, constant_inverse: &Matrix<T>) -> Self {
        let n = self.order();
        let d = self.dim();
        let mut out: Vec<Matrix<T>> = Vec::with_capacity(n + 1);
        out.push(constant_inverse.clone());
        for m in 1..=n {
            let mut acc = Matrix::zeros(self.proto(), d, d);
            for i in 1..=m {
                if !self.coeffs[i].is_exact_zero() {
                    acc.add_assign(&self.coeffs[i].mul(&out[m - i]));
                }
            }
            out.push(constant_inverse.mul(&acc).neg());
        }
        Self {
            coeffs: out,
            variable: self.variable,
        }
    }

    /// The scalar series of entry `(i, j)`.
    pub fn entry_series(&self, i: usize, j: usize) -> Series<T> {
        Series::new(self.coeffs.iter().map(|m| m.get(i, j).clone()).collect())
    }

    /// The matrix over the scalar series ring.
    pub fn to_series_matrix(&self) -> Matrix<Series<T>> {
        let d = self.dim();
        Matrix::from_fn(d, d, |i, j| self.entry_series(i, j))
    }

    pub fn from_series_matrix(m: &Matrix<Series<T>>, variable: Variable) -> Self {
        let n = m.entries().iter().map(Series::order).min().unwrap_or(0);
        let coeffs = (0..=n)
            .map(|k| m.map(|s| s.coeff(k).clone()))
            .collect();
        Self { coeffs, variable }
    }
}

impl MatrixSeries<BigRational> {
    pub fn inverse(&self) -> crate::error::Result<Self> {
        let inv = self.coeffs[0].inverse()?;
        Ok(self.inverse_with(&inv))
    }
}

/// A finite matrix polynomial, stored densely by power.
pub fn poly_to_series(coeffs: &[RationalMatrix], order: usize, variable: Variable) -> MatrixSeries<BigRational> {
    let d = coeffs[0].rows();
    let out = (0..=order)
        .map(|m| coeffs.get(m).cloned().unwrap_or_else(|| RationalMatrix::zero(d, d)))
        .collect();
    MatrixSeries::new(out, variable)
}
