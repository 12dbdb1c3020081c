//! Quantum connections `∇ = q∂_q + Ā_0 + Ā_1 q + ⋯` with nilpotent `Ā_0`,
//! their registry and file format, and the order-by-order solvers.

mod builtin;
mod format;
mod solve;

pub use builtin::{builtin, builtin_catalog, builtin_names, dwork, projective, BuiltinInfo};
pub use format::{parse_connection, serialize_connection};
pub use solve::{
    combine_basis_solutions, frobenius_from_gauge, frobenius_residual, gauge_floor_violations,
    gauge_residual,
    solve_frobenius, solve_frobenius_basis, solve_frobenius_unchecked, solve_gamma_frobenius, solve_gamma_frobenius_auto,
    solve_gauge, BasisSolution, FrobeniusSolution, GammaFrobenius, GaugeSolution,
};

use crate::error::{Error, Result};
use crate::gamma_class::{grade_columns, CohomologyRing, ChernCharacterData, GammaMonomialDecomposition};
use crate::matrix::RationalMatrix;
use crate::padic::PrimeContext;
use crate::poly::GammaPolynomial;
use crate::series::{poly_to_series, MatrixSeries, Variable};
use num_rational::BigRational;
use num_traits::Zero;

/// `Γ_p(TM) = Σ_k γ^k b^k` stored through the cup-product matrices of the `b^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionDecomposition {
    terms: Vec<(GammaPolynomial, RationalMatrix)>,
}

impl ConnectionDecomposition {
    pub fn new(terms: Vec<(GammaPolynomial, RationalMatrix)>) -> Self {
        Self { terms }
    }

    /// From a ring decomposition: each `b^k` becomes its cup-product matrix.
    pub fn from_ring(ring: &CohomologyRing, dec: &GammaMonomialDecomposition) -> Self {
        Self {
            terms: dec
                .terms()
                .iter()
                .map(|t| (t.poly.clone(), ring.cup_matrix(&t.element)))
                .collect(),
        }
    }

    pub fn from_chern(ring: &CohomologyRing, chern: &ChernCharacterData) -> Self {
        Self::from_ring(ring, &crate::gamma_class::gamma_monomial_decomposition(ring, chern))
    }

    pub fn terms(&self) -> &[(GammaPolynomial, RationalMatrix)] {
        &self.terms
    }

    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|(g, _)| g.max_order()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    name: String,
    coeffs: Vec<RationalMatrix>,
    degrees: Vec<u32>,
    dim_c: u32,
    betti: Vec<(u32, u32)>,
    decomposition: Option<ConnectionDecomposition>,
}

impl Connection {
    /// Validates shapes and nilpotency of `Ā_0`; trailing zero coefficients are dropped.
    pub fn new(
        name: impl Into<String>,
        mut coeffs: Vec<RationalMatrix>,
        degrees: Vec<u32>,
        dim_c: u32,
        betti: Vec<(u32, u32)>,
        decomposition: Option<ConnectionDecomposition>,
    ) -> Result<Self> {
        let name = name.into();
        let Some(first) = coeffs.first() else {
            return Err(Error::DimensionMismatch("connection has no coefficients".to_string()));
        };
        let r = first.rows();
        if r == 0 {
            return Err(Error::DimensionMismatch("connection of rank 0".to_string()));
        }
        for (m, a) in coeffs.iter().enumerate() {
            if a.rows() != r || a.cols() != r {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient of q^{m} is {}x{}, expected {r}x{r}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        if degrees.len() != r {
            return Err(Error::DimensionMismatch(format!(
                "{} degrees for a rank {r} connection",
                degrees.len()
            )));
        }
        let betti_total: u32 = betti.iter().map(|&(_, b)| b).sum();
        if betti_total as usize != r {
            return Err(Error::DimensionMismatch(format!(
                "Betti numbers sum to {betti_total}, rank is {r}"
            )));
        }
        if let Some(dec) = &decomposition {
            if dec.terms.iter().any(|(_, m)| m.rows() != r || m.cols() != r) {
                return Err(Error::DimensionMismatch(
                    "decomposition matrix has the wrong size".to_string(),
                ));
            }
        }
        if !coeffs[0].is_nilpotent() {
            return Err(Error::NotNilpotent(format!(
                "Ā_0^{r} ≠ 0 for connection `{name}`"
            )));
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|m| m.is_exact_zero()) {
            coeffs.pop();
        }
        Ok(Self {
            name,
            coeffs,
            degrees,
            dim_c,
            betti,
            decomposition,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.coeffs[0].rows()
    }

    /// Highest power of `q` with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RationalMatrix] {
        &self.coeffs
    }

    /// `Ā_m`, zero beyond the degree.
    pub fn coeff(&self, m: usize) -> RationalMatrix {
        self.coeffs
            .get(m)
            .cloned()
            .unwrap_or_else(|| RationalMatrix::zero(self.rank(), self.rank()))
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn dim_c(&self) -> u32 {
        self.dim_c
    }

    pub fn betti(&self) -> &[(u32, u32)] {
        &self.betti
    }

    pub fn decomposition(&self) -> Option<&ConnectionDecomposition> {
        self.decomposition.as_ref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// `Ā(q)` as a truncated matrix series.
    pub fn series(&self, order: usize) -> MatrixSeries<BigRational> {
        poly_to_series(&self.coeffs, order, Variable::Q)
    }

    /// True when every nonzero entry `(i, j)` of `Ā_m` has `deg_i − deg_j = 2 − 2m`.
    pub fn respects_grading(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(m, a)| {
            (0..self.rank()).all(|i| {
                (0..self.rank()).all(|j| {
                    a.get(i, j).is_zero()
                        || self.degrees[i] as i64 - self.degrees[j] as i64 == 2 - 2 * m as i64
                })
            })
        })
    }

    /// `Φ̄_0 = (b ⌣ ·)·diag(p^{−deg_j/2})` for a cup-product matrix.
    pub fn constant_term_from_cup(&self, ctx: &PrimeContext, cup: &RationalMatrix) -> RationalMatrix {
        grade_columns(ctx, cup, &self.degrees)
    }
}

/// `ad(X) = Ā_0 X − p X Ā_0` applied `2r − 1` times vanishes.
pub fn ad_is_nilpotent(conn: &Connection, p: u32, x: &RationalMatrix) -> bool {
    let a0 = conn.coeff(0);
    let pr = BigRational::from_integer(p.into());
    let mut y = x.clone();
    for _ in 0..2 * conn.rank() - 1 {
        y = a0.mul(&y).sub(&y.mul(&a0).scale(&pr));
    }
    y.is_exact_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    #[test]
    fn rejects_non_nilpotent_and_ragged_input() {
        let r = Connection::new("id", vec![RationalMatrix::eye(2)], vec![0, 2], 1, vec![(0, 1), (2, 1)], None);
        assert!(matches!(r, Err(Error::NotNilpotent(_))));
        let r = Connection::new(
            "bad",
            vec![RationalMatrix::zero(2, 2), RationalMatrix::zero(3, 3)],
            vec![0, 2],
            1,
            vec![(0, 1), (2, 1)],
            None,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ad_nilpotency_on_builtins() {
        for name in builtin_names() {
            let conn = builtin(&name).unwrap();
            let r = conn.rank();
            for p in [3u32, 5] {
                let x = RationalMatrix::from_fn(r, r, |i, j| rat((i * r + j) as i64 + 1));
                assert!(ad_is_nilpotent(&conn, p, &x), "{name}");
            }
        }
    }
}
