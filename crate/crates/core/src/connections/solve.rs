//! Order-by-order solvers.
//!
//! Frobenius structures in the `q`-variable satisfy
//! `q∂_qΦ̄ + Ā(q)Φ̄ − pΦ̄Ā(−q^p/p) = 0` (the pullback of `q∂_q` under
//! `q ↦ −q^p/p` is `p·q∂_q`). Reading off the coefficient of `q^m`:
//!
//! `mΦ̄_m + Ā_0Φ̄_m − pΦ̄_mĀ_0 = −Σ_{i<m} Ā_{m−i}Φ̄_i + Σ_{j≥1} Φ̄_{m−pj}Ā_j(−1)^j p^{1−j}`.
//!
//! `ad(X) = Ā_0X − pXĀ_0` is nilpotent, so `(m + ad)^{-1}` is the finite series
//! `Σ_k (−1)^k ad^k / m^{k+1}`.

use super::Connection;
use crate::error::{Error, Result};
use crate::matrix::{Matrix, RationalMatrix};
use crate::padic::{ApproxPadic, ExtRational, PrimeContext};
use crate::poly::GammaPolynomial;
use crate::ring::{rat, Ring};
use crate::series::{MatrixSeries, Variable};
use crate::special::gamma_derivatives;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct FrobeniusSolution<T> {
    series: MatrixSeries<T>,
    provenance: String,
}

impl<T: Ring> FrobeniusSolution<T> {
    pub fn new(series: MatrixSeries<T>, provenance: impl Into<String>) -> Self {
        Self { series, provenance: provenance.into() }
    }

    pub fn series(&self) -> &MatrixSeries<T> {
        &self.series
    }

    pub fn coeff(&self, m: usize) -> &Matrix<T> {
        self.series.coeff(m)
    }

    pub fn coeffs(&self) -> &[Matrix<T>] {
        self.series.coeffs()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Where `Φ̄_0` came from: a basis monomial, a Gamma class, or an explicit matrix.
    pub fn provenance(&self) -> &str {
        &self.provenance
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugeSolution {
    series: MatrixSeries<BigRational>,
}

impl GaugeSolution {
    pub fn series(&self) -> &MatrixSeries<BigRational> {
        &self.series
    }

    pub fn coeff(&self, m: usize) -> &RationalMatrix {
        self.series.coeff(m)
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }
}

/// Exact solution for one term `γ^k b^k` of the Gamma class decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSolution {
    pub poly: GammaPolynomial,
    pub cup: RationalMatrix,
    pub solution: FrobeniusSolution<BigRational>,
}

/// Full pipeline: basis solutions, their Gamma coefficients and the combination.
#[derive(Clone, Debug)]
pub struct GammaFrobenius {
    pub basis: Vec<BasisSolution>,
    pub gammas: Vec<ApproxPadic>,
    pub solution: FrobeniusSolution<ApproxPadic>,
    pub precision: i64,
}

impl GammaFrobenius {
    /// `H`: the least valuation of any coefficient of any exact basis solution.
    pub fn exact_floor(&self, ctx: &PrimeContext) -> ExtRational {
        self.basis
            .iter()
            .flat_map(|b| b.solution.coeffs().iter())
            .flat_map(|m| m.entries().iter())
            .map(|x| ctx.val(x))
            .min()
            .unwrap_or(ExtRational::Infinity)
    }
}

/// `(m + ad)^{-1}(r)` with `ad(X) = a0·X − s·X·a0`.
fn invert_shifted(a0: &RationalMatrix, s: &BigRational, m: usize, r: RationalMatrix) -> RationalMatrix {
    let inv_m = BigRational::new(1.into(), (m as u64).into());
    let mut term = r;
    let mut factor = inv_m.clone();
    let mut out = term.scale(&factor);
    loop {
        term = a0.mul(&term).sub(&term.mul(a0).scale(s));
        if term.is_exact_zero() {
            return out;
        }
        factor = -(factor * &inv_m);
        out.add_assign(&term.scale(&factor));
    }
}

fn check_intertwining(conn: &Connection, p: u32, phi0: &RationalMatrix) -> Result<()> {
    if phi0.rows() != conn.rank() || phi0.cols() != conn.rank() {
        return Err(Error::DimensionMismatch(format!(
            "constant term is {}x{}, connection has rank {}",
            phi0.rows(),
            phi0.cols(),
            conn.rank()
        )));
    }
    let a0 = conn.coeff(0);
    if a0.mul(phi0) != phi0.mul(&a0).scale(&rat(p as i64)) {
        return Err(Error::Precondition(
            "constant term does not satisfy Ā_0Φ̄_0 = pΦ̄_0Ā_0".to_string(),
        ));
    }
    Ok(())
}

/// Solves for `Φ̄_1..Φ̄_N`, checking only `Ā_0Φ̄_0 = pΦ̄_0Ā_0`. Used for basis
/// monomials `b^k` whose cup product need not be invertible.
pub fn solve_frobenius_unchecked(
    conn: &Connection,
    p: u32,
    phi0: &RationalMatrix,
    order: usize,
) -> Result<FrobeniusSolution<BigRational>> {
    check_intertwining(conn, p, phi0)?;
    let r = conn.rank();
    let pr = rat(p as i64);
    let a0 = conn.coeff(0);
    let d = conn.degree();
    // (−1)^j p^{1−j} Ā_j for the pullback sum
    let pulled: Vec<RationalMatrix> = (0..=d)
        .map(|j| {
            let mut c = pr.clone();
            for _ in 0..j {
                c /= -&pr;
            }
            conn.coeff(j).scale(&c)
        })
        .collect();
    let mut phi: Vec<RationalMatrix> = Vec::with_capacity(order + 1);
    phi.push(phi0.clone());
    for m in 1..=order {
        let mut rhs = RationalMatrix::zero(r, r);
        for k in 1..=d.min(m) {
            let a = &conn.coeffs()[k];
            if !a.is_exact_zero() {
                rhs = rhs.sub(&a.mul(&phi[m - k]));
            }
        }
        let mut j = 1;
        while j <= d && p as usize * j <= m {
            if !pulled[j].is_exact_zero() {
                rhs = rhs.add(&phi[m - p as usize * j].mul(&pulled[j]));
            }
            j += 1;
        }
        phi.push(invert_shifted(&a0, &pr, m, rhs));
    }
    Ok(FrobeniusSolution::new(
        MatrixSeries::new(phi, Variable::Q),
        "explicit constant term",
    ))
}

/// Unique Frobenius structure with the given invertible constant term.
pub fn solve_frobenius(
    conn: &Connection,
    p: u32,
    phi0: &RationalMatrix,
    order: usize,
) -> Result<FrobeniusSolution<BigRational>> {
    check_intertwining(conn, p, phi0)?;
    if phi0.determinant().is_zero() {
        return Err(Error::Precondition("constant term is not invertible".to_string()));
    }
    solve_frobenius_unchecked(conn, p, phi0, order)
}

/// One exact solution per term of the connection's Gamma decomposition, with
/// `Φ̄_0^k = (b^k ⌣ ·)·diag(p^{−deg/2})`.
pub fn solve_frobenius_basis(
    conn: &Connection,
    ctx: &PrimeContext,
    order: usize,
) -> Result<Vec<BasisSolution>> {
    let dec = conn
        .decomposition()
        .ok_or_else(|| Error::MissingDecomposition(conn.name().to_string()))?;
    dec.terms()
        .iter()
        .map(|(poly, cup)| {
            let phi0 = conn.constant_term_from_cup(ctx, cup);
            let sol = solve_frobenius_unchecked(conn, ctx.p(), &phi0, order)?;
            Ok(BasisSolution {
                poly: poly.clone(),
                cup: cup.clone(),
                solution: FrobeniusSolution::new(sol.series, format!("basis term with coefficient {poly}")),
            })
        })
        .collect()
}

/// `Φ̄_m = Σ_k γ̃^k Φ̄_m^k`.
pub fn combine_basis_solutions(
    ctx: &PrimeContext,
    basis: &[BasisSolution],
    gammas: &[ApproxPadic],
) -> Result<FrobeniusSolution<ApproxPadic>> {
    if basis.len() != gammas.len() || basis.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} basis solutions and {} coefficients",
            basis.len(),
            gammas.len()
        )));
    }
    let order = basis.iter().map(|b| b.solution.order()).min().unwrap_or(0);
    let zero = ctx.exact(BigRational::zero());
    let r = basis[0].solution.coeff(0).rows();
    let coeffs = (0..=order)
        .map(|m| {
            let mut acc = Matrix::zeros(&zero, r, r);
            for (b, g) in basis.iter().zip(gammas) {
                let term = b.solution.coeff(m).map(|x| {
                    if x.is_zero() {
                        zero.clone()
                    } else {
                        g.scale(x)
                    }
                });
                acc.add_assign(&term);
            }
            acc
        })
        .collect();
    Ok(FrobeniusSolution::new(
        MatrixSeries::new(coeffs, Variable::Q),
        "Gamma class constant term",
    ))
}

/// Runs the full pipeline at working precision `precision` for the Gamma-function values.
pub fn solve_gamma_frobenius(
    conn: &Connection,
    ctx: &PrimeContext,
    order: usize,
    precision: i64,
) -> Result<GammaFrobenius> {
    let basis = solve_frobenius_basis(conn, ctx, order)?;
    let k_max = basis.iter().map(|b| b.poly.max_order()).max().unwrap_or(0) as usize;
    let derivs = gamma_derivatives(ctx, k_max.max(1), precision);
    let proto = ctx.exact(BigRational::zero());
    let gammas: Vec<ApproxPadic> = basis
        .iter()
        .map(|b| b.poly.evaluate(&proto, |k| derivs.derivative(k as usize).clone()))
        .collect();
    let solution = combine_basis_solutions(ctx, &basis, &gammas)?;
    Ok(GammaFrobenius { basis, gammas, solution, precision })
}

/// Doubles the working precision from `start` until `accept` holds, up to `cap`.
pub fn solve_gamma_frobenius_auto(
    conn: &Connection,
    ctx: &PrimeContext,
    order: usize,
    start: i64,
    cap: i64,
    accept: impl Fn(&GammaFrobenius) -> bool,
) -> Result<GammaFrobenius> {
    let mut precision = start.max(1);
    loop {
        let sol = solve_gamma_frobenius(conn, ctx, order, precision)?;
        if accept(&sol) {
            return Ok(sol);
        }
        if precision >= cap {
            return Err(Error::Precision(format!(
                "{} at p = {}: certification still fails at precision {precision}",
                conn.name(),
                ctx.p()
            )));
        }
        precision = (2 * precision).min(cap);
    }
}

/// `Π_0 = I`, `mΠ_m + [Ā_0, Π_m] = −Σ_{i<m} Ā_{m−i}Π_i`.
pub fn solve_gauge(conn: &Connection, order: usize) -> GaugeSolution {
    let r = conn.rank();
    let a0 = conn.coeff(0);
    let one = BigRational::one();
    let d = conn.degree();
    let mut pi = Vec::with_capacity(order + 1);
    pi.push(RationalMatrix::eye(r));
    for m in 1..=order {
        let mut rhs = RationalMatrix::zero(r, r);
        for k in 1..=d.min(m) {
            let a = &conn.coeffs()[k];
            if !a.is_exact_zero() {
                rhs = rhs.sub(&a.mul(&pi[m - k]));
            }
        }
        pi.push(invert_shifted(&a0, &one, m, rhs));
    }
    GaugeSolution { series: MatrixSeries::new(pi, Variable::Q) }
}

/// `Π(q)·Φ̄_0·Π(−q^p/p)^{-1}`.
pub fn frobenius_from_gauge(
    conn: &Connection,
    p: u32,
    gauge: &GaugeSolution,
    phi0: &RationalMatrix,
    order: usize,
) -> Result<FrobeniusSolution<BigRational>> {
    check_intertwining(conn, p, phi0)?;
    if gauge.order() < order {
        return Err(Error::Precondition(format!(
            "gauge transformation known to order {}, need {order}",
            gauge.order()
        )));
    }
    let pi = gauge.series().truncate(order);
    let pulled_inv = pi.pullback(p).inverse_with(&RationalMatrix::eye(conn.rank()));
    let middle = MatrixSeries::constant(phi0.clone(), order, Variable::Q);
    let series = pi.mul(&middle).mul(&pulled_inv);
    Ok(FrobeniusSolution::new(series, "gauge transformation"))
}

/// `q∂_qΦ̄ + Ā(q)Φ̄ − pΦ̄Ā(−q^p/p)` through the solution's order.
pub fn frobenius_residual(
    conn: &Connection,
    p: u32,
    sol: &FrobeniusSolution<BigRational>,
) -> MatrixSeries<BigRational> {
    let n = sol.order();
    let a = conn.series(n);
    let pa = a.pullback(p).map(|x| x * rat(p as i64));
    let phi = sol.series();
    phi.euler_derivative().add(&a.mul(phi)).sub(&phi.mul(&pa))
}

/// `q∂_qΠ + Ā(q)Π − ΠĀ_0` through the solution's order.
pub fn gauge_residual(conn: &Connection, gauge: &GaugeSolution) -> MatrixSeries<BigRational> {
    let n = gauge.order();
    let a = conn.series(n);
    let a0 = MatrixSeries::constant(conn.coeff(0), n, Variable::Q);
    let pi = gauge.series();
    pi.euler_derivative().add(&a.mul(pi)).sub(&pi.mul(&a0))
}

/// Orders `m ≥ 1` at which `val(Π̄_m) + m/(p−1) < −2n(m−1)/(p−1)` with `n = dim_ℂ`.
pub fn gauge_floor_violations(ctx: &PrimeContext, conn: &Connection, gauge: &GaugeSolution) -> Vec<usize> {
    let p1 = BigRational::from_integer((ctx.p() as i64 - 1).into());
    let n = conn.dim_c() as i64;
    (1..=gauge.order())
        .filter(|&m| {
            let v = crate::padic::matrix_min_val(ctx.p(), gauge.coeff(m));
            match v.certified() {
                Some(ExtRational::Finite(v)) => {
                    let lhs = v + rat(m as i64) / &p1;
                    let rhs = rat(-2 * n * (m as i64 - 1)) / &p1;
                    lhs < rhs
                }
                _ => false,
            }
        })
        .collect()
}
