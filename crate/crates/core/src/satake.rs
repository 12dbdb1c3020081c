//! Grassmannians as exterior powers of projective space.
//!
//! `Λ^k` of the cohomology of `ℂP^{N−1}` is identified with the cohomology of
//! `Gr(k, N)` (shifted down by `k(k−1)` in degree). The quantum connection is
//! `N·Λ_Lie` of quantum multiplication by `x` with `q^N ↦ ε q^N`,
//! `ε = (−1)^{k−1}`, and the Frobenius structure is `p^{k(k−1)/2}·Λ_Group` of
//! the projective one under the same substitution.

use crate::connections::{
    projective, solve_frobenius, solve_frobenius_basis, Connection, ConnectionDecomposition,
    FrobeniusSolution,
};
use crate::error::{Error, Result};
use crate::gamma_class::{grade_columns, ChernCharacterData, CohomologyRing};
use crate::matrix::{Matrix, RationalMatrix};
use crate::padic::PrimeContext;
use crate::ring::{factorial, rat, Ring};
use crate::series::{MatrixSeries, Series, Variable};
use crate::special::gamma_derivatives;
use num_rational::BigRational;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};

/// Strictly decreasing `k`-tuples from `{0, …, N−1}` in lexicographic order;
/// the tuple `(d_1, …, d_k)` stands for `x^{d_1} ∧ ⋯ ∧ x^{d_k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeBasis {
    n: usize,
    k: usize,
    tuples: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

fn decreasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for top in k - 1..n {
        for rest in decreasing_tuples(top, k - 1) {
            let mut t = vec![top];
            t.extend(rest);
            out.push(t);
        }
    }
    out
}

impl WedgeBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidArgument(format!("need 1 <= k <= N, got k={k}, N={n}")));
        }
        let tuples = decreasing_tuples(n, k);
        let index = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        Ok(Self { n, k, tuples, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn index_of(&self, tuple: &[usize]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    /// Index of `x^{k−1} ∧ ⋯ ∧ x ∧ 1`, which corresponds to the unit.
    pub fn unit_index(&self) -> usize {
        let t: Vec<usize> = (0..self.k).rev().collect();
        self.index[&t]
    }

    /// Degree of the corresponding class on the Grassmannian: `2Σd_i − k(k−1)`.
    pub fn degree(&self, i: usize) -> u32 {
        (2 * self.tuples[i].iter().sum::<usize>() - self.k * (self.k - 1)) as u32
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.len()).map(|i| self.degree(i)).collect()
    }

    /// Sorts `t` into decreasing order; `None` if an index repeats, otherwise the
    /// basis index and the sign of the permutation.
    fn normalize(&self, mut t: Vec<usize>) -> Option<(usize, bool)> {
        let mut negative = false;
        for i in 1..t.len() {
            let mut j = i;
            while j > 0 && t[j - 1] < t[j] {
                t.swap(j - 1, j);
                negative = !negative;
                j -= 1;
            }
        }
        if t.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        Some((self.index[&t], negative))
    }
}

/// The `q^N`-sign and grading data of `Gr(k, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SatakeContext {
    pub n: usize,
    pub k: usize,
}

impl SatakeContext {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::InvalidArgument(format!(
                "Gr(k, N) needs 1 <= k <= N-1, got k={k}, N={n}"
            )));
        }
        Ok(Self { n, k })
    }

    /// `ε = ζ^N = (−1)^{k−1}`.
    pub fn epsilon(&self) -> i64 {
        if self.k % 2 == 1 {
            1
        } else {
            -1
        }
    }

    /// `Φ_M = p^{e}·Λ_Group(Φ_ℂP)` with `e = k(k−1)/2`.
    pub fn grading_exponent(&self) -> i64 {
        (self.k * (self.k - 1) / 2) as i64
    }
}

fn check_size<T: Ring>(a: &Matrix<T>, basis: &WedgeBasis) -> Result<()> {
    if a.rows() != basis.n || a.cols() != basis.n {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix on a {}-dimensional space",
            a.rows(),
            a.cols(),
            basis.n
        )));
    }
    Ok(())
}

/// `Λ^k_Lie(A)`: `w_1 ∧ ⋯ ∧ w_k ↦ Σ_l w_1 ∧ ⋯ ∧ Aw_l ∧ ⋯ ∧ w_k`.
pub fn lambda_lie<T: Ring>(a: &Matrix<T>, basis: &WedgeBasis) -> Result<Matrix<T>> {
    check_size(a, basis)?;
    let zero = a.get(0, 0).zero_like();
    let mut out = Matrix::zeros(&zero, basis.len(), basis.len());
    for (col, t) in basis.tuples.iter().enumerate() {
        for l in 0..basis.k {
            for i in 0..basis.n {
                let c = a.get(i, t[l]);
                if c.is_exact_zero() {
                    continue;
                }
                let mut s = t.clone();
                s[l] = i;
                if let Some((row, negative)) = basis.normalize(s) {
                    let term = if negative { c.negated() } else { c.clone() };
                    let entry = out.get_mut(row, col);
                    *entry = entry.plus(&term);
                }
            }
        }
    }
    Ok(out)
}

fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(vec![], false)];
    }
    let mut out = Vec::new();
    for (perm, negative) in permutations(k - 1) {
        // insert k−1 at every position; moving it left past j entries flips sign j times
        for pos in 0..=perm.len() {
            let mut q = perm.clone();
            q.insert(pos, k - 1);
            out.push((q, negative ^ ((perm.len() - pos) % 2 == 1)));
        }
    }
    out
}

/// `Λ^k_Group(A)`: entry `(I, J)` is the minor on rows `I` and columns `J`.
pub fn lambda_group<T: Ring>(a: &Matrix<T>, basis: &WedgeBasis) -> Result<Matrix<T>> {
    check_size(a, basis)?;
    let perms = permutations(basis.k);
    let zero = a.get(0, 0).zero_like();
    Ok(Matrix::from_fn(basis.len(), basis.len(), |r, c| {
        let (rows, cols) = (&basis.tuples[r], &basis.tuples[c]);
        let mut acc = zero.clone();
        'perm: for (perm, negative) in &perms {
            let mut term: Option<T> = None;
            for (i, &j) in perm.iter().enumerate() {
                let x = a.get(rows[i], cols[j]);
                if x.is_exact_zero() {
                    continue 'perm;
                }
                term = Some(match term {
                    None => x.clone(),
                    Some(t) => t.times(x),
                });
            }
            let term = term.expect("k >= 1");
            acc = if *negative { acc.minus(&term) } else { acc.plus(&term) };
        }
        acc
    }))
}

/// `Λ_Group` applied to a matrix series, with truncated series arithmetic.
pub fn lambda_group_series(
    a: &MatrixSeries<BigRational>,
    basis: &WedgeBasis,
) -> Result<MatrixSeries<BigRational>> {
    let m: Matrix<Series<BigRational>> = a.to_series_matrix();
    let out = lambda_group(&m, basis)?;
    Ok(MatrixSeries::from_series_matrix(&out, a.variable()))
}

/// Quantum multiplication by `x` on `ℂP^{N−1}` as a polynomial in `q`, with `q^N ↦ ε q^N`.
fn hyperplane_product(n: usize, epsilon: i64) -> (RationalMatrix, RationalMatrix) {
    let mut shift = RationalMatrix::zero(n, n);
    for i in 0..n - 1 {
        shift.set(i + 1, i, rat(1));
    }
    let mut corner = RationalMatrix::zero(n, n);
    corner.set(0, n - 1, rat(epsilon));
    (shift, corner)
}

/// The cohomology ring of `Gr(k, N)` in wedge coordinates. Multiplication by the
/// power sums `r_1^m + ⋯ + r_k^m` of the Chern roots of `E^∨` is `Λ_Lie(x^m ⌣ ·)`;
/// the ring is the algebra these operators generate, identified with the
/// wedge space through the unit wedge.
pub fn grassmannian_ring(k: usize, n: usize) -> Result<(CohomologyRing, ChernCharacterData)> {
    let sc = SatakeContext::new(k, n)?;
    let basis = WedgeBasis::new(n, k)?;
    let size = basis.len();
    let unit = basis.unit_index();
    let (shift, _) = hyperplane_product(n, sc.epsilon());
    let power_sums: Vec<RationalMatrix> = (1..=k as u32)
        .map(|m| lambda_lie(&shift.pow(m), &basis))
        .collect::<Result<_>>()?;
    let mut e_unit = vec![rat(0); size];
    e_unit[unit] = rat(1);
    // operators O with O(u) linearly independent, closed under the power sums
    let mut ops: Vec<RationalMatrix> = vec![RationalMatrix::eye(size)];
    let mut images: Vec<Vec<BigRational>> = vec![e_unit.clone()];
    let mut next = 0;
    while images.len() < size && next < ops.len() {
        for pm in &power_sums {
            let op = pm.mul(&ops[next]);
            let image = op.mul_vec(&e_unit);
            let mut trial = images.clone();
            trial.push(image.clone());
            let cols = RationalMatrix::from_fn(size, trial.len(), |i, j| trial[j][i].clone());
            if cols.rank() == trial.len() {
                ops.push(op);
                images.push(image);
            }
        }
        next += 1;
    }
    if images.len() < size {
        return Err(Error::Precondition("unit wedge is not cyclic".to_string()));
    }
    let image_matrix = RationalMatrix::from_fn(size, size, |i, j| images[j][i].clone());
    let coords = image_matrix.inverse()?;
    // left[i] = Σ_t coords[t][i]·ops[t], the operator sending u to e_i
    let left: Vec<RationalMatrix> = (0..size)
        .map(|i| {
            let mut acc = RationalMatrix::zero(size, size);
            for (t, op) in ops.iter().enumerate() {
                let c = coords.get(t, i);
                if !c.is_zero() {
                    acc.add_assign(&op.scale(c));
                }
            }
            acc
        })
        .collect();
    let labels = basis
        .tuples()
        .iter()
        .map(|t| format!("[{}]", t.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let dim_c = (k * (n - k)) as u32;
    let ring = CohomologyRing::new(
        labels,
        basis.degrees(),
        |i, j| (0..size).map(|r| left[i].get(r, j).clone()).collect(),
        unit,
        dim_c,
    )?;
    // ch_m(TM) = N ch_m(E^∨) in odd degrees; ch_m(E^∨) = P_m(u)/m!
    let mut odd = BTreeMap::new();
    for m in (1..=dim_c).step_by(2) {
        let pm = lambda_lie(&shift.pow(m), &basis)?;
        let scale = rat(n as i64) / BigRational::from_integer(factorial(m as u64));
        odd.insert(m, pm.mul_vec(&e_unit).iter().map(|x| x * &scale).collect());
    }
    let chern = ChernCharacterData::from_odd(&ring, odd)?;
    Ok((ring, chern))
}

/// `q∂_q + N·Λ_Lie(X(q))` with `X(q)` quantum multiplication by `x` on `ℂP^{N−1}`, `q^N ↦ εq^N`.
pub fn grassmannian_connection(k: usize, n: usize) -> Result<Connection> {
    let sc = SatakeContext::new(k, n)?;
    let basis = WedgeBasis::new(n, k)?;
    let (shift, corner) = hyperplane_product(n, sc.epsilon());
    let nn = rat(n as i64);
    let a0 = lambda_lie(&shift, &basis)?.scale(&nn);
    let an = lambda_lie(&corner, &basis)?.scale(&nn);
    let mut coeffs = vec![RationalMatrix::zero(basis.len(), basis.len()); n + 1];
    coeffs[0] = a0;
    coeffs[n] = an;
    let degrees = basis.degrees();
    let mut betti: BTreeMap<u32, u32> = BTreeMap::new();
    for &d in &degrees {
        *betti.entry(d).or_default() += 1;
    }
    let (ring, chern) = grassmannian_ring(k, n)?;
    Connection::new(
        format!("grassmannian({k},{n})"),
        coeffs,
        degrees,
        (k * (n - k)) as u32,
        betti.into_iter().collect(),
        Some(ConnectionDecomposition::from_chern(&ring, &chern)),
    )
}

/// Exterior-power Frobenius structure together with the projective data it came from.
#[derive(Clone, Debug)]
pub struct SatakeFrobenius {
    /// Constant term used on `ℂP^{N−1}`: the Gamma class evaluated at the
    /// rational approximations of its coefficients.
    pub projective_constant: RationalMatrix,
    pub projective: FrobeniusSolution<BigRational>,
    pub solution: FrobeniusSolution<BigRational>,
}

/// `Φ_M(q) = p^{k(k−1)/2}·Λ_Group(Φ_ℂP(ζq))`, computed exactly from rational
/// approximations (at `precision`) of the Gamma values.
pub fn grassmannian_frobenius(
    k: usize,
    n: usize,
    ctx: &PrimeContext,
    precision: i64,
    order: usize,
) -> Result<SatakeFrobenius> {
    let sc = SatakeContext::new(k, n)?;
    let basis = WedgeBasis::new(n, k)?;
    let cp = projective(n)?;
    let terms = solve_frobenius_basis(&cp, ctx, order)?;
    let k_max = terms.iter().map(|t| t.poly.max_order()).max().unwrap_or(1).max(1) as usize;
    let derivs = gamma_derivatives(ctx, k_max, precision);
    let proto = ctx.exact(BigRational::zero());
    let mut cp_series: Option<MatrixSeries<BigRational>> = None;
    for t in &terms {
        let gamma = t.poly.evaluate(&proto, |j| derivs.derivative(j as usize).clone());
        let c = gamma.approx().clone();
        let scaled = t.solution.series().map(|x| x * &c);
        cp_series = Some(match cp_series {
            None => scaled,
            Some(s) => s.add(&scaled),
        });
    }
    let cp_series = cp_series.expect("projective space has a Gamma decomposition");
    let projective_constant = cp_series.coeff(0).clone();
    let eps = rat(sc.epsilon());
    let substituted: Vec<RationalMatrix> = cp_series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            if m % n != 0 {
                debug_assert!(c.is_exact_zero());
                c.clone()
            } else if (m / n) % 2 == 1 {
                c.scale(&eps)
            } else {
                c.clone()
            }
        })
        .collect();
    let lifted = lambda_group_series(&MatrixSeries::new(substituted, Variable::Q), &basis)?;
    let factor = ctx.p_power(sc.grading_exponent());
    let series = lifted.map(|x| x * &factor);
    Ok(SatakeFrobenius {
        projective_constant,
        projective: FrobeniusSolution::new(cp_series, "projective Gamma class"),
        solution: FrobeniusSolution::new(series, format!("exterior power of the projective structure, Gr({k},{n})")),
    })
}

/// Result of comparing the exterior-power construction with a direct solve.
#[derive(Clone, Debug)]
pub struct SatakeComparison {
    pub exterior: FrobeniusSolution<BigRational>,
    pub direct: FrobeniusSolution<BigRational>,
    /// First `(m, i, j)` where the two differ.
    pub first_mismatch: Option<(usize, usize, usize)>,
}

impl SatakeComparison {
    pub fn agrees(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Solves the Grassmannian connection directly with the exterior-power constant term.
pub fn satake_cross_check(
    k: usize,
    n: usize,
    ctx: &PrimeContext,
    precision: i64,
    order: usize,
) -> Result<SatakeComparison> {
    let conn = grassmannian_connection(k, n)?;
    let exterior = grassmannian_frobenius(k, n, ctx, precision, order)?.solution;
    let direct = solve_frobenius(&conn, ctx.p(), exterior.coeff(0), order)?;
    let mut first_mismatch = None;
    'outer: for m in 0..=order {
        let (a, b) = (exterior.coeff(m), direct.coeff(m));
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                if a.get(i, j) != b.get(i, j) {
                    first_mismatch = Some((m, i, j));
                    break 'outer;
                }
            }
        }
    }
    Ok(SatakeComparison { exterior, direct, first_mismatch })
}

/// Constant term `p^{−deg/2}·(b ⌣ ·)` on the Grassmannian ring for a given class.
pub fn grassmannian_constant_term<T: Ring>(
    ctx: &PrimeContext,
    k: usize,
    n: usize,
    cup: &Matrix<T>,
) -> Result<Matrix<T>> {
    let basis = WedgeBasis::new(n, k)?;
    Ok(grade_columns(ctx, cup, &basis.degrees()))
}
