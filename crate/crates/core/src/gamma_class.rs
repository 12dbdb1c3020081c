//! Graded cohomology rings given by structure constants, Chern characters, the
//! p-adic Gamma class and the constant term `x ↦ p^{−deg(x)/2} b ⌣ x`.
//!
//! The Gamma class is computed in logarithmic form,
//! `Γ_p(E) = exp(Σ_{m odd} l_m ch_m(E))`, which only involves odd Chern
//! character components. Symbolically, `l_m` is written in terms of the odd
//! derivatives `G1, G3, G5, …` of `Γ_p` at 0: even Taylor coefficients are
//! eliminated with `Γ_p(z)Γ_p(−z) = 1`.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, RationalMatrix};
use crate::padic::{ApproxPadic, ExtRational, PrimeContext};
use crate::poly::GammaPolynomial;
use crate::ring::{factorial, rat, ratio, Ring};
use crate::special::{even_taylor_coefficient, formal_log, GammaDerivatives};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// A commutative graded ring `H` with basis `e_0, …, e_{n−1}` and
/// `e_i e_j = Σ_k c_{ijk} e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyRing {
    labels: Vec<String>,
    degrees: Vec<u32>,
    /// `left[i]` is the matrix of `e_i ⌣ ·`.
    left: Vec<RationalMatrix>,
    unit: usize,
    dim_c: u32,
}

impl CohomologyRing {
    /// Builds a ring from its product table and checks unit, commutativity,
    /// associativity and grading on all basis elements.
    pub fn new(
        labels: Vec<String>,
        degrees: Vec<u32>,
        product: impl Fn(usize, usize) -> Vec<BigRational>,
        unit: usize,
        dim_c: u32,
    ) -> Result<Self> {
        let n = degrees.len();
        if labels.len() != n || unit >= n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels, {} degrees, unit index {unit}",
                labels.len(),
                n
            )));
        }
        if degrees.iter().any(|d| d % 2 != 0) {
            return Err(Error::InvalidArgument("cohomology degrees must be even".to_string()));
        }
        let mut left = vec![RationalMatrix::zero(n, n); n];
        for i in 0..n {
            for j in 0..n {
                let v = product(i, j);
                if v.len() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "product e_{i} e_{j} has {} coordinates, expected {n}",
                        v.len()
                    )));
                }
                for (k, c) in v.into_iter().enumerate() {
                    left[i].set(k, j, c);
                }
            }
        }
        let ring = Self {
            labels,
            degrees,
            left,
            unit,
            dim_c,
        };
        ring.check_axioms()?;
        Ok(ring)
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn dim_c(&self) -> u32 {
        self.dim_c
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// `c_{ijk}`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &BigRational {
        self.left[i].get(k, j)
    }

    /// Betti numbers as `(degree, rank)` pairs in increasing degree.
    pub fn betti(&self) -> Vec<(u32, u32)> {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &d in &self.degrees {
            *counts.entry(d).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn check_axioms(&self) -> Result<()> {
        let n = self.rank();
        let e = |i: usize| -> Vec<BigRational> {
            (0..n).map(|k| if k == i { rat(1) } else { rat(0) }).collect()
        };
        if self.degrees[self.unit] != 0 || self.degrees.iter().filter(|&&d| d == 0).count() != 1 {
            return Err(Error::Precondition(
                "degree 0 part must be spanned by the unit".to_string(),
            ));
        }
        for i in 0..n {
            if self.multiply(&e(self.unit), &e(i)) != e(i) {
                return Err(Error::Precondition(format!("e_{} is not a unit on e_{i}", self.unit)));
            }
            for j in 0..n {
                let ij = self.multiply(&e(i), &e(j));
                if ij != self.multiply(&e(j), &e(i)) {
                    return Err(Error::Precondition(format!("e_{i} and e_{j} do not commute")));
                }
                for (k, c) in ij.iter().enumerate() {
                    if !c.is_zero() && self.degrees[k] != self.degrees[i] + self.degrees[j] {
                        return Err(Error::Precondition(format!(
                            "e_{i} e_{j} has a component on e_{k} of the wrong degree"
                        )));
                    }
                }
                for l in 0..n {
                    let a = self.multiply(&ij, &e(l));
                    let b = self.multiply(&e(i), &self.multiply(&e(j), &e(l)));
                    if a != b {
                        return Err(Error::Precondition(format!(
                            "product is not associative on (e_{i}, e_{j}, e_{l})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn unit_element<T: Ring>(&self, proto: &T) -> Vec<T> {
        (0..self.rank())
            .map(|k| if k == self.unit { proto.one_like() } else { proto.zero_like() })
            .collect()
    }

    pub fn basis_element(&self, i: usize) -> Vec<BigRational> {
        (0..self.rank()).map(|k| if k == i { rat(1) } else { rat(0) }).collect()
    }

    pub fn multiply<T: Ring>(&self, a: &[T], b: &[T]) -> Vec<T> {
        let n = self.rank();
        let proto = &a[0];
        let mut out: Vec<T> = (0..n).map(|_| proto.zero_like()).collect();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_exact_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_exact_zero() {
                    continue;
                }
                let mut ab: Option<T> = None;
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = self.left[i].get(k, j);
                    if c.is_zero() {
                        continue;
                    }
                    let ab = ab.get_or_insert_with(|| ai.times(bj));
                    *slot = slot.plus(&ab.scaled(c));
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ b ⌣ x`; column `j` holds `b e_j`.
    pub fn cup_matrix<T: Ring>(&self, b: &[T]) -> Matrix<T> {
        let n = self.rank();
        let proto = &b[0];
        let mut m = Matrix::zeros(proto, n, n);
        for (i, bi) in b.iter().enumerate() {
            if bi.is_exact_zero() {
                continue;
            }
            for k in 0..n {
                for j in 0..n {
                    let c = self.left[i].get(k, j);
                    if !c.is_zero() {
                        let v = m.get(k, j).plus(&bi.scaled(c));
                        m.set(k, j, v);
                    }
                }
            }
        }
        m
    }

    /// `exp(x)` for `x` without degree-0 component.
    pub fn exp_nilpotent<T: Ring>(&self, x: &[T]) -> Vec<T> {
        let proto = &x[0];
        let mut acc = self.unit_element(proto);
        let mut power = self.unit_element(proto);
        for n in 1..=self.max_degree() / 2 + 1 {
            power = self.multiply(&power, x);
            if power.iter().all(Ring::is_exact_zero) {
                break;
            }
            let inv = BigRational::new(BigInt::one(), factorial(n as u64));
            let term: Vec<T> = power.iter().map(|c| c.scaled(&inv)).collect();
            acc = acc.iter().zip(&term).map(|(a, t)| a.plus(t)).collect();
        }
        acc
    }

    /// `x^n` as coordinates.
    pub fn power(&self, x: &[BigRational], n: u32) -> Vec<BigRational> {
        let mut acc = self.unit_element(&rat(0));
        for _ in 0..n {
            acc = self.multiply(&acc, x);
        }
        acc
    }
}

/// Odd Chern character components `ch_1, ch_3, …` of a bundle, as ring elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChernCharacterData {
    odd: BTreeMap<u32, Vec<BigRational>>,
}

impl ChernCharacterData {
    /// Components keyed by odd `m`; even keys are rejected.
    pub fn from_odd(ring: &CohomologyRing, components: BTreeMap<u32, Vec<BigRational>>) -> Result<Self> {
        for (m, v) in &components {
            if m % 2 == 0 {
                return Err(Error::InvalidArgument(format!("ch_{m} is not an odd component")));
            }
            if v.len() != ring.rank() {
                return Err(Error::DimensionMismatch(format!(
                    "ch_{m} has {} coordinates, ring rank is {}",
                    v.len(),
                    ring.rank()
                )));
            }
            for (k, c) in v.iter().enumerate() {
                if !c.is_zero() && ring.degrees()[k] != 2 * m {
                    return Err(Error::Precondition(format!("ch_{m} is not of pure degree {}", 2 * m)));
                }
            }
        }
        let odd = components
            .into_iter()
            .filter(|(_, v)| v.iter().any(|c| !c.is_zero()))
            .collect();
        Ok(Self { odd })
    }

    /// Converts total Chern classes `c_1, c_2, …` via Newton's identities:
    /// `p_m = Σ_{0<i<m} (−1)^{i−1} c_i p_{m−i} + (−1)^{m−1} m c_m`, `ch_m = p_m/m!`.
    pub fn from_chern_classes(ring: &CohomologyRing, classes: &[Vec<BigRational>]) -> Result<Self> {
        let n = ring.rank();
        if classes.iter().any(|c| c.len() != n) {
            return Err(Error::DimensionMismatch("Chern class coordinate count".to_string()));
        }
        let top = (ring.max_degree() / 2) as usize;
        let zero = vec![rat(0); n];
        let c = |i: usize| -> &Vec<BigRational> { classes.get(i - 1).unwrap_or(&zero) };
        let mut p: Vec<Vec<BigRational>> = vec![zero.clone()];
        for m in 1..=top {
            let mut acc = c(m).iter().map(|x| x * rat(m as i64)).collect::<Vec<_>>();
            if m % 2 == 0 {
                acc = acc.into_iter().map(|x| -x).collect();
            }
            for i in 1..m {
                let prod = ring.multiply(c(i), &p[m - i]);
                let sign = if i % 2 == 1 { rat(1) } else { rat(-1) };
                for (a, b) in acc.iter_mut().zip(prod) {
                    *a += &sign * b;
                }
            }
            p.push(acc);
        }
        let mut odd = BTreeMap::new();
        for (m, pm) in p.into_iter().enumerate().skip(1) {
            if m % 2 == 1 {
                let f = BigRational::from_integer(factorial(m as u64));
                odd.insert(m as u32, pm.into_iter().map(|x| x / &f).collect());
            }
        }
        Self::from_odd(ring, odd)
    }

    /// The dual bundle: odd components change sign.
    pub fn dual(&self) -> Self {
        Self {
            odd: self
                .odd
                .iter()
                .map(|(m, v)| (*m, v.iter().map(|x| -x).collect()))
                .collect(),
        }
    }

    pub fn components(&self) -> &BTreeMap<u32, Vec<BigRational>> {
        &self.odd
    }

    pub fn component(&self, m: u32) -> Option<&Vec<BigRational>> {
        self.odd.get(&m)
    }

    pub fn max_order(&self) -> u32 {
        self.odd.keys().copied().max().unwrap_or(0)
    }
}

/// `exp(Σ_m l_m ch_m)` for caller-supplied `l_m`.
pub fn gamma_class_with<T: Ring>(
    ring: &CohomologyRing,
    chern: &ChernCharacterData,
    proto: &T,
    l: impl Fn(u32) -> T,
) -> Vec<T> {
    let mut x: Vec<T> = (0..ring.rank()).map(|_| proto.zero_like()).collect();
    for (&m, ch) in chern.components() {
        let lm = l(m);
        for (slot, c) in x.iter_mut().zip(ch) {
            if !c.is_zero() {
                *slot = slot.plus(&lm.scaled(c));
            }
        }
    }
    ring.exp_nilpotent(&x)
}

/// `Γ_p(E)` with coordinates in `ℚ_p`, each to valuation at least `G`.
pub fn gamma_class(
    ring: &CohomologyRing,
    chern: &ChernCharacterData,
    derivs: &GammaDerivatives,
    precision: i64,
) -> Result<Vec<ApproxPadic>> {
    let m_max = chern.max_order() as usize;
    let proto = derivs.derivative(0).clone();
    if m_max > derivs.k_max() {
        return Err(Error::InvalidArgument(format!(
            "Gamma class needs derivatives through order {m_max}"
        )));
    }
    let big_l = formal_log(derivs.taylor_coefficients(), m_max.max(1));
    let out = gamma_class_with(ring, chern, &proto, |m| {
        big_l[m as usize].scale(&BigRational::from_integer(factorial(m as u64)))
    });
    let target = ExtRational::int(precision);
    if let Some((k, x)) = out.iter().enumerate().find(|(_, x)| x.err_val() < &target) {
        return Err(Error::Precision(format!(
            "Gamma class coordinate {k} only known to valuation {}",
            x.err_val()
        )));
    }
    Ok(out)
}

/// Taylor coefficients `g_0, …, g_k` of `Γ_p` in the odd symbols `G1, G3, …`.
pub fn symbolic_taylor(k_max: usize) -> Vec<GammaPolynomial> {
    let mut g = vec![GammaPolynomial::constant(rat(1))];
    for k in 1..=k_max {
        let next = if k % 2 == 1 {
            GammaPolynomial::symbol(k as u32)
                .scaled(&BigRational::new(BigInt::one(), factorial(k as u64)))
        } else {
            even_taylor_coefficient(&g, k)
        };
        g.push(next);
    }
    g
}

/// `l_0, …, l_{m_max}` in the odd symbols.
pub fn symbolic_log_gamma(m_max: usize) -> Vec<GammaPolynomial> {
    formal_log(&symbolic_taylor(m_max), m_max)
        .into_iter()
        .enumerate()
        .map(|(m, x)| x.scaled(&BigRational::from_integer(factorial(m as u64))))
        .collect()
}

/// `Γ_p^{(k)}(0)` in the odd symbols.
pub fn symbolic_derivative(k: usize) -> GammaPolynomial {
    symbolic_taylor(k)[k].scaled(&BigRational::from_integer(factorial(k as u64)))
}

/// `Γ_p(E) = Σ_k γ^k b^k` with rational polynomials `γ^k` in `G1, G3, …`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaMonomialDecomposition {
    terms: Vec<DecompositionTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTerm {
    pub poly: GammaPolynomial,
    pub element: Vec<BigRational>,
}

impl GammaMonomialDecomposition {
    pub fn new(terms: Vec<DecompositionTerm>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[DecompositionTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order any `γ^k` needs.
    pub fn max_order(&self) -> u32 {
        self.terms.iter().map(|t| t.poly.max_order()).max().unwrap_or(0)
    }

    /// The `γ^k` with derivative symbols replaced by values.
    pub fn coefficients<T: Ring>(&self, proto: &T, value: impl Fn(u32) -> T) -> Vec<T> {
        self.terms.iter().map(|t| t.poly.evaluate(proto, &value)).collect()
    }

    /// `Σ_k γ^k b^k` for substituted values.
    pub fn reconstruct<T: Ring>(&self, proto: &T, value: impl Fn(u32) -> T) -> Vec<T> {
        let n = self.terms.first().map_or(0, |t| t.element.len());
        let mut out: Vec<T> = (0..n).map(|_| proto.zero_like()).collect();
        for (t, g) in self.terms.iter().zip(self.coefficients(proto, value)) {
            for (slot, c) in out.iter_mut().zip(&t.element) {
                if !c.is_zero() {
                    *slot = slot.plus(&g.scaled(c));
                }
            }
        }
        out
    }
}

/// Symbolic `Γ_p(E)` grouped by ring basis element.
pub fn gamma_monomial_decomposition(
    ring: &CohomologyRing,
    chern: &ChernCharacterData,
) -> GammaMonomialDecomposition {
    let l = symbolic_log_gamma(chern.max_order().max(1) as usize);
    let coords = gamma_class_with(ring, chern, &GammaPolynomial::zero(), |m| l[m as usize].clone());
    let terms = coords
        .into_iter()
        .enumerate()
        .filter(|(_, poly)| !poly.is_zero())
        .map(|(k, poly)| DecompositionTerm {
            poly,
            element: ring.basis_element(k),
        })
        .collect();
    GammaMonomialDecomposition { terms }
}

/// `diag(p^{−deg_j/2})`.
pub fn grading_matrix(ctx: &PrimeContext, degrees: &[u32]) -> RationalMatrix {
    let diag: Vec<BigRational> = degrees.iter().map(|&d| ctx.p_power(-(d as i64) / 2)).collect();
    RationalMatrix::diagonal(&diag)
}

/// Scales column `j` of a cup-product matrix by `p^{−deg_j/2}`.
pub fn grade_columns<T: Ring>(ctx: &PrimeContext, cup: &Matrix<T>, degrees: &[u32]) -> Matrix<T> {
    let scale: Vec<BigRational> = degrees.iter().map(|&d| ctx.p_power(-(d as i64) / 2)).collect();
    Matrix::from_fn(cup.rows(), cup.cols(), |i, j| cup.get(i, j).scaled(&scale[j]))
}

/// Matrix of `x ↦ p^{−deg(x)/2} b ⌣ x`; `b` must have a nonzero degree-0 part.
pub fn constant_term_endomorphism<T: Ring>(
    ctx: &PrimeContext,
    ring: &CohomologyRing,
    b: &[T],
) -> Result<Matrix<T>> {
    if b.len() != ring.rank() {
        return Err(Error::DimensionMismatch(format!(
            "element has {} coordinates, ring rank is {}",
            b.len(),
            ring.rank()
        )));
    }
    if b[ring.unit_index()].is_exact_zero() {
        return Err(Error::NotInvertible(
            "degree 0 part of b vanishes".to_string(),
        ));
    }
    Ok(grade_columns(ctx, &ring.cup_matrix(b), ring.degrees()))
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn coords(values: &[BigRational]) -> Vec<BigRational> {
    values.to_vec()
}

/// `ℚ[x]/x^n` with `x` in degree 2.
pub fn truncated_polynomial_ring(n: usize) -> CohomologyRing {
    let names: Vec<String> = (0..n)
        .map(|i| match i {
            0 => "1".to_string(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        })
        .collect();
    CohomologyRing::new(
        names,
        (0..n as u32).map(|i| 2 * i).collect(),
        |i, j| (0..n).map(|k| if k == i + j { rat(1) } else { rat(0) }).collect(),
        0,
        (n - 1) as u32,
    )
    .expect("truncated polynomial rings are valid")
}

/// The ground field, as the cohomology of a point.
pub fn point_ring() -> CohomologyRing {
    truncated_polynomial_ring(1)
}

/// `H^*(ℂP^{N−1}) = ℚ[x]/x^N` with `ch_m(T) = N x^m/m!`.
pub fn projective_space(n: usize) -> (CohomologyRing, ChernCharacterData) {
    let ring = truncated_polynomial_ring(n);
    let mut odd = BTreeMap::new();
    for m in (1..n).step_by(2) {
        let mut v = vec![rat(0); n];
        v[m] = BigRational::new(BigInt::from(n), factorial(m as u64));
        odd.insert(m as u32, v);
    }
    let chern = ChernCharacterData::from_odd(&ring, odd).expect("valid projective data");
    (ring, chern)
}

/// The span of `{1, c_1, [point]}` for the cubic surface, `c_1² = 3[point]`.
pub fn cubic_surface() -> (CohomologyRing, ChernCharacterData) {
    let ring = CohomologyRing::new(
        labels(&["1", "c1", "pt"]),
        vec![0, 2, 4],
        |i, j| {
            let mut v = vec![rat(0); 3];
            match (i, j) {
                (0, k) | (k, 0) => v[k] = rat(1),
                (1, 1) => v[2] = rat(3),
                _ => {}
            }
            v
        },
        0,
        2,
    )
    .expect("valid cubic surface ring");
    let chern = ChernCharacterData::from_odd(&ring, BTreeMap::from([(1, coords(&[rat(0), rat(1), rat(0)]))]))
        .expect("valid cubic surface data");
    (ring, chern)
}

/// The Hirzebruch surface `F_1` in the basis `{1, E, F, [point]}` with
/// `E² = −pt`, `EF = pt`, `F² = 0`, `c_1 = 2E + 3F`.
pub fn hirzebruch_f1() -> (CohomologyRing, ChernCharacterData) {
    let ring = CohomologyRing::new(
        labels(&["1", "E", "F", "pt"]),
        vec![0, 2, 2, 4],
        |i, j| {
            let mut v = vec![rat(0); 4];
            match (i, j) {
                (0, k) | (k, 0) => v[k] = rat(1),
                (1, 1) => v[3] = rat(-1),
                (1, 2) | (2, 1) => v[3] = rat(1),
                _ => {}
            }
            v
        },
        0,
        2,
    )
    .expect("valid F1 ring");
    let chern = ChernCharacterData::from_odd(
        &ring,
        BTreeMap::from([(1, coords(&[rat(0), rat(2), rat(3), rat(0)]))]),
    )
    .expect("valid F1 data");
    (ring, chern)
}

/// Intersection of two quadrics in `ℂP^5`, basis `{1, x, x²/4, x³/4}`,
/// with `c(TM) = (1+x)^6 (1+2x)^{−2}`.
pub fn two_quadrics() -> (CohomologyRing, ChernCharacterData) {
    let ring = CohomologyRing::new(
        labels(&["1", "x", "x^2/4", "x^3/4"]),
        vec![0, 2, 4, 6],
        |i, j| {
            let mut v = vec![rat(0); 4];
            match (i, j) {
                (0, k) | (k, 0) => v[k] = rat(1),
                (1, 1) => v[2] = rat(4),
                (1, 2) | (2, 1) => v[3] = rat(1),
                _ => {}
            }
            v
        },
        0,
        3,
    )
    .expect("valid two-quadrics ring");
    let c1 = coords(&[rat(0), rat(2), rat(0), rat(0)]);
    // 3x² = 12·(x²/4)
    let c2 = coords(&[rat(0), rat(0), rat(12), rat(0)]);
    let c3 = vec![rat(0); 4];
    let chern = ChernCharacterData::from_chern_classes(&ring, &[c1, c2, c3]).expect("valid quadrics data");
    (ring, chern)
}

/// The block `{y, y c_1, y c_1², y c_1³}` of the twistor space, on which the
/// Euler class of the base acts trivially: `ℚ[h]/h⁴` with `ch_1 = h`, `ch_3 = h³/6`.
pub fn twistor_simple_block() -> (CohomologyRing, ChernCharacterData) {
    let ring = truncated_polynomial_ring(4);
    let chern = ChernCharacterData::from_odd(
        &ring,
        BTreeMap::from([
            (1, coords(&[rat(0), rat(1), rat(0), rat(0)])),
            (3, coords(&[rat(0), rat(0), rat(0), ratio(1, 6)])),
        ]),
    )
    .expect("valid twistor block data");
    (ring, chern)
}

/// The block spanned by `c_1^a e^b`, `a ≤ 3`, `b ≤ 1`, of the twistor space.
///
/// `e` here is the negative of the Euler class of the base, matching the sign
/// of the off-diagonal entry in the connection matrix: `c_1⁴ = 8 e c_1`,
/// `ch_3 = c_1³/6 − e`, `ch_5 = −(7/120) e c_1²`.
pub fn twistor_big_block() -> (CohomologyRing, ChernCharacterData) {
    // index = 4b + a
    let reduce = |mut a: u32, mut b: u32| -> Option<(usize, BigRational)> {
        let mut coeff = rat(1);
        if b > 1 {
            return None;
        }
        while a >= 4 {
            if b == 1 {
                return None;
            }
            a -= 3;
            b = 1;
            coeff *= rat(8);
        }
        Some(((4 * b + a) as usize, coeff))
    };
    let ring = CohomologyRing::new(
        labels(&["1", "c1", "c1^2", "c1^3", "e", "e c1", "e c1^2", "e c1^3"]),
        vec![0, 2, 4, 6, 6, 8, 10, 12],
        |i, j| {
            let mut v = vec![rat(0); 8];
            let (ai, bi) = ((i % 4) as u32, (i / 4) as u32);
            let (aj, bj) = ((j % 4) as u32, (j / 4) as u32);
            if let Some((k, c)) = reduce(ai + aj, bi + bj) {
                v[k] = c;
            }
            v
        },
        0,
        6,
    )
    .expect("valid twistor ring");
    let mut ch3 = vec![rat(0); 8];
    ch3[3] = ratio(1, 6);
    ch3[4] = rat(-1);
    let mut ch5 = vec![rat(0); 8];
    ch5[6] = ratio(-7, 120);
    let mut ch1 = vec![rat(0); 8];
    ch1[1] = rat(1);
    let chern = ChernCharacterData::from_odd(&ring, BTreeMap::from([(1, ch1), (3, ch3), (5, ch5)]))
        .expect("valid twistor data");
    (ring, chern)
}
