//! Valuation profiles, growth rates, characteristic polynomials of truncated
//! Frobenius series, their valuations at `q = πθ`, and Newton polygons.

use crate::connections::FrobeniusSolution;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::padic::{matrix_min_val, min_valuation, Coefficient, ExtRational, PrimeContext, Valuation};
use crate::ring::{rat, Ring};
use crate::series::Series;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use std::fmt;

/// `(m, val(Φ̄_m))` for `m = 0..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationProfile {
    pub p: u32,
    pub entries: Vec<(usize, Valuation)>,
}

impl ValuationProfile {
    pub fn is_fully_certified(&self) -> bool {
        self.entries.iter().all(|(_, v)| v.is_certified())
    }

    pub fn first_indeterminate(&self) -> Option<usize> {
        self.entries.iter().find(|(_, v)| !v.is_certified()).map(|(m, _)| *m)
    }

    /// Certified values only.
    pub fn certified(&self) -> Vec<(usize, ExtRational)> {
        self.entries
            .iter()
            .filter_map(|(m, v)| v.certified().map(|c| (*m, c.clone())))
            .collect()
    }
}

pub fn valuation_profile<T: Coefficient>(solution: &FrobeniusSolution<T>, p: u32) -> ValuationProfile {
    ValuationProfile {
        p,
        entries: solution
            .coeffs()
            .iter()
            .enumerate()
            .map(|(m, c)| (m, matrix_min_val(p, c)))
            .collect(),
    }
}

/// Least-squares slope of `(m, −val_m)` over `lo ≤ m ≤ hi`. Coefficients that
/// vanish exactly (valuation `+∞`) carry no growth information and are skipped.
pub fn growth_rate_fit(profile: &ValuationProfile, lo: usize, hi: usize) -> Result<BigRational> {
    let mut pts: Vec<(BigRational, BigRational)> = Vec::new();
    for (m, v) in &profile.entries {
        if *m < lo || *m > hi {
            continue;
        }
        match v {
            Valuation::Certified(ExtRational::Finite(x)) => pts.push((rat(*m as i64), -x.clone())),
            Valuation::Certified(ExtRational::Infinity) => {}
            Valuation::Indeterminate { .. } => {
                return Err(Error::Precision(format!(
                    "valuation of the q^{m} coefficient is not certified"
                )))
            }
        }
    }
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "window [{lo}, {hi}] holds {} usable points",
            pts.len()
        )));
    }
    let n = rat(pts.len() as i64);
    let sx: BigRational = pts.iter().map(|(x, _)| x.clone()).sum();
    let sy: BigRational = pts.iter().map(|(_, y)| y.clone()).sum();
    let sxx: BigRational = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: BigRational = pts.iter().map(|(x, y)| x * y).sum();
    let denom = &n * &sxx - &sx * &sx;
    Ok((&n * &sxy - &sx * &sy) / denom)
}

/// `det(zI − A) = Σ_k c_k z^k` by Berkowitz's division-free recurrence; returns `c_0..c_r`.
pub fn berkowitz<T: Ring>(a: &Matrix<T>) -> Vec<T> {
    let n = a.rows();
    let proto = a.get(0, 0);
    // highest power first
    let mut poly = vec![proto.one_like()];
    for k in 0..n {
        // leading (k+1)×(k+1) block: A_k (k×k), row R, column C, corner a_kk
        let mut toeplitz = Vec::with_capacity(k + 2);
        toeplitz.push(proto.one_like());
        toeplitz.push(a.get(k, k).negated());
        let mut v: Vec<T> = (0..k).map(|i| a.get(i, k).clone()).collect();
        for _ in 0..k {
            let rc = (0..k).fold(proto.zero_like(), |acc, j| {
                let x = a.get(k, j);
                if x.is_exact_zero() || v[j].is_exact_zero() {
                    acc
                } else {
                    acc.plus(&x.times(&v[j]))
                }
            });
            toeplitz.push(rc.negated());
            v = (0..k)
                .map(|i| {
                    (0..k).fold(proto.zero_like(), |acc, j| {
                        let x = a.get(i, j);
                        if x.is_exact_zero() || v[j].is_exact_zero() {
                            acc
                        } else {
                            acc.plus(&x.times(&v[j]))
                        }
                    })
                })
                .collect();
        }
        let next: Vec<T> = (0..k + 2)
            .map(|i| {
                (0..=i.min(k)).fold(proto.zero_like(), |acc, j| {
                    let t = &toeplitz[i - j];
                    if t.is_exact_zero() || poly[j].is_exact_zero() {
                        acc
                    } else {
                        acc.plus(&t.times(&poly[j]))
                    }
                })
            })
            .collect();
        poly = next;
    }
    poly.reverse();
    poly
}

/// `det(zI − Φ̄(q)) = Σ_k φ̄_k(q) z^k` over truncated series.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPolySeries<T> {
    pub coeffs: Vec<Series<T>>,
}

impl<T: Ring> CharPolySeries<T> {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &Series<T> {
        &self.coeffs[k]
    }
}

pub fn char_poly<T: Ring>(solution: &FrobeniusSolution<T>, order: usize) -> CharPolySeries<T> {
    let m = solution.series().truncate(order).to_series_matrix();
    CharPolySeries { coeffs: berkowitz(&m) }
}

/// Valuation at `q = πθ` for all Teichmüller units `θ` at once, with the tentative flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaValuation {
    pub value: Valuation,
    /// Set when the series has nonconstant terms, whose tail beyond the truncation is unknown.
    pub tentative: bool,
    pub order: usize,
}

/// `g_j(s) = Σ_l g_{j+(p−1)l} s^l`, so that `g(q) = Σ_j q^j g_j(q^{p−1})`.
pub fn residue_classes<T: Ring>(p: u32, g: &Series<T>) -> Vec<Vec<T>> {
    let step = (p - 1) as usize;
    (0..step)
        .map(|j| g.coeffs().iter().skip(j).step_by(step).cloned().collect())
        .collect()
}

/// `val(g(πθ)) = min_j (val(g_j(−p)) + j/(p−1))`: the terms lie in distinct classes
/// modulo `ℤ`, so no cancellation between them is possible.
pub fn val_at_pi_theta<T: Coefficient>(ctx: &PrimeContext, g: &Series<T>) -> ThetaValuation {
    let p = ctx.p();
    let minus_p = -BigRational::from_integer(ctx.p_big());
    let classes = residue_classes(p, g);
    let vals: Vec<Valuation> = classes
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(j, c)| {
            let mut power = rat(1);
            let mut acc = c[0].zero_like();
            for x in c {
                if !x.is_exact_zero() {
                    acc = acc.plus(&x.scaled(&power));
                }
                power *= &minus_p;
            }
            acc.valuation(p).shifted(&(rat(j as i64) / rat((p - 1) as i64)))
        })
        .collect();
    let tentative = g.coeffs().iter().skip(1).any(|x| !x.is_exact_zero());
    ThetaValuation { value: min_valuation(vals.iter()), tentative, order: g.order() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub points: Vec<(i64, ExtRational)>,
    pub vertices: Vec<(i64, BigRational)>,
    /// Weakly increasing slopes with their horizontal lengths.
    pub slopes: Vec<(BigRational, u64)>,
}

impl NewtonPolygon {
    /// Slopes listed with multiplicity.
    pub fn slope_list(&self) -> Vec<BigRational> {
        self.slopes
            .iter()
            .flat_map(|(s, m)| std::iter::repeat_n(s.clone(), *m as usize))
            .collect()
    }
}

fn cross(o: &(i64, BigRational), a: &(i64, BigRational), b: &(i64, BigRational)) -> BigRational {
    rat(a.0 - o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * rat(b.0 - o.0)
}

/// Lower convex hull; points at `+∞` contribute vertical rays only.
pub fn newton_polygon(points: &[(i64, ExtRational)]) -> Result<NewtonPolygon> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("Newton polygon of no points".to_string()));
    }
    let mut sorted = points.to_vec();
    sorted.sort_by_key(|(x, _)| *x);
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::InvalidArgument("repeated abscissa".to_string()));
    }
    if sorted[0].1.is_infinite() {
        return Err(Error::Precondition(
            "leftmost point is at infinity (constant coefficient vanishes)".to_string(),
        ));
    }
    let finite: Vec<(i64, BigRational)> = sorted
        .iter()
        .filter_map(|(x, v)| v.finite().map(|y| (*x, y.clone())))
        .collect();
    let mut hull: Vec<(i64, BigRational)> = Vec::new();
    for pt in finite {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt).is_positive() {
            hull.pop();
        }
        hull.push(pt);
    }
    let slopes = hull
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            ((&w[1].1 - &w[0].1) / rat(dx), dx as u64)
        })
        .collect();
    Ok(NewtonPolygon { points: sorted, vertices: hull, slopes })
}

/// Slopes against the prediction "slope `j` occurs `b_{2j}` times".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiComparison {
    pub expected: Vec<(BigRational, u64)>,
    pub observed: Vec<(BigRational, u64)>,
    /// Slopes whose multiplicities differ: `(slope, observed, expected)`.
    pub mismatches: Vec<(BigRational, u64, u64)>,
}

impl BettiComparison {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub fn betti_comparison(polygon: &NewtonPolygon, betti: &[(u32, u32)]) -> BettiComparison {
    use std::collections::BTreeMap;
    let mut expected: BTreeMap<BigRational, u64> = BTreeMap::new();
    for &(deg, b) in betti {
        if b > 0 {
            *expected.entry(BigRational::new((deg as i64).into(), 2.into())).or_default() += b as u64;
        }
    }
    let mut observed: BTreeMap<BigRational, u64> = BTreeMap::new();
    for (s, m) in &polygon.slopes {
        *observed.entry(s.clone()).or_default() += m;
    }
    let mut keys: Vec<&BigRational> = expected.keys().chain(observed.keys()).collect();
    keys.sort();
    keys.dedup();
    let mismatches = keys
        .into_iter()
        .filter_map(|k| {
            let (o, e) = (observed.get(k).copied().unwrap_or(0), expected.get(k).copied().unwrap_or(0));
            (o != e).then(|| (k.clone(), o, e))
        })
        .collect();
    BettiComparison {
        expected: expected.into_iter().collect(),
        observed: observed.into_iter().collect(),
        mismatches,
    }
}

/// Characteristic polynomial at `πθ` and its Newton polygon.
#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub values: Vec<ThetaValuation>,
    /// `None` when some coefficient valuation could not be certified.
    pub polygon: Option<NewtonPolygon>,
    pub tentative: bool,
}

impl NewtonReport {
    pub fn first_indeterminate(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.value.is_certified())
    }
}

pub fn newton_report<T: Coefficient>(
    ctx: &PrimeContext,
    solution: &FrobeniusSolution<T>,
    order: usize,
) -> Result<NewtonReport> {
    let cp = char_poly(solution, order);
    let values: Vec<ThetaValuation> = cp.coeffs.iter().map(|g| val_at_pi_theta(ctx, g)).collect();
    let tentative = values.iter().any(|v| v.tentative);
    let points: Option<Vec<(i64, ExtRational)>> = values
        .iter()
        .enumerate()
        .map(|(k, v)| v.value.certified().map(|c| (k as i64, c.clone())))
        .collect();
    let polygon = match points {
        Some(pts) => Some(newton_polygon(&pts)?),
        None => None,
    };
    Ok(NewtonReport { values, polygon, tentative })
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vertices.iter().map(|(x, y)| format!("({x},{y})")).collect();
        let s: Vec<String> = self.slope_list().iter().map(|s| s.to_string()).collect();
        write!(f, "vertices {} slopes ({})", v.join(","), s.join(","))
    }
}

/// `−val` as a float for plotting, `None` at `+∞`.
pub fn neg_val_f64(v: &ExtRational) -> Option<f64> {
    v.finite().map(|x| -x.to_f64().unwrap_or(f64::NAN))
}

/// Height of the lower hull at `x`, `None` outside its horizontal extent.
pub fn hull_value(polygon: &NewtonPolygon, x: i64) -> Option<BigRational> {
    let vs = &polygon.vertices;
    if vs.len() == 1 {
        return (x == vs[0].0).then(|| vs[0].1.clone());
    }
    vs.windows(2).find(|w| x >= w[0].0 && x <= w[1].0).map(|w| {
        let t = rat(x - w[0].0) / rat(w[1].0 - w[0].0);
        &w[0].1 + t * (&w[1].1 - &w[0].1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::{builtin, dwork, frobenius_residual, solve_frobenius, solve_gamma_frobenius};
    use crate::matrix::RationalMatrix;
    use crate::ring::ratio;
    use num_traits::Zero;
    use crate::series::{MatrixSeries, Variable};
    use crate::special::dwork_coefficients;
    use proptest::prelude::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    fn pts(v: &[(i64, i64)]) -> Vec<(i64, ExtRational)> {
        v.iter().map(|&(x, y)| (x, ExtRational::int(y))).collect()
    }

    #[test]
    fn berkowitz_matches_small_cases() {
        let a = RationalMatrix::from_ints(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let c = berkowitz(&a);
        // z^3 − 9z^2 + 24z − 18
        assert_eq!(c, vec![rat(-18), rat(24), rat(-9), rat(1)]);
        assert_eq!(berkowitz(&RationalMatrix::eye(3)), vec![rat(-1), rat(3), rat(-3), rat(1)]);
    }

    proptest! {
        #[test]
        fn berkowitz_constant_term_is_signed_determinant(v in proptest::collection::vec(-4i64..5, 16)) {
            let a = RationalMatrix::from_vec(4, 4, v.into_iter().map(rat).collect());
            let c = berkowitz(&a);
            prop_assert_eq!(&c[0], &a.determinant());
            prop_assert_eq!(&c[3], &(-a.trace()));
        }

        #[test]
        fn adding_points_above_keeps_the_polygon(ys in proptest::collection::vec(-10i64..10, 2..7), extra in 0i64..20, at in 0usize..6) {
            let points: Vec<(i64, ExtRational)> = ys.iter().enumerate().map(|(i, &y)| (2 * i as i64, ExtRational::int(y))).collect();
            let poly = newton_polygon(&points).unwrap();
            let x = 2 * (at % (ys.len() - 1)) as i64 + 1;
            let y = hull_value(&poly, x).unwrap() + rat(extra) + ratio(1, 2);
            let mut more = points.clone();
            more.push((x, ExtRational::Finite(y)));
            let again = newton_polygon(&more).unwrap();
            prop_assert_eq!(again.vertices, poly.vertices);
            prop_assert_eq!(again.slopes, poly.slopes);
        }

        #[test]
        fn val_at_pi_theta_is_multiplicative(a in proptest::collection::vec(-30i64..30, 1..6), b in proptest::collection::vec(-30i64..30, 1..6)) {
            let c = ctx(5);
            let n = a.len() + b.len();
            let pad = |v: &Vec<i64>| { let mut w: Vec<BigRational> = v.iter().map(|&x| rat(x)).collect(); w.resize(n, rat(0)); Series::new(w) };
            let (sa, sb) = (pad(&a), pad(&b));
            let va = val_at_pi_theta(&c, &sa).value;
            let vb = val_at_pi_theta(&c, &sb).value;
            let vab = val_at_pi_theta(&c, &sa.times(&sb)).value;
            if let (Some(x), Some(y)) = (va.certified(), vb.certified()) {
                prop_assert_eq!(vab.certified().unwrap(), &x.add(y));
            }
        }

        #[test]
        fn residue_classes_reassemble(v in proptest::collection::vec(-9i64..10, 1..30)) {
            let g = Series::new(v.iter().map(|&x| rat(x)).collect());
            let classes = residue_classes(7, &g);
            let mut back = vec![rat(0); v.len()];
            for (j, c) in classes.iter().enumerate() {
                for (l, x) in c.iter().enumerate() {
                    back[j + 6 * l] = x.clone();
                }
            }
            prop_assert_eq!(back, g.coeffs().to_vec());
        }
    }

    #[test]
    fn newton_polygons_from_the_examples() {
        let p = newton_polygon(&pts(&[(0, -3), (1, -3), (2, -2), (3, 0)])).unwrap();
        assert_eq!(p.slope_list(), vec![rat(0), rat(1), rat(2)]);
        let p = newton_polygon(&pts(&[(0, -4), (1, -4), (2, -2), (3, -2), (4, 0)])).unwrap();
        assert_eq!(p.vertices, vec![(0, rat(-4)), (1, rat(-4)), (3, rat(-2)), (4, rat(0))]);
        assert_eq!(p.slope_list(), vec![rat(0), rat(1), rat(1), rat(2)]);
        let single = newton_polygon(&pts(&[(0, 5)])).unwrap();
        assert!(single.slopes.is_empty());
        assert!(newton_polygon(&[]).is_err());
        let holes = vec![(0, ExtRational::int(0)), (1, ExtRational::Infinity), (2, ExtRational::int(0))];
        assert_eq!(newton_polygon(&holes).unwrap().slope_list(), vec![rat(0), rat(0)]);
    }

    #[test]
    fn betti_verdicts() {
        let f1 = newton_polygon(&pts(&[(0, -4), (1, -4), (3, -2), (4, 0)])).unwrap();
        assert!(betti_comparison(&f1, &[(0, 1), (2, 2), (4, 1)]).passes());
        let bad = betti_comparison(&f1, &[(0, 1), (2, 1), (4, 2)]);
        assert!(!bad.passes());
        assert_eq!(bad.mismatches[0], (rat(1), 2, 1));
    }

    #[test]
    fn simple_theta_valuations() {
        let c = ctx(5);
        let q = Series::new(vec![rat(0), rat(1), rat(0)]);
        let v = val_at_pi_theta(&c, &q);
        assert_eq!(v.value, Valuation::Certified(ExtRational::Finite(ratio(1, 4))));
        let k = Series::new(vec![rat(50), rat(0), rat(0)]);
        let v = val_at_pi_theta(&c, &k);
        assert_eq!(v.value, Valuation::Certified(ExtRational::int(2)));
        assert!(!v.tentative);
        let d = dwork_coefficients(&c, 60);
        let g = Series::new(d.as_slice().to_vec());
        let v = val_at_pi_theta(&c, &g);
        assert_eq!(v.value, Valuation::Certified(ExtRational::int(0)));
        assert!(v.tentative);
    }

    #[test]
    fn rank_one_family_has_unit_value() {
        for p in [3u64, 5, 7] {
            let c = ctx(p);
            for k in [-3i64, -1, 1, 2, 4] {
                let sol = solve_frobenius(&dwork(rat(k)), p as u32, &RationalMatrix::eye(1), 60).unwrap();
                let g = sol.series().entry_series(0, 0);
                assert_eq!(val_at_pi_theta(&c, &g).value, Valuation::Certified(ExtRational::int(0)), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn profile_of_the_rank_one_solution() {
        let c = ctx(3);
        let sol = solve_frobenius(&dwork(rat(1)), 3, &RationalMatrix::eye(1), 50).unwrap();
        let d = dwork_coefficients(&c, 50);
        let prof = valuation_profile(&sol, 3);
        for (m, v) in &prof.entries {
            assert_eq!(v, &Valuation::Certified(c.val(d.get(*m))));
        }
        let constant = FrobeniusSolution::new(
            MatrixSeries::constant(RationalMatrix::from_ints(&[&[9, 0], &[0, 3]]), 5, Variable::Q),
            "constant",
        );
        let prof = valuation_profile(&constant, 3);
        assert_eq!(prof.entries[0].1, Valuation::Certified(ExtRational::int(1)));
        assert!(prof.entries[1..].iter().all(|(_, v)| v == &Valuation::Certified(ExtRational::Infinity)));
    }

    #[test]
    fn linear_profile_fits_exactly() {
        let prof = ValuationProfile {
            p: 5,
            entries: (0..40).map(|m| (m, Valuation::Certified(ExtRational::Finite(ratio(-(m as i64), 4))))).collect(),
        };
        assert_eq!(growth_rate_fit(&prof, 10, 30).unwrap(), ratio(1, 4));
        let mut broken = prof.clone();
        broken.entries[15].1 = Valuation::Indeterminate { at_least: ExtRational::int(-9) };
        assert!(matches!(growth_rate_fit(&broken, 10, 30), Err(Error::Precision(_))));
        assert!(growth_rate_fit(&broken, 0, 10).is_ok());
    }

    #[test]
    fn char_poly_of_simple_series() {
        let c = ctx(5);
        let sol = solve_frobenius(&dwork(rat(1)), 5, &RationalMatrix::eye(1), 20).unwrap();
        let cp = char_poly(&sol, 20);
        let d = dwork_coefficients(&c, 20);
        assert_eq!(cp.coeff(1).coeffs(), &vec![rat(1); 1].into_iter().chain(std::iter::repeat_n(rat(0), 20)).collect::<Vec<_>>()[..]);
        assert_eq!(cp.coeff(0).coeffs(), &d.as_slice().iter().map(|x| -x).collect::<Vec<_>>()[..]);
        let id = FrobeniusSolution::new(MatrixSeries::constant(RationalMatrix::eye(3), 4, Variable::Q), "id");
        let cp = char_poly(&id, 4);
        let consts: Vec<BigRational> = cp.coeffs.iter().map(|s| s.coeff(0).clone()).collect();
        assert_eq!(consts, vec![rat(-1), rat(3), rat(-3), rat(1)]);
    }

    #[test]
    fn determinant_satisfies_its_scalar_equation() {
        // q∂_q φ_0 + (tr Ā(q) − p·tr Ā(−q^p/p)) φ_0 = 0
        let c = ctx(3);
        for name in ["cp1", "f1", "cubic-surface"] {
            let conn = builtin(name).unwrap();
            let sol = solve_gamma_frobenius(&conn, &c, 25, 10).unwrap();
            let exact = &sol.basis[0].solution;
            assert!(frobenius_residual(&conn, 3, exact).coeffs().iter().all(|m| m.is_exact_zero()));
            let phi0 = char_poly(exact, 25).coeff(0).clone();
            let a = conn.series(25);
            let tr = Series::new(a.coeffs().iter().map(|m| m.trace()).collect());
            let trp = Series::new(a.pullback(3).coeffs().iter().map(|m| m.trace() * rat(3)).collect());
            let eul = Series::new(phi0.coeffs().iter().enumerate().map(|(m, x)| x * rat(m as i64)).collect());
            let lhs = eul.plus(&tr.minus(&trp).times(&phi0));
            assert!(lhs.coeffs().iter().all(|x| x.is_zero()), "{name}");
        }
    }
}
