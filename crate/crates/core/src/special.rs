//! Dwork exponential coefficients and the Taylor expansion of Morita's p-adic
//! Gamma function at 0.
//!
//! `D(z) = exp(z + z^p/p) = Σ d_m z^m`. The Mahler expansion
//! `Γ_p(−pz) = Σ_m (−p)^m d_{mp} z(z−1)⋯(z−m+1)` turns into a Taylor series by
//! collecting `z^k` coefficients: with `s(m,k)` the signed Stirling numbers of the
//! first kind,
//!
//! ```text
//! Γ_p^{(k)}(0) = k! (−p)^{−k} Σ_m (−p)^m d_{mp} s(m,k).
//! ```

use crate::error::{Error, Result};
use crate::padic::{val_p, ApproxPadic, ExtRational, PrimeContext};
use crate::ring::{factorial, rat, Ring};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DworkCoefficients {
    ctx: PrimeContext,
    d: Vec<BigRational>,
}

impl DworkCoefficients {
    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn max_index(&self) -> usize {
        self.d.len() - 1
    }

    pub fn get(&self, m: usize) -> &BigRational {
        &self.d[m]
    }

    pub fn as_slice(&self) -> &[BigRational] {
        &self.d
    }

    /// Checks `d_m = (m+1) d_{m+1} − d_{m−p+1}` wherever both sides are stored.
    pub fn recursion_holds(&self) -> bool {
        let p = self.ctx.p() as usize;
        (0..self.max_index()).all(|m| {
            let back = if m + 1 >= p { self.d[m + 1 - p].clone() } else { BigRational::zero() };
            self.d[m] == rat(m as i64 + 1) * &self.d[m + 1] - back
        })
    }

    /// Checks `val_p(d_m) ≥ m(1−2p)/(p³−p²)` for every stored index.
    pub fn valuation_bound_holds(&self) -> bool {
        self.d.iter().enumerate().all(|(m, dm)| {
            val_p(&self.ctx, dm) >= ExtRational::Finite(dwork_valuation_bound(self.ctx.p(), m))
        })
    }
}

/// `m(1−2p)/(p³−p²)`.
pub fn dwork_valuation_bound(p: u32, m: usize) -> BigRational {
    let p = p as i64;
    BigRational::new(
        BigInt::from(m as i64 * (1 - 2 * p)),
        BigInt::from(p * p * p - p * p),
    )
}

/// `d_0, …, d_M`, generated by `(m+1) d_{m+1} = d_m + d_{m−p+1}` (from `D' = (1+z^{p−1}) D`).
pub fn dwork_coefficients(ctx: &PrimeContext, max_index: usize) -> DworkCoefficients {
    DworkCoefficients {
        ctx: ctx.clone(),
        d: exp_series_coefficients(ctx.p(), &rat(1), max_index),
    }
}

/// Coefficients of `D(z)^c = exp(c(z + z^p/p))` through `z^M`.
pub fn exp_series_coefficients(p: u32, c: &BigRational, max_index: usize) -> Vec<BigRational> {
    let p = p as usize;
    let mut d = Vec::with_capacity(max_index + 1);
    d.push(BigRational::one());
    for m in 0..max_index {
        let mut next = d[m].clone();
        if m + 1 >= p {
            next += &d[m + 1 - p];
        }
        d.push(next * c / rat(m as i64 + 1));
    }
    d
}

/// The same coefficients as a Cauchy product of the truncated series of
/// `exp(z)` and `exp(z^p/p)`. Quadratic; kept as an independent check.
pub fn dwork_coefficients_cauchy(ctx: &PrimeContext, max_index: usize) -> Vec<BigRational> {
    let p = ctx.p() as usize;
    let inv_fact: Vec<BigRational> = (0..=max_index)
        .map(|n| BigRational::new(BigInt::one(), factorial(n as u64)))
        .collect();
    (0..=max_index)
        .map(|m| {
            let mut acc = BigRational::zero();
            let mut j = 0;
            while j * p <= m {
                // z^{pj}/(p^j j!)
                let b = &inv_fact[j] * ctx.p_power(-(j as i64));
                acc += &inv_fact[m - j * p] * b;
                j += 1;
            }
            acc
        })
        .collect()
}

/// Signed Stirling numbers of the first kind `s(m, k)` for `m ≤ m_max`, `k ≤ k_max`:
/// the `z^k` coefficient of `z(z−1)⋯(z−m+1)`.
pub fn stirling_first(m_max: usize, k_max: usize) -> Vec<Vec<BigInt>> {
    let mut s = vec![vec![BigInt::zero(); k_max + 1]; m_max + 1];
    s[0][0] = BigInt::one();
    for m in 0..m_max {
        for k in 0..=k_max {
            let mut v = -BigInt::from(m) * &s[m][k];
            if k > 0 {
                v += &s[m][k - 1];
            }
            s[m + 1][k] = v;
        }
    }
    s
}

const LOG_SLACK: f64 = 1e-9;

/// Upper bound for `log_p(x)`, `x ≥ 1`.
fn log_p_upper(p: u32, x: f64) -> f64 {
    if x <= 1.0 {
        return 0.0;
    }
    (x.ln() / (p as f64).ln()) * (1.0 + LOG_SLACK) + LOG_SLACK
}

/// Lower bound for the per-term estimate
/// `f(m) = k/(p−1) + m(p−1)/p − log_p(k) − k·log_p(m−1) − (2p−1)/(p−1)`.
pub fn mahler_term_bound(p: u32, k: u64, m: u64) -> f64 {
    let pf = p as f64;
    let exact_part = k as f64 / (pf - 1.0) + m as f64 * (pf - 1.0) / pf - (2.0 * pf - 1.0) / (pf - 1.0);
    exact_part * (1.0 - LOG_SLACK.copysign(exact_part)) - LOG_SLACK
        - log_p_upper(p, k as f64)
        - k as f64 * log_p_upper(p, (m as f64 - 1.0).max(1.0))
}

/// Smallest `M` satisfying the truncation conditions for the `k`-th derivative
/// of `z ↦ Γ_p(−pz)` at precision `G`, with transcendental quantities rounded
/// against us.
pub fn mahler_truncation_bound(ctx: &PrimeContext, k: u64, precision: i64) -> u64 {
    if k == 0 {
        return 1;
    }
    let p = ctx.p();
    let pf = p as f64;
    let ln_p_low = pf.ln() * (1.0 - LOG_SLACK);
    let first = k as f64 * pf / ((pf - 1.0) * ln_p_low) + 1.0 + LOG_SLACK;
    let mut m = first.ceil().max(2.0) as u64;
    while mahler_term_bound(p, k, m) <= precision as f64 {
        m += 1;
    }
    m
}

/// `Γ_p^{(k)}(0)` for `k ≤ k_max`, each accurate to valuation `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaDerivatives {
    ctx: PrimeContext,
    precision: i64,
    values: Vec<ApproxPadic>,
    taylor: Vec<ApproxPadic>,
    truncation: Vec<u64>,
}

impl GammaDerivatives {
    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    /// `Γ_p^{(k)}(0)`.
    pub fn derivative(&self, k: usize) -> &ApproxPadic {
        &self.values[k]
    }

    pub fn values(&self) -> &[ApproxPadic] {
        &self.values
    }

    /// `g_k = Γ_p^{(k)}(0)/k!`.
    pub fn taylor(&self, k: usize) -> &ApproxPadic {
        &self.taylor[k]
    }

    pub fn taylor_coefficients(&self) -> &[ApproxPadic] {
        &self.taylor
    }

    /// Number of Mahler terms used for the `k`-th derivative.
    pub fn truncation(&self, k: usize) -> u64 {
        self.truncation[k]
    }
}

/// Partial Mahler sums `k!(−p)^{−k} Σ_{m<M} (−p)^m d_{mp} s(m,k)` as exact rationals.
pub fn gamma_derivative_partial_sum(ctx: &PrimeContext, k: usize, terms: u64) -> BigRational {
    let p = ctx.p() as usize;
    let m_count = terms as usize;
    let d = dwork_coefficients(ctx, (m_count.max(1) - 1) * p);
    let s = stirling_first(m_count, k);
    mahler_sum(ctx, k, m_count, &d, &s)
}

fn mahler_sum(
    ctx: &PrimeContext,
    k: usize,
    terms: usize,
    d: &DworkCoefficients,
    s: &[Vec<BigInt>],
) -> BigRational {
    let p = ctx.p() as usize;
    let minus_p = -BigRational::from_integer(ctx.p_big());
    let mut acc = BigRational::zero();
    let mut power = BigRational::one();
    for m in 0..terms {
        if !s[m][k].is_zero() {
            acc += &power * d.get(m * p) * BigRational::from_integer(s[m][k].clone());
        }
        power *= &minus_p;
    }
    let scale = BigRational::from_integer(factorial(k as u64)) / minus_p.pow(k as i32);
    acc * scale
}

pub fn gamma_derivatives(ctx: &PrimeContext, k_max: usize, precision: i64) -> GammaDerivatives {
    let p = ctx.p() as usize;
    // the Mahler bound controls derivatives of Γ_p(−pz); rescaling by (−p)^{−k} costs k digits
    let truncation: Vec<u64> = (0..=k_max)
        .map(|k| mahler_truncation_bound(ctx, k as u64, precision + k as i64))
        .collect();
    let m_max = *truncation.iter().max().unwrap() as usize;
    let d = dwork_coefficients(ctx, (m_max - 1) * p);
    let s = stirling_first(m_max, k_max);
    let mut values = Vec::with_capacity(k_max + 1);
    let mut taylor = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let sum = mahler_sum(ctx, k, truncation[k] as usize, &d, &s);
        let err = if k == 0 { ExtRational::Infinity } else { ExtRational::int(precision) };
        let value = ApproxPadic::new(ctx, sum, err);
        let inv_fact = BigRational::new(BigInt::one(), factorial(k as u64));
        taylor.push(value.scale(&inv_fact));
        values.push(value);
    }
    GammaDerivatives {
        ctx: ctx.clone(),
        precision,
        values,
        taylor,
        truncation,
    }
}

/// The even-order Taylor coefficient forced by `Γ_p(z)Γ_p(−z) = 1`:
/// `g_k = (−1)^{k/2−1} g_{k/2}²/2 + Σ_{0<j<k/2} (−1)^{j−1} g_j g_{k−j}`.
pub fn even_taylor_coefficient<T: Ring>(g: &[T], k: usize) -> T {
    assert!(k > 0 && k.is_multiple_of(2) && g.len() >= k);
    let half = k / 2;
    let sq = g[half].times(&g[half]).scaled(&BigRational::new(1.into(), 2.into()));
    let mut acc = if (half - 1).is_multiple_of(2) { sq } else { sq.negated() };
    for j in 1..half {
        let t = g[j].times(&g[k - j]);
        acc = if (j - 1) % 2 == 0 { acc.plus(&t) } else { acc.minus(&t) };
    }
    acc
}

/// Coefficients `L_m` of `log(Σ g_k z^k)` for `g_0 = 1`, through `z^{m_max}`:
/// `k L_k = k g_k − Σ_{0<j<k} j L_j g_{k−j}`.
pub fn formal_log<T: Ring>(g: &[T], m_max: usize) -> Vec<T> {
    let mut l: Vec<T> = vec![g[0].zero_like()];
    for k in 1..=m_max {
        let mut acc = g[k].scaled(&rat(k as i64));
        for j in 1..k {
            acc = acc.minus(&l[j].times(&g[k - j]).scaled(&rat(j as i64)));
        }
        l.push(acc.scaled(&BigRational::new(1.into(), BigInt::from(k))));
    }
    l
}

/// `l_m` with `log Γ_p(z) = Σ l_m z^m/m!`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogGammaCoefficients {
    ctx: PrimeContext,
    l: Vec<ApproxPadic>,
}

impl LogGammaCoefficients {
    pub fn ctx(&self) -> &PrimeContext {
        &self.ctx
    }

    pub fn m_max(&self) -> usize {
        self.l.len() - 1
    }

    /// `l_m`; index 0 is an exact zero.
    pub fn get(&self, m: usize) -> &ApproxPadic {
        &self.l[m]
    }

    pub fn values(&self) -> &[ApproxPadic] {
        &self.l
    }
}

/// Formal logarithm of the Taylor series of given derivatives; fails unless every
/// coefficient reaches valuation `G`.
pub fn log_gamma_from_derivatives(
    derivs: &GammaDerivatives,
    m_max: usize,
    precision: i64,
) -> Result<LogGammaCoefficients> {
    if m_max > derivs.k_max() {
        return Err(Error::InvalidArgument(format!(
            "need derivatives through order {m_max}, have {}",
            derivs.k_max()
        )));
    }
    let big_l = formal_log(derivs.taylor_coefficients(), m_max);
    let l: Vec<ApproxPadic> = big_l
        .iter()
        .enumerate()
        .map(|(m, x)| x.scale(&BigRational::from_integer(factorial(m as u64))))
        .collect();
    let target = ExtRational::int(precision);
    if let Some((m, x)) = l.iter().enumerate().find(|(_, x)| x.err_val() < &target) {
        return Err(Error::Precision(format!(
            "l_{m} only known to valuation {} (< {precision})",
            x.err_val()
        )));
    }
    Ok(LogGammaCoefficients {
        ctx: derivs.ctx.clone(),
        l,
    })
}

/// `l_1, …, l_{m_max}` to valuation `G`, raising the working precision of the
/// derivatives until error propagation through the logarithm allows it.
pub fn log_gamma_coefficients(
    ctx: &PrimeContext,
    m_max: usize,
    precision: i64,
) -> Result<LogGammaCoefficients> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("m_max must be at least 1".to_string()));
    }
    let mut working = precision;
    let mut last_err = None;
    for _ in 0..8 {
        let derivs = gamma_derivatives(ctx, m_max, working);
        match log_gamma_from_derivatives(&derivs, m_max, precision) {
            Ok(l) => return Ok(l),
            Err(e) => last_err = Some(e),
        }
        working += (working.abs() / 2).max(4);
    }
    Err(last_err.expect("at least one attempt"))
}
