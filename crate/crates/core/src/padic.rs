//! p-adic valuations on exact rationals and error-tracked approximations.
//!
//! Valuations live in `ExtRational` (exact rationals plus `+∞`). The uniformizer
//! of the cyclotomic extension is never materialized: everything outside `ℚ` is
//! handled by valuation bookkeeping in `(1/(p-1))·ℤ`.

use crate::error::{Error, Result};
use crate::ring::{rat, Ring};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// An odd prime together with the valuation of the uniformizer `π` (`π^{p-1} = -p`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeContext {
    p: u32,
    pi_valuation: BigRational,
}

impl PrimeContext {
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || p > u32::MAX as u64 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Self {
            p: p as u32,
            pi_valuation: BigRational::new(BigInt::one(), BigInt::from(p - 1)),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `val(π) = 1/(p-1)`.
    pub fn pi_valuation(&self) -> &BigRational {
        &self.pi_valuation
    }

    /// `p^e` as an exact rational; `e` may be negative.
    pub fn p_power(&self, e: i64) -> BigRational {
        let base = BigInt::from(self.p).pow(e.unsigned_abs() as u32);
        if e >= 0 {
            BigRational::from_integer(base)
        } else {
            BigRational::new(BigInt::one(), base)
        }
    }

    pub fn val(&self, x: &BigRational) -> ExtRational {
        val_p(self, x)
    }

    pub fn exact(&self, x: BigRational) -> ApproxPadic {
        ApproxPadic::exact(self, x)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A rational number or `+∞`, ordered with `+∞` on top.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn int(n: i64) -> Self {
        ExtRational::Finite(rat(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(v) => Some(v),
            ExtRational::Infinity => None,
        }
    }

    pub fn add(&self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }

    pub fn add_rational(&self, other: &BigRational) -> ExtRational {
        match self {
            ExtRational::Finite(a) => ExtRational::Finite(a + other),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    pub fn min_of(self, other: ExtRational) -> ExtRational {
        std::cmp::min(self, other)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtRational::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            ExtRational::Infinity => f64::INFINITY,
        }
    }

    /// Smallest integer `>=` the value; `None` for `+∞`.
    pub fn ceil_int(&self) -> Option<i64> {
        self.finite().map(|v| v.ceil().to_integer().to_i64().expect("valuation overflow"))
    }
}

impl From<BigRational> for ExtRational {
    fn from(v: BigRational) -> Self {
        ExtRational::Finite(v)
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, _) => Ordering::Greater,
            (_, ExtRational::Infinity) => Ordering::Less,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(v) => write!(f, "{}", crate::ring::format_rational(v)),
            ExtRational::Infinity => write!(f, "inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn val_int(n: &BigInt, p: u32) -> Option<u64> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0u64;
    // strip large chunks first so huge valuations stay cheap
    let mut chunk = p.clone();
    let mut chunk_len = 1u64;
    loop {
        let (q, r) = n.div_rem(&chunk);
        if r.is_zero() {
            n = q;
            v += chunk_len;
            if chunk_len < 64 {
                chunk = &chunk * &chunk;
                chunk_len *= 2;
            }
        } else if chunk_len > 1 {
            chunk = p.clone();
            chunk_len = 1;
        } else {
            return Some(v);
        }
    }
}

/// `val_p(x)`, with `val_p(0) = +∞`.
pub fn val_p(ctx: &PrimeContext, x: &BigRational) -> ExtRational {
    val_rational(x, ctx.p)
}

pub(crate) fn val_rational(x: &BigRational, p: u32) -> ExtRational {
    match val_int(x.numer(), p) {
        None => ExtRational::Infinity,
        Some(vn) => {
            let vd = val_int(x.denom(), p).unwrap_or(0);
            ExtRational::int(vn as i64 - vd as i64)
        }
    }
}

/// Outcome of a certified valuation query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// The true valuation.
    Certified(ExtRational),
    /// Only a lower bound is known.
    Indeterminate { at_least: ExtRational },
}

impl Valuation {
    pub fn certified(&self) -> Option<&ExtRational> {
        match self {
            Valuation::Certified(v) => Some(v),
            Valuation::Indeterminate { .. } => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Valuation::Certified(_))
    }

    /// A lower bound that is valid in both cases.
    pub fn lower_bound(&self) -> &ExtRational {
        match self {
            Valuation::Certified(v) => v,
            Valuation::Indeterminate { at_least } => at_least,
        }
    }

    pub fn shifted(&self, by: &BigRational) -> Valuation {
        match self {
            Valuation::Certified(v) => Valuation::Certified(v.add_rational(by)),
            Valuation::Indeterminate { at_least } => Valuation::Indeterminate {
                at_least: at_least.add_rational(by),
            },
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Certified(v) => write!(f, "{v}"),
            Valuation::Indeterminate { at_least } => write!(f, ">= {at_least} (indeterminate)"),
        }
    }
}

/// Minimum of a collection of valuations of summands whose valuations are
/// pairwise distinct or, more generally, of entries of a matrix.
///
/// The certified minimum stands when no indeterminate entry can undercut it.
pub fn min_valuation<'a>(items: impl IntoIterator<Item = &'a Valuation>) -> Valuation {
    let mut certified = ExtRational::Infinity;
    let mut pending = ExtRational::Infinity;
    let mut any_pending = false;
    for v in items {
        match v {
            Valuation::Certified(c) => certified = certified.min_of(c.clone()),
            Valuation::Indeterminate { at_least } => {
                any_pending = true;
                pending = pending.min_of(at_least.clone());
            }
        }
    }
    if !any_pending || pending >= certified {
        Valuation::Certified(certified)
    } else {
        Valuation::Indeterminate {
            at_least: certified.min_of(pending),
        }
    }
}

/// A rational approximation of a `ℚ_p` element with a guaranteed error bound:
/// the true value minus `approx` has valuation at least `err_val`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxPadic {
    p: u32,
    approx: BigRational,
    err_val: ExtRational,
}

impl ApproxPadic {
    pub fn new(ctx: &PrimeContext, approx: BigRational, err_val: ExtRational) -> Self {
        Self::with_prime(ctx.p, approx, err_val)
    }

    pub fn exact(ctx: &PrimeContext, approx: BigRational) -> Self {
        Self::with_prime(ctx.p, approx, ExtRational::Infinity)
    }

    fn with_prime(p: u32, approx: BigRational, err_val: ExtRational) -> Self {
        let mut x = Self { p, approx, err_val };
        x.compact();
        x
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn approx(&self) -> &BigRational {
        &self.approx
    }

    pub fn err_val(&self) -> &ExtRational {
        &self.err_val
    }

    pub fn is_exact(&self) -> bool {
        self.err_val.is_infinite()
    }

    /// True when the value is known to lie in `p^G ℤ_p`.
    pub fn is_consistent_with_zero_at(&self, precision: i64) -> bool {
        let g = ExtRational::int(precision);
        self.err_val >= g && self.val_approx() >= g
    }

    /// Weakens the error bound to `err_val` (no-op if it is already weaker).
    pub fn with_err_at_most(&self, err_val: ExtRational) -> Self {
        Self::with_prime(self.p, self.approx.clone(), self.err_val.clone().min_of(err_val))
    }

    fn val_approx(&self) -> ExtRational {
        val_rational(&self.approx, self.p)
    }

    pub fn certified_val(&self) -> Valuation {
        let v = self.val_approx();
        if self.err_val.is_infinite() || v < self.err_val {
            Valuation::Certified(v)
        } else {
            Valuation::Indeterminate {
                at_least: self.err_val.clone(),
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        Self::with_prime(
            self.p,
            &self.approx + &other.approx,
            self.err_val.clone().min_of(other.err_val.clone()),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        Self::with_prime(
            self.p,
            &self.approx - &other.approx,
            self.err_val.clone().min_of(other.err_val.clone()),
        )
    }

    pub fn neg(&self) -> Self {
        Self {
            p: self.p,
            approx: -&self.approx,
            err_val: self.err_val.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.p, other.p);
        let err = self
            .err_val
            .add(&other.val_approx())
            .min_of(other.err_val.add(&self.val_approx()))
            .min_of(self.err_val.add(&other.err_val));
        Self::with_prime(self.p, &self.approx * &other.approx, err)
    }

    /// Division by an element whose valuation is certified.
    pub fn div(&self, other: &Self) -> Result<Self> {
        let vb = match other.certified_val() {
            Valuation::Certified(ExtRational::Finite(v)) => v,
            _ => {
                return Err(Error::Precision(
                    "divisor valuation is not certified".to_string(),
                ))
            }
        };
        let va = self.val_approx();
        let err = self
            .err_val
            .add_rational(&-&vb)
            .min_of(va.add(&other.err_val).add_rational(&(-rat(2) * &vb)));
        Ok(Self::with_prime(self.p, &self.approx / &other.approx, err))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self {
                p: self.p,
                approx: BigRational::zero(),
                err_val: ExtRational::Infinity,
            };
        }
        let v = val_rational(factor, self.p);
        Self::with_prime(self.p, &self.approx * factor, self.err_val.add(&v))
    }

    /// Replaces `approx` by a representative `p^v·n` congruent modulo the error
    /// ball, but only when that is smaller than the current rational.
    fn compact(&mut self) {
        let Some(e) = self.err_val.ceil_int() else {
            return;
        };
        if self.approx.is_zero() {
            return;
        }
        let v = match self.val_approx() {
            ExtRational::Finite(v) => v.to_integer().to_i64().expect("valuation overflow"),
            ExtRational::Infinity => unreachable!(),
        };
        if v >= e {
            self.approx = BigRational::zero();
            return;
        }
        let digits = (e - v) as u64;
        let mod_bits = (digits as f64 * (self.p as f64).log2()).ceil() as u64;
        let cur_bits = self.approx.numer().bits() + self.approx.denom().bits();
        if cur_bits <= mod_bits + 64 {
            return;
        }
        let p = BigInt::from(self.p);
        let modulus = p.pow(digits as u32);
        // approx = p^v · u / w with u, w prime to p
        let (mut u, mut w) = (self.approx.numer().clone(), self.approx.denom().clone());
        if v >= 0 {
            u /= p.pow(v as u32);
        } else {
            w /= p.pow((-v) as u32);
        }
        let mut n = u.mod_floor(&modulus);
        if !w.is_one() {
            let inv = mod_inverse(&w.mod_floor(&modulus), &modulus)
                .expect("denominator prime to p must be invertible");
            n = (n * inv).mod_floor(&modulus);
        }
        let scale = if v >= 0 {
            BigRational::from_integer(p.pow(v as u32))
        } else {
            BigRational::new(BigInt::one(), p.pow((-v) as u32))
        };
        self.approx = BigRational::from_integer(n) * scale;
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// `approx_mul` of the error-propagation rules.
pub fn approx_mul(a: &ApproxPadic, b: &ApproxPadic) -> ApproxPadic {
    a.mul(b)
}

pub fn certified_val(x: &ApproxPadic) -> Valuation {
    x.certified_val()
}

impl fmt::Display for ApproxPadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = crate::ring::format_rational(&self.approx);
        match &self.err_val {
            ExtRational::Infinity => write!(f, "{a}"),
            e => write!(f, "{a} + O({}^{e})", self.p),
        }
    }
}

impl Ring for ApproxPadic {
    fn zero_like(&self) -> Self {
        Self {
            p: self.p,
            approx: BigRational::zero(),
            err_val: ExtRational::Infinity,
        }
    }
    fn one_like(&self) -> Self {
        Self {
            p: self.p,
            approx: BigRational::one(),
            err_val: ExtRational::Infinity,
        }
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn scaled(&self, factor: &BigRational) -> Self {
        self.scale(factor)
    }
    fn is_exact_zero(&self) -> bool {
        self.approx.is_zero() && self.err_val.is_infinite()
    }
}

/// Coefficients whose p-adic valuation can be queried.
pub trait Coefficient: Ring + Send + Sync {
    fn valuation(&self, p: u32) -> Valuation;
    /// True when the element might be zero given its error bound.
    fn is_consistent_with_zero(&self) -> bool;
    /// The best rational stand-in for the element.
    fn rational_approx(&self) -> BigRational;
}

impl Coefficient for BigRational {
    fn valuation(&self, p: u32) -> Valuation {
        Valuation::Certified(val_rational(self, p))
    }
    fn is_consistent_with_zero(&self) -> bool {
        self.is_zero()
    }
    fn rational_approx(&self) -> BigRational {
        self.clone()
    }
}

impl Coefficient for ApproxPadic {
    fn valuation(&self, p: u32) -> Valuation {
        debug_assert_eq!(p, self.p);
        self.certified_val()
    }
    fn is_consistent_with_zero(&self) -> bool {
        self.val_approx() >= self.err_val
    }
    fn rational_approx(&self) -> BigRational {
        self.approx.clone()
    }
}

/// Valuation of a matrix: certified minimum over its entries.
pub fn matrix_min_val<T: Coefficient>(p: u32, m: &crate::matrix::Matrix<T>) -> Valuation {
    let vals: Vec<Valuation> = m.entries().iter().map(|x| x.valuation(p)).collect();
    min_valuation(vals.iter())
}
