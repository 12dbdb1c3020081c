//! Polynomials with rational coefficients in the formal symbols `G1, G3, G5, …`,
//! where `Gk` stands for the `k`-th derivative of the p-adic Gamma function at 0.

use crate::ring::{format_rational, Ring};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponents keyed by derivative order; zero exponents are never stored.
pub type Monomial = BTreeMap<u32, u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GammaPolynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl GammaPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    /// The symbol `G{order}`.
    pub fn symbol(order: u32) -> Self {
        let mut m = Monomial::new();
        m.insert(order, 1);
        let mut p = Self::zero();
        p.add_term(m, BigRational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let mono: Monomial = mono.into_iter().filter(|&(_, e)| e > 0).collect();
        let slot = self.terms.entry(mono.clone()).or_insert_with(BigRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, BigRational> {
        &self.terms
    }

    pub fn coefficient(&self, mono: &Monomial) -> BigRational {
        self.terms.get(mono).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order mentioned.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|m| m.keys().copied())
            .max()
            .unwrap_or(0)
    }

    /// Substitutes `Gk ↦ value(k)`.
    pub fn evaluate<T: Ring>(&self, proto: &T, value: impl Fn(u32) -> T) -> T {
        let mut cache: BTreeMap<(u32, u32), T> = BTreeMap::new();
        let mut acc = proto.zero_like();
        for (mono, c) in &self.terms {
            let mut term = proto.one_like().scaled(c);
            for (&k, &e) in mono {
                let power = cache
                    .entry((k, e))
                    .or_insert_with(|| value(k).pow(e))
                    .clone();
                term = term.times(&power);
            }
            acc = acc.plus(&term);
        }
        acc
    }
}

impl Ring for GammaPolynomial {
    fn zero_like(&self) -> Self {
        Self::zero()
    }
    fn one_like(&self) -> Self {
        Self::constant(BigRational::one())
    }
    fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
    fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
    fn times(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = ma.clone();
                for (&k, &e) in mb {
                    *m.entry(k).or_insert(0) += e;
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
    fn negated(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
    fn scaled(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
}

impl fmt::Display for GammaPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (mono, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", format_rational(c))?;
            for (k, e) in mono {
                if *e == 1 {
                    write!(f, "*G{k}")?;
                } else {
                    write!(f, "*G{k}^{e}")?;
                }
            }
        }
        Ok(())
    }
}
