//! Exact computation of p-adic Frobenius structures on quantum connections.
//!
//! The crate works entirely over `ℚ`: p-adic information is carried by exact
//! valuations and by [`ApproxPadic`] values with guaranteed error bounds.

pub mod analysis;
pub mod connections;
pub mod error;
pub mod gamma_class;
pub mod matrix;
pub mod padic;
pub mod poly;
pub mod ring;
pub mod satake;
pub mod series;
pub mod special;

pub use error::{Error, Result};
pub use matrix::{Matrix, RationalMatrix};
pub use padic::{
    approx_mul, certified_val, matrix_min_val, val_p, ApproxPadic, Coefficient, ExtRational,
    PrimeContext, Valuation,
};
pub use poly::GammaPolynomial;
pub use ring::Ring;
pub use series::{MatrixSeries, Series, Variable};
