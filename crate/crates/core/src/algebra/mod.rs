//! Exact arithmetic: arbitrary-precision rationals and integer Laurent
//! polynomials in the grading variable `T`.

mod laurent;
mod rational;

pub use laurent::LaurentPoly;
pub use rational::Rational;

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("complex projective space dimension must be non-negative, got {0}")]
    NegativeDimension(i64),
    #[error("{0}")]
    Parse(String),
}

/// Poincaré polynomial of `CP^e`: `1 + T^2 + ... + T^(2e)`.
pub fn cp_poincare(e: i64) -> Result<LaurentPoly, AlgebraError> {
    if e < 0 {
        return Err(AlgebraError::NegativeDimension(e));
    }
    Ok(LaurentPoly::from_terms((0..=e).map(|k| (2 * k, 1))))
}

/// Normalized Poincaré polynomial `T^(-dim) * p` of a component of real
/// dimension `dim`.
pub fn hat_normalize(p: &LaurentPoly, dim: i64) -> LaurentPoly {
    p.shift(-dim)
}

/// Euler characteristic read off a Poincaré polynomial: its value at `T = 1`.
pub fn euler_eval(p: &LaurentPoly) -> BigInt {
    p.eval_at_one()
}
