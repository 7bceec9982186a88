use nalgebra::DVector;

use crate::field::ScalarField;
use crate::linalg::{kernel_basis, pseudo_inverse_solve, RANK_CUTOFF};
use crate::PerturbError;

/// Residual tolerance for `Hess S0 (lambda) = -grad S1`.
pub const MULTIPLIER_TOL: f64 = 1e-7;

/// `S_eps = S0 + eps S1 + eps^2 S2`, truncated at second order.
#[derive(Debug, Clone)]
pub struct PerturbationFamily {
    pub s0: ScalarField,
    pub s1: ScalarField,
    pub s2: ScalarField,
}

impl PerturbationFamily {
    pub fn new(s0: ScalarField, s1: ScalarField, s2: ScalarField) -> Result<Self, PerturbError> {
        for f in [&s1, &s2] {
            if f.dim() != s0.dim() {
                return Err(PerturbError::DimensionMismatch {
                    expected: s0.dim(),
                    got: f.dim(),
                });
            }
        }
        Ok(PerturbationFamily { s0, s1, s2 })
    }

    pub fn dim(&self) -> usize {
        self.s0.dim()
    }

    pub fn at(&self, eps: f64) -> ScalarField {
        self.s0
            .combine(1.0, &self.s1, eps)
            .combine(1.0, &self.s2, eps * eps)
    }
}

/// Minimal-norm solution of `Hess S0(x) lambda = -grad S1(x)`.
pub fn lagrange_multiplier(s0: &ScalarField, s1: &ScalarField, x: &[f64]) -> Result<DVector<f64>, PerturbError> {
    let h = s0.hessian(x);
    let rhs = -s1.gradient(x);
    let lambda = pseudo_inverse_solve(&h, &rhs);
    let residual = (&h * &lambda - &rhs).norm();
    if !(residual < MULTIPLIER_TOL * (1.0 + rhs.norm())) {
        return Err(PerturbError::InconsistentMultiplier { residual });
    }
    Ok(lambda)
}

/// `f(x) = 1/2 <grad S1(x), lambda(x)> + S2(x)`
pub fn leading_term(family: &PerturbationFamily, x: &[f64]) -> Result<f64, PerturbError> {
    let lambda = lagrange_multiplier(&family.s0, &family.s1, x)?;
    Ok(0.5 * family.s1.gradient(x).dot(&lambda) + family.s2.value(x))
}

/// Largest change of the leading term when the multiplier is moved by a unit
/// vector of the kernel of `Hess S0(x)`.
pub fn leading_term_kernel_variation(family: &PerturbationFamily, x: &[f64]) -> Result<f64, PerturbError> {
    let lambda = lagrange_multiplier(&family.s0, &family.s1, x)?;
    let g = family.s1.gradient(x);
    let base = 0.5 * g.dot(&lambda);
    let kernel = kernel_basis(&family.s0.hessian(x), RANK_CUTOFF);
    let mut worst = 0.0f64;
    for col in kernel.column_iter() {
        for sign in [1.0, -1.0] {
            let shifted = &lambda + col * sign;
            worst = worst.max((0.5 * g.dot(&shifted) - base).abs());
        }
    }
    Ok(worst)
}
