use nalgebra::DVector;
use serde::Serialize;

use crate::field::ScalarField;
use crate::linalg::pseudo_inverse_solve_with;
use crate::PerturbError;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DIVERGENCE_NORM: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: DEFAULT_TOL,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonOutcome {
    pub point: Vec<f64>,
    pub grad_norm: f64,
    pub iterations: usize,
}

/// Damped Newton iteration on `grad S`, with merit `|grad S|^2`.
///
/// The step is the spectral pseudo-inverse Newton step; when it fails to
/// decrease the merit the iteration falls back to `-H g`, the steepest
/// descent direction of the merit.
pub fn newton_critical_point(
    field: &ScalarField,
    seed: &[f64],
    opts: NewtonOptions,
) -> Result<NewtonOutcome, PerturbError> {
    if seed.len() != field.dim() {
        return Err(PerturbError::DimensionMismatch {
            expected: field.dim(),
            got: seed.len(),
        });
    }
    if seed.iter().any(|v| !v.is_finite()) {
        return Err(PerturbError::NonFinite);
    }
    let mut x = DVector::from_column_slice(seed);
    let mut g = field.gradient(x.as_slice());
    for iter in 0..opts.max_iter {
        let merit = g.norm_squared();
        if !merit.is_finite() {
            return Err(PerturbError::NonFinite);
        }
        if g.norm() <= opts.tol {
            let (x, g) = polish(field, x, g);
            return Ok(NewtonOutcome {
                point: x.as_slice().to_vec(),
                grad_norm: g.norm(),
                iterations: iter,
            });
        }
        let h = field.hessian(x.as_slice());
        let newton_dir = -pseudo_inverse_solve_with(&h, &g, 1e-12);
        let descent_dir = -(&h * &g);
        let step = [newton_dir, descent_dir]
            .into_iter()
            .find_map(|d| line_search(field, &x, &d, merit));
        let Some((next, next_g)) = step else {
            return Err(PerturbError::NoProgress {
                iterations: iter,
                grad_norm: g.norm(),
            });
        };
        if next.norm() > DIVERGENCE_NORM {
            return Err(PerturbError::Diverged {
                iterations: iter,
                norm: next.norm(),
            });
        }
        x = next;
        g = next_g;
    }
    Err(PerturbError::MaxIterations {
        iterations: opts.max_iter,
        grad_norm: g.norm(),
    })
}

fn line_search(
    field: &ScalarField,
    x: &DVector<f64>,
    dir: &DVector<f64>,
    merit: f64,
) -> Option<(DVector<f64>, DVector<f64>)> {
    if dir.iter().any(|v| !v.is_finite()) || dir.norm() == 0.0 {
        return None;
    }
    let mut t = 1.0;
    for _ in 0..40 {
        let trial = x + dir * t;
        let g = field.gradient(trial.as_slice());
        if g.norm_squared() < merit {
            return Some((trial, g));
        }
        t *= 0.5;
    }
    None
}

/// A few full Newton steps past the tolerance, kept only while they help, so
/// that seeds converging to the same point agree to rounding.
fn polish(field: &ScalarField, mut x: DVector<f64>, mut g: DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    for _ in 0..3 {
        let h = field.hessian(x.as_slice());
        let trial = &x - pseudo_inverse_solve_with(&h, &g, 1e-12);
        let tg = field.gradient(trial.as_slice());
        if !(tg.norm() < g.norm()) {
            break;
        }
        x = trial;
        g = tg;
    }
    (x, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn one_dimensional_quadratic() {
        let f = ScalarField::new(1, |x| x[0] * x[0] - 2.0 * x[0]);
        let out = newton_critical_point(&f, &[0.0], NewtonOptions::default()).unwrap();
        assert!((out.point[0] - 1.0).abs() < 1e-9);
        assert!(out.grad_norm <= DEFAULT_TOL);
    }

    #[test]
    fn quartic_with_analytic_derivatives() {
        // x^4/4 - x, critical point x = 1
        let f = ScalarField::new(1, |x| x[0].powi(4) / 4.0 - x[0])
            .with_gradient(|x| DVector::from_element(1, x[0].powi(3) - 1.0))
            .with_hessian(|x| DMatrix::from_element(1, 1, 3.0 * x[0] * x[0]));
        let out = newton_critical_point(&f, &[3.0], NewtonOptions::default()).unwrap();
        assert!((out.point[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_is_reported() {
        // Gradient 1 + e^(x/1000) has no zero and flattens out as x -> -infinity.
        let f = ScalarField::new(1, |x| x[0] + 1000.0 * (x[0] / 1000.0).exp())
            .with_gradient(|x| DVector::from_element(1, 1.0 + (x[0] / 1000.0).exp()))
            .with_hessian(|x| DMatrix::from_element(1, 1, (x[0] / 1000.0).exp() / 1000.0));
        let err = newton_critical_point(&f, &[0.0], NewtonOptions { tol: 1e-10, max_iter: 5000 });
        assert!(matches!(err, Err(PerturbError::Diverged { .. })), "{err:?}");
    }

    #[test]
    fn rejects_wrong_dimension() {
        let f = ScalarField::zero(2);
        assert!(matches!(
            newton_critical_point(&f, &[0.0], NewtonOptions::default()),
            Err(PerturbError::DimensionMismatch { expected: 2, got: 1 })
        ));
    }
}
