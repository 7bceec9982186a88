use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;
type HessFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Central-difference step for first derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Step for second differences of values when no gradient is available.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// Smooth function on `R^d`, with optional analytic derivatives.
#[derive(Clone)]
pub struct ScalarField {
    dim: usize,
    value: ValueFn,
    gradient: Option<GradFn>,
    hessian: Option<HessFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim)
            .field("analytic_gradient", &self.gradient.is_some())
            .field("analytic_hessian", &self.hessian.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(dim: usize, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            dim,
            value: Arc::new(value),
            gradient: None,
            hessian: None,
        }
    }

    pub fn with_gradient(mut self, g: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(g));
        self
    }

    pub fn with_hessian(mut self, h: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(h));
        self
    }

    pub fn zero(dim: usize) -> Self {
        ScalarField::new(dim, |_| 0.0)
            .with_gradient(move |_| DVector::zeros(dim))
            .with_hessian(move |_| DMatrix::zeros(dim, dim))
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_analytic_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[f64]) -> DVector<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => self.fd_gradient(x),
        }
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.hessian {
            Some(h) => h(x),
            None => self.fd_hessian(x),
        }
    }

    /// Central differences of the value, step [`FD_STEP`].
    pub fn fd_gradient(&self, x: &[f64]) -> DVector<f64> {
        let mut y = x.to_vec();
        DVector::from_fn(self.dim, |i, _| {
            let xi = y[i];
            y[i] = xi + FD_STEP;
            let plus = self.value(&y);
            y[i] = xi - FD_STEP;
            let minus = self.value(&y);
            y[i] = xi;
            (plus - minus) / (2.0 * FD_STEP)
        })
    }

    /// Central differences of the gradient when it is analytic, otherwise
    /// second differences of the value. Always symmetrized.
    pub fn fd_hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let mut h = DMatrix::zeros(n, n);
        let mut y = x.to_vec();
        if let Some(g) = &self.gradient {
            for j in 0..n {
                let xj = y[j];
                y[j] = xj + FD_STEP;
                let plus = g(&y);
                y[j] = xj - FD_STEP;
                let minus = g(&y);
                y[j] = xj;
                h.set_column(j, &((plus - minus) / (2.0 * FD_STEP)));
            }
        } else {
            let s = FD_STEP_SECOND;
            let f0 = self.value(x);
            for i in 0..n {
                for j in i..n {
                    let v = if i == j {
                        let xi = y[i];
                        y[i] = xi + s;
                        let p = self.value(&y);
                        y[i] = xi - s;
                        let m = self.value(&y);
                        y[i] = xi;
                        (p - 2.0 * f0 + m) / (s * s)
                    } else {
                        let mut corner = |si: f64, sj: f64| {
                            let (xi, xj) = (y[i], y[j]);
                            y[i] = xi + si * s;
                            y[j] = xj + sj * s;
                            let v = self.value(&y);
                            y[i] = xi;
                            y[j] = xj;
                            v
                        };
                        (corner(1.0, 1.0) - corner(1.0, -1.0) - corner(-1.0, 1.0) + corner(-1.0, -1.0))
                            / (4.0 * s * s)
                    };
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
        }
        (&h + h.transpose()) * 0.5
    }

    /// `a * self + b * other`, derivatives combined term by term.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let (f, g) = (self.clone(), other.clone());
        let (f2, g2) = (self.clone(), other.clone());
        let (f3, g3) = (self.clone(), other.clone());
        ScalarField::new(self.dim, move |x| a * f.value(x) + b * g.value(x))
            .with_gradient(move |x| f2.gradient(x) * a + g2.gradient(x) * b)
            .with_hessian(move |x| f3.hessian(x) * a + g3.hessian(x) * b)
    }

    /// `t -> self(chart(t))`, differentiated numerically.
    pub fn pull_back(&self, chart: &crate::scenario::Chart) -> ScalarField {
        let f = self.clone();
        let c = chart.clone();
        ScalarField::new(chart.dim(), move |t| f.value(&c.eval(t)))
    }
}
