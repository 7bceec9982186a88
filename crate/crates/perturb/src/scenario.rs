//! Scenarios: a perturbation family together with the geometry of `Z0`,
//! the predicted critical points of the leading term and their charts.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::field::ScalarField;
use crate::linalg::morse_bott_index;
use crate::multiplier::PerturbationFamily;
use crate::PerturbError;

/// Local parametrization `R^k -> R^d` with `chart(0)` the base point.
#[derive(Clone)]
pub struct Chart {
    dim: usize,
    map: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart(dim {} at {:?})", self.dim, self.center())
    }
}

impl Chart {
    pub fn new(dim: usize, map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Chart { dim, map: Arc::new(map) }
    }

    /// Zero-dimensional chart of a single point.
    pub fn point(x: Vec<f64>) -> Self {
        Chart::new(0, move |_| x.clone())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        (self.map)(t)
    }

    pub fn center(&self) -> Vec<f64> {
        self.eval(&vec![0.0; self.dim])
    }
}

/// A connected component `C_i` of `Z0`. Its metadata is declared, not computed.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Component {
    pub name: String,
    pub dim: usize,
    pub euler_char: i64,
    pub euler_char_c: i64,
    pub s0_index: usize,
    /// Whether `S1` restricted to this component is proper and bounded below.
    /// Declared, not verified.
    pub proper_bounded_below: bool,
}

/// A critical point of the leading term on `Z1`.
#[derive(Debug, Clone)]
pub struct PredictedPoint {
    pub component: usize,
    /// Chart of `Z0` centred at the point.
    pub z0_chart: Chart,
    /// Chart of the component of `Z1` through the point; may be 0-dimensional.
    pub z1_chart: Chart,
}

impl PredictedPoint {
    pub fn point(&self) -> Vec<f64> {
        self.z0_chart.center()
    }
}

#[derive(Clone)]
pub struct Scenario {
    pub name: String,
    pub family: PerturbationFamily,
    pub components: Vec<Component>,
    pub predicted: Vec<PredictedPoint>,
    /// Sample points on `Z0`, used to detect a vanishing perturbation.
    pub z0_samples: Vec<Vec<f64>>,
    pub z0_distance: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario")
            .field("name", &self.name)
            .field("components", &self.components)
            .field("predicted", &self.predicted)
            .finish()
    }
}

/// Membership tolerance for `Z0` and `Z1` during validation.
pub const VALIDATION_TOL: f64 = 1e-6;
/// Eigenvalue gap for indices of the unperturbed and restricted functions.
pub const INDEX_GAP: f64 = 1e-6;

impl Scenario {
    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    /// `S1 = S2 = 0` on every sample of a positive-dimensional `Z0`: then
    /// `Z1 = Z0` and nothing localises.
    pub fn is_degenerate(&self) -> bool {
        let small = |f: &ScalarField, x: &[f64]| f.value(x).abs() < VALIDATION_TOL && f.gradient(x).norm() < VALIDATION_TOL;
        self.components.iter().any(|c| c.dim > 0)
            && !self.z0_samples.is_empty()
            && self
                .z0_samples
                .iter()
                .all(|x| small(&self.family.s1, x) && small(&self.family.s2, x))
    }

    pub fn validate(&self) -> Result<(), PerturbError> {
        let bad = |msg: String| Err(PerturbError::InvalidScenario(format!("{}: {msg}", self.name)));
        for (i, p) in self.predicted.iter().enumerate() {
            let x = p.point();
            if x.len() != self.dim() {
                return bad(format!("point {i} has dimension {}", x.len()));
            }
            let Some(comp) = self.components.get(p.component) else {
                return bad(format!("point {i} refers to missing component {}", p.component));
            };
            if p.z0_chart.dim() != comp.dim || p.z1_chart.dim() > comp.dim {
                return bad(format!("chart dimensions of point {i} do not fit component {}", comp.name));
            }
            let z1_center = p.z1_chart.center();
            if distance(&z1_center, &x) > VALIDATION_TOL {
                return bad(format!("Z1 chart of point {i} is not centred at the point"));
            }
            let g0 = self.family.s0.gradient(&x).norm();
            if g0 > VALIDATION_TOL {
                return bad(format!("point {i} is not critical for S0 (|grad| = {g0:e})"));
            }
            let tangential = self.family.s1.pull_back(&p.z0_chart).gradient(&vec![0.0; comp.dim]).norm();
            if tangential > VALIDATION_TOL {
                return bad(format!("point {i} is not critical for S1 on Z0 (|grad| = {tangential:e})"));
            }
            let ind = self.s0_index_at(&x, comp.dim)?;
            if ind != comp.s0_index {
                return bad(format!("declared S0 index {} but found {ind} at point {i}", comp.s0_index));
            }
        }
        Ok(())
    }

    /// Morse-Bott index of `S0` at a point of `Z0` of the given dimension.
    pub fn s0_index_at(&self, x: &[f64], z0_dim: usize) -> Result<usize, PerturbError> {
        morse_bott_index(&self.family.s0.hessian(x), z0_dim, INDEX_GAP)
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["circle", "sphere", "linear"];

pub fn builtin(name: &str) -> Result<Scenario, PerturbError> {
    match name {
        "circle" => Ok(circle()),
        "sphere" => Ok(sphere()),
        "linear" => Ok(linear()),
        _ => Err(PerturbError::UnknownScenario {
            name: name.to_string(),
            available: BUILTIN_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

fn vec3(a: f64, b: f64, c: f64) -> DVector<f64> {
    DVector::from_vec(vec![a, b, c])
}

/// `S0 = (x^2 + y^2 - 1)^2 + z^2`, `S1 = x`, `S2 = 0`; `Z0` is the unit circle.
pub fn circle() -> Scenario {
    let s0 = ScalarField::new(3, |x| {
        let r = x[0] * x[0] + x[1] * x[1] - 1.0;
        r * r + x[2] * x[2]
    })
    .with_gradient(|x| {
        let r = x[0] * x[0] + x[1] * x[1] - 1.0;
        vec3(4.0 * x[0] * r, 4.0 * x[1] * r, 2.0 * x[2])
    })
    .with_hessian(|x| {
        let r = x[0] * x[0] + x[1] * x[1] - 1.0;
        DMatrix::from_row_slice(
            3,
            3,
            &[
                4.0 * r + 8.0 * x[0] * x[0],
                8.0 * x[0] * x[1],
                0.0,
                8.0 * x[0] * x[1],
                4.0 * r + 8.0 * x[1] * x[1],
                0.0,
                0.0,
                0.0,
                2.0,
            ],
        )
    });
    let s1 = ScalarField::new(3, |x| x[0])
        .with_gradient(|_| vec3(1.0, 0.0, 0.0))
        .with_hessian(|_| DMatrix::zeros(3, 3));
    let family = PerturbationFamily::new(s0, s1, ScalarField::zero(3)).expect("dimensions agree");

    let predicted = [1.0, -1.0]
        .into_iter()
        .map(|sign| PredictedPoint {
            component: 0,
            z0_chart: Chart::new(1, move |t| vec![sign * t[0].cos(), sign * t[0].sin(), 0.0]),
            z1_chart: Chart::point(vec![sign, 0.0, 0.0]),
        })
        .collect();
    Scenario {
        name: "circle".into(),
        family,
        components: vec![Component {
            name: "S^1".into(),
            dim: 1,
            euler_char: 0,
            euler_char_c: 0,
            s0_index: 0,
            proper_bounded_below: true,
        }],
        predicted,
        z0_samples: (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 4.0;
                vec![t.cos(), t.sin(), 0.0]
            })
            .collect(),
        z0_distance: Arc::new(|x| {
            let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
            ((rho - 1.0).powi(2) + x[2] * x[2]).sqrt()
        }),
    }
}

/// `S0 = (|x|^2 - 1)^2`, `S1 = z`, `S2 = 0`; `Z0` is the unit sphere.
pub fn sphere() -> Scenario {
    let s0 = ScalarField::new(3, |x| {
        let r = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
        r * r
    })
    .with_gradient(|x| {
        let r = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
        DVector::from_iterator(3, x.iter().map(|v| 4.0 * r * v))
    })
    .with_hessian(|x| {
        let r = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
        let v = DVector::from_column_slice(x);
        DMatrix::identity(3, 3) * (4.0 * r) + &v * v.transpose() * 8.0
    });
    let s1 = ScalarField::new(3, |x| x[2])
        .with_gradient(|_| vec3(0.0, 0.0, 1.0))
        .with_hessian(|_| DMatrix::zeros(3, 3));
    let family = PerturbationFamily::new(s0, s1, ScalarField::zero(3)).expect("dimensions agree");

    let predicted = [1.0, -1.0]
        .into_iter()
        .map(|sign: f64| PredictedPoint {
            component: 0,
            z0_chart: Chart::new(2, move |t| {
                vec![t[0], t[1], sign * (1.0 - t[0] * t[0] - t[1] * t[1]).max(0.0).sqrt()]
            }),
            z1_chart: Chart::point(vec![0.0, 0.0, sign]),
        })
        .collect();
    Scenario {
        name: "sphere".into(),
        family,
        components: vec![Component {
            name: "S^2".into(),
            dim: 2,
            euler_char: 2,
            euler_char_c: 2,
            s0_index: 0,
            proper_bounded_below: true,
        }],
        predicted,
        z0_samples: vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![-0.6, 0.0, 0.8],
            vec![0.0, -0.8, -0.6],
        ],
        z0_distance: Arc::new(|x| (x.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs()),
    }
}

/// Coordinates `(u1, u2, w)`: `S0 = u1^2 + 2 u2^2`, `S1 = w u1 + u2`,
/// `S2 = w^4 / 4`. Here `Z1 = Z0` is the `w`-line and the leading term is
/// `w^4/4 - w^2/4 - 1/8`.
pub fn linear() -> Scenario {
    let s0 = ScalarField::new(3, |x| x[0] * x[0] + 2.0 * x[1] * x[1])
        .with_gradient(|x| vec3(2.0 * x[0], 4.0 * x[1], 0.0))
        .with_hessian(|_| DMatrix::from_diagonal(&vec3(2.0, 4.0, 0.0)));
    let s1 = ScalarField::new(3, |x| x[2] * x[0] + x[1])
        .with_gradient(|x| vec3(x[2], 1.0, x[0]))
        .with_hessian(|_| DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
    let s2 = ScalarField::new(3, |x| x[2].powi(4) / 4.0)
        .with_gradient(|x| vec3(0.0, 0.0, x[2].powi(3)))
        .with_hessian(|x| DMatrix::from_diagonal(&vec3(0.0, 0.0, 3.0 * x[2] * x[2])));
    let family = PerturbationFamily::new(s0, s1, s2).expect("dimensions agree");

    let w_crit = std::f64::consts::FRAC_1_SQRT_2;
    let predicted = [-w_crit, 0.0, w_crit]
        .into_iter()
        .map(|w0| {
            let line = move |t: &[f64]| vec![0.0, 0.0, w0 + t[0]];
            PredictedPoint {
                component: 0,
                z0_chart: Chart::new(1, line),
                z1_chart: Chart::new(1, line),
            }
        })
        .collect();
    Scenario {
        name: "linear".into(),
        family,
        components: vec![Component {
            name: "R".into(),
            dim: 1,
            euler_char: 1,
            euler_char_c: -1,
            s0_index: 0,
            proper_bounded_below: false,
        }],
        predicted,
        z0_samples: (-2..=2).map(|k| vec![0.0, 0.0, k as f64 * 0.5]).collect(),
        z0_distance: Arc::new(|x| (x[0] * x[0] + x[1] * x[1]).sqrt()),
    }
}

/// `S0 = x^2/2`, `S1 = -x^3/3` on `R`: besides the localising critical point
/// at 0, `S_eps` has a second one at `x = 1/eps` that runs off to infinity.
pub fn escape() -> Scenario {
    let s0 = ScalarField::new(1, |x| x[0] * x[0] / 2.0)
        .with_gradient(|x| DVector::from_element(1, x[0]))
        .with_hessian(|_| DMatrix::from_element(1, 1, 1.0));
    let s1 = ScalarField::new(1, |x| -x[0].powi(3) / 3.0)
        .with_gradient(|x| DVector::from_element(1, -x[0] * x[0]))
        .with_hessian(|x| DMatrix::from_element(1, 1, -2.0 * x[0]));
    let family = PerturbationFamily::new(s0, s1, ScalarField::zero(1)).expect("dimensions agree");
    Scenario {
        name: "escape".into(),
        family,
        components: vec![Component {
            name: "point".into(),
            dim: 0,
            euler_char: 1,
            euler_char_c: 1,
            s0_index: 0,
            proper_bounded_below: true,
        }],
        predicted: vec![PredictedPoint {
            component: 0,
            z0_chart: Chart::point(vec![0.0]),
            z1_chart: Chart::point(vec![0.0]),
        }],
        z0_samples: vec![vec![0.0]],
        z0_distance: Arc::new(|x| x[0].abs()),
    }
}

/// The circle's `S0` with a vanishing perturbation.
pub fn flat() -> Scenario {
    let base = circle();
    let family = PerturbationFamily::new(base.family.s0.clone(), ScalarField::zero(3), ScalarField::zero(3))
        .expect("dimensions agree");
    Scenario {
        name: "flat".into(),
        family,
        predicted: Vec::new(),
        ..base
    }
}
