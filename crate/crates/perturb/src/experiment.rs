use nalgebra::DVector;
use serde::Serialize;

use crate::field::ScalarField;
use crate::linalg::{kernel_basis, min_abs_eigenvalue, morse_bott_index, morse_index};
use crate::multiplier::leading_term;
use crate::newton::{newton_critical_point, NewtonOptions};
use crate::scenario::{distance, Scenario, INDEX_GAP};
use crate::PerturbError;

/// The three summands of the predicted index of the perturbed critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpectrumPrediction {
    pub s0_index: usize,
    pub s1_index: usize,
    pub f_index: usize,
    pub total: usize,
}

/// `ind(S0, x) + ind(+-S1|Z0, x) + ind(f, x)`, the sign following `eps`.
pub fn predicted_spectrum(scenario: &Scenario, point: usize, eps_sign: f64) -> Result<SpectrumPrediction, PerturbError> {
    let p = scenario
        .predicted
        .get(point)
        .ok_or(PerturbError::MissingMetadata(point))?;
    let comp = scenario
        .components
        .get(p.component)
        .ok_or(PerturbError::MissingMetadata(point))?;
    let x = p.point();
    let s0_index = scenario.s0_index_at(&x, comp.dim)?;

    let sign = if eps_sign < 0.0 { -1.0 } else { 1.0 };
    let s1_index = if comp.dim == 0 {
        0
    } else {
        let restricted = scenario.family.s1.pull_back(&p.z0_chart);
        let h = restricted.hessian(&vec![0.0; comp.dim]) * sign;
        morse_bott_index(&h, p.z1_chart.dim(), INDEX_GAP)?
    };

    let f_index = if p.z1_chart.dim() == 0 {
        0
    } else {
        let family = scenario.family.clone();
        let chart = p.z1_chart.clone();
        let f = ScalarField::new(chart.dim(), move |t| {
            leading_term(&family, &chart.eval(t)).unwrap_or(f64::NAN)
        });
        morse_index(&f.hessian(&vec![0.0; p.z1_chart.dim()]), INDEX_GAP)?
    };

    Ok(SpectrumPrediction {
        s0_index,
        s1_index,
        f_index,
        total: s0_index + s1_index + f_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Radius of the tube around `Z0` inside which critical points count.
    pub basin_radius: f64,
    /// Bound on `|x|` beyond which a point is treated as escaping.
    pub c_bound: f64,
    pub newton: NewtonOptions,
    /// Eigenvalue gap is `gap_factor * eps^2`.
    pub gap_factor: f64,
    /// Offset of the extra seeds along the chart of `Z0`.
    pub seed_offset: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            basin_radius: 0.5,
            c_bound: 1e3,
            newton: NewtonOptions::default(),
            gap_factor: 1e-2,
            seed_offset: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoundPoint {
    pub point: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    pub min_abs_eigenvalue: f64,
    pub index: Option<usize>,
    /// Position of the matched point in `predicted`.
    pub predicted: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictedSummary {
    pub point: Vec<f64>,
    pub component: usize,
    pub leading_term: f64,
    pub spectrum: SpectrumPrediction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ReportChecks {
    pub bijection: Option<bool>,
    pub indices: Option<bool>,
    pub residuals: Option<bool>,
    /// `None` when the count is not applicable (some component is not
    /// declared proper and bounded below) or the run abstained.
    pub signed_count: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub epsilon: f64,
    pub gap: f64,
    pub degenerate: bool,
    pub found: Vec<FoundPoint>,
    pub outside_basin: Vec<Vec<f64>>,
    pub predicted: Vec<PredictedSummary>,
    pub signed_count: i64,
    pub expected_signed_count: Option<i64>,
    pub checks: ReportChecks,
    pub failures: Vec<String>,
    pub seed_failures: usize,
}

impl ExperimentReport {
    /// No check failed. Abstaining on a degenerate family is not a failure.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_localisation(
    scenario: &Scenario,
    epsilons: &[f64],
    opts: &RunOptions,
) -> Result<Vec<ExperimentReport>, PerturbError> {
    scenario.validate()?;
    if let Some(&eps) = epsilons.iter().find(|e| !e.is_finite() || **e == 0.0) {
        return Err(PerturbError::InvalidEpsilon(eps));
    }
    let degenerate = scenario.is_degenerate();
    epsilons
        .iter()
        .map(|&eps| {
            if degenerate {
                Ok(abstain(scenario, eps, opts))
            } else {
                run_one(scenario, eps, opts)
            }
        })
        .collect()
}

fn abstain(scenario: &Scenario, eps: f64, opts: &RunOptions) -> ExperimentReport {
    ExperimentReport {
        scenario: scenario.name.clone(),
        epsilon: eps,
        gap: opts.gap_factor * eps * eps,
        degenerate: true,
        found: Vec::new(),
        outside_basin: Vec::new(),
        predicted: Vec::new(),
        signed_count: 0,
        expected_signed_count: None,
        checks: ReportChecks {
            bijection: None,
            indices: None,
            residuals: None,
            signed_count: None,
        },
        failures: Vec::new(),
        seed_failures: 0,
    }
}

fn seeds(scenario: &Scenario, offset: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for p in &scenario.predicted {
        out.push(p.point());
        let k = p.z0_chart.dim();
        for i in 0..k {
            for s in [offset, -offset] {
                let mut t = vec![0.0; k];
                t[i] = s;
                out.push(p.z0_chart.eval(&t));
            }
        }
    }
    out
}

fn run_one(scenario: &Scenario, eps: f64, opts: &RunOptions) -> Result<ExperimentReport, PerturbError> {
    let field = scenario.family.at(eps);
    let gap = opts.gap_factor * eps * eps;
    let dedup_radius = 10.0 * opts.newton.tol;

    let mut predicted = Vec::with_capacity(scenario.predicted.len());
    for (i, p) in scenario.predicted.iter().enumerate() {
        let x = p.point();
        predicted.push(PredictedSummary {
            leading_term: leading_term(&scenario.family, &x)?,
            spectrum: predicted_spectrum(scenario, i, eps)?,
            component: p.component,
            point: x,
        });
    }

    let mut converged: Vec<Vec<f64>> = Vec::new();
    let mut outside_basin: Vec<Vec<f64>> = Vec::new();
    let mut seed_failures = 0;
    for seed in seeds(scenario, opts.seed_offset) {
        match newton_critical_point(&field, &seed, opts.newton) {
            Ok(out) => {
                let x = out.point;
                let inside = (scenario.z0_distance)(&x) < opts.basin_radius
                    && x.iter().map(|v| v * v).sum::<f64>().sqrt() <= opts.c_bound;
                let bucket = if inside { &mut converged } else { &mut outside_basin };
                if !bucket.iter().any(|y| distance(y, &x) < dedup_radius) {
                    bucket.push(x);
                }
            }
            Err(_) => seed_failures += 1,
        }
    }
    converged.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    let mut failures = Vec::new();
    let mut found = Vec::with_capacity(converged.len());
    for x in converged {
        let h = field.hessian(&x);
        let grad_norm = field.gradient(&x).norm();
        let index = match morse_index(&h, gap) {
            Ok(i) => Some(i),
            Err(e) => {
                failures.push(format!("index: degenerate critical point at {x:?}: {e}"));
                None
            }
        };
        let nearest = predicted
            .iter()
            .enumerate()
            .map(|(i, p)| (i, distance(&p.point, &x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i);
        found.push(FoundPoint {
            value: field.value(&x),
            min_abs_eigenvalue: min_abs_eigenvalue(&h),
            point: x,
            grad_norm,
            index,
            predicted: nearest,
        });
    }

    // Bijection between found points and Crit(f).
    let mut hits = vec![0usize; predicted.len()];
    for f in &found {
        if let Some(i) = f.predicted {
            hits[i] += 1;
        }
    }
    let bijection = found.len() == predicted.len() && hits.iter().all(|&h| h == 1);
    if !bijection {
        failures.push(format!(
            "bijection: found {} critical points for {} predicted (matches per prediction {hits:?})",
            found.len(),
            predicted.len()
        ));
    }

    let mut indices = true;
    for f in &found {
        if let (Some(i), Some(p)) = (f.index, f.predicted) {
            let expected = predicted[p].spectrum.total;
            if i != expected {
                indices = false;
                failures.push(format!("index: point {:?} has index {i}, predicted {expected}", f.point));
            }
        } else {
            indices = false;
        }
    }

    let residuals = found.iter().all(|f| f.grad_norm <= opts.newton.tol);
    if !residuals {
        failures.push(format!("residual: gradient norm above {:e}", opts.newton.tol));
    }

    let signed_count: i64 = found
        .iter()
        .filter_map(|f| f.index)
        .map(|i| if i % 2 == 0 { 1 } else { -1 })
        .sum();
    let applicable = scenario.components.iter().all(|c| c.proper_bounded_below);
    let expected_signed_count = applicable.then(|| {
        scenario
            .components
            .iter()
            .map(|c| {
                let sign = if c.s0_index % 2 == 0 { 1 } else { -1 };
                sign * if eps > 0.0 { c.euler_char } else { c.euler_char_c }
            })
            .sum()
    });
    let signed_ok = expected_signed_count.map(|e| e == signed_count);
    if signed_ok == Some(false) {
        failures.push(format!(
            "signed count: {signed_count}, expected {}",
            expected_signed_count.unwrap_or_default()
        ));
    }

    Ok(ExperimentReport {
        scenario: scenario.name.clone(),
        epsilon: eps,
        gap,
        degenerate: false,
        found,
        outside_basin,
        predicted,
        signed_count,
        expected_signed_count,
        checks: ReportChecks {
            bijection: Some(bijection),
            indices: Some(indices),
            residuals: Some(residuals),
            signed_count: signed_ok,
        },
        failures,
        seed_failures,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Localises,
    Escapes,
    Inconclusive,
    OffLocus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub class: LimitClass,
    pub limit: Vec<f64>,
    pub residual: f64,
    pub nearest_predicted: Option<usize>,
}

/// Residual below which an extrapolated limit is taken to lie on `Z1`.
pub const LOCUS_TOL: f64 = 1e-4;
/// Residual above which it is taken to lie off `Z1`.
pub const OFF_LOCUS_TOL: f64 = 1e-2;

/// Classify the limit of critical points `x_n` of `S_{eps_n}` as `eps_n -> 0`.
pub fn convergence_filter(
    scenario: &Scenario,
    sequence: &[(f64, Vec<f64>)],
    c_bound: f64,
) -> Result<ConvergenceVerdict, PerturbError> {
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let last = sequence.last().ok_or(PerturbError::EmptySequence)?;
    if sequence.iter().any(|(_, x)| norm(x) > c_bound) {
        return Ok(ConvergenceVerdict {
            class: LimitClass::Escapes,
            limit: last.1.clone(),
            residual: f64::INFINITY,
            nearest_predicted: None,
        });
    }

    let limit = extrapolate(sequence);
    if norm(&limit) > c_bound {
        return Ok(ConvergenceVerdict {
            class: LimitClass::Escapes,
            limit,
            residual: f64::INFINITY,
            nearest_predicted: None,
        });
    }

    let residual = locus_residual(scenario, &limit);
    let class = if residual < LOCUS_TOL {
        LimitClass::Localises
    } else if residual > OFF_LOCUS_TOL {
        LimitClass::OffLocus
    } else {
        LimitClass::Inconclusive
    };
    let nearest_predicted = scenario
        .predicted
        .iter()
        .enumerate()
        .map(|(i, p)| (i, distance(&p.point(), &limit)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    Ok(ConvergenceVerdict {
        class,
        limit,
        residual,
        nearest_predicted,
    })
}

/// `max(|grad S0|, |grad S1 projected on ker Hess S0|)`
pub fn locus_residual(scenario: &Scenario, x: &[f64]) -> f64 {
    let g0 = scenario.family.s0.gradient(x).norm();
    let g1 = scenario.family.s1.gradient(x);
    let k = kernel_basis(&scenario.family.s0.hessian(x), 1e-4);
    let tangential = if k.ncols() == 0 {
        0.0
    } else {
        (k.transpose() * &g1).norm()
    };
    g0.max(tangential)
}

/// Polynomial extrapolation to `eps = 0` through the (up to) three points
/// with the smallest distinct `|eps|`.
fn extrapolate(sequence: &[(f64, Vec<f64>)]) -> Vec<f64> {
    let mut pts: Vec<&(f64, Vec<f64>)> = sequence.iter().collect();
    pts.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let mut chosen: Vec<&(f64, Vec<f64>)> = Vec::new();
    for p in pts {
        if chosen.iter().all(|q| q.0 != p.0) {
            chosen.push(p);
        }
        if chosen.len() == 3 {
            break;
        }
    }
    if chosen.len() == 1 || chosen[0].0 == 0.0 {
        return chosen[0].1.clone();
    }
    // Lagrange interpolation evaluated at 0.
    let dim = chosen[0].1.len();
    let mut out = DVector::zeros(dim);
    for (i, (ei, xi)) in chosen.iter().map(|p| (p.0, &p.1)).enumerate() {
        let w: f64 = chosen
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.0 / (q.0 - ei))
            .product();
        out += DVector::from_column_slice(xi) * w;
    }
    out.as_slice().to_vec()
}
