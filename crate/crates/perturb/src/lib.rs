//! Finite-dimensional perturbation of Morse-Bott functions: critical points of
//! `S_eps = S0 + eps S1 + eps^2 S2` near `Z0 = Crit(S0)`, their indices, and
//! the leading term that predicts them.

pub mod experiment;
pub mod field;
pub mod linalg;
pub mod multiplier;
pub mod newton;
pub mod scenario;

pub use experiment::{
    convergence_filter, predicted_spectrum, run_localisation, ConvergenceVerdict, ExperimentReport, LimitClass,
    RunOptions,
};
pub use field::ScalarField;
pub use multiplier::{lagrange_multiplier, leading_term, PerturbationFamily};
pub use newton::{newton_critical_point, NewtonOptions, NewtonOutcome};
pub use scenario::{builtin, Chart, Component, PredictedPoint, Scenario, BUILTIN_NAMES};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered")]
    NonFinite,
    #[error("Newton diverged after {iterations} iterations (|x| = {norm:e})")]
    Diverged { iterations: usize, norm: f64 },
    #[error("Newton made no progress after {iterations} iterations (|grad| = {grad_norm:e})")]
    NoProgress { iterations: usize, grad_norm: f64 },
    #[error("Newton hit the iteration limit {iterations} (|grad| = {grad_norm:e})")]
    MaxIterations { iterations: usize, grad_norm: f64 },
    #[error("degenerate critical point: eigenvalue {eigenvalue:e} within gap {gap:e}")]
    Degenerate { eigenvalue: f64, gap: f64 },
    #[error("expected a kernel of dimension {expected}, found {got}")]
    KernelMismatch { expected: usize, got: usize },
    #[error("multiplier system is inconsistent (residual {residual:e})")]
    InconsistentMultiplier { residual: f64 },
    #[error("epsilon must be finite and nonzero, got {0}")]
    InvalidEpsilon(f64),
    #[error("no component metadata for predicted point {0}")]
    MissingMetadata(usize),
    #[error("empty sequence")]
    EmptySequence,
    #[error("invalid scenario {0}")]
    InvalidScenario(String),
    #[error("unknown scenario {name:?}; available: {}", available.join(", "))]
    UnknownScenario { name: String, available: Vec<String> },
}
