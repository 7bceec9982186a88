use serde_json::{json, Map, Value};
use sfinv_core::moduli::ModuliError;
use sfinv_core::seifert::SeifertError;
use sfinv_core::singularity::SingularityError;
use sfinv_perturb::PerturbError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

/// A request that could not be turned into a report.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub details: Map<String, Value>,
    /// Internal cross-checks disagreeing are check failures, everything else
    /// is a validation failure.
    pub check_failure: bool,
}

impl CliError {
    pub fn validation(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), details: Map::new(), check_failure: false }
    }

    pub fn check(kind: &'static str, message: impl Into<String>) -> Self {
        CliError { check_failure: true, ..CliError::validation(kind, message) }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn exit_code(&self) -> i32 {
        if self.check_failure {
            EXIT_CHECK
        } else {
            EXIT_VALIDATION
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = self.details.clone();
        body.insert("kind".into(), json!(self.kind));
        body.insert("message".into(), json!(self.message));
        json!({ "error": body })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<SeifertError> for CliError {
    fn from(e: SeifertError) -> Self {
        let message = e.to_string();
        match e {
            SeifertError::TooFewFibers { min, got } => CliError::validation("too_few_fibers", message)
                .with("min", json!(min))
                .with("got", json!(got)),
            SeifertError::MultiplicityTooSmall(a) => {
                CliError::validation("multiplicity_too_small", message).with("alpha", json!(a))
            }
            SeifertError::NotCoprime(a, b) => CliError::validation("not_coprime", message).with("pair", json!([a, b])),
            SeifertError::InvalidFiber { alpha, gamma } => {
                CliError::validation("invalid_fiber", message).with("fiber", json!([alpha, gamma]))
            }
            SeifertError::ZeroEulerNumber => CliError::validation("zero_euler_number", message),
            SeifertError::NotHomologySphere { a_times_e } => {
                CliError::validation("not_homology_sphere", message).with("a_times_e", json!(a_times_e as i64))
            }
            SeifertError::Overflow(alphas) => CliError::validation("overflow", message).with("alphas", json!(alphas)),
            SeifertError::NonIntegralLog { .. } | SeifertError::LogMismatch { .. } => {
                CliError::check("bundle_log", message)
            }
            SeifertError::Picard(_) => CliError::validation("picard", message),
        }
    }
}

impl From<ModuliError> for CliError {
    fn from(e: ModuliError) -> Self {
        match e {
            ModuliError::Seifert(s) => s.into(),
            ModuliError::TooLarge => CliError::validation("too_large", e.to_string()),
            other => CliError::check("moduli_consistency", other.to_string()),
        }
    }
}

impl From<SingularityError> for CliError {
    fn from(e: SingularityError) -> Self {
        match e {
            SingularityError::Seifert(s) => s.into(),
            SingularityError::Moduli(m) => m.into(),
            SingularityError::TooLarge(n) => {
                CliError::validation("too_large", e.to_string()).with("product", json!(n.to_string()))
            }
            SingularityError::WrongOrientation { .. } => CliError::validation("orientation", e.to_string()),
            other => CliError::check("singularity_consistency", other.to_string()),
        }
    }
}

impl From<PerturbError> for CliError {
    fn from(e: PerturbError) -> Self {
        let message = e.to_string();
        match e {
            PerturbError::UnknownScenario { name, available } => CliError::validation("unknown_scenario", message)
                .with("scenario", json!(name))
                .with("available", json!(available)),
            PerturbError::InvalidEpsilon(x) => {
                CliError::validation("invalid_epsilon", message).with("epsilon", json!(x.to_string()))
            }
            PerturbError::InvalidScenario(_) | PerturbError::DimensionMismatch { .. } => {
                CliError::validation("invalid_scenario", message)
            }
            _ => CliError::check("perturbation", message),
        }
    }
}
