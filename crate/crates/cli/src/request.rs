use serde::{Deserialize, Serialize};
use sfinv_core::algebra::LaurentPoly;

use crate::error::CliError;

/// Largest exponent accepted by the identity-chain sweep.
pub const MAX_SWEEP: i64 = 30;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Table,
    Json,
}

/// One unit of work. The batch format is this type, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Request {
    Brieskorn(BrieskornRequest),
    Seifert(SeifertRequest),
    VerifySweep(SweepRequest),
    Perturb(PerturbRequest),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrieskornRequest {
    pub exponents: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casson: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su2_poly: Option<LaurentPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su2_hat_poly: Option<LaurentPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeifertRequest {
    pub b: i64,
    pub fibers: Vec<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub casson: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su2_poly: Option<LaurentPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub su2_hat_poly: Option<LaurentPoly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRequest {
    pub max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbRequest {
    pub scenario: String,
    pub eps: Vec<f64>,
    #[serde(default)]
    pub assert: bool,
}

impl Request {
    /// Checks that do not need any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Request::Brieskorn(_) => Ok(()),
            Request::Seifert(r) => {
                if r.fibers.is_empty() {
                    return Err(CliError::validation("too_few_fibers", "at least one fiber is required"));
                }
                Ok(())
            }
            Request::VerifySweep(r) => {
                if !(0..=MAX_SWEEP).contains(&r.max) {
                    return Err(CliError::validation(
                        "out_of_range",
                        format!("max must lie in 0..={MAX_SWEEP}, got {}", r.max),
                    )
                    .with("max", r.max.into()));
                }
                Ok(())
            }
            Request::Perturb(r) => {
                if r.eps.is_empty() {
                    return Err(CliError::validation("invalid_epsilon", "at least one epsilon is required"));
                }
                Ok(())
            }
        }
    }
}

/// Parses `alpha/gamma`.
pub fn parse_fiber(s: &str) -> Result<(i64, i64), String> {
    let (a, g) = s
        .split_once('/')
        .ok_or_else(|| format!("expected ALPHA/GAMMA, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((parse(a)?, parse(g)?))
}
