use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sfinv_core::algebra::{euler_eval, LaurentPoly};
use sfinv_core::moduli;
use sfinv_core::seifert::{check_brieskorn_exponents, SeifertData};
use sfinv_core::singularity::{
    coprime_triples, geometric_genus_divisors, geometric_genus_pd, verify_identity_chain, SingularityError,
    SingularityInvariants,
};
use sfinv_perturb::{builtin, run_localisation, ExperimentReport, RunOptions};

use crate::error::CliError;
use crate::request::{BrieskornRequest, PerturbRequest, Request, SeifertRequest, SweepRequest};

pub const UNAVAILABLE_CI: &str = "unavailable (complete intersection)";
pub const UNAVAILABLE_GENERAL: &str = "unavailable (not a Brieskorn link)";

/// Rows of the optional CSV dump.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub json: Value,
    pub table: String,
    /// Every check passed.
    pub ok: bool,
    pub csv: Option<CsvTable>,
}

pub fn run(request: &Request) -> Result<Outcome, CliError> {
    request.validate()?;
    let input = serde_json::to_value(request).expect("requests serialize");
    match request {
        Request::Brieskorn(r) => brieskorn(input, r),
        Request::Seifert(r) => seifert(input, r),
        Request::VerifySweep(r) => sweep(input, r),
        Request::Perturb(r) => perturb(input, r),
    }
}

struct Overrides<'a> {
    casson: Option<i64>,
    su2_poly: Option<&'a LaurentPoly>,
    su2_hat_poly: Option<&'a LaurentPoly>,
}

fn brieskorn(input: Value, r: &BrieskornRequest) -> Result<Outcome, CliError> {
    check_brieskorn_exponents(&r.exponents)?;
    let mut exps = r.exponents.clone();
    exps.sort_unstable();
    let data = SeifertData::brieskorn(&exps)?;
    let overrides = Overrides {
        casson: r.casson,
        su2_poly: r.su2_poly.as_ref(),
        su2_hat_poly: r.su2_hat_poly.as_ref(),
    };
    seifert_report(input, &data, Some(&exps), overrides)
}

fn seifert(input: Value, r: &SeifertRequest) -> Result<Outcome, CliError> {
    let data = SeifertData::new(r.b, r.fibers.clone())?;
    data.require_homology_sphere()?;
    if data.fibers().len() < 3 {
        return Err(CliError::validation(
            "too_few_fibers",
            format!("need at least 3 exceptional fibers, got {}", data.fibers().len()),
        ));
    }
    let exps = brieskorn_exponents(&data);
    let overrides = Overrides {
        casson: r.casson,
        su2_poly: r.su2_poly.as_ref(),
        su2_hat_poly: r.su2_hat_poly.as_ref(),
    };
    seifert_report(input, &data, exps.as_deref(), overrides)
}

/// The sorted exponents when `data` is the link of `x1^a1 + ... = 0`.
fn brieskorn_exponents(data: &SeifertData) -> Option<Vec<i64>> {
    let mut fibers = data.fibers().to_vec();
    fibers.sort_unstable();
    let alphas: Vec<i64> = fibers.iter().map(|f| f.0).collect();
    check_brieskorn_exponents(&alphas).ok()?;
    let candidate = SeifertData::brieskorn(&alphas).ok()?;
    (candidate.b() == data.b() && candidate.fibers() == fibers.as_slice()).then_some(alphas)
}

fn seifert_report(
    input: Value,
    data: &SeifertData,
    exps: Option<&[i64]>,
    overrides: Overrides,
) -> Result<Outcome, CliError> {
    data.require_homology_sphere()?;
    let orbifold = data.orbifold();
    let homology = data.validate_homology_sphere();

    let mut invariants = Map::new();
    let mut routes = Map::new();
    let mut checks = Map::new();
    let mut mismatches: Vec<String> = Vec::new();

    let chain: Option<SingularityInvariants> = match exps {
        Some(&[p, q, r]) => Some(verify_identity_chain(p, q, r)?),
        _ => None,
    };
    let casson = match (&chain, overrides.casson) {
        (Some(c), Some(given)) if given != c.casson => {
            return Err(CliError::validation(
                "conflicting_parameters",
                format!("casson override {given} disagrees with the computed value {}", c.casson),
            ))
        }
        (Some(c), _) => Some(c.casson),
        (None, given) => given,
    };

    let report = moduli::moduli_report(data, casson)?;
    invariants.insert("pg".into(), json!(report.pg));
    if let Some(c) = casson {
        invariants.insert("casson".into(), json!(c));
    }
    if let Some(chi) = report.euler_sl2c {
        invariants.insert("euler_sl2c".into(), json!(chi));
    }

    match &chain {
        Some(c) => {
            invariants.insert("milnor".into(), json!(c.milnor));
            invariants.insert("signature".into(), json!(c.signature));
            routes.insert("pg_pinkham_dolgachev".into(), json!(c.pg));
            routes.insert("pg_divisors".into(), json!(c.pg_divisors));
            routes.insert("pg_enumeration".into(), json!(c.pg_enumeration));
            routes.insert("signature_lattice".into(), json!(c.signature));
            routes.insert("signature_durfee".into(), json!(c.signature_durfee));
            checks.insert("pg_routes".into(), json!(c.checks.pg_routes));
            checks.insert("sigma_routes".into(), json!(c.checks.sigma_routes));
            checks.insert("milnor_quarter".into(), json!(c.checks.milnor_quarter));
            mismatches.extend(c.mismatches.iter().cloned());
            if report.euler_sl2c != Some(c.euler_sl2c) {
                mismatches.push(format!("chi(M*): chain {}, moduli {:?}", c.euler_sl2c, report.euler_sl2c));
                checks.insert("milnor_quarter".into(), json!(false));
            }
        }
        None => {
            let why = if exps.is_some() { UNAVAILABLE_CI } else { UNAVAILABLE_GENERAL };
            invariants.insert("milnor".into(), json!(why));
            invariants.insert("signature".into(), json!(why));
            match (geometric_genus_pd(data), geometric_genus_divisors(data)) {
                (Ok(pd), Ok(div)) => {
                    routes.insert("pg_pinkham_dolgachev".into(), json!(pd));
                    routes.insert("pg_divisors".into(), json!(div));
                    routes.insert("pg_enumeration".into(), json!(report.pg));
                    let agree = pd == div && div == report.pg;
                    if !agree {
                        mismatches.push(format!(
                            "pg: pinkham-dolgachev {pd}, divisors {div}, enumeration {}",
                            report.pg
                        ));
                    }
                    checks.insert("pg_routes".into(), json!(agree));
                }
                (Err(SingularityError::WrongOrientation { .. }), _) | (_, Err(SingularityError::WrongOrientation { .. })) => {
                    routes.insert("pg_pinkham_dolgachev".into(), json!("unavailable (orientation)"));
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            }
        }
    }

    let sl2c = moduli::sl2c_poincare(data, overrides.su2_poly)?;
    let hp = moduli::hp_poincare(data, overrides.su2_hat_poly)?;
    for (name, assembled) in [("sl2c_euler", &sl2c), ("hp_euler", &hp)] {
        if let (false, Some(chi)) = (assembled.partial, report.euler_sl2c) {
            let value = euler_eval(&assembled.poly);
            let agree = value == chi.into();
            if !agree {
                mismatches.push(format!("{name}: polynomial gives {value}, expected {chi}"));
            }
            checks.insert(name.into(), json!(agree));
        }
    }

    let ok = checks.values().all(|v| v.as_bool() == Some(true));
    let polynomials = json!({
        "excess": report.excess_poincare,
        "hp_excess": report.hp_excess,
        "sl2c": sl2c,
        "hp": hp,
    });
    let seifert = json!({
        "b": data.b(),
        "fibers": data.fibers(),
        "euler_number": data.euler_number(),
    });
    let orbifold_json = json!({
        "alphas": orbifold.alphas(),
        "euler_char": orbifold.euler_char(),
        "canonical_degree": orbifold.canonical_bundle().degree(),
    });
    let json = json!({
        "input": input,
        "seifert": seifert,
        "orbifold": orbifold_json,
        "homology_sphere": homology,
        "invariants": invariants,
        "routes": routes,
        "z_components": report.z_components,
        "polynomials": polynomials,
        "checks": checks,
        "mismatches": mismatches,
        "ok": ok,
    });
    let table = crate::table::seifert_table(&json, &report.z_components);
    Ok(Outcome { json, table, ok, csv: None })
}

fn sweep(input: Value, r: &SweepRequest) -> Result<Outcome, CliError> {
    let rows: Vec<Value> = coprime_triples(r.max)
        .par_iter()
        .map(|&(p, q, r)| match verify_identity_chain(p, q, r) {
            Ok(inv) => json!({
                "exponents": [p, q, r],
                "milnor": inv.milnor,
                "pg": inv.pg,
                "signature": inv.signature,
                "casson": inv.casson,
                "euler_sl2c": inv.euler_sl2c,
                "checks": inv.checks,
                "mismatches": inv.mismatches,
                "passed": inv.passed(),
            }),
            Err(e) => json!({
                "exponents": [p, q, r],
                "mismatches": [e.to_string()],
                "passed": false,
            }),
        })
        .collect();
    let failed = rows.iter().filter(|row| row["passed"] != json!(true)).count();
    let ok = failed == 0;
    let json = json!({
        "input": input,
        "total": rows.len(),
        "failed": failed,
        "ok": ok,
        "triples": rows,
    });
    let table = crate::table::sweep_table(&json);
    Ok(Outcome { json, table, ok, csv: None })
}

fn perturb(input: Value, r: &PerturbRequest) -> Result<Outcome, CliError> {
    let scenario = builtin(&r.scenario)?;
    let reports: Vec<ExperimentReport> = run_localisation(&scenario, &r.eps, &RunOptions::default())?;
    let all_passed = reports.iter().all(ExperimentReport::passed);
    let ok = all_passed || !r.assert;

    let dim = scenario.dim();
    let mut header = vec!["epsilon".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    header.extend(["value".to_string(), "index".to_string()]);
    let mut rows = Vec::new();
    for rep in &reports {
        for f in &rep.found {
            let mut row = vec![rep.epsilon.to_string()];
            row.extend(f.point.iter().map(f64::to_string));
            row.push(f.value.to_string());
            row.push(f.index.map(|i| i.to_string()).unwrap_or_default());
            rows.push(row);
        }
    }

    let json = json!({
        "input": input,
        "reports": reports,
        "passed": all_passed,
        "ok": ok,
    });
    let mut table = String::new();
    for rep in &reports {
        table.push_str(&crate::table::experiment_table(rep));
    }
    let _ = writeln!(table, "overall: {}", if all_passed { "PASS" } else { "FAIL" });
    Ok(Outcome { json, table, ok, csv: Some(CsvTable { header, rows }) })
}
