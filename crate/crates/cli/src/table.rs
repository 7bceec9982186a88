//! Plain-text rendering of reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::Value;
use sfinv_core::moduli::ZComponent;
use sfinv_perturb::ExperimentReport;

fn text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn mark(v: &Value) -> &'static str {
    match v.as_bool() {
        Some(true) => "ok",
        Some(false) => "FAIL",
        None => "-",
    }
}

fn row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key:<20}{value}");
}

fn poly(v: &Value) -> String {
    let s = text(v);
    if s == "0" {
        "0 (empty)".into()
    } else {
        s
    }
}

pub fn seifert_table(report: &Value, components: &[ZComponent]) -> String {
    let mut out = String::new();
    let s = &report["seifert"];
    let fibers: Vec<String> = s["fibers"]
        .as_array()
        .map(|fs| fs.iter().map(|f| format!("{}/{}", f[0], f[1])).collect())
        .unwrap_or_default();
    row(&mut out, "seifert data", format!("({}; {})", s["b"], fibers.join(", ")));
    row(
        &mut out,
        "euler number",
        format!("{}  (A*e = {})", text(&s["euler_number"]), report["homology_sphere"]["a_times_e"]),
    );
    row(&mut out, "orbifold chi", text(&report["orbifold"]["euler_char"]));

    let mut groups: BTreeMap<(i64, i64, i64), usize> = BTreeMap::new();
    for c in components {
        if let ZComponent::Cpe(c) = c {
            *groups.entry((c.vector.e, c.morse_index, c.ambient_dim_c)).or_default() += 1;
        }
    }
    let mut pieces = vec!["SU(2)".to_string()];
    pieces.extend(
        groups
            .iter()
            .map(|((e, index, ambient), n)| format!("{n} x CP^{e} (index {index}, ambient {ambient})")),
    );
    row(&mut out, "z components", pieces.join("; "));

    let p = &report["polynomials"];
    row(&mut out, "excess P_T", poly(&p["excess"]));
    row(&mut out, "hp excess", poly(&p["hp_excess"]));
    for (label, key) in [("SL(2,C) P_T", "sl2c"), ("hp P_T", "hp")] {
        let partial = if p[key]["partial"] == Value::Bool(true) { "  (partial: SU(2) summand external)" } else { "" };
        row(&mut out, label, format!("{}{partial}", text(&p[key]["poly"])));
    }

    let inv = &report["invariants"];
    for key in ["pg", "milnor", "signature", "casson", "euler_sl2c"] {
        let v = &inv[key];
        row(&mut out, key, if v.is_null() { "omitted".into() } else { text(v) });
    }

    if let Some(checks) = report["checks"].as_object() {
        let list: Vec<String> = checks.iter().map(|(k, v)| format!("{k} {}", mark(v))).collect();
        row(&mut out, "checks", if list.is_empty() { "none".into() } else { list.join(", ") });
    }
    for m in report["mismatches"].as_array().into_iter().flatten() {
        row(&mut out, "mismatch", text(m));
    }
    row(&mut out, "result", if report["ok"] == Value::Bool(true) { "PASS" } else { "FAIL" });
    out
}

pub fn sweep_table(report: &Value) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>4}{:>4}{:>4}{:>6}{:>8}{:>8}{:>6}{:>6}  {:<10}{:<13}{:<15}result",
        "p", "q", "r", "pg", "milnor", "sigma", "lam", "chi", "pg_routes", "sigma_routes", "milnor_quarter"
    );
    for t in report["triples"].as_array().into_iter().flatten() {
        let e = &t["exponents"];
        let c = &t["checks"];
        let _ = writeln!(
            out,
            "{:>4}{:>4}{:>4}{:>6}{:>8}{:>8}{:>6}{:>6}  {:<10}{:<13}{:<15}{}",
            text(&e[0]),
            text(&e[1]),
            text(&e[2]),
            text(&t["pg"]),
            text(&t["milnor"]),
            text(&t["signature"]),
            text(&t["casson"]),
            text(&t["euler_sl2c"]),
            mark(&c["pg_routes"]),
            mark(&c["sigma_routes"]),
            mark(&c["milnor_quarter"]),
            if t["passed"] == Value::Bool(true) { "PASS" } else { "FAIL" }
        );
        for m in t["mismatches"].as_array().into_iter().flatten() {
            let _ = writeln!(out, "      {}", text(m));
        }
    }
    let _ = writeln!(out, "{} triples, {} failed", report["total"], report["failed"]);
    out
}

pub fn experiment_table(r: &ExperimentReport) -> String {
    let mut out = String::new();
    let expected = r.expected_signed_count.map_or("n/a".to_string(), |c| c.to_string());
    let _ = writeln!(
        out,
        "{} eps={}: {} points, signed count {} (expected {}){}",
        r.scenario,
        r.epsilon,
        r.found.len(),
        r.signed_count,
        expected,
        if r.degenerate { ", degenerate: abstained" } else { "" }
    );
    for f in &r.found {
        let coords: Vec<String> = f.point.iter().map(|&x| format!("{:.12}", x + 0.0)).collect();
        let _ = writeln!(
            out,
            "  ({})  value {:.6e}  index {}  |grad| {:.1e}",
            coords.join(", "),
            f.value,
            f.index.map_or("-".to_string(), |i| i.to_string()),
            f.grad_norm
        );
    }
    for p in &r.outside_basin {
        let _ = writeln!(out, "  outside basin: {p:?}");
    }
    for msg in &r.failures {
        let _ = writeln!(out, "  FAIL {msg}");
    }
    out
}
