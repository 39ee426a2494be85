//! Deterministic text output.

use std::fmt::Write as _;

use crate::dynamic::{Outcome, PropertyReport, Verdict};

/// Significant digits in every printed number.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: at most 12 significant digits, no trailing zeros,
/// scientific notation outside `[1e-4, 1e12)`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Inverse of [`format_number`] up to the 12-digit rounding.
pub fn parse_number(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

/// Tab-separated table with a header row.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join("\t");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

/// One line per property report.
pub fn verify_table(reports: &[(String, PropertyReport)]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|(spec, r)| {
            let status = match r.outcome() {
                Outcome::Pass => "ok",
                Outcome::WitnessNotFound => "NO-WITNESS",
                Outcome::Violation => "VIOLATED",
            };
            let verdict = match r.verdict {
                Verdict::HoldsOnSuite => "holds",
                Verdict::Violated => "violated",
                Verdict::NotApplicable => "n/a",
            };
            vec![
                spec.clone(),
                r.property.name().to_string(),
                serde_json::to_value(r.expectation).expect("unit enum").as_str().unwrap_or("").to_string(),
                verdict.to_string(),
                format_number(r.max_violation_magnitude),
                r.trials.to_string(),
                status.to_string(),
            ]
        })
        .collect();
    table(&["spec", "property", "expectation", "verdict", "max_violation", "trials", "status"], &rows)
}

/// Summary line counting outcomes.
pub fn verify_summary(reports: &[(String, PropertyReport)]) -> String {
    let count = |o: Outcome| reports.iter().filter(|(_, r)| r.outcome() == o).count();
    let mut s = String::new();
    write!(
        s,
        "summary: {} checks, {} ok, {} must-hold violations, {} missing witnesses",
        reports.len(),
        count(Outcome::Pass),
        count(Outcome::Violation),
        count(Outcome::WitnessNotFound)
    )
    .expect("writing to a String");
    s
}
