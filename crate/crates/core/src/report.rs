//! Verification reports: one record per (check, λ), rendered as aligned text
//! or as JSON with stable field names.
//!
//! JSON reals carry 17 significant digits, enough to round-trip any `f64`;
//! `inf`, `-inf` and `nan` are written as strings. Output bytes depend only on the scenario and
//! tolerance unless timing is requested.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Serialize, Serializer};

use crate::gaps::Term;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    /// Check name with its arguments, e.g. `gap_closed_form[x=0,p1=A,p2=B]`.
    pub check: String,
    pub identity: String,
    pub lambda: f64,
    pub expect: String,
    pub direct: Option<f64>,
    pub closed_form: Option<f64>,
    pub discrepancy: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// `Kind: message` of a raised error.
    pub error: Option<String>,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub scenario: String,
    pub records: Vec<CheckRecord>,
    pub wall_time: Duration,
}

impl Report {
    pub fn new(scenario: String, records: Vec<CheckRecord>, wall_time: Duration) -> Self {
        Report {
            scenario,
            records,
            wall_time,
        }
    }

    pub fn passed(&self) -> usize {
        self.records.iter().filter(|r| r.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.records.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.records.iter().filter_map(|r| r.discrepancy).fold(0.0, f64::max)
    }

    pub fn render_text(&self, timing: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario {}", self.scenario);
        for r in &self.records {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{status} {} lambda={} [{}]",
                r.check,
                fmt_real(r.lambda),
                r.identity
            );
            match (&r.error, r.direct, r.closed_form, r.discrepancy) {
                (Some(err), _, _, _) => {
                    let _ = write!(out, " expect={} raised {err}", r.expect);
                }
                (None, Some(d), Some(c), Some(disc)) => {
                    let _ = write!(
                        out,
                        " direct={} closed_form={} |diff|={} tol={}",
                        fmt_real(d),
                        fmt_real(c),
                        fmt_real(disc),
                        fmt_real(r.tolerance)
                    );
                    if r.expect != "pass" {
                        let _ = write!(out, " expect={} but no error was raised", r.expect);
                    }
                }
                _ => {}
            }
            out.push('\n');
            for t in &r.terms {
                let _ = writeln!(out, "    {} = {}", t.name, fmt_real(t.value));
            }
        }
        let _ = write!(
            out,
            "{} passed, {} failed, max |diff| {}",
            self.passed(),
            self.failed(),
            fmt_real(self.max_discrepancy())
        );
        if timing {
            let _ = write!(out, ", wall time {:.3}s", self.wall_time.as_secs_f64());
        }
        out.push('\n');
        out
    }

    pub fn render_json(&self, timing: bool) -> String {
        let doc = JsonReport {
            schema: 1,
            scenario: &self.scenario,
            passed: self.passed(),
            failed: self.failed(),
            total: self.records.len(),
            max_discrepancy: Real(self.max_discrepancy()),
            wall_time_seconds: timing.then_some(Real(self.wall_time.as_secs_f64())),
            checks: self.records.iter().map(JsonRecord::from).collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("report serialization is infallible");
        s.push('\n');
        s
    }
}

fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.12e}")
    } else {
        v.to_string()
    }
}

#[derive(Clone, Copy)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            let raw =
                serde_json::value::RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    schema: u32,
    scenario: &'a str,
    passed: usize,
    failed: usize,
    total: usize,
    max_discrepancy: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_seconds: Option<Real>,
    checks: Vec<JsonRecord<'a>>,
}

#[derive(Serialize)]
struct JsonTerm {
    name: &'static str,
    value: Real,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    check: &'a str,
    identity: &'a str,
    lambda: Real,
    expect: &'a str,
    pass: bool,
    direct: Option<Real>,
    closed_form: Option<Real>,
    discrepancy: Option<Real>,
    tolerance: Real,
    error: Option<&'a str>,
    terms: Vec<JsonTerm>,
}

impl<'a> From<&'a CheckRecord> for JsonRecord<'a> {
    fn from(r: &'a CheckRecord) -> Self {
        JsonRecord {
            check: &r.check,
            identity: &r.identity,
            lambda: Real(r.lambda),
            expect: &r.expect,
            pass: r.pass,
            direct: r.direct.map(Real),
            closed_form: r.closed_form.map(Real),
            discrepancy: r.discrepancy.map(Real),
            tolerance: Real(r.tolerance),
            error: r.error.as_deref(),
            terms: r
                .terms
                .iter()
                .map(|t| JsonTerm {
                    name: t.name,
                    value: Real(t.value),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(pass: bool, value: f64) -> CheckRecord {
        CheckRecord {
            check: "gap_closed_form[x=0,p1=A,p2=B]".into(),
            identity: "gap/gibbs-four-term".into(),
            lambda: 0.5,
            expect: "pass".into(),
            direct: Some(value),
            closed_form: Some(value),
            discrepancy: Some(0.0),
            tolerance: 1e-10,
            pass,
            error: None,
            terms: vec![Term {
                name: "D(P1||Q)",
                value: f64::INFINITY,
            }],
        }
    }

    #[test]
    fn json_is_stable_and_round_trips_reals() {
        let v = 0.1 + 0.2;
        let r = Report::new(
            "s".into(),
            vec![record(true, v), record(false, -1.0)],
            Duration::from_secs(3),
        );
        let json = r.render_json(false);
        assert_eq!(json, r.render_json(false));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["passed"], 1);
        assert_eq!(parsed["failed"], 1);
        assert_eq!(parsed["checks"][0]["direct"].as_f64().unwrap(), v);
        assert_eq!(parsed["checks"][0]["terms"][0]["value"], "inf");
        assert!(parsed.get("wall_time_seconds").is_none());
        assert!(json.contains("\"lambda\": 5.0000000000000000e-1"));
        let timed: serde_json::Value = serde_json::from_str(&r.render_json(true)).unwrap();
        assert_eq!(timed["wall_time_seconds"], 3.0);
    }

    #[test]
    fn text_has_one_status_line_per_record() {
        let r = Report::new("s".into(), vec![record(true, 1.0), record(false, 2.0)], Duration::ZERO);
        let text = r.render_text(false);
        assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 1);
        assert_eq!(text.lines().filter(|l| l.starts_with("FAIL ")).count(), 1);
        assert!(text.ends_with("1 passed, 1 failed, max |diff| 0.000000000000e0\n"));
    }
}
