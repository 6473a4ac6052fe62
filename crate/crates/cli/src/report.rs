//! Machine-readable verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Bumped whenever a field is added, removed or changes meaning.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// The published JSON schema for an array of reports.
pub const REPORT_SCHEMA: &str = include_str!("../schema/verification-report.schema.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExactMarker {
    Exact,
}

/// Either a real number or the literal `"exact"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Measure {
    Exact(ExactMarker),
    Value(f64),
}

impl Measure {
    pub const EXACT: Measure = Measure::Exact(ExactMarker::Exact);

    pub fn is_exact(&self) -> bool {
        matches!(self, Measure::Exact(_))
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Measure::Value(v) => Some(*v),
            Measure::Exact(_) => None,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Exact(_) => write!(f, "exact"),
            Measure::Value(v) => write!(f, "{v:.3e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    /// `pass` iff the residual is exact, or a finite number not above a
    /// numeric tolerance.
    pub fn decide(residual: Option<Measure>, tolerance: Measure) -> Self {
        let ok = match (residual, tolerance) {
            (Some(Measure::Exact(_)), _) => true,
            (Some(Measure::Value(r)), Measure::Value(t)) => r.is_finite() && r <= t,
            _ => false,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// Outcome of one registry entry.
///
/// `residual` is `null` when the check could not run (domain or cutoff
/// error); the reason is in `notes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationReport {
    pub schema_version: String,
    pub id: String,
    pub module: String,
    pub parameters: BTreeMap<String, Value>,
    pub residual: Option<Measure>,
    pub tolerance: Measure,
    pub verdict: Verdict,
    pub notes: String,
    /// Seconds.
    pub wall_time: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Human-readable single line plus indented notes.
    pub fn to_text(&self) -> String {
        let residual = self.residual.map_or_else(|| "error".to_string(), |r| r.to_string());
        let mut out = format!(
            "{} {:<22} residual {:>10}  tol {:>9}  ({:.2}s)",
            self.verdict, self.id, residual, self.tolerance, self.wall_time
        );
        if !self.parameters.is_empty() {
            let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={}", display_value(v))).collect();
            out.push_str(&format!("\n    params: {}", params.join(" ")));
        }
        for line in self.notes.lines().filter(|l| !l.is_empty()) {
            out.push_str(&format!("\n    note: {line}"));
        }
        out
    }
}

fn display_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(residual: Option<Measure>) -> VerificationReport {
        let tolerance = Measure::Value(1e-8);
        VerificationReport {
            schema_version: SCHEMA_VERSION.into(),
            id: "psv-norm".into(),
            module: "fock-numeric".into(),
            parameters: BTreeMap::from([("m".to_string(), Value::from(1))]),
            residual,
            tolerance,
            verdict: Verdict::decide(residual, tolerance),
            notes: "paper value 5/9".into(),
            wall_time: 0.25,
        }
    }

    #[test]
    fn measure_serializes_as_number_or_exact() {
        assert_eq!(serde_json::to_string(&Measure::EXACT).unwrap(), "\"exact\"");
        assert_eq!(serde_json::to_string(&Measure::Value(0.5)).unwrap(), "0.5");
        assert_eq!(serde_json::from_str::<Measure>("\"exact\"").unwrap(), Measure::EXACT);
        assert!(serde_json::from_str::<Measure>("\"close\"").is_err());
    }

    #[test]
    fn verdict_rule() {
        let tol = Measure::Value(1e-8);
        assert_eq!(Verdict::decide(Some(Measure::Value(1e-9)), tol), Verdict::Pass);
        assert_eq!(Verdict::decide(Some(Measure::Value(1e-8)), tol), Verdict::Pass);
        assert_eq!(Verdict::decide(Some(Measure::Value(2e-8)), tol), Verdict::Fail);
        assert_eq!(Verdict::decide(Some(Measure::Value(f64::NAN)), tol), Verdict::Fail);
        assert_eq!(Verdict::decide(Some(Measure::EXACT), Measure::EXACT), Verdict::Pass);
        assert_eq!(Verdict::decide(Some(Measure::Value(3.0)), Measure::EXACT), Verdict::Fail);
        assert_eq!(Verdict::decide(None, tol), Verdict::Fail);
    }

    #[test]
    fn report_round_trips() {
        for r in [sample(Some(Measure::Value(1e-12))), sample(Some(Measure::EXACT)), sample(None)] {
            let text = serde_json::to_string(&r).unwrap();
            let back: VerificationReport = serde_json::from_str(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn text_rendering() {
        let t = sample(Some(Measure::Value(1e-12))).to_text();
        assert!(t.starts_with("PASS psv-norm"));
        assert!(t.contains("note: paper value 5/9"));
        assert!(sample(None).to_text().contains("error"));
    }
}
