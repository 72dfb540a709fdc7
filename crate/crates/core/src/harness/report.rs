//! Verification reports and their JSON and CSV serializations.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::SCHEMA_VERSION;
use super::HarnessError;
use crate::remez::Verdict;

/// One evaluated check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub suite: String,
    pub check_id: String,
    /// First 16 hex digits of the SHA-256 of the check's canonical inputs.
    pub inputs_digest: String,
    /// Signed slack of the checked inequality; nonnegative when it holds.
    pub margin: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

impl Summary {
    pub fn tally(records: &[Record]) -> Self {
        let mut s = Summary::default();
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub seed: u64,
    pub version: String,
    pub gamma_variant: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub environment: Environment,
    pub summary: Summary,
    pub records: Vec<Record>,
}

impl VerificationReport {
    /// Sorts the records by `(suite, check_id)` and tallies them.
    pub fn new(mut records: Vec<Record>, environment: Environment) -> Self {
        records.sort_by(|a, b| (&a.suite, &a.check_id).cmp(&(&b.suite, &b.check_id)));
        let summary = Summary::tally(&records);
        Self {
            schema_version: SCHEMA_VERSION,
            environment,
            summary,
            records,
        }
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn records_of<'a>(&'a self, suite: &'a str) -> impl Iterator<Item = &'a Record> + 'a {
        self.records.iter().filter(move |r| r.suite == suite)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One row per record under a fixed header.
    pub fn to_csv(&self) -> String {
        let timings = self.records.iter().any(|r| r.wall_time_ms.is_some());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "suite",
            "check_id",
            "inputs_digest",
            "margin",
            "verdict",
            "note",
        ];
        if timings {
            header.push("wall_time_ms");
        }
        w.write_record(&header).expect("in-memory write");
        for r in &self.records {
            let mut row = vec![
                r.suite.clone(),
                r.check_id.clone(),
                r.inputs_digest.clone(),
                format_float(r.margin),
                r.verdict.as_str().to_string(),
                r.note.clone(),
            ];
            if timings {
                row.push(r.wall_time_ms.map(format_float).unwrap_or_default());
            }
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}

fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Writes `report` to `path` in the given format.
pub fn emit_report(
    report: &VerificationReport,
    format: Format,
    path: &Path,
) -> Result<(), HarnessError> {
    let text = match format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    write_output(path, &text)
}

/// Writes a text artifact, naming the path on failure.
pub fn write_output(path: &Path, text: &str) -> Result<(), HarnessError> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// SHA-256 of `parts` joined by newlines, truncated to 16 hex digits.
pub fn digest(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update(b"\n");
    }
    let mut out = String::with_capacity(16);
    for b in h.finalize().iter().take(8) {
        let _ = write!(out, "{b:02x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(suite: &str, id: &str, verdict: Verdict) -> Record {
        Record {
            suite: suite.into(),
            check_id: id.into(),
            inputs_digest: digest(&[suite, id]),
            margin: 0.5,
            verdict,
            note: String::new(),
            wall_time_ms: None,
        }
    }

    fn env() -> Environment {
        Environment {
            seed: 7,
            version: "0.1.0".into(),
            gamma_variant: "section1".into(),
        }
    }

    #[test]
    fn records_are_sorted_and_tallied() {
        let r = VerificationReport::new(
            vec![
                record("markov", "b", Verdict::Pass),
                record("markov", "a", Verdict::Fail),
                record("envelope", "z", Verdict::Inconclusive),
            ],
            env(),
        );
        let ids: Vec<_> = r.records.iter().map(|r| r.check_id.as_str()).collect();
        assert_eq!(ids, ["z", "a", "b"]);
        assert_eq!(
            r.summary,
            Summary {
                pass: 1,
                fail: 1,
                inconclusive: 1
            }
        );
        assert_eq!(r.summary.total(), r.records.len());
        assert!(r.has_failures());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut recs = vec![
            record("markov", "a", Verdict::Pass),
            record("markov", "b", Verdict::Pass),
            record("markov", "c", Verdict::Pass),
        ];
        recs[1].note = "has, comma".into();
        recs[2].margin = f64::INFINITY;
        let csv = VerificationReport::new(recs, env()).to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "suite,check_id,inputs_digest,margin,verdict,note");
        assert!(lines[2].ends_with("\"has, comma\""));
        assert!(lines[3].contains(",inf,pass,"));
    }

    #[test]
    fn json_shape() {
        let r = VerificationReport::new(vec![record("omega", "x", Verdict::Pass)], env());
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["summary"]["pass"], 1);
        assert_eq!(v["environment"]["seed"], 7);
        assert_eq!(v["records"][0]["verdict"], "pass");
        assert!(v["records"][0].get("wall_time_ms").is_none());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest(&["a", "b"]), digest(&["a", "b"]));
        assert_ne!(digest(&["a", "b"]), digest(&["ab"]));
        assert_eq!(digest(&["x"]).len(), 16);
    }

    #[test]
    fn bad_path_is_reported() {
        let r = VerificationReport::new(vec![], env());
        let err =
            emit_report(&r, Format::Json, Path::new("/nonexistent-dir/report.json")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/report.json"));
        assert!(std::error::Error::source(&err).is_some());
        assert_eq!(err.exit_code(), 3);
    }
}
