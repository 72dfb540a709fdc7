//! Experiment configuration: JSON schema, defaults and validation.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::funcmodel::{FunctionModel, IntervalSet};
use crate::sequences::{GammaVariant, Generator};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SPACING: f64 = 1e-3;
pub const DEFAULT_SEQUENCE_LENGTH: usize = 200;

/// The verification suites, by their external names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Suite {
    #[serde(rename = "theorem-a")]
    TheoremA,
    #[serde(rename = "theorem-b")]
    TheoremB,
    #[serde(rename = "lemma-2-1")]
    Lemma21,
    #[serde(rename = "cor-2-3")]
    Cor23,
    #[serde(rename = "cor-5-1-3")]
    Cor513,
    #[serde(rename = "one-sided")]
    OneSided,
    #[serde(rename = "remez-classical")]
    RemezClassical,
    #[serde(rename = "markov")]
    Markov,
    #[serde(rename = "minorant")]
    Minorant,
    #[serde(rename = "omega")]
    Omega,
    #[serde(rename = "cor-5-5-1")]
    Cor551,
    #[serde(rename = "envelope")]
    Envelope,
    #[serde(rename = "nonextendable")]
    Nonextendable,
}

impl Suite {
    pub const ALL: [Suite; 13] = [
        Suite::TheoremA,
        Suite::TheoremB,
        Suite::Lemma21,
        Suite::Cor23,
        Suite::Cor513,
        Suite::OneSided,
        Suite::RemezClassical,
        Suite::Markov,
        Suite::Minorant,
        Suite::Omega,
        Suite::Cor551,
        Suite::Envelope,
        Suite::Nonextendable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TheoremA => "theorem-a",
            Suite::TheoremB => "theorem-b",
            Suite::Lemma21 => "lemma-2-1",
            Suite::Cor23 => "cor-2-3",
            Suite::Cor513 => "cor-5-1-3",
            Suite::OneSided => "one-sided",
            Suite::RemezClassical => "remez-classical",
            Suite::Markov => "markov",
            Suite::Minorant => "minorant",
            Suite::Omega => "omega",
            Suite::Cor551 => "cor-5-5-1",
            Suite::Envelope => "envelope",
            Suite::Nonextendable => "nonextendable",
        }
    }

    /// One-line description of the verified statement.
    pub fn statement(self) -> &'static str {
        match self {
            Suite::TheoremA => "zero count on [0,1] is at most the Bang degree",
            Suite::TheoremB => "degree-dependent Remez bound (Gamma |I|/|E|)^(2 n_f)",
            Suite::Lemma21 => "fundamental inequality for the Bang norm",
            Suite::Cor23 => "level-crossing sum of M_{j-1}/M_j below e",
            Suite::Cor513 => "level-crossing integral of 1/A below e",
            Suite::OneSided => "one-sided norm inequality and preserved non-negativity",
            Suite::RemezClassical => "polynomial Remez inequality (4|I|/|E|)^d",
            Suite::Markov => "pointwise Markov bound at the origin",
            Suite::Minorant => "log-convex minorant against a brute-force hull",
            Suite::Omega => "the function Omega: value at 1, monotonicity, closed forms",
            Suite::Cor551 => "propagation of smallness through Omega and alpha(E)",
            Suite::Envelope => "flat-zero envelope of non-quasianalytic classes",
            Suite::Nonextendable => "domination of the non-extendable series coefficients",
        }
    }

    /// Mixed into the run seed so each suite draws from its own stream.
    pub(crate) fn salt(self) -> u64 {
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(self as u64 + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomSets {
    pub count: usize,
    pub max_components: usize,
    pub min_measure: f64,
    /// Overrides the run seed for set generation only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for RandomSets {
    fn default() -> Self {
        Self {
            count: 100,
            max_components: 4,
            min_measure: 0.05,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Lower limit for residuals of the pointwise inequalities.
    pub residual: f64,
    /// How far below zero a function may dip in the one-sided suite.
    pub nonnegativity: f64,
    /// Log-domain agreement with the brute-force hull.
    pub minorant: f64,
    /// Agreement of `Omega` with its closed forms.
    pub omega: f64,
    /// Relative gap accepted for equality cases.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-9,
            nonnegativity: 1e-9,
            minorant: 1e-12,
            omega: 1e-9,
            equality: 1e-9,
        }
    }
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_generator() -> Generator {
    Generator::Analytic { scale: 1.0 }
}

fn default_sequence_length() -> usize {
    DEFAULT_SEQUENCE_LENGTH
}

fn default_spacing() -> f64 {
    DEFAULT_SPACING
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    /// Generator of the class for the extra functions.
    #[serde(default = "default_generator")]
    pub generator: Generator,
    /// Last stored index `J`; every sequence holds `M_0..=M_J`.
    #[serde(default = "default_sequence_length")]
    pub sequence_length: usize,
    /// Extra functions, paired with `generator`.
    #[serde(default)]
    pub functions: Vec<FunctionModel>,
    /// Extra sets `E`, used alongside the random ones.
    #[serde(default)]
    pub interval_sets: Vec<IntervalSet>,
    #[serde(default)]
    pub random_sets: RandomSets,
    #[serde(default)]
    pub suites: Vec<Suite>,
    #[serde(default = "default_spacing")]
    pub spacing: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub gamma_variant: GammaVariant,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            generator: default_generator(),
            sequence_length: DEFAULT_SEQUENCE_LENGTH,
            functions: Vec::new(),
            interval_sets: Vec::new(),
            random_sets: RandomSets::default(),
            suites: Vec::new(),
            spacing: DEFAULT_SPACING,
            tolerances: Tolerances::default(),
            gamma_variant: GammaVariant::default(),
            seed: 0,
        }
    }
}

fn config_error(pointer: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("{pointer}: {msg}"))
}

impl ExperimentConfig {
    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let pointer = json_pointer(e.path());
            config_error(&pointer, e.inner())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "/schema_version",
                format!(
                    "unsupported schema version {}, expected {SCHEMA_VERSION}",
                    self.schema_version
                ),
            ));
        }
        self.generator
            .validate()
            .map_err(|e| config_error("/generator", e))?;
        if self.sequence_length < 2 {
            return Err(config_error("/sequence_length", "must be at least 2"));
        }
        if let Some(table) = self.generator.table_len() {
            if self.sequence_length > table {
                return Err(config_error(
                    "/sequence_length",
                    format!("tabulated generator defines A only up to {table}"),
                ));
            }
        }
        if !(self.spacing > 0.0 && self.spacing <= 0.1) {
            return Err(config_error(
                "/spacing",
                format!("must lie in (0, 0.1], got {}", self.spacing),
            ));
        }
        let rs = &self.random_sets;
        if rs.max_components == 0 {
            return Err(config_error(
                "/random_sets/max_components",
                "must be positive",
            ));
        }
        if !(rs.min_measure > 0.0 && rs.min_measure < 0.5) {
            return Err(config_error(
                "/random_sets/min_measure",
                "must lie in (0, 0.5)",
            ));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("residual", t.residual),
            ("nonnegativity", t.nonnegativity),
            ("minorant", t.minorant),
            ("omega", t.omega),
            ("equality", t.equality),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(config_error(
                    &format!("/tolerances/{name}"),
                    "must be finite and non-negative",
                ));
            }
        }
        Ok(())
    }
}

/// Reads, parses and validates a configuration file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text)
}

fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => {
                let _ = write!(out, "/{index}");
            }
            Segment::Map { key } => {
                let _ = write!(out, "/{}", key.replace('~', "~0").replace('/', "~1"));
            }
            Segment::Enum { variant } => {
                let _ = write!(out, "/{variant}");
            }
            Segment::Unknown => out.push_str("/?"),
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"generator":{"kind":"analytic","C":1.0},"suites":["theorem-a"]}"#,
        )
        .unwrap();
        assert_eq!(cfg.spacing, 1e-3);
        assert_eq!(cfg.sequence_length, 200);
        assert_eq!(cfg.gamma_variant, GammaVariant::Degree);
        assert_eq!(cfg.suites, vec![Suite::TheoremA]);
        assert_eq!(cfg.random_sets, RandomSets::default());
    }

    #[test]
    fn unknown_suite_names_the_field() {
        let err =
            ExperimentConfig::from_json(r#"{"suites":["theorem-a","theorem-c"]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("/suites/1"), "{msg}");
        assert!(msg.contains("theorem-c"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn generator_invariant_is_cited() {
        let err = ExperimentConfig::from_json(
            r#"{"generator":{"kind":"tabulated","values":[1.0,3.0,2.0]}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("/generator") && msg.contains("non-decreasing"),
            "{msg}"
        );
    }

    #[test]
    fn invariants_are_enforced() {
        for (text, field) in [
            (r#"{"sequence_length":1}"#, "/sequence_length"),
            (r#"{"spacing":0}"#, "/spacing"),
            (r#"{"schema_version":2}"#, "/schema_version"),
            (
                r#"{"random_sets":{"min_measure":0.0}}"#,
                "/random_sets/min_measure",
            ),
            (
                r#"{"functions":[{"kind":"sinusoid","k":0,"amplitude":1.0}]}"#,
                "/functions/0",
            ),
            (
                r#"{"interval_sets":[{"intervals":[[0.5,0.2]]}]}"#,
                "/interval_sets/0",
            ),
            (r#"{"bogus":1}"#, "/"),
        ] {
            let msg = ExperimentConfig::from_json(text).unwrap_err().to_string();
            assert!(msg.contains(field), "{text}: {msg}");
        }
    }

    #[test]
    fn variant_strings() {
        let cfg = ExperimentConfig::from_json(r#"{"gamma_variant":"section55"}"#).unwrap();
        assert_eq!(cfg.gamma_variant, GammaVariant::Propagation);
        let back = serde_json::to_value(&cfg).unwrap();
        assert_eq!(back["gamma_variant"], "section55");
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            let v = serde_json::to_value(s).unwrap();
            assert_eq!(v, s.name());
            assert_eq!(serde_json::from_value::<Suite>(v).unwrap(), s);
        }
    }
}
