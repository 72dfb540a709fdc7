//! Verification harness: certified class members, the built-in suites, and
//! machine-readable reports.
//!
//! A run takes an [`ExperimentConfig`], evaluates every selected suite over
//! the built-in pairs plus the configured extras, and returns a
//! [`VerificationReport`] whose records are sorted by `(suite, check_id)`.

pub mod config;
pub mod oracles;
pub mod report;
pub mod sampling;
mod suites;

use std::time::Instant;

use thiserror::Error;

pub use config::{load_config, ExperimentConfig, RandomSets, Suite, Tolerances};
pub use report::{emit_report, write_output, Format, Record, Summary, VerificationReport};

use crate::funcmodel::series::{
    regularized_log_m, PowerSeries, DEFAULT_NONEXTENDABLE_C, DEFAULT_TRUNCATION,
};
use crate::funcmodel::{ClassFit, FunctionModel, Polynomial};
use crate::remez::{refine_once, Verdict};
use crate::sequences::{from_generator, log_convex_minorant_log, Generator, LogConvexSequence};

/// Largest index of the tabulated class paired with the non-extendable series.
pub const SERIES_CLASS_LEN: usize = 100;
/// Scale applied to the non-extendable series in the built-in suite.
pub const SERIES_SCALE: f64 = 0.5;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("check {suite}/{check_id} could not be evaluated")]
    Check {
        suite: String,
        check_id: String,
        #[source]
        source: crate::Error,
    },
    #[error("cannot write {}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit status: 2 for configuration errors, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// A function together with the class it is checked against.
#[derive(Debug, Clone)]
pub struct Member {
    pub id: String,
    pub function: FunctionModel,
    pub generator: Generator,
    pub sequence: LogConvexSequence,
    pub fit: ClassFit,
    pub builtin: bool,
}

impl Member {
    pub fn new(
        id: impl Into<String>,
        function: FunctionModel,
        generator: Generator,
        sequence: LogConvexSequence,
        spacing: f64,
    ) -> crate::Result<Self> {
        let fit = function.fits_class(&sequence, spacing)?;
        Ok(Self {
            id: id.into(),
            function,
            generator,
            sequence,
            fit,
            builtin: true,
        })
    }

    /// Canonical description used in input digests.
    pub fn describe(&self) -> String {
        format!(
            "{}|{}|{}|J={}",
            self.id,
            serde_json::to_string(&self.function).expect("function serializes"),
            serde_json::to_string(&self.generator).expect("generator serializes"),
            self.sequence.last_index()
        )
    }
}

/// Every built-in candidate pair, certified or not, with sequences holding
/// `M_0..=M_len`.
pub fn builtin_candidates(len: usize, spacing: f64) -> crate::Result<Vec<Member>> {
    let mut out = Vec::new();
    for k in 1..=5u32 {
        let gen = Generator::constant_ratio(k as f64 * std::f64::consts::PI)?;
        let seq = from_generator(&gen, len + 1)?;
        out.push(Member::new(
            format!("sin-k{k}"),
            FunctionModel::sinusoid(k, 1.0)?,
            gen,
            seq,
            spacing,
        )?);
    }
    let factorial = Generator::analytic(1.0)?;
    let fseq = from_generator(&factorial, len + 1)?;
    let polys: [(&str, &[f64], f64); 7] = [
        ("x", &[0.0], 1.0),
        ("x^2/2", &[0.0, 0.0], 0.5),
        ("x^3/6", &[0.0, 0.0, 0.0], 1.0 / 6.0),
        ("x(1-x)", &[0.0, 1.0], -1.0),
        ("(x-0.5)^2", &[0.5, 0.5], 1.0),
        ("(x-0.25)(x-0.75)", &[0.25, 0.75], 1.0),
        ("(2/3)(x-0.2)(x-0.5)(x-0.8)", &[0.2, 0.5, 0.8], 2.0 / 3.0),
    ];
    for (id, roots, scale) in polys {
        let p = FunctionModel::Polynomial(Polynomial::from_roots(roots, scale)?);
        out.push(Member::new(
            id,
            p,
            factorial.clone(),
            fseq.clone(),
            spacing,
        )?);
    }
    out.push(series_member(len, spacing)?);
    Ok(out)
}

/// The non-extendable series, halved, in the class generated by the
/// regularized sequence `n! (log(n + e))^n` after taking its log-convex
/// minorant; the class stops at index `min(len, SERIES_CLASS_LEN)`.
fn series_member(len: usize, spacing: f64) -> crate::Result<Member> {
    let top = len.min(SERIES_CLASS_LEN);
    let raw: Vec<f64> = (0..=top).map(regularized_log_m).collect();
    let minorant = log_convex_minorant_log(&raw)?.minorant;
    let lm = minorant.log_values();
    let gen = Generator::tabulated((1..=top).map(|j| (lm[j] - lm[j - 1]).exp()).collect())?;
    let seq = from_generator(&gen, top + 1)?;
    let f = PowerSeries::nonextendable(DEFAULT_NONEXTENDABLE_C, DEFAULT_TRUNCATION)?
        .scaled(SERIES_SCALE)?;
    Member::new(
        "series-half",
        FunctionModel::PowerSeries(f),
        gen,
        seq,
        spacing,
    )
}

/// The certified built-in pairs at the default length and spacing.
pub fn builtin_suite() -> Vec<Member> {
    builtin_suite_with(config::DEFAULT_SEQUENCE_LENGTH, config::DEFAULT_SPACING)
        .expect("built-in pairs are well formed")
}

/// The certified built-in pairs at a given length and spacing.
pub fn builtin_suite_with(len: usize, spacing: f64) -> crate::Result<Vec<Member>> {
    Ok(builtin_candidates(len, spacing)?
        .into_iter()
        .filter(|m| m.fit.fits)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Record per-check wall time; this makes reports non-reproducible.
    pub timings: bool,
}

/// Result of evaluating one check.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Outcome {
    pub margin: f64,
    pub verdict: Verdict,
    pub note: String,
}

impl Outcome {
    pub fn new(margin: f64, verdict: Verdict, note: impl Into<String>) -> Self {
        // Normalizes -0.0 so reports never show a signed zero.
        let margin = if margin == 0.0 { 0.0 } else { margin };
        Self {
            margin,
            verdict,
            note: note.into(),
        }
    }

    /// Pass when `margin >= 0`, otherwise fail.
    pub fn at_least_zero(margin: f64, note: impl Into<String>) -> Self {
        let verdict = if margin >= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self::new(margin, verdict, note)
    }
}

/// Collects records for one run.
pub(crate) struct Runner<'a> {
    pub cfg: &'a ExperimentConfig,
    opts: RunOptions,
    records: Vec<Record>,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig, opts: RunOptions) -> Self {
        Self {
            cfg,
            opts,
            records: Vec::new(),
        }
    }

    /// Evaluates a grid-dependent check at the configured spacing, once more
    /// at a tenth of it if inconclusive.
    pub fn refined(
        &mut self,
        suite: Suite,
        id: String,
        inputs: &str,
        eval: impl Fn(f64) -> crate::Result<Outcome>,
    ) -> Result<(), HarnessError> {
        let start = Instant::now();
        let result = refine_once(self.cfg.spacing, &eval, |o: &Outcome| o.verdict);
        let outcome = match result {
            Ok((mut o, refined)) => {
                if refined {
                    let sep = if o.note.is_empty() { "" } else { "; " };
                    o.note = format!(
                        "{}{sep}refined to spacing {:e}",
                        o.note,
                        self.cfg.spacing / 10.0
                    );
                }
                o
            }
            Err(source) => {
                return Err(HarnessError::Check {
                    suite: suite.name().into(),
                    check_id: id,
                    source,
                })
            }
        };
        self.push(suite, id, inputs, outcome, start);
        Ok(())
    }

    /// Evaluates a check that does not depend on the grid.
    pub fn fixed(
        &mut self,
        suite: Suite,
        id: String,
        inputs: &str,
        eval: impl FnOnce() -> crate::Result<Outcome>,
    ) -> Result<(), HarnessError> {
        let start = Instant::now();
        match eval() {
            Ok(o) => {
                self.push(suite, id, inputs, o, start);
                Ok(())
            }
            Err(source) => Err(HarnessError::Check {
                suite: suite.name().into(),
                check_id: id,
                source,
            }),
        }
    }

    fn push(&mut self, suite: Suite, id: String, inputs: &str, o: Outcome, start: Instant) {
        let spacing = format!("spacing={:e}", self.cfg.spacing);
        let digest = report::digest(&[suite.name(), &id, inputs, &spacing]);
        self.records.push(Record {
            suite: suite.name().to_string(),
            check_id: id,
            inputs_digest: digest,
            margin: o.margin,
            verdict: o.verdict,
            note: o.note,
            wall_time_ms: self
                .opts
                .timings
                .then(|| start.elapsed().as_secs_f64() * 1e3),
        });
    }
}

/// Runs every selected suite.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<VerificationReport, HarnessError> {
    run_suite_with(cfg, RunOptions::default())
}

pub fn run_suite_with(
    cfg: &ExperimentConfig,
    opts: RunOptions,
) -> Result<VerificationReport, HarnessError> {
    cfg.validate()?;
    let mut selected = cfg.suites.clone();
    selected.sort();
    selected.dedup();
    let mut runner = Runner::new(cfg, opts);
    if !selected.is_empty() {
        let ctx = suites::Context::build(cfg)?;
        for suite in selected {
            suites::run(suite, &ctx, &mut runner)?;
        }
    }
    let env = report::Environment {
        seed: cfg.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        gamma_variant: cfg.gamma_variant.name().to_string(),
    };
    Ok(VerificationReport::new(runner.records, env))
}
