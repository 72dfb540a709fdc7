//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the report is always printed;
//! the process exits with status 1 if any criterion fails.

use std::f64::consts::{E, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qbang::bang::{bang_degree, flat_zero_envelope, DegreeValue};
use qbang::funcmodel::series::{domination_check, search_constant};
use qbang::funcmodel::{FunctionModel, Interval, IntervalSet, DEFAULT_TRUNCATION};
use qbang::harness::oracles::factorial_degree;
use qbang::harness::{load_config, run_suite, ExperimentConfig, Suite, VerificationReport};
use qbang::remez::{omega, omega_analytic, Verdict};
use qbang::sequences::{from_generator, GammaVariant, Generator, Tail};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn run(suites: &[Suite]) -> Result<VerificationReport, String> {
    let cfg = ExperimentConfig {
        suites: suites.to_vec(),
        ..Default::default()
    };
    run_suite(&cfg).map_err(e)
}

fn no_failures(report: &VerificationReport, suite: Suite) -> Result<(), String> {
    let bad: Vec<_> = report
        .records_of(suite.name())
        .filter(|r| r.verdict == Verdict::Fail)
        .map(|r| &r.check_id)
        .collect();
    ensure(bad.is_empty(), || {
        format!(
            "{}: {} failed, first {:?}",
            suite.name(),
            bad.len(),
            bad.first()
        )
    })
}

fn count(report: &VerificationReport, suite: Suite, verdict: Verdict) -> usize {
    report
        .records_of(suite.name())
        .filter(|r| r.verdict == verdict)
        .count()
}

fn bang_degree_anchors() -> Check {
    let seq = from_generator(&Generator::analytic(1.0).map_err(e)?, 201).map_err(e)?;
    let mut got = Vec::new();
    for (k, norm) in [(0, 1.0), (2, (-2.0f64).exp())] {
        let d = bang_degree(&seq, norm).map_err(e)?;
        let want = factorial_degree(k);
        ensure(d.value == DegreeValue::Finite(want), || {
            format!("||f||=e^-{k}: got {:?}, oracle {want}", d.value)
        })?;
        got.push(want);
    }
    ensure(got == [8, 37], || format!("oracle gave {got:?}"))?;
    Ok("n_f = 8 at ||f|| = 1, 37 at ||f|| = e^-2".into())
}

fn theorem_a_sinusoids() -> Check {
    let unit = IntervalSet::unit();
    let mut worst = u64::MAX;
    for k in 1..=20u32 {
        let a = k as f64 * PI;
        let seq = from_generator(&Generator::constant_ratio(a).map_err(e)?, 200).map_err(e)?;
        let f = FunctionModel::sinusoid(k, 1.0).map_err(e)?;
        let fit = f.fits_class(&seq, 1e-3).map_err(e)?;
        ensure(fit.fits, || format!("k={k}: sinusoid not in its class"))?;
        let zeros = f.count_zeros(Interval::UNIT).map_err(e)?;
        let norm = f.sup_norm(&unit, 1e-3).map_err(e)?;
        let d = bang_degree(&seq, norm.upper().min(1.0)).map_err(e)?;
        let want = (a * E).floor() as u64;
        let n_f = match d.value {
            DegreeValue::Finite(n) => n,
            DegreeValue::Unbounded => return Err(format!("k={k}: unbounded degree")),
        };
        ensure(n_f == want, || {
            format!("k={k}: n_f={n_f}, closed form {want}")
        })?;
        ensure(zeros.exact && zeros.count == k as usize + 1, || {
            format!("k={k}: zeros {zeros:?}")
        })?;
        ensure(zeros.count as u64 <= n_f, || {
            format!("k={k}: {} zeros > n_f={n_f}", zeros.count)
        })?;
        worst = worst.min(n_f - zeros.count as u64);
    }
    Ok(format!("k = 1..20, smallest slack n_f - zeros = {worst}"))
}

fn lemma_grid() -> Check {
    let r = run(&[Suite::Lemma21])?;
    no_failures(&r, Suite::Lemma21)?;
    let grid: Vec<_> = r
        .records_of(Suite::Lemma21.name())
        .filter(|r| r.check_id.contains("/h="))
        .collect();
    ensure(grid.len() == 13 * 8, || {
        format!("expected 104 grid records, got {}", grid.len())
    })?;
    let min = grid.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    ensure(min >= 0.0, || format!("residual below -1e-9 by {min:e}"))?;
    Ok(format!(
        "{} records, smallest residual + 1e-9 = {min:e}",
        r.records_of(Suite::Lemma21.name()).count()
    ))
}

fn theorem_b_both_variants() -> Check {
    let mut parts = Vec::new();
    for variant in [GammaVariant::Degree, GammaVariant::Propagation] {
        let cfg = ExperimentConfig {
            suites: vec![Suite::TheoremB],
            gamma_variant: variant,
            ..Default::default()
        };
        let r = run_suite(&cfg).map_err(e)?;
        no_failures(&r, Suite::TheoremB)?;
        let total = r.records_of(Suite::TheoremB.name()).count();
        let inc = count(&r, Suite::TheoremB, Verdict::Inconclusive);
        ensure(total > 0 && (inc as f64) < 0.05 * total as f64, || {
            format!("{}: {inc}/{total} inconclusive", variant.name())
        })?;
        parts.push(format!(
            "{}: {total} records, {inc} inconclusive",
            variant.name()
        ));
    }
    Ok(parts.join("; "))
}

fn minorant_oracle() -> Check {
    let r = run(&[Suite::Minorant])?;
    no_failures(&r, Suite::Minorant)?;
    let pass = count(&r, Suite::Minorant, Verdict::Pass);
    ensure(pass == 500, || format!("{pass} of 500 sequences matched"))?;
    Ok("500 of 500 sequences match the brute-force hull".into())
}

fn remez_and_markov() -> Check {
    let r = run(&[Suite::RemezClassical, Suite::Markov])?;
    no_failures(&r, Suite::RemezClassical)?;
    no_failures(&r, Suite::Markov)?;
    let remez = r
        .records_of(Suite::RemezClassical.name())
        .filter(|r| r.check_id.starts_with("poly-"))
        .count();
    let markov = r
        .records_of(Suite::Markov.name())
        .filter(|r| r.check_id.starts_with("poly-"))
        .count();
    ensure(remez == 200 && markov == 200, || {
        format!("{remez} Remez and {markov} Markov polynomials")
    })?;
    let eq: Vec<_> = r
        .records_of(Suite::Markov.name())
        .filter(|r| r.check_id.contains("/equality-"))
        .collect();
    ensure(
        !eq.is_empty() && eq.iter().all(|r| r.verdict == Verdict::Pass),
        || "Chebyshev equality not reproduced".into(),
    )?;
    Ok(format!(
        "200 + 200 polynomials, {} Chebyshev equality cases",
        eq.len()
    ))
}

fn omega_and_propagation() -> Check {
    let analytic = Generator::analytic(1.0).map_err(e)?;
    ensure(omega(&analytic, 1.0).map_err(e)? == 1.0, || {
        "Omega(1) != 1".into()
    })?;
    let mut worst = 0.0f64;
    for i in 1..=1000 {
        let t = i as f64 * 1e-3;
        let q = omega(&analytic, t).map_err(e)?;
        let c = omega_analytic(1.0, t).map_err(e)?;
        worst = worst.max((q - c).abs());
    }
    ensure(worst <= 1e-9, || format!("closed form off by {worst:e}"))?;
    let r = run(&[Suite::Omega, Suite::Cor551])?;
    no_failures(&r, Suite::Omega)?;
    no_failures(&r, Suite::Cor551)?;
    let closed = r
        .records_of(Suite::Cor551.name())
        .filter(|r| r.check_id.ends_with("/closed-form"))
        .count();
    ensure(closed > 0, || "no closed-form propagation records".into())?;
    let pass = count(&r, Suite::Cor551, Verdict::Pass);
    Ok(format!(
        "closed form within {worst:e}; {pass} propagation checks pass, {closed} closed-form"
    ))
}

fn envelope_anchor() -> Check {
    let gen = Generator::tabulated((1..=40).map(|j| 2f64.powi(j)).collect()).map_err(e)?;
    let seq = from_generator(&gen, 41)
        .map_err(e)?
        .with_tail(Tail::Convergent {
            remainder: 2f64.powi(-40),
        });
    let got = flat_zero_envelope(&seq, 0.25 / E).map_err(e)?;
    ensure(got == (-3.0f64).exp(), || {
        format!("envelope {got:e}, want e^-3")
    })?;
    let quasi = from_generator(&Generator::analytic(1.0).map_err(e)?, 41).map_err(e)?;
    let zero = flat_zero_envelope(&quasi, 0.5).map_err(e)?;
    ensure(zero == 0.0, || format!("quasianalytic envelope {zero:e}"))?;
    Ok("e^-3 for ratios 2^-j, 0 for the factorial class".into())
}

fn nonextendable_construction() -> Check {
    let c = search_constant(DEFAULT_TRUNCATION, 20).ok_or("no power of two passes")?;
    ensure(c == 2.0, || format!("searched constant {c}"))?;
    let rows = domination_check(c, DEFAULT_TRUNCATION, 20);
    ensure(rows.len() == 21, || {
        format!("{} orders checked", rows.len())
    })?;
    let bad: Vec<_> = rows.iter().filter(|r| !r.holds()).map(|r| r.n).collect();
    ensure(bad.is_empty(), || {
        format!("domination fails at n = {bad:?}")
    })?;
    let slack = rows
        .iter()
        .map(|r| r.log_bound - r.log_sum)
        .fold(f64::INFINITY, f64::min);
    Ok(format!("C = {c}, n = 0..20, smallest log slack {slack:.4}"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn qb(args: &[&str]) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qb"))
        .args(args)
        .env_remove("QB_SEED")
        .output()
        .map_err(e)?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn determinism_and_cli() -> Check {
    let pass = configs().join("pass.json");
    let cfg = load_config(&pass).map_err(e)?;
    let a = run_suite(&cfg).map_err(e)?.to_json();
    let b = run_suite(&cfg).map_err(e)?.to_json();
    ensure(a == b, || "library reports differ".into())?;
    let path = pass.to_str().ok_or("non-UTF-8 path")?;
    let (c1, o1) = qb(&["verify", "--config", path])?;
    let (_, o2) = qb(&["verify", "--config", path])?;
    ensure(o1 == o2, || "CLI reports differ".into())?;
    ensure(o1 == a.as_bytes(), || {
        "CLI and library reports differ".into()
    })?;
    let mut codes = vec![c1];
    for (name, want) in [
        ("nonmember.json", 1),
        ("unknown-suite.json", 2),
        ("short-sequence.json", 3),
    ] {
        let p = configs().join(name);
        let (code, _) = qb(&["verify", "--config", p.to_str().ok_or("non-UTF-8 path")?])?;
        ensure(code == want, || format!("{name}: exit {code}, want {want}"))?;
        codes.push(code);
    }
    ensure(codes == [0, 1, 2, 3], || format!("exit codes {codes:?}"))?;
    Ok("byte-identical reports; exit codes 0/1/2/3".into())
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    check: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            name: "bang degree anchors",
            limit: Duration::from_millis(1),
            check: bang_degree_anchors,
        },
        Criterion {
            name: "theorem-a sinusoids",
            limit: Duration::from_secs(1),
            check: theorem_a_sinusoids,
        },
        Criterion {
            name: "lemma-2-1 grid",
            limit: Duration::from_secs(60),
            check: lemma_grid,
        },
        Criterion {
            name: "theorem-b",
            limit: Duration::from_secs(120),
            check: theorem_b_both_variants,
        },
        Criterion {
            name: "minorant oracle",
            limit: Duration::from_secs(5),
            check: minorant_oracle,
        },
        Criterion {
            name: "remez-classical and markov",
            limit: Duration::from_secs(30),
            check: remez_and_markov,
        },
        Criterion {
            name: "omega and propagation",
            limit: Duration::from_secs(30),
            check: omega_and_propagation,
        },
        Criterion {
            name: "flat-zero envelope",
            limit: Duration::from_millis(1),
            check: envelope_anchor,
        },
        Criterion {
            name: "non-extendable series",
            limit: Duration::from_secs(5),
            check: nonextendable_construction,
        },
        Criterion {
            name: "determinism and CLI",
            limit: Duration::from_secs(5),
            check: determinism_and_cli,
        },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = (c.check)();
        let took = start.elapsed();
        let result = result.and_then(|msg| {
            if took <= c.limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {took:.2?}, limit {:?}", c.limit))
            }
        });
        match result {
            Ok(msg) => println!(
                "criterion {:>2} PASS {:<28} {took:>10.2?}  {msg}",
                i + 1,
                c.name
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL {:<28} {took:>10.2?}  {msg}",
                    i + 1,
                    c.name
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
