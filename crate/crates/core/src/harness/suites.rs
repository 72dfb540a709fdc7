//! The verification suites.

use std::collections::BTreeMap;
use std::f64::consts::E;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{ExperimentConfig, Suite};
use super::oracles::{brute_force_minorant, envelope_exponent};
use super::sampling::{random_log_sequence, random_polynomial, random_set};
use super::{builtin_suite_with, HarnessError, Member, Outcome, Runner};
use crate::bang::{
    bang_degree, bang_norm, differential_residual, flat_zero_envelope, fundamental_residual,
    log_norm, one_sided_norm, remainder_norm, verify_level_crossing, BangDegree, DegreeValue,
};
use crate::funcmodel::series::{
    domination_check, search_constant, DEFAULT_NONEXTENDABLE_C, DEFAULT_TRUNCATION,
};
use crate::funcmodel::{FunctionModel, Interval, IntervalSet, SupNorm};
use crate::remez::{
    chebyshev, classical_remez_check, decide, find_short_subinterval, lagrange_bound,
    markov_pointwise, omega, omega_analytic, shortness_excess, theorem_b_log_bound,
    verify_propagation, RemezCheck, Verdict,
};
use crate::sequences::{
    factorial_normalized, from_generator, gamma_sup, log_convex_minorant_log, GammaVariant,
    Generator, Tail,
};

/// Random polynomials per classical Remez and Markov run.
pub const REMEZ_POLYNOMIALS: usize = 200;
pub const MARKOV_POLYNOMIALS: usize = 200;
pub const REMEZ_MAX_DEGREE: usize = 10;
pub const MARKOV_MAX_DEGREE: usize = 8;
/// Random sequences compared against the brute-force hull.
pub const MINORANT_SEQUENCES: usize = 500;
pub const MINORANT_MAX_LEN: usize = 12;
/// Steps `h` of the pointwise grid checks, in units of the 0.01 grid.
const GRID_STEPS: [i64; 4] = [1, 2, 5, 10];
const GRID_N: usize = 100;
/// Largest `q` in the fundamental-inequality grid.
const MAX_Q: usize = 30;
/// Orders `n` of the remainder norms checked.
const REMAINDER_ORDERS: [usize; 3] = [1, 2, 3];
/// Values of `c` in the envelope suite.
const ENVELOPE_C: [f64; 4] = [0.05, 0.25, 0.5, 1.0];
/// Subintervals `I` of the degree-dependent Remez suite.
const THEOREM_B_INTERVALS: [(f64, f64); 2] = [(0.0, 1.0), (0.2, 0.7)];

pub(crate) struct Context {
    /// Certified members, built-in first.
    members: Vec<Member>,
    /// Configured extras that failed certification.
    rejected: Vec<Member>,
}

impl Context {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let wrap = |id: String, source| HarnessError::Check {
            suite: "membership".into(),
            check_id: id,
            source,
        };
        let mut members = builtin_suite_with(cfg.sequence_length, cfg.spacing)
            .map_err(|e| wrap("builtin".into(), e))?;
        let mut rejected = Vec::new();
        if !cfg.functions.is_empty() {
            let seq = from_generator(&cfg.generator, cfg.sequence_length + 1)
                .map_err(|e| wrap("extras".into(), e))?;
            for (i, f) in cfg.functions.iter().enumerate() {
                let id = format!("extra-{i}");
                let mut m = Member::new(
                    id.clone(),
                    f.clone(),
                    cfg.generator.clone(),
                    seq.clone(),
                    cfg.spacing,
                )
                .map_err(|e| wrap(id, e))?;
                m.builtin = false;
                if m.fit.fits {
                    members.push(m);
                } else {
                    rejected.push(m);
                }
            }
        }
        Ok(Self { members, rejected })
    }

    fn extras(&self) -> impl Iterator<Item = (&Member, bool)> {
        self.members
            .iter()
            .filter(|m| !m.builtin)
            .map(|m| (m, true))
            .chain(self.rejected.iter().map(|m| (m, false)))
    }
}

pub(crate) fn run(suite: Suite, ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    match suite {
        Suite::TheoremA => theorem_a(ctx, r),
        Suite::TheoremB => theorem_b(ctx, r),
        Suite::Lemma21 => lemma_2_1(ctx, r),
        Suite::Cor23 | Suite::Cor513 => level_crossing(suite, ctx, r),
        Suite::OneSided => one_sided(ctx, r),
        Suite::RemezClassical => remez_classical(r),
        Suite::Markov => markov(r),
        Suite::Minorant => minorant(r),
        Suite::Omega => omega_suite(ctx, r),
        Suite::Cor551 => propagation(ctx, r),
        Suite::Envelope => envelope(ctx, r),
        Suite::Nonextendable => nonextendable(r),
    }
}

fn rng_for(cfg: &ExperimentConfig, suite: Suite) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ suite.salt())
}

fn set_rng_for(cfg: &ExperimentConfig, suite: Suite) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.random_sets.seed.unwrap_or(cfg.seed) ^ suite.salt())
}

fn set_json(e: &IntervalSet) -> String {
    serde_json::to_string(e).expect("set serializes")
}

/// Sets `E ⊆ iv`: configured ones first (`cfg-i`), then random ones (`rand-i`).
fn sets_within(
    cfg: &ExperimentConfig,
    rng: &mut ChaCha8Rng,
    iv: Interval,
) -> Vec<(String, IntervalSet)> {
    let mut out: Vec<(String, IntervalSet)> = cfg
        .interval_sets
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_within(&iv))
        .map(|(i, e)| (format!("cfg-{i}"), e.clone()))
        .collect();
    let rs = &cfg.random_sets;
    for i in 0..rs.count {
        out.push((
            format!("rand-{i:03}"),
            random_set(rng, iv, rs.max_components, rs.min_measure),
        ));
    }
    out
}

/// Records the certification of each configured extra in `suite`.
fn membership(suite: Suite, ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    for (m, fits) in ctx.extras() {
        let fit = m.fit;
        let note = format!(
            "max log excess {:e} at order {}",
            fit.max_log_excess, fit.worst_order
        );
        let verdict = if fits { Verdict::Pass } else { Verdict::Fail };
        r.fixed(suite, format!("{}/membership", m.id), &m.describe(), || {
            Ok(Outcome::new(-fit.max_log_excess, verdict, note))
        })?;
    }
    Ok(())
}

/// `||f||_{[0,1]}` together with the Bang degrees at both ends of its
/// bracket: `low` uses the upper end of the norm (smaller degree), `high`
/// the estimate.
struct DegreeBracket {
    norm: SupNorm,
    low: BangDegree,
    high: BangDegree,
}

fn degree_bracket(m: &Member, spacing: f64) -> crate::Result<DegreeBracket> {
    let norm = m.function.sup_norm(&IntervalSet::unit(), spacing)?;
    let upper = norm.upper().min(1.0);
    let low = bang_degree(&m.sequence, upper)?;
    let high = bang_degree(&m.sequence, norm.estimate.min(1.0))?;
    Ok(DegreeBracket { norm, low, high })
}

fn degree_note(d: &BangDegree) -> String {
    match d.value {
        DegreeValue::Finite(n) => n.to_string(),
        DegreeValue::Unbounded => "unbounded".into(),
    }
}

/// Zero count on `[0,1]` against the Bang degree.
pub(crate) fn theorem_a_outcome(m: &Member, spacing: f64) -> crate::Result<Outcome> {
    let zeros = m.function.count_zeros(Interval::UNIT)?;
    let d = degree_bracket(m, spacing)?;
    let note = format!(
        "zeros={}{} n_f={} norm={:e}",
        zeros.count,
        if zeros.exact { "" } else { " (sign changes)" },
        degree_note(&d.low),
        d.norm.estimate
    );
    let count = zeros.count as u64;
    Ok(match (d.low.value, d.high.value) {
        (DegreeValue::Unbounded, _) => Outcome::new(f64::INFINITY, Verdict::Pass, note),
        (DegreeValue::Finite(n), high) => {
            let margin = n as f64 - count as f64;
            let above_high = matches!(high, DegreeValue::Finite(h) if count > h);
            if zeros.exact && count <= n {
                Outcome::new(margin, Verdict::Pass, note)
            } else if above_high {
                Outcome::new(margin, Verdict::Fail, note)
            } else {
                Outcome::new(margin, Verdict::Inconclusive, note)
            }
        }
    })
}

fn theorem_a(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    membership(Suite::TheoremA, ctx, r)?;
    for m in &ctx.members {
        r.refined(Suite::TheoremA, m.id.clone(), &m.describe(), |s| {
            theorem_a_outcome(m, s)
        })?;
    }
    Ok(())
}

fn worst(a: Verdict, b: Verdict) -> Verdict {
    match (a, b) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    }
}

fn remez_outcome(c: &RemezCheck, note: String) -> Outcome {
    Outcome::new(c.margin, c.verdict, note)
}

/// The degree-dependent bound for one `(f, I, E)`.
pub(crate) fn theorem_b_outcome(
    m: &Member,
    iv: Interval,
    e: &IntervalSet,
    variant: GammaVariant,
    spacing: f64,
) -> crate::Result<Outcome> {
    let d = degree_bracket(m, spacing)?;
    let n_f = match d.low.value {
        DegreeValue::Unbounded => {
            return Ok(Outcome::new(
                f64::INFINITY,
                Verdict::Pass,
                "n_f unbounded: the bound is infinite",
            ))
        }
        DegreeValue::Finite(0) => {
            return Ok(Outcome::new(
                f64::NAN,
                Verdict::Inconclusive,
                "n_f = 0: outside the scope of the bound",
            ))
        }
        DegreeValue::Finite(n) => n,
    };
    let log_bound = theorem_b_log_bound(
        &m.generator,
        DegreeValue::Finite(n_f),
        iv.len(),
        e.measure(),
        variant,
    )?;
    let lhs = m.function.sup_norm_on(0, &[iv], spacing)?;
    let rhs = m.function.sup_norm(e, spacing)?;
    let c = RemezCheck::new(log_bound, lhs, rhs, f64::NEG_INFINITY);
    Ok(remez_outcome(
        &c,
        format!(
            "n_f={n_f} ln_bound={log_bound:.6e} variant={}",
            variant.name()
        ),
    ))
}

/// Interpolation estimate with `n = 2 n_f - 1`.
fn lagrange_outcome(
    m: &Member,
    n_f: u64,
    iv: Interval,
    e: &IntervalSet,
    spacing: f64,
) -> crate::Result<Outcome> {
    let n = 2 * n_f as usize - 1;
    if n + 1 > m.sequence.last_index() {
        return Ok(Outcome::new(
            f64::NAN,
            Verdict::Inconclusive,
            format!("M_{} is not stored", n + 1),
        ));
    }
    let l = lagrange_bound(&m.function, &m.sequence, iv, e, n, spacing)?;
    Ok(remez_outcome(
        &l.check,
        format!("n={n} inverse_sum={:e}", l.inverse_sum),
    ))
}

/// Short-interval diagnostics for one `(f, I, E)`: the descent ends at a
/// short `I_1` whose density of `E` is no lower than that of `I` and whose
/// length is at least half the critical length; on `I_1` the remainder
/// `m_{2n} |I_1|^{2n}` is below `||f||_{I_1}/2`. When `I` itself is not
/// short, the bound applied to `E` is at least 1.
fn short_outcome(
    m: &Member,
    n_f: u64,
    iv: Interval,
    e: &IntervalSet,
    spacing: f64,
) -> crate::Result<Outcome> {
    let two_n = 2 * n_f as usize;
    if two_n > m.sequence.last_index() {
        return Ok(Outcome::new(
            f64::NAN,
            Verdict::Inconclusive,
            format!("M_{two_n} is not stored"),
        ));
    }
    let gamma2n = gamma_sup(&m.generator, two_n as f64)?;
    let found = find_short_subinterval(e, iv, &m.sequence, n_f, gamma2n)?;
    let i1 = found.interval;
    let mut parts: Vec<(&str, f64, Verdict)> = Vec::new();

    let short = -shortness_excess(&m.sequence, n_f, gamma2n, i1.len())?;
    parts.push((
        "short",
        short,
        if short >= 0.0 {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    ));

    let density = e.measure_within(&i1) / i1.len() - e.measure() / iv.len();
    let slack = 1e-12;
    parts.push((
        "density",
        density,
        if density >= -slack {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    ));

    let excess_at_unit = shortness_excess(&m.sequence, n_f, gamma2n, 1.0)?;
    let critical = (-excess_at_unit / two_n as f64).exp();
    let length = i1.len() - (critical / 2.0).min(iv.len());
    parts.push((
        "length",
        length,
        if length >= -slack * critical {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    ));

    let log_m = factorial_normalized(&m.sequence)[two_n];
    let log_rem = log_m + two_n as f64 * i1.len().ln();
    let norm = m
        .function
        .sup_norm_on(0, &[i1], spacing.min(i1.len() / 8.0))?;
    let (v, margin) = decide(
        (log_rem, log_rem),
        ((norm.estimate / 2.0).ln(), (norm.upper() / 2.0).ln()),
    );
    let v = if v == Verdict::Pass && margin == 0.0 {
        Verdict::Inconclusive
    } else {
        v
    };
    parts.push(("remainder", margin, v));

    if found.depth > 0 {
        let log_bound = theorem_b_log_bound(
            &m.generator,
            DegreeValue::Finite(n_f),
            iv.len(),
            e.measure(),
            GammaVariant::Degree,
        )?;
        let rhs = m.function.sup_norm(e, spacing)?;
        let (lo, hi) = (log_bound + rhs.estimate.ln(), log_bound + rhs.upper().ln());
        let v = if lo >= 0.0 {
            Verdict::Pass
        } else if hi < 0.0 {
            Verdict::Fail
        } else {
            Verdict::Inconclusive
        };
        parts.push(("non-short", lo, v));
    }

    let verdict = parts.iter().fold(Verdict::Pass, |acc, p| worst(acc, p.2));
    let margin = parts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let detail: Vec<String> = parts
        .iter()
        .map(|(n, m, v)| format!("{n}:{}({m:.3e})", v.as_str()))
        .collect();
    Ok(Outcome::new(
        margin,
        verdict,
        format!(
            "I_1=[{},{}] depth={} {}",
            i1.lo,
            i1.hi,
            found.depth,
            detail.join(" ")
        ),
    ))
}

fn theorem_b(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    membership(Suite::TheoremB, ctx, r)?;
    let mut rng = set_rng_for(cfg, Suite::TheoremB);
    let families: Vec<(Interval, Vec<(String, IntervalSet)>)> = THEOREM_B_INTERVALS
        .iter()
        .map(|&(a, b)| {
            let iv = Interval { lo: a, hi: b };
            (iv, sets_within(cfg, &mut rng, iv))
        })
        .collect();
    let variant = cfg.gamma_variant;
    for m in &ctx.members {
        let base = degree_bracket(m, cfg.spacing).map_err(|source| HarnessError::Check {
            suite: Suite::TheoremB.name().into(),
            check_id: m.id.clone(),
            source,
        })?;
        for (iv, sets) in &families {
            for (sid, e) in sets {
                let id = format!("{}/I=[{},{}]/{sid}", m.id, iv.lo, iv.hi);
                let inputs = format!("{}|{}|{}", m.describe(), set_json(e), variant.name());
                r.refined(Suite::TheoremB, id.clone(), &inputs, |s| {
                    theorem_b_outcome(m, *iv, e, variant, s)
                })?;
                if let DegreeValue::Finite(n_f) = base.low.value {
                    if n_f == 0 {
                        continue;
                    }
                    r.refined(Suite::TheoremB, format!("{id}/lagrange"), &inputs, |s| {
                        lagrange_outcome(m, n_f, *iv, e, s)
                    })?;
                    r.refined(Suite::TheoremB, format!("{id}/short"), &inputs, |s| {
                        short_outcome(m, n_f, *iv, e, s)
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// Bang-type norms of `m` on the grid `i/100`.
fn grid_values(norm: impl Fn(f64) -> crate::Result<f64>) -> crate::Result<Vec<f64>> {
    (0..=GRID_N)
        .map(|i| norm(i as f64 / GRID_N as f64))
        .collect()
}

/// `min` over the grid, all steps (signed if `both_signs`) and all `q` of
/// `max{v(x), e^{-(q + shift)}} e^{e|h|A(q + shift)} - v(x+h)`.
fn min_fundamental(
    m: &Member,
    values: &[f64],
    steps: &[i64],
    shift: usize,
) -> crate::Result<(f64, String)> {
    let max_q = MAX_Q.min(m.sequence.last_index().saturating_sub(shift));
    let mut best = (f64::INFINITY, String::new());
    for q in 1..=max_q {
        let a = m.sequence.growth(q + shift)?;
        for &s in steps {
            for i in 0..=GRID_N as i64 {
                let k = i + s;
                if !(0..=GRID_N as i64).contains(&k) {
                    continue;
                }
                let h = (k - i) as f64 / GRID_N as f64;
                let res = fundamental_residual(
                    values[i as usize],
                    values[k as usize],
                    (q + shift) as f64,
                    h,
                    a,
                );
                if res < best.0 {
                    best = (res, format!("x={} h={h} q={q}", i as f64 / GRID_N as f64));
                }
            }
        }
    }
    Ok(best)
}

fn lemma_2_1(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    let tol = r.cfg.tolerances.residual;
    membership(Suite::Lemma21, ctx, r)?;
    for m in &ctx.members {
        let wrap = |source| HarnessError::Check {
            suite: Suite::Lemma21.name().into(),
            check_id: m.id.clone(),
            source,
        };
        let b = grid_values(|x| bang_norm(&m.function, &m.sequence, x)).map_err(wrap)?;
        for step in GRID_STEPS {
            for sign in [1i64, -1] {
                let s = sign * step;
                let id = format!("{}/h={:+.2}", m.id, s as f64 / GRID_N as f64);
                r.fixed(Suite::Lemma21, id, &m.describe(), || {
                    let (res, at) = min_fundamental(m, &b, &[s], 0)?;
                    Ok(Outcome::at_least_zero(
                        res + tol,
                        format!("min residual {res:e} at {at}"),
                    ))
                })?;
            }
        }
        let signed: Vec<i64> = GRID_STEPS.iter().flat_map(|&s| [s, -s]).collect();
        for n in REMAINDER_ORDERS {
            if n + 1 > m.sequence.last_index() {
                continue;
            }
            let rn =
                grid_values(|x| remainder_norm(&m.function, &m.sequence, n, x)).map_err(wrap)?;
            r.fixed(
                Suite::Lemma21,
                format!("{}/remainder-n{n}", m.id),
                &m.describe(),
                || {
                    let (res, at) = min_fundamental(m, &rn, &signed, n)?;
                    Ok(Outcome::at_least_zero(
                        res + tol,
                        format!("min residual {res:e} at {at}"),
                    ))
                },
            )?;
        }
        r.fixed(
            Suite::Lemma21,
            format!("{}/differential", m.id),
            &m.describe(),
            || {
                let l: Vec<f64> = b
                    .iter()
                    .map(|&v| log_norm(v))
                    .collect::<crate::Result<_>>()?;
                let mut best = (f64::INFINITY, String::new());
                for &s in &signed {
                    for i in 0..=GRID_N as i64 {
                        let k = i + s;
                        if !(0..=GRID_N as i64).contains(&k) {
                            continue;
                        }
                        let h = s as f64 / GRID_N as f64;
                        if let Some(res) =
                            differential_residual(&m.generator, l[i as usize], l[k as usize], h)
                        {
                            if res < best.0 {
                                best = (res, format!("x={} h={h}", i as f64 / GRID_N as f64));
                            }
                        }
                    }
                }
                Ok(Outcome::at_least_zero(
                    best.0 + tol,
                    format!("min residual {:e} at {}", best.0, best.1),
                ))
            },
        )?;
    }
    Ok(())
}

fn level_crossing(suite: Suite, ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    membership(suite, ctx, r)?;
    let grid: Vec<f64> = (0..=GRID_N).map(|i| i as f64 / GRID_N as f64).collect();
    for m in &ctx.members {
        r.fixed(suite, m.id.clone(), &m.describe(), || {
            let lc = verify_level_crossing(&m.function, &m.generator, &m.sequence, &grid)?;
            let n = lc.n.map_or("inf".to_string(), |n| n.to_string());
            Ok(if suite == Suite::Cor23 {
                let margin = lc.sum_margin();
                let v = if margin > 0.0 {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                Outcome::new(margin, v, format!("L={} N={n} sum={:e}", lc.l, lc.sum))
            } else {
                match lc.integral_margin() {
                    Some(margin) => {
                        let v = if margin > 0.0 {
                            Verdict::Pass
                        } else {
                            Verdict::Fail
                        };
                        let note = format!(
                            "levels [{:.6}, {:.6}] integral={:e}",
                            lc.level_min,
                            lc.level_max,
                            lc.integral.unwrap_or(f64::NAN)
                        );
                        Outcome::new(margin, v, note)
                    }
                    None => Outcome::new(f64::NAN, Verdict::Inconclusive, "B vanishes on the grid"),
                }
            })
        })?;
    }
    Ok(())
}

/// All derivatives at 0 are non-negative up to the order that can be
/// checked: the degree for polynomials, `min(J, 20)` otherwise.
fn checked_orders(m: &Member) -> usize {
    match &m.function {
        FunctionModel::Polynomial(p) => p.degree().unwrap_or(0),
        _ => m.sequence.last_index().min(20),
    }
}

fn one_sided(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    let tol = cfg.tolerances.nonnegativity;
    let res_tol = cfg.tolerances.residual;
    membership(Suite::OneSided, ctx, r)?;
    for m in ctx
        .members
        .iter()
        .filter(|m| m.generator.is_quasianalytic())
    {
        let wrap = |source| HarnessError::Check {
            suite: Suite::OneSided.name().into(),
            check_id: m.id.clone(),
            source,
        };
        let b = grid_values(|x| one_sided_norm(&m.function, &m.sequence, x)).map_err(wrap)?;
        r.fixed(
            Suite::OneSided,
            format!("{}/residual", m.id),
            &m.describe(),
            || {
                let (res, at) = min_fundamental(m, &b, &GRID_STEPS, 0)?;
                Ok(Outcome::at_least_zero(
                    res + res_tol,
                    format!("min residual {res:e} at {at}"),
                ))
            },
        )?;
        let orders = checked_orders(m);
        if (0..=orders).all(|j| m.function.eval_derivative(j, 0.0) >= 0.0) {
            r.refined(
                Suite::OneSided,
                format!("{}/nonnegative", m.id),
                &m.describe(),
                |s| {
                    let mut low = (f64::INFINITY, 0usize);
                    for j in 0..=orders {
                        let n = (1.0 / s).round() as usize;
                        for i in 0..=n {
                            let v = m.function.eval_derivative(j, i as f64 / n as f64);
                            if v < low.0 {
                                low = (v, j);
                            }
                        }
                    }
                    Ok(Outcome::at_least_zero(
                        low.0 + tol,
                        format!("min of f^({}) on the grid {:e}", low.1, low.0),
                    ))
                },
            )?;
        }
    }
    Ok(())
}

fn remez_classical(r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    let mut rng = rng_for(cfg, Suite::RemezClassical);
    for i in 0..REMEZ_POLYNOMIALS {
        let p = random_polynomial(&mut rng, REMEZ_MAX_DEGREE);
        let e = random_set(
            &mut rng,
            Interval::UNIT,
            cfg.random_sets.max_components,
            cfg.random_sets.min_measure,
        );
        let inputs = format!("{:?}|{}", p.coeffs(), set_json(&e));
        r.refined(
            Suite::RemezClassical,
            format!("poly-{i:03}"),
            &inputs,
            |s| {
                let c = classical_remez_check(&p, Interval::UNIT, &e, s)?;
                Ok(remez_outcome(
                    &c,
                    format!("deg={} |E|={:.4}", p.degree().unwrap_or(0), e.measure()),
                ))
            },
        )?;
    }
    Ok(())
}

fn markov(r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    let tol = cfg.tolerances.equality;
    let mut rng = rng_for(cfg, Suite::Markov);
    for i in 0..MARKOV_POLYNOMIALS {
        let p = random_polynomial(&mut rng, MARKOV_MAX_DEGREE);
        let deg = p.degree().unwrap_or(0);
        r.refined(
            Suite::Markov,
            format!("poly-{i:03}"),
            &format!("{:?}", p.coeffs()),
            |s| {
                let mut verdict = Verdict::Pass;
                let mut margin = f64::INFINITY;
                for k in 0..=deg {
                    let c = markov_pointwise(&p, k, s)?;
                    verdict = worst(verdict, c.verdict);
                    margin = margin.min(c.residual);
                }
                Ok(Outcome::new(margin, verdict, format!("deg={deg}")))
            },
        )?;
    }
    for d in 1..=MARKOV_MAX_DEGREE {
        let t = chebyshev(d);
        let inputs = format!("{:?}", t.coeffs());
        r.refined(
            Suite::Markov,
            format!("chebyshev-T{d}/k={d}"),
            &inputs,
            |s| {
                let c = markov_pointwise(&t, d, s)?;
                Ok(Outcome::new(
                    c.residual,
                    c.verdict,
                    format!("|T^({d})(0)|={} bound={}", c.lhs, c.bound),
                ))
            },
        )?;
        let mut equality_orders = Vec::new();
        if d <= 2 {
            equality_orders.push(d);
        }
        if d % 2 == 1 && d > 1 {
            equality_orders.push(1);
        }
        for k in equality_orders {
            r.fixed(
                Suite::Markov,
                format!("chebyshev-T{d}/equality-k={k}"),
                &inputs,
                || {
                    let c = markov_pointwise(&t, k, cfg.spacing)?;
                    let rel = c.residual.abs() / c.bound;
                    Ok(Outcome::at_least_zero(
                        tol - rel,
                        format!("relative gap {rel:e}"),
                    ))
                },
            )?;
        }
    }
    Ok(())
}

fn minorant(r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    let tol = cfg.tolerances.minorant;
    let mut rng = rng_for(cfg, Suite::Minorant);
    for i in 0..MINORANT_SEQUENCES {
        let y = random_log_sequence(&mut rng, MINORANT_MAX_LEN);
        r.fixed(
            Suite::Minorant,
            format!("seq-{i:03}"),
            &format!("{y:?}"),
            || {
                let got = log_convex_minorant_log(&y)?;
                let (want, contact) = brute_force_minorant(&y, tol);
                let gap = got
                    .minorant
                    .log_values()
                    .iter()
                    .zip(&want)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let same_contact = got.contact_set == contact;
                let margin = tol - gap;
                let verdict = if margin >= 0.0 && same_contact {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                let note = if same_contact {
                    format!("len={} max gap {gap:e}", y.len())
                } else {
                    format!("contact sets differ: {:?} vs {contact:?}", got.contact_set)
                };
                Ok(Outcome::new(margin, verdict, note))
            },
        )?;
    }
    Ok(())
}

/// Distinct quasianalytic, non-tabulated generators of the members and the
/// configuration, keyed by their JSON form.
fn regular_generators(ctx: &Context, cfg: &ExperimentConfig) -> BTreeMap<String, Generator> {
    ctx.members
        .iter()
        .map(|m| &m.generator)
        .chain(std::iter::once(&cfg.generator))
        .filter(|g| g.is_quasianalytic() && g.table_len().is_none())
        .map(|g| {
            (
                serde_json::to_string(g).expect("generator serializes"),
                g.clone(),
            )
        })
        .collect()
}

/// `Ω` in closed form where one exists.
fn omega_closed_form(gen: &Generator, t: f64) -> Option<crate::Result<f64>> {
    match gen {
        Generator::Analytic { scale } => Some(omega_analytic(*scale, t)),
        Generator::ConstantRatio { a } => Some(Ok(t.powf(1.0 / (E * a)))),
        _ => None,
    }
}

fn omega_suite(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    let tol = cfg.tolerances.omega;
    let n = 1000;
    for (key, gen) in regular_generators(ctx, cfg) {
        r.fixed(Suite::Omega, format!("{key}/at-1"), &key, || {
            let w = omega(&gen, 1.0)?;
            let v = if w == 1.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(Outcome::new(-(w - 1.0).abs(), v, format!("omega(1)={w}")))
        })?;
        let values: Vec<f64> = (1..=n)
            .map(|i| omega(&gen, i as f64 / n as f64))
            .collect::<crate::Result<_>>()
            .map_err(|source| HarnessError::Check {
                suite: Suite::Omega.name().into(),
                check_id: key.clone(),
                source,
            })?;
        r.fixed(Suite::Omega, format!("{key}/increasing"), &key, || {
            let step = values
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            let v = if step > 0.0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(Outcome::new(
                step,
                v,
                format!("smallest increment {step:e} on a 1e-3 grid"),
            ))
        })?;
        if omega_closed_form(&gen, 1.0).is_some() {
            r.fixed(Suite::Omega, format!("{key}/closed-form"), &key, || {
                let mut gap: f64 = 0.0;
                for (i, w) in values.iter().enumerate() {
                    let t = (i + 1) as f64 / n as f64;
                    let exact = omega_closed_form(&gen, t).expect("closed form exists")?;
                    gap = gap.max((w - exact).abs());
                }
                Ok(Outcome::at_least_zero(
                    tol - gap,
                    format!("max deviation {gap:e}"),
                ))
            })?;
        }
    }
    Ok(())
}

fn propagation(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    let cfg = r.cfg;
    membership(Suite::Cor551, ctx, r)?;
    let mut rng = set_rng_for(cfg, Suite::Cor551);
    let sets = sets_within(cfg, &mut rng, Interval::UNIT);
    for m in ctx
        .members
        .iter()
        .filter(|m| m.generator.is_quasianalytic() && m.generator.table_len().is_none())
    {
        for (sid, e) in &sets {
            let inputs = format!("{}|{}", m.describe(), set_json(e));
            let id = format!("{}/{sid}", m.id);
            r.refined(Suite::Cor551, format!("{id}/omega"), &inputs, |s| {
                let p = verify_propagation(&m.function, &m.generator, e, s)?;
                let c = p.corollary;
                Ok(Outcome::new(
                    c.margin,
                    c.verdict,
                    format!("alpha={:.6e} Gamma={:.4}", p.alpha, p.gamma),
                ))
            })?;
            if matches!(m.generator, Generator::Analytic { .. }) {
                r.refined(Suite::Cor551, format!("{id}/closed-form"), &inputs, |s| {
                    let p = verify_propagation(&m.function, &m.generator, e, s)?;
                    let c = p.closed_form.expect("analytic generator");
                    Ok(Outcome::new(
                        c.margin,
                        c.verdict,
                        format!("lhs={:e} rhs={:e}", c.lhs, c.rhs),
                    ))
                })?;
            }
        }
    }
    Ok(())
}

fn envelope(ctx: &Context, r: &mut Runner) -> Result<(), HarnessError> {
    r.fixed(
        Suite::Envelope,
        "anchor-2^j".into(),
        "A(j)=2^j, J=40, e*c=1/4",
        || {
            let gen = Generator::tabulated((1..=40).map(|j| 2f64.powi(j)).collect())?;
            let rest = 2f64.powi(-40);
            let seq = from_generator(&gen, 41)?.with_tail(Tail::Convergent { remainder: rest });
            let got = flat_zero_envelope(&seq, 0.25 / E)?;
            let n = envelope_exponent(&seq, 0.25, rest).expect("finite tail");
            let want = (-(n as f64)).exp();
            let v = if got == want && n == 3 {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            Ok(Outcome::new(
                -(got - want).abs(),
                v,
                format!("envelope={got:e} n*={n}"),
            ))
        },
    )?;
    for m in &ctx.members {
        if m.sequence.tail() == Tail::Unspecified {
            continue;
        }
        for c in ENVELOPE_C {
            r.fixed(
                Suite::Envelope,
                format!("{}/c={c}", m.id),
                &m.describe(),
                || {
                    let got = flat_zero_envelope(&m.sequence, c)?;
                    let want = match m.sequence.tail() {
                        Tail::Divergent => Some(0.0),
                        Tail::Terminated => {
                            envelope_exponent(&m.sequence, E * c, 0.0).map(|n| (-(n as f64)).exp())
                        }
                        Tail::Convergent { remainder } => {
                            envelope_exponent(&m.sequence, E * c, remainder)
                                .map(|n| (-(n as f64)).exp())
                        }
                        Tail::Unspecified => None,
                    };
                    Ok(match want {
                        Some(w) => {
                            let v = if got == w {
                                Verdict::Pass
                            } else {
                                Verdict::Fail
                            };
                            Outcome::new(-(got - w).abs(), v, format!("envelope={got:e}"))
                        }
                        None => Outcome::new(f64::NAN, Verdict::Inconclusive, "no reference value"),
                    })
                },
            )?;
        }
    }
    Ok(())
}

fn nonextendable(r: &mut Runner) -> Result<(), HarnessError> {
    const N_MAX: usize = 20;
    let inputs = format!("K={DEFAULT_TRUNCATION} n<={N_MAX}");
    r.fixed(Suite::Nonextendable, "search".into(), &inputs, || {
        let found = search_constant(DEFAULT_TRUNCATION, N_MAX);
        let v = if found == Some(DEFAULT_NONEXTENDABLE_C) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Ok(Outcome::new(
            0.0,
            v,
            format!("smallest passing power of two: {found:?}"),
        ))
    })?;
    for row in domination_check(DEFAULT_NONEXTENDABLE_C, DEFAULT_TRUNCATION, N_MAX) {
        r.fixed(
            Suite::Nonextendable,
            format!("domination/n={:02}", row.n),
            &inputs,
            || {
                let margin = row.log_bound - row.log_sum;
                let v = if row.holds() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                };
                Ok(Outcome::new(
                    margin,
                    v,
                    format!("ln sum={:.6} ln bound={:.6}", row.log_sum, row.log_bound),
                ))
            },
        )?;
    }
    Ok(())
}
