//! Remez-type bounds: the classical polynomial inequality, the Lagrange
//! interpolation estimate, the degree-dependent bound for class members and
//! its short-interval machinery, the Markov special case, and the
//! propagation-of-smallness functions `Ω` and `α(E)`.
//!
//! Bounds are formed and compared in the log domain.

use std::f64::consts::E;

use serde::Serialize;

use crate::bang::DegreeValue;
use crate::error::{domain, Error, Result};
use crate::funcmodel::{
    series::log_add, FunctionModel, Interval, IntervalSet, Polynomial, SupNorm,
};
use crate::quadrature::integrate;
use crate::sequences::{
    big_gamma, factorial_normalized, gamma_sup, GammaVariant, Generator, LogConvexSequence,
};

/// Absolute tolerance of the quadrature inside [`omega`].
pub const OMEGA_QUADRATURE_TOL: f64 = 1e-10;
/// Maximum number of bisections in [`find_short_subinterval`].
const MAX_DYADIC_DEPTH: usize = 1100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Decides `lhs <= rhs` from brackets of the natural logs of both sides:
/// pass when even the largest left value is at most the smallest right
/// value, fail when the smallest left value exceeds the largest right value.
pub fn decide(log_lhs: (f64, f64), log_rhs: (f64, f64)) -> (Verdict, f64) {
    let margin = if log_rhs.0 == log_lhs.1 {
        0.0
    } else {
        log_rhs.0 - log_lhs.1
    };
    let verdict = if log_lhs.1 <= log_rhs.0 {
        Verdict::Pass
    } else if log_lhs.0 > log_rhs.1 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    (verdict, margin)
}

/// Both sides of an inequality `lhs <= rhs` with their error bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemezCheck {
    /// The multiplicative constant in front of the right-hand norm, and its log.
    pub bound: f64,
    pub log_bound: f64,
    pub lhs: f64,
    pub lhs_err: f64,
    pub rhs: f64,
    pub rhs_err: f64,
    /// `ln(rhs) - ln(lhs + lhs_err)`; nonnegative when the check passes.
    pub margin: f64,
    pub verdict: Verdict,
}

impl RemezCheck {
    /// `lhs_norm <= exp(log_bound) · rhs_norm + exp(log_extra)` with both
    /// norms taken as grid brackets.
    pub fn new(log_bound: f64, lhs_norm: SupNorm, rhs_norm: SupNorm, log_extra: f64) -> Self {
        let side = |v: f64| log_add(log_bound + v.ln(), log_extra);
        let rhs_lo = side(rhs_norm.estimate);
        let rhs_hi = side(rhs_norm.upper());
        let (verdict, margin) = decide(
            (lhs_norm.estimate.ln(), lhs_norm.upper().ln()),
            (rhs_lo, rhs_hi),
        );
        Self {
            bound: log_bound.exp(),
            log_bound,
            lhs: lhs_norm.estimate,
            lhs_err: lhs_norm.error_bound,
            rhs: rhs_lo.exp(),
            rhs_err: rhs_hi.exp() - rhs_lo.exp(),
            margin,
            verdict,
        }
    }
}

/// Runs `check` at `spacing` and, if inconclusive, once more at
/// `spacing / 10`.
pub fn refine_once<T>(
    spacing: f64,
    check: impl Fn(f64) -> Result<T>,
    verdict: impl Fn(&T) -> Verdict,
) -> Result<(T, bool)> {
    let first = check(spacing)?;
    if verdict(&first) == Verdict::Inconclusive {
        Ok((check(spacing / 10.0)?, true))
    } else {
        Ok((first, false))
    }
}

fn check_lengths(len_i: f64, len_e: f64) -> Result<()> {
    if !(len_e > 0.0) || !(len_i > 0.0) || !len_i.is_finite() {
        return Err(domain(format!(
            "lengths must be positive, got |I| = {len_i}, |E| = {len_e}"
        )));
    }
    if len_e > len_i * (1.0 + 1e-12) {
        return Err(domain(format!("|E| = {len_e} exceeds |I| = {len_i}")));
    }
    Ok(())
}

/// `ln (4|I|/|E|)^d`.
pub fn classical_remez_log_bound(d: usize, len_i: f64, len_e: f64) -> Result<f64> {
    check_lengths(len_i, len_e)?;
    Ok(if d == 0 {
        0.0
    } else {
        d as f64 * (4.0 * len_i / len_e).ln()
    })
}

/// `(4|I|/|E|)^d`.
pub fn classical_remez_bound(d: usize, len_i: f64, len_e: f64) -> Result<f64> {
    Ok(classical_remez_log_bound(d, len_i, len_e)?.exp())
}

/// Checks `||p||_I <= (4|I|/|E|)^deg ||p||_E` for a polynomial.
pub fn classical_remez_check(
    p: &Polynomial,
    iv: Interval,
    e: &IntervalSet,
    spacing: f64,
) -> Result<RemezCheck> {
    if !e.is_within(&iv) {
        return Err(domain("E must lie inside I"));
    }
    let d = p.degree().unwrap_or(0);
    let log_bound = classical_remez_log_bound(d, iv.len(), e.measure())?;
    let f = FunctionModel::Polynomial(p.clone());
    let lhs = f.sup_norm_on(0, &[iv], spacing)?;
    let rhs = f.sup_norm(e, spacing)?;
    Ok(RemezCheck::new(log_bound, lhs, rhs, f64::NEG_INFINITY))
}

/// `n + 1` points of the closure of `E`: the first is `min E` and each next
/// one is the smallest point carrying a further `|E|/n` of measure, so
/// consecutive gaps are at least `|E|/n`.
pub fn well_spaced_points(e: &IntervalSet, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(domain("need at least one gap"));
    }
    let step = e.measure() / n as f64;
    let parts = e.intervals();
    let mut points = Vec::with_capacity(n + 1);
    points.push(e.min());
    let mut comp = 0;
    let mut before = 0.0;
    for i in 1..n {
        let target = i as f64 * step;
        while comp + 1 < parts.len() && before + parts[comp].len() < target {
            before += parts[comp].len();
            comp += 1;
        }
        let c = parts[comp];
        points.push((c.lo + (target - before)).clamp(c.lo, c.hi));
    }
    points.push(e.max());
    Ok(points)
}

/// `Q(x) = Π (x - x_j)`.
pub fn node_polynomial(nodes: &[f64], x: f64) -> f64 {
    nodes.iter().map(|&t| x - t).product()
}

/// `Q'(x_j) = Π_{k != j} (x_j - x_k)`.
pub fn node_derivatives(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| xj - xk)
                .product()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangeCheck {
    pub check: RemezCheck,
    pub nodes: Vec<f64>,
    /// `Q'(x_j)` at each node.
    pub node_derivatives: Vec<f64>,
    /// `Σ 1/|Q'(x_j)|`, at most `(2e/|E|)^n`.
    pub inverse_sum: f64,
}

/// `||f||_I <= (2e|I|/|E|)^n ||f||_E + m_{n+1} |I|^{n+1}`.
pub fn lagrange_bound(
    f: &FunctionModel,
    seq: &LogConvexSequence,
    iv: Interval,
    e: &IntervalSet,
    n: usize,
    spacing: f64,
) -> Result<LagrangeCheck> {
    if !e.is_within(&iv) {
        return Err(domain("E must lie inside I"));
    }
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    if n + 1 > seq.last_index() {
        return Err(Error::OutOfRange {
            index: n + 1,
            available: seq.len(),
        });
    }
    let (len_i, len_e) = (iv.len(), e.measure());
    check_lengths(len_i, len_e)?;
    let log_m = factorial_normalized(seq)[n + 1];
    let log_bound = n as f64 * (2.0 * E * len_i / len_e).ln();
    let log_extra = log_m + (n + 1) as f64 * len_i.ln();
    let lhs = f.sup_norm_on(0, &[iv], spacing)?;
    let rhs = f.sup_norm(e, spacing)?;
    let nodes = well_spaced_points(e, n)?;
    let node_derivatives = node_derivatives(&nodes);
    let inverse_sum = node_derivatives.iter().map(|d| 1.0 / d.abs()).sum();
    Ok(LagrangeCheck {
        check: RemezCheck::new(log_bound, lhs, rhs, log_extra),
        nodes,
        node_derivatives,
        inverse_sum,
    })
}

/// `γ` entering `Γ` for the chosen variant: `γ(2 n_f)` for
/// [`GammaVariant::Degree`], the global supremum for
/// [`GammaVariant::Propagation`].
pub fn variant_gamma(gen: &Generator, n_f: u64, variant: GammaVariant) -> Result<f64> {
    match variant {
        GammaVariant::Degree => gamma_sup(gen, (2 * n_f).max(1) as f64),
        GammaVariant::Propagation => gamma_sup(gen, f64::INFINITY),
    }
}

/// `ln (Γ |I|/|E|)^{2 n_f}`.
///
/// `n_f = 0` is rejected: the inequality would then claim
/// `||f||_I <= ||f||_E`, which fails for, e.g., `1 - x/4` on `E = [0.5, 1]`.
pub fn theorem_b_log_bound(
    gen: &Generator,
    n_f: DegreeValue,
    len_i: f64,
    len_e: f64,
    variant: GammaVariant,
) -> Result<f64> {
    let n_f = match n_f {
        DegreeValue::Finite(0) => {
            return Err(domain("the bound needs a Bang degree of at least 1"))
        }
        DegreeValue::Finite(n) => n,
        DegreeValue::Unbounded => return Err(Error::UnboundedDegree),
    };
    check_lengths(len_i, len_e)?;
    let gamma = big_gamma(variant_gamma(gen, n_f, variant)?, variant)?;
    Ok(2.0 * n_f as f64 * (gamma.ln() + (len_i / len_e).ln()))
}

pub fn theorem_b_bound(
    gen: &Generator,
    n_f: DegreeValue,
    len_i: f64,
    len_e: f64,
    variant: GammaVariant,
) -> Result<f64> {
    Ok(theorem_b_log_bound(gen, n_f, len_i, len_e, variant)?.exp())
}

/// `ln m_{2n} + 2n ln|I| + 2n(3 + γ)`; the interval is short when this is
/// at most zero.
pub fn shortness_excess(
    seq: &LogConvexSequence,
    n_f: u64,
    gamma2n: f64,
    len_i: f64,
) -> Result<f64> {
    let two_n = 2 * n_f as usize;
    if n_f == 0 {
        return Err(domain("n_f must be positive"));
    }
    if two_n > seq.last_index() {
        return Err(Error::OutOfRange {
            index: two_n,
            available: seq.len(),
        });
    }
    if !(len_i > 0.0) {
        return Err(domain("interval length must be positive"));
    }
    let log_m = factorial_normalized(seq)[two_n];
    let k = two_n as f64;
    Ok(log_m + k * len_i.ln() + k * (3.0 + gamma2n))
}

/// `m_{2n} |I|^{2n} <= e^{-2n(3 + γ)}`.
pub fn is_short_interval(
    seq: &LogConvexSequence,
    n_f: u64,
    gamma2n: f64,
    len_i: f64,
) -> Result<bool> {
    Ok(shortness_excess(seq, n_f, gamma2n, len_i)? <= 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShortSubinterval {
    pub interval: Interval,
    pub depth: usize,
}

/// Dyadic descent from `I` into the half with the larger share of `E`
/// (ties go left), stopping at the first short interval.
pub fn find_short_subinterval(
    e: &IntervalSet,
    iv: Interval,
    seq: &LogConvexSequence,
    n_f: u64,
    gamma2n: f64,
) -> Result<ShortSubinterval> {
    if !e.is_within(&iv) {
        return Err(domain("E must lie inside I"));
    }
    let mut cur = iv;
    for depth in 0..=MAX_DYADIC_DEPTH {
        if is_short_interval(seq, n_f, gamma2n, cur.len())? {
            return Ok(ShortSubinterval {
                interval: cur,
                depth,
            });
        }
        let (left, right) = cur.halves();
        cur = if e.measure_within(&right) > e.measure_within(&left) {
            right
        } else {
            left
        };
    }
    Err(domain("dyadic descent did not reach a short interval"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovCheck {
    pub degree: usize,
    pub k: usize,
    /// `|S^{(k)}(0)|`.
    pub lhs: f64,
    /// `deg^k ||S||_{[-1,1]}` from the grid estimate.
    pub bound: f64,
    /// `bound - lhs`.
    pub residual: f64,
    /// `deg^k` times the sup-norm error bound.
    pub error_band: f64,
    pub verdict: Verdict,
}

/// `|S^{(k)}(0)| <= (deg S)^k ||S||_{[-1,1]}`.
pub fn markov_pointwise(s: &Polynomial, k: usize, spacing: f64) -> Result<MarkovCheck> {
    let degree = s.degree().unwrap_or(0);
    let f = FunctionModel::Polynomial(s.clone());
    let norm = f.sup_norm_on(0, &[Interval { lo: -1.0, hi: 1.0 }], spacing)?;
    let factor = (degree as f64).powi(k as i32);
    let lhs = s.derivative_value(k, 0.0).abs();
    let bound = factor * norm.estimate;
    let error_band = factor * norm.error_bound;
    let residual = bound - lhs;
    let verdict = if residual >= 0.0 {
        Verdict::Pass
    } else if residual + error_band < 0.0 {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    Ok(MarkovCheck {
        degree,
        k,
        lhs,
        bound,
        residual,
        error_band,
        verdict,
    })
}

/// Chebyshev polynomial `T_d` in the monomial basis.
pub fn chebyshev(d: usize) -> Polynomial {
    let mut prev = vec![1.0];
    let mut cur = vec![0.0, 1.0];
    if d == 0 {
        return Polynomial::new(prev).expect("finite");
    }
    for _ in 1..d {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    Polynomial::new(cur).expect("finite")
}

/// `Ω(t) = exp(-(1/e) ∫_1^{log(e/t)} ds/A(s))`; exactly 1 at `t = 1`.
pub fn omega(gen: &Generator, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(format!("t must lie in (0, 1], got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let upper = 1.0 - t.ln();
    let q = integrate(|s| 1.0 / gen.value(s), 1.0, upper, OMEGA_QUADRATURE_TOL)?;
    Ok((-q.value / E).exp())
}

/// `Ω` for `A(s) = C s`: `(log(e/t))^{-1/(eC)}`.
pub fn omega_analytic(scale: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain(format!("t must lie in (0, 1], got {t}")));
    }
    Ok((1.0 - t.ln()).powf(-1.0 / (E * scale)))
}

/// `α(E) = (1/3) / log(Γ/|E|)`.
pub fn alpha_smallness(len_e: f64, gamma: f64) -> Result<f64> {
    if !(len_e > 0.0) || !(gamma > len_e) {
        return Err(domain(format!(
            "need 0 < |E| < Γ, got |E| = {len_e}, Γ = {gamma}"
        )));
    }
    Ok(1.0 / (3.0 * (gamma / len_e).ln()))
}

/// `ln Ω(t)` extended by `Ω(0) = 0`.
fn log_omega(gen: &Generator, t: f64) -> Result<f64> {
    if t == 0.0 {
        Ok(f64::NEG_INFINITY)
    } else {
        Ok(omega(gen, t.min(1.0))?.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationCheck {
    pub alpha: f64,
    pub gamma: f64,
    /// `Ω(||f||_{[0,1]}) <= e Ω(||f||_E^α)`, with `ln Ω` values in `lhs`/`rhs`.
    pub corollary: Side,
    /// `||f||_{[0,1]} <= e ε^{α e^{-eC}}` for `A(s) = C s`, with `ε` the upper
    /// end of the measured `||f||_E`.
    pub closed_form: Option<Side>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Side {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub verdict: Verdict,
}

/// Evaluates the propagation-of-smallness inequality on `E`, and its closed
/// form for analytic generators. Norms above 1 (possible only through the
/// error band) are clamped to the class bound `M_0 = 1`.
pub fn verify_propagation(
    f: &FunctionModel,
    gen: &Generator,
    e: &IntervalSet,
    spacing: f64,
) -> Result<PropagationCheck> {
    let gamma = big_gamma(gamma_sup(gen, f64::INFINITY)?, GammaVariant::Propagation)?;
    let alpha = alpha_smallness(e.measure(), gamma)?;
    let whole = f.sup_norm(&IntervalSet::unit(), spacing)?;
    let on_e = f.sup_norm(e, spacing)?;
    let lhs = (
        log_omega(gen, whole.estimate.min(1.0))?,
        log_omega(gen, whole.upper().min(1.0))?,
    );
    let rhs = (
        1.0 + log_omega(gen, on_e.estimate.min(1.0).powf(alpha))?,
        1.0 + log_omega(gen, on_e.upper().min(1.0).powf(alpha))?,
    );
    let (verdict, margin) = decide(lhs, rhs);
    let corollary = Side {
        lhs: lhs.1,
        rhs: rhs.0,
        margin,
        verdict,
    };
    let closed_form = match gen {
        Generator::Analytic { scale } => {
            let eps = on_e.upper().min(1.0);
            let log_rhs = 1.0 + alpha * (-E * scale).exp() * eps.ln();
            let log_lhs = (whole.estimate.ln(), whole.upper().ln());
            let (verdict, margin) = decide(log_lhs, (log_rhs, log_rhs));
            Some(Side {
                lhs: whole.upper(),
                rhs: log_rhs.exp(),
                margin,
                verdict,
            })
        }
        _ => None,
    };
    Ok(PropagationCheck {
        alpha,
        gamma,
        corollary,
        closed_form,
    })
}
