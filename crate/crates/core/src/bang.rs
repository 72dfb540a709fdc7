//! Bang norms, remainder norms, the Bang degree, and residual checks for the
//! fundamental inequality and its corollaries.
//!
//! Everything is computed in the log domain: a term `|f^{(j)}(x)| / (e^j M_j)`
//! is handled as `ln|f^{(j)}(x)| - j - ln M_j`.

use std::f64::consts::E;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::funcmodel::FunctionModel;
use crate::quadrature::integrate;
use crate::sequences::{log_convex_minorant, Generator, LogConvexSequence, Tail};

/// Relative distance below which `log(1/t)` is treated as an integer.
pub const INTEGER_SNAP_TOL: f64 = 1e-12;
/// Absolute tolerance of the quadrature in [`verify_level_crossing`].
pub const LEVEL_QUADRATURE_TOL: f64 = 1e-9;
/// Maximum grid step accepted by [`verify_level_crossing`].
pub const LEVEL_GRID_MAX_STEP: f64 = 1e-2;

/// How far the maximum over `j` is scanned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// Stop once `e^{-j}` drops below the running maximum. Valid when `f`
    /// belongs to the class, since then every term of order `j` is at most
    /// `e^{-j}`.
    #[default]
    Class,
    /// Scan every stored order.
    Exhaustive,
}

fn check_point(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(domain(format!("x = {x} is outside [0, 1]")))
    }
}

/// `ln max_{n <= j <= J} term(j)`, with the class truncation rule.
fn log_max_terms(
    f: &FunctionModel,
    seq: &LogConvexSequence,
    from: usize,
    truncation: Truncation,
    term: impl Fn(usize) -> f64,
) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (j, &log_m) in seq.log_values().iter().enumerate().skip(from) {
        if truncation == Truncation::Class && -(j as f64) < best {
            break;
        }
        if let FunctionModel::Polynomial(p) = f {
            if p.degree().is_none_or(|d| j > d) {
                break;
            }
        }
        let t = term(j) - j as f64 - log_m;
        if t > best {
            best = t;
        }
    }
    best
}

/// `B_f(x) = max_j |f^{(j)}(x)| / (e^j M_j)`.
pub fn bang_norm(f: &FunctionModel, seq: &LogConvexSequence, x: f64) -> Result<f64> {
    bang_norm_with(f, seq, x, Truncation::Class)
}

pub fn bang_norm_with(
    f: &FunctionModel,
    seq: &LogConvexSequence,
    x: f64,
    truncation: Truncation,
) -> Result<f64> {
    Ok(log_bang_norm(f, seq, 0, x, truncation)?.exp())
}

/// `ln b_{f,n}(x)`; `-inf` when every term vanishes.
pub fn log_bang_norm(
    f: &FunctionModel,
    seq: &LogConvexSequence,
    n: usize,
    x: f64,
    truncation: Truncation,
) -> Result<f64> {
    check_point(x)?;
    if n > seq.last_index() {
        return Err(Error::OutOfRange {
            index: n,
            available: seq.len(),
        });
    }
    Ok(log_max_terms(f, seq, n, truncation, |j| {
        f.log_abs_derivative(j, x)
    }))
}

/// The remainder norm `b_{f,n}(x) = max_{j >= n} |f^{(j)}(x)| / (e^j M_j)`.
pub fn remainder_norm(f: &FunctionModel, seq: &LogConvexSequence, n: usize, x: f64) -> Result<f64> {
    Ok(log_bang_norm(f, seq, n, x, Truncation::Class)?.exp())
}

/// `L = log(1/B)`, with `+inf` for `B = 0`.
pub fn log_norm(b: f64) -> Result<f64> {
    if !(b >= 0.0) {
        return Err(domain(format!("norm must be nonnegative, got {b}")));
    }
    Ok(if b == 0.0 { f64::INFINITY } else { -b.ln() })
}

/// `B^-_f(x) = max_j max{-f^{(j)}(x), 0} / (e^j M_j)`.
pub fn one_sided_norm(f: &FunctionModel, seq: &LogConvexSequence, x: f64) -> Result<f64> {
    check_point(x)?;
    let log_b = log_max_terms(f, seq, 0, Truncation::Class, |j| {
        let v = f.eval_derivative(j, x);
        if v < 0.0 {
            f.log_abs_derivative(j, x)
        } else {
            f64::NEG_INFINITY
        }
    });
    Ok(log_b.exp())
}

/// Finite value or the formal `+inf` of the Bang degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeValue {
    Finite(u64),
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BangDegree {
    pub value: DegreeValue,
    /// `K_f = ⌊log(1/||f||)⌋`.
    pub threshold: u64,
    /// The sum of `M_{j-1}/M_j` over `K < j <= N`.
    pub partial_sum: f64,
}

impl BangDegree {
    pub fn finite(&self) -> Option<u64> {
        match self.value {
            DegreeValue::Finite(n) => Some(n),
            DegreeValue::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.value == DegreeValue::Unbounded
    }
}

impl Serialize for BangDegree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            value: Option<u64>,
            #[serde(rename = "K_f")]
            k_f: u64,
            partial_sum: f64,
            unbounded: bool,
        }
        Repr {
            value: self.finite(),
            k_f: self.threshold,
            partial_sum: self.partial_sum,
            unbounded: self.is_unbounded(),
        }
        .serialize(s)
    }
}

/// `log(1/t)`, snapped to the nearest integer when within
/// [`INTEGER_SNAP_TOL`] (relative).
fn snapped_log_inverse(t: f64) -> f64 {
    let k = -t.ln();
    let r = k.round();
    if (k - r).abs() <= INTEGER_SNAP_TOL * k.abs().max(1.0) {
        r
    } else {
        k
    }
}

/// The Bang degree: the largest `N` with `Σ_{K < j <= N} M_{j-1}/M_j < e`,
/// `K = log(1/sup_norm)`.
///
/// Running out of stored terms yields `Unbounded` when the tail of `seq` is
/// known to stay below `e`, and [`Error::SequenceTooShort`] otherwise.
pub fn bang_degree(seq: &LogConvexSequence, sup_norm: f64) -> Result<BangDegree> {
    if !(sup_norm > 0.0 && sup_norm <= 1.0) {
        return Err(domain(format!(
            "sup-norm must lie in (0, 1], got {sup_norm}"
        )));
    }
    if !seq.is_normalized() {
        return Err(domain(
            "the Bang degree needs a normalized sequence (M_0 = 1)",
        ));
    }
    let k = snapped_log_inverse(sup_norm);
    let threshold = k.floor() as u64;
    let start = threshold as usize + 1;
    let mut sum = 0.0;
    for j in start..=seq.last_index() {
        let r = seq.ratio(j)?;
        if sum + r >= E {
            return Ok(BangDegree {
                value: DegreeValue::Finite(j as u64 - 1),
                threshold,
                partial_sum: sum,
            });
        }
        sum += r;
    }
    let tail = match seq.tail() {
        Tail::Terminated => Some(0.0),
        Tail::Convergent { remainder } => Some(remainder),
        Tail::Divergent | Tail::Unspecified => None,
    };
    match tail {
        Some(rest) if sum + rest < E => Ok(BangDegree {
            value: DegreeValue::Unbounded,
            threshold,
            partial_sum: sum,
        }),
        _ => Err(Error::SequenceTooShort(format!(
            "the sum of M_(j-1)/M_j over {start}..={} is {sum} < e and the tail is not bounded",
            seq.last_index()
        ))),
    }
}

/// Bang's norm over the log-convex minorant of a raw sequence:
/// `inf_{p ∈ P} max{e^{-p}, max_{j <= p} |f^{(j)}(x)| / (e^j M^c_j)}`.
pub fn original_bang_norm(f: &FunctionModel, raw_values: &[f64], x: f64) -> Result<f64> {
    check_point(x)?;
    let hull = log_convex_minorant(raw_values)?;
    let lm = hull.minorant.log_values();
    let mut best = f64::INFINITY;
    let mut prefix = f64::NEG_INFINITY;
    let mut next = 0;
    for &p in &hull.contact_set {
        while next <= p {
            let t = f.log_abs_derivative(next, x) - next as f64 - lm[next];
            prefix = prefix.max(t);
            next += 1;
        }
        best = best.min(prefix.max(-(p as f64)));
    }
    Ok(best.exp())
}

/// An upper bound `e^{-n*}` for `max_{[0,c]} |f|` over class members flat at
/// 0, with `n* = min{n : Σ_{j >= n+1} M_{j-1}/M_j < e c}`.
///
/// The bound treats `log(1/max|f|)` as an integer level; for a real level the
/// same scan only gives `e^{1-n*}`. Sums within a relative `1e-12` of `e c`
/// are not counted as strictly below it. Quasianalytic sequences give 0.
pub fn flat_zero_envelope(seq: &LogConvexSequence, c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(domain(format!("c must lie in (0, 1], got {c}")));
    }
    let rest = match seq.tail() {
        Tail::Divergent => return Ok(0.0),
        Tail::Terminated => 0.0,
        Tail::Convergent { remainder } => remainder,
        Tail::Unspecified => {
            return Err(Error::SequenceTooShort(
                "tail of the ratio series is unknown".into(),
            ))
        }
    };
    let last = seq.last_index();
    let ratios: Vec<f64> = (1..=last).map(|j| seq.ratio(j)).collect::<Result<_>>()?;
    let level = E * c * (1.0 - INTEGER_SNAP_TOL);
    // tails[n] = Σ_{j >= n+1} ratio_j, accumulated from the far end.
    let mut tail = rest;
    let mut tails = vec![0.0; last + 1];
    for n in (0..=last).rev() {
        tails[n] = tail;
        if n >= 1 {
            tail += ratios[n - 1];
        }
    }
    match tails.iter().position(|&t| t < level) {
        Some(n) => Ok((-(n as f64)).exp()),
        None => Err(Error::SequenceTooShort(format!(
            "the tail beyond index {last} is {rest}, not below e*c = {}",
            E * c
        ))),
    }
}

/// Residuals (right side minus left side) of the fundamental inequality and
/// its variants at one `(x, h, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalResidual {
    /// `max{B(x), e^{-q}} e^{e|h|A(q)} - B(x+h)`.
    pub lemma: f64,
    /// `max{b_n(x), e^{-q-n}} e^{e|h|A(n+q)} - b_n(x+h)`, when `n+q` is stored.
    pub remainder: Option<f64>,
    /// `e|h|A(L(x)+1) - |L(x+h) - L(x)|`, when both levels are finite.
    pub differential: Option<f64>,
}

impl FundamentalResidual {
    pub fn min(&self) -> f64 {
        [Some(self.lemma), self.remainder, self.differential]
            .into_iter()
            .flatten()
            .fold(f64::INFINITY, f64::min)
    }
}

/// `max{b_x, e^{-level}} e^{e|h|a} - b_xh`.
pub fn fundamental_residual(b_x: f64, b_xh: f64, level: f64, h: f64, a: f64) -> f64 {
    b_x.max((-level).exp()) * (E * h.abs() * a).exp() - b_xh
}

/// `e|h|A(L(x)+1) - |L(x+h) - L(x)|`, or `None` when a level is infinite.
pub fn differential_residual(gen: &Generator, l_x: f64, l_xh: f64, h: f64) -> Option<f64> {
    (l_x.is_finite() && l_xh.is_finite())
        .then(|| E * h.abs() * gen.value(l_x + 1.0) - (l_xh - l_x).abs())
}

pub fn verify_fundamental(
    f: &FunctionModel,
    gen: &Generator,
    seq: &LogConvexSequence,
    x: f64,
    h: f64,
    q: usize,
    n: usize,
) -> Result<FundamentalResidual> {
    check_point(x)?;
    check_point(x + h)?;
    if q == 0 {
        return Err(domain("q must be positive"));
    }
    let a_q = seq.growth(q)?;
    let (b_x, b_xh) = (bang_norm(f, seq, x)?, bang_norm(f, seq, x + h)?);
    let lemma = fundamental_residual(b_x, b_xh, q as f64, h, a_q);
    let remainder = if n + q <= seq.last_index() {
        let (r_x, r_xh) = (
            remainder_norm(f, seq, n, x)?,
            remainder_norm(f, seq, n, x + h)?,
        );
        Some(fundamental_residual(
            r_x,
            r_xh,
            (q + n) as f64,
            h,
            seq.growth(n + q)?,
        ))
    } else {
        None
    };
    let differential = differential_residual(gen, log_norm(b_x)?, log_norm(b_xh)?, h);
    Ok(FundamentalResidual {
        lemma,
        remainder,
        differential,
    })
}

/// Bang norms sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BangProfile {
    pub grid: Vec<f64>,
    pub b_values: Vec<f64>,
    /// `log(1/B)`, `+inf` where `B = 0`.
    pub l_values: Vec<f64>,
}

impl BangProfile {
    pub fn compute(f: &FunctionModel, seq: &LogConvexSequence, grid: &[f64]) -> Result<Self> {
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("profile grid must be strictly increasing"));
        }
        let b_values = grid
            .iter()
            .map(|&x| bang_norm(f, seq, x))
            .collect::<Result<Vec<_>>>()?;
        let l_values = b_values
            .iter()
            .map(|&b| log_norm(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: grid.to_vec(),
            b_values,
            l_values,
        })
    }

    /// `n + 1` equally spaced points on `[0, 1]`.
    pub fn uniform(f: &FunctionModel, seq: &LogConvexSequence, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("grid needs at least one step"));
        }
        let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        Self::compute(f, seq, &grid)
    }

    /// CSV with columns `x,B_f,L_f`; infinite levels are written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,B_f,L_f\n");
        for ((x, b), l) in self.grid.iter().zip(&self.b_values).zip(&self.l_values) {
            let l = if l.is_infinite() {
                "inf".to_string()
            } else {
                format!("{l:e}")
            };
            out.push_str(&format!("{x},{b:e},{l}\n"));
        }
        out
    }
}

/// Result of the level-crossing checks on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCrossing {
    /// `⌈log(1/max B)⌉`.
    pub l: u64,
    /// `⌊log(1/min B)⌋`, `None` when `B` vanishes on the grid.
    pub n: Option<u64>,
    /// `Σ_{L+1 <= j <= N} M_{j-1}/M_j`.
    pub sum: f64,
    /// `log(1/max B)` and `log(1/min B)` on the grid.
    pub level_min: f64,
    pub level_max: f64,
    /// `∫_{L_*+1}^{L^*+1} ds/A(s)`, `None` when `L^*` is infinite.
    pub integral: Option<f64>,
}

impl LevelCrossing {
    pub fn sum_margin(&self) -> f64 {
        E - self.sum
    }

    pub fn integral_margin(&self) -> Option<f64> {
        self.integral.map(|v| E - v)
    }
}

/// Checks `Σ_{L+1 <= j <= N} M_{j-1}/M_j < e` for the extremal pair read
/// off the grid, and `∫_{L_*+1}^{L^*+1} ds/A(s) < e`. Grid extrema give valid
/// pairs: the true maximum of `B` is at least the grid maximum and the true
/// minimum at most the grid minimum.
pub fn verify_level_crossing(
    f: &FunctionModel,
    gen: &Generator,
    seq: &LogConvexSequence,
    grid: &[f64],
) -> Result<LevelCrossing> {
    let covers = grid.first() == Some(&0.0)
        && grid.last() == Some(&1.0)
        && grid
            .windows(2)
            .all(|w| w[0] < w[1] && w[1] - w[0] <= LEVEL_GRID_MAX_STEP * (1.0 + 1e-9));
    if !covers {
        return Err(domain(
            "grid must run from 0 to 1 with steps of at most 0.01",
        ));
    }
    let profile = BangProfile::compute(f, seq, grid)?;
    let max_b = profile.b_values.iter().copied().fold(0.0, f64::max);
    let min_b = profile
        .b_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if max_b == 0.0 {
        return Err(Error::IdenticallyZero);
    }
    let level_min = snapped_log_inverse(max_b).max(0.0);
    let level_max = if min_b == 0.0 {
        f64::INFINITY
    } else {
        snapped_log_inverse(min_b)
    };
    let l = level_min.ceil() as u64;
    let n = level_max.is_finite().then(|| level_max.floor() as u64);
    let mut sum = 0.0;
    if let Some(n) = n {
        for j in (l + 1)..=n {
            let j = j as usize;
            if j > seq.last_index() {
                if seq.tail() == Tail::Terminated {
                    break;
                }
                return Err(Error::SequenceTooShort(format!(
                    "level {j} exceeds the stored sequence"
                )));
            }
            sum += seq.ratio(j)?;
        }
    }
    let integral = if level_max.is_finite() {
        let q = integrate(
            |s| 1.0 / gen.value(s),
            level_min + 1.0,
            level_max + 1.0,
            LEVEL_QUADRATURE_TOL,
        )?;
        Some(q.value)
    } else {
        None
    };
    Ok(LevelCrossing {
        l,
        n,
        sum,
        level_min,
        level_max,
        integral,
    })
}
