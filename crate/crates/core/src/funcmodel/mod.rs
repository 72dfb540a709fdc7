//! Function models on `[0, 1]` with derivative oracles, grid sup-norms with
//! certified error bands, and zero counting.

mod exact;
mod interval;
pub mod series;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sequences::LogConvexSequence;

pub use interval::{Interval, IntervalSet};
pub use series::{PowerSeries, DEFAULT_NONEXTENDABLE_C, DEFAULT_TRUNCATION};

/// Grid step of the sign-change scan used for power-series zero counts.
pub const SERIES_ZERO_SCAN_STEP: f64 = 1e-4;
/// Log-domain slack allowed by [`FunctionModel::fits_class`].
pub const CLASS_FIT_TOL: f64 = 1e-9;

/// A polynomial in the monomial basis, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(domain("polynomial coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    /// `scale · Π (x - r)`.
    pub fn from_roots(roots: &[f64], scale: f64) -> Result<Self> {
        let mut c = vec![scale];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i + 1] += ci;
                next[i] -= r * ci;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative_value(0, x)
    }

    /// `p^{(j)}(x)` by Horner on the shifted, scaled coefficients.
    pub fn derivative_value(&self, j: usize, x: f64) -> f64 {
        if j >= self.coeffs.len() {
            return 0.0;
        }
        let mut acc = 0.0;
        for i in (j..self.coeffs.len()).rev() {
            acc = acc * x + self.coeffs[i] * falling(i, j);
        }
        acc
    }

    pub fn derivative(&self, j: usize) -> Polynomial {
        let coeffs = (j..self.coeffs.len())
            .map(|i| self.coeffs[i] * falling(i, j))
            .collect();
        Polynomial { coeffs }
    }

    /// `Σ_i |c_i| i!/(i-j)!`, a bound on `|p^{(j)}|` over `[-1, 1]`.
    pub fn derivative_coefficient_bound(&self, j: usize) -> f64 {
        (j..self.coeffs.len())
            .map(|i| self.coeffs[i].abs() * falling(i, j))
            .sum()
    }
}

/// `i (i-1) … (i-j+1)`.
fn falling(i: usize, j: usize) -> f64 {
    (i + 1 - j..=i).map(|k| k as f64).product()
}

/// A function on `[0, 1]` with a derivative oracle of every order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpec", into = "FunctionSpec")]
pub enum FunctionModel {
    Polynomial(Polynomial),
    /// `amplitude · sin(k π x)`.
    Sinusoid {
        k: u32,
        amplitude: f64,
    },
    PowerSeries(PowerSeries),
}

/// The JSON form of a [`FunctionModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Polynomial {
        coeffs: Vec<f64>,
    },
    Sinusoid {
        k: u32,
        amplitude: f64,
    },
    Nonextendable {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "K")]
        k: usize,
        #[serde(default = "unit_scale", skip_serializing_if = "is_unit_scale")]
        scale: f64,
    },
}

fn unit_scale() -> f64 {
    1.0
}

fn is_unit_scale(s: &f64) -> bool {
    *s == 1.0
}

impl TryFrom<FunctionSpec> for FunctionModel {
    type Error = Error;
    fn try_from(spec: FunctionSpec) -> Result<Self> {
        match spec {
            FunctionSpec::Polynomial { coeffs } => Ok(Self::Polynomial(Polynomial::new(coeffs)?)),
            FunctionSpec::Sinusoid { k, amplitude } => Self::sinusoid(k, amplitude),
            FunctionSpec::Nonextendable { c, k, scale } => Ok(Self::PowerSeries(
                PowerSeries::nonextendable(c, k)?.scaled(scale)?,
            )),
        }
    }
}

impl From<FunctionModel> for FunctionSpec {
    fn from(f: FunctionModel) -> Self {
        match f {
            FunctionModel::Polynomial(p) => FunctionSpec::Polynomial { coeffs: p.coeffs },
            FunctionModel::Sinusoid { k, amplitude } => FunctionSpec::Sinusoid { k, amplitude },
            FunctionModel::PowerSeries(s) => FunctionSpec::Nonextendable {
                c: s.c(),
                k: s.truncation(),
                scale: s.scale(),
            },
        }
    }
}

/// A derivative value; for power series the value is that of the truncation
/// and `tail_bound` bounds the discarded part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub tail_bound: f64,
}

/// Grid maximum of `|g|` with a bound on how far the true supremum can
/// exceed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNorm {
    pub estimate: f64,
    pub error_bound: f64,
}

impl SupNorm {
    pub fn upper(&self) -> f64 {
        self.estimate + self.error_bound
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroCount {
    pub count: usize,
    /// False when `count` is only a lower bound.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassFit {
    pub fits: bool,
    /// `max_j (estimate_j - M_j)`.
    pub max_violation: f64,
    /// `max_j (ln(estimate_j + tail_j) - ln M_j)`.
    pub max_log_excess: f64,
    pub worst_order: usize,
}

/// Max of `|g|` over the points of the lattice `spacing·Z` inside each
/// component plus both endpoints of each component. Lattices at
/// `spacing / 2^k` are nested, so refining never loses a point.
pub fn grid_sup(
    g: impl Fn(f64) -> f64,
    lipschitz: f64,
    parts: &[Interval],
    spacing: f64,
) -> Result<SupNorm> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(domain(format!("spacing must be positive, got {spacing}")));
    }
    if parts.is_empty() {
        return Err(domain("empty set"));
    }
    let mut best = 0.0f64;
    let mut nan = false;
    let mut visit = |x: f64| {
        let v = g(x).abs();
        nan |= v.is_nan();
        best = best.max(v);
    };
    for iv in parts {
        visit(iv.lo);
        let first = (iv.lo / spacing).floor() as i64 + 1;
        let mut i = first;
        loop {
            let x = i as f64 * spacing;
            if x >= iv.hi {
                break;
            }
            if x > iv.lo {
                visit(x);
            }
            i += 1;
        }
        visit(iv.hi);
    }
    if nan {
        return Err(domain("function value is not a number"));
    }
    Ok(SupNorm {
        estimate: best,
        error_bound: lipschitz * spacing / 2.0,
    })
}

impl FunctionModel {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        Ok(Self::Polynomial(Polynomial::new(coeffs)?))
    }

    pub fn sinusoid(k: u32, amplitude: f64) -> Result<Self> {
        if k == 0 {
            return Err(domain("sinusoid frequency must be a positive integer"));
        }
        if !amplitude.is_finite() {
            return Err(domain("sinusoid amplitude must be finite"));
        }
        Ok(Self::Sinusoid { k, amplitude })
    }

    pub fn nonextendable(c: f64, truncation: usize) -> Result<Self> {
        Ok(Self::PowerSeries(PowerSeries::nonextendable(
            c, truncation,
        )?))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Polynomial(_) => "polynomial",
            Self::Sinusoid { .. } => "sinusoid",
            Self::PowerSeries(_) => "nonextendable",
        }
    }

    /// Short human-readable label.
    pub fn label(&self) -> String {
        match self {
            Self::Polynomial(p) => format!("poly{:?}", p.coeffs()),
            Self::Sinusoid { k, amplitude } => format!("{amplitude}*sin({k}pi x)"),
            Self::PowerSeries(s) => format!(
                "series(C={},K={},scale={})",
                s.c(),
                s.truncation(),
                s.scale()
            ),
        }
    }

    /// `f^{(j)}(x)` for `x ∈ [0, 1]`.
    pub fn derivative_at(&self, j: usize, x: f64) -> Result<Derivative> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain(format!("x = {x} is outside [0, 1]")));
        }
        let tail_bound = match self {
            Self::PowerSeries(s) => s.tail_bound(j),
            _ => 0.0,
        };
        Ok(Derivative {
            value: self.eval_derivative(j, x),
            tail_bound,
        })
    }

    /// `f^{(j)}(x)` for any real `x` (the truncation for power series).
    pub fn eval_derivative(&self, j: usize, x: f64) -> f64 {
        match self {
            Self::Polynomial(p) => p.derivative_value(j, x),
            Self::Sinusoid { k, amplitude } => {
                let w = *k as f64 * PI;
                amplitude * w.powi(j as i32) * rotated_sin(j, w * x)
            }
            Self::PowerSeries(s) => s.truncated_derivative(j, x),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(0, x)
    }

    /// `ln |f^{(j)}(x)|`, computed without overflow where the model allows.
    pub fn log_abs_derivative(&self, j: usize, x: f64) -> f64 {
        match self {
            Self::Polynomial(p) => p.derivative_value(j, x).abs().ln(),
            Self::Sinusoid { k, amplitude } => {
                let w = *k as f64 * PI;
                amplitude.abs().ln() + j as f64 * w.ln() + rotated_sin(j, w * x).abs().ln()
            }
            Self::PowerSeries(s) => {
                if x >= 0.0 {
                    s.truncated_log_derivative(j, x)
                } else {
                    s.truncated_log_derivative(j, -x)
                }
            }
        }
    }

    /// Tail bound of the truncation for derivative order `j` (zero for exact
    /// models).
    pub fn tail_bound(&self, j: usize) -> f64 {
        match self {
            Self::PowerSeries(s) => s.tail_bound(j),
            _ => 0.0,
        }
    }

    /// A bound on `sup |f^{(j)}|` over `[-1, 1]`.
    pub fn derivative_bound(&self, j: usize) -> f64 {
        match self {
            Self::Polynomial(p) => p.derivative_coefficient_bound(j),
            Self::Sinusoid { k, amplitude } => amplitude.abs() * (*k as f64 * PI).powi(j as i32),
            Self::PowerSeries(s) => s.log_derivative_bound(j).exp(),
        }
    }

    /// Grid sup-norm of `f` on `set`.
    pub fn sup_norm(&self, set: &IntervalSet, spacing: f64) -> Result<SupNorm> {
        self.sup_norm_derivative(0, set, spacing)
    }

    /// Grid sup-norm of `f^{(j)}` on `set`.
    pub fn sup_norm_derivative(
        &self,
        j: usize,
        set: &IntervalSet,
        spacing: f64,
    ) -> Result<SupNorm> {
        self.sup_norm_on(j, set.intervals(), spacing)
    }

    /// Grid sup-norm of `f^{(j)}` over arbitrary components inside `[-1, 1]`.
    ///
    /// For power series the estimate comes from the truncation, which is a
    /// lower bound on `|f^{(j)}|` because every coefficient is nonnegative; the
    /// tail bound is added to the error band.
    pub fn sup_norm_on(&self, j: usize, parts: &[Interval], spacing: f64) -> Result<SupNorm> {
        if parts.iter().any(|iv| iv.lo < -1.0 || iv.hi > 1.0) {
            return Err(domain("sup-norm components must lie in [-1, 1]"));
        }
        let lipschitz = self.derivative_bound(j + 1);
        let mut s = grid_sup(|x| self.eval_derivative(j, x), lipschitz, parts, spacing)?;
        s.error_bound += self.tail_bound(j);
        Ok(s)
    }

    /// Zeros of `f` in the closed interval, counted with multiplicity.
    pub fn count_zeros(&self, iv: Interval) -> Result<ZeroCount> {
        if !(iv.lo < iv.hi) || iv.lo < 0.0 || iv.hi > 1.0 {
            return Err(domain(format!(
                "[{}, {}] is not a nondegenerate subinterval of [0, 1]",
                iv.lo, iv.hi
            )));
        }
        match self {
            Self::Polynomial(p) => {
                let q = exact::QPoly::from_f64(p.coeffs())
                    .ok_or_else(|| domain("non-finite coefficient"))?;
                if q.is_zero() {
                    return Err(Error::IdenticallyZero);
                }
                let (a, b) = (exact::rational(iv.lo), exact::rational(iv.hi));
                let (a, b) = a.zip(b).ok_or_else(|| domain("non-finite endpoint"))?;
                Ok(ZeroCount {
                    count: exact::count_roots_with_multiplicity(&q, &a, &b),
                    exact: true,
                })
            }
            Self::Sinusoid { k, amplitude } => {
                if *amplitude == 0.0 {
                    return Err(Error::IdenticallyZero);
                }
                // sin(kπx) = 0 exactly at x = m/k.
                let (a, b) = (exact::rational(iv.lo), exact::rational(iv.hi));
                let (a, b) = a.zip(b).ok_or_else(|| domain("non-finite endpoint"))?;
                let kq = num_rational::BigRational::from_integer((*k).into());
                let lo = (a * &kq).ceil().to_integer();
                let hi = (b * kq).floor().to_integer();
                let count = if hi >= lo {
                    hi - lo + 1u32
                } else {
                    0u32.into()
                };
                let count = usize::try_from(count).map_err(|_| domain("zero count overflow"))?;
                Ok(ZeroCount { count, exact: true })
            }
            Self::PowerSeries(_) => {
                let n = ((iv.hi - iv.lo) / SERIES_ZERO_SCAN_STEP).ceil().max(1.0) as usize;
                let mut count = 0;
                let mut last = 0.0f64;
                for i in 0..=n {
                    let x = if i == n {
                        iv.hi
                    } else {
                        iv.lo + i as f64 * SERIES_ZERO_SCAN_STEP
                    };
                    let v = self.eval(x);
                    if v == 0.0 || (last != 0.0 && v.signum() != last.signum()) {
                        count += 1;
                    }
                    last = v;
                }
                Ok(ZeroCount {
                    count,
                    exact: false,
                })
            }
        }
    }

    /// Checks `||f^{(j)}||_{[0,1]} <= M_j` for every stored order of `seq`,
    /// comparing in the log domain with slack [`CLASS_FIT_TOL`]. Sinusoid norms
    /// are exact; power-series estimates are widened by their tail bounds.
    pub fn fits_class(&self, seq: &LogConvexSequence, spacing: f64) -> Result<ClassFit> {
        let unit = IntervalSet::unit();
        let mut fit = ClassFit {
            fits: true,
            max_violation: f64::NEG_INFINITY,
            max_log_excess: f64::NEG_INFINITY,
            worst_order: 0,
        };
        for (j, &log_m) in seq.log_values().iter().enumerate() {
            let vanishes = matches!(self, Self::Polynomial(p) if p.degree().is_none_or(|d| j > d));
            let (excess, violation) = if vanishes {
                (f64::NEG_INFINITY, -log_m.exp())
            } else if let Self::Sinusoid { k, amplitude } = self {
                // sup over [0, 1] of |f^(j)| is exactly |amplitude| (k pi)^j.
                let log_sup = amplitude.abs().ln() + j as f64 * (*k as f64 * PI).ln();
                (log_sup - log_m, log_sup.exp() - log_m.exp())
            } else {
                let s = self.sup_norm_derivative(j, &unit, spacing)?;
                (
                    (s.estimate + self.tail_bound(j)).ln() - log_m,
                    s.estimate - log_m.exp(),
                )
            };
            fit.max_violation = fit.max_violation.max(violation);
            if excess > fit.max_log_excess {
                fit.max_log_excess = excess;
                fit.worst_order = j;
            }
            if excess > CLASS_FIT_TOL {
                fit.fits = false;
            }
        }
        Ok(fit)
    }
}

/// `sin(θ + jπ/2)` by exact quarter-turn rotation.
fn rotated_sin(j: usize, theta: f64) -> f64 {
    match j % 4 {
        0 => theta.sin(),
        1 => theta.cos(),
        2 => -theta.sin(),
        _ => -theta.cos(),
    }
}
