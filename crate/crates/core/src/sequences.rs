//! Majorant sequences `M_j`, their generators `A`, and the regularity
//! quantities derived from them.
//!
//! Every sequence is stored as `log M_j`. Factorial-type classes leave the
//! double range around `j = 170`, so nothing here ever materialises `M_j`
//! unless a caller asks for it explicitly.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute slack used for log-convexity checks in the log domain.
pub const LOG_CONVEXITY_TOL: f64 = 1e-12;

/// Step of the dense scan used by [`gamma_sup`] on tabulated generators.
pub const GAMMA_SCAN_STEP: f64 = 1e-3;

/// Final bracket width of the golden-section refinement in [`gamma_sup`].
pub const GAMMA_REFINE_TOL: f64 = 1e-9;

/// The smoothness function `A` with `M_j = M_{j-1} A(j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// `A(s) = C s`; with `C = 1` this is the real-analytic class `M_j = j!`.
    Analytic {
        #[serde(rename = "C")]
        scale: f64,
    },
    /// `A(s) = C s log^alpha(s + e)`.
    Logarithmic {
        #[serde(rename = "C")]
        scale: f64,
        alpha: f64,
    },
    /// `A(s) = a`, a geometric majorant.
    ConstantRatio { a: f64 },
    /// `A(1..=J)` from a table, `A = +inf` beyond it (finite smoothness).
    Tabulated { values: Vec<f64> },
}

impl Generator {
    pub fn analytic(scale: f64) -> Result<Self> {
        let g = Generator::Analytic { scale };
        g.validate()?;
        Ok(g)
    }

    pub fn logarithmic(scale: f64, alpha: f64) -> Result<Self> {
        let g = Generator::Logarithmic { scale, alpha };
        g.validate()?;
        Ok(g)
    }

    pub fn constant_ratio(a: f64) -> Result<Self> {
        let g = Generator::ConstantRatio { a };
        g.validate()?;
        Ok(g)
    }

    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        let g = Generator::Tabulated { values };
        g.validate()?;
        Ok(g)
    }

    /// Checks the generator invariants: `A(1) > 0` and `A` non-decreasing.
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidGenerator(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match self {
            Generator::Analytic { scale } => positive("C", *scale),
            Generator::Logarithmic { scale, alpha } => {
                positive("C", *scale)?;
                if !(alpha.is_finite() && *alpha >= 0.0) {
                    return Err(Error::InvalidGenerator(format!(
                        "alpha must be finite and non-negative, got {alpha}"
                    )));
                }
                Ok(())
            }
            Generator::ConstantRatio { a } => positive("a", *a),
            Generator::Tabulated { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidGenerator(
                        "tabulated values must be non-empty".into(),
                    ));
                }
                for (i, v) in values.iter().enumerate() {
                    if !(v.is_finite() && *v > 0.0) {
                        return Err(Error::InvalidGenerator(format!(
                            "tabulated value A({}) = {v} must be positive and finite",
                            i + 1
                        )));
                    }
                }
                if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
                    return Err(Error::InvalidGenerator(format!(
                        "tabulated values must be non-decreasing: A({}) = {} > A({}) = {}",
                        i + 1,
                        values[i],
                        i + 2,
                        values[i + 1]
                    )));
                }
                Ok(())
            }
        }
    }

    /// `A(j)` at an integer argument `j >= 1`. Tabulated generators return
    /// `+inf` beyond their table.
    pub fn at(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match self {
            Generator::Tabulated { values } => values.get(j - 1).copied().unwrap_or(f64::INFINITY),
            _ => self.value(j as f64),
        }
    }

    /// `A(s)` for real `s >= 1`. Tabulated generators interpolate linearly
    /// between integer nodes.
    pub fn value(&self, s: f64) -> f64 {
        match self {
            Generator::Analytic { scale } => scale * s,
            Generator::Logarithmic { scale, alpha } => scale * s * (s + E).ln().powf(*alpha),
            Generator::ConstantRatio { a } => *a,
            Generator::Tabulated { values } => {
                let last = values.len() as f64;
                if s > last {
                    return f64::INFINITY;
                }
                if s <= 1.0 {
                    return values[0];
                }
                let lo = s.floor();
                let i = lo as usize; // node index, 1-based
                if lo == s {
                    return values[i - 1];
                }
                let t = s - lo;
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// `A'(s)`; the left derivative for tabulated generators (the right one
    /// at `s = 1`, where no left derivative exists).
    pub fn slope(&self, s: f64) -> f64 {
        match self {
            Generator::Analytic { scale } => *scale,
            Generator::Logarithmic { scale, alpha } => {
                let l = (s + E).ln();
                scale * (l.powf(*alpha) + alpha * s * l.powf(alpha - 1.0) / (s + E))
            }
            Generator::ConstantRatio { .. } => 0.0,
            Generator::Tabulated { values } => {
                if values.len() < 2 {
                    return 0.0;
                }
                let seg = if s <= 1.0 {
                    1
                } else {
                    (s.ceil() as usize).saturating_sub(1).max(1)
                };
                if seg >= values.len() {
                    return 0.0;
                }
                values[seg] - values[seg - 1]
            }
        }
    }

    /// `s A'(s) / A(s)`, the quantity whose supremum defines `gamma(n)`.
    pub fn elasticity(&self, s: f64) -> f64 {
        s * self.slope(s) / self.value(s)
    }

    /// Whether the class is quasianalytic, i.e. `sum 1/A(j)` diverges.
    pub fn is_quasianalytic(&self) -> bool {
        match self {
            Generator::Analytic { .. } | Generator::ConstantRatio { .. } => true,
            Generator::Logarithmic { alpha, .. } => *alpha <= 1.0,
            Generator::Tabulated { .. } => false,
        }
    }

    /// Length of the table for tabulated generators.
    pub fn table_len(&self) -> Option<usize> {
        match self {
            Generator::Tabulated { values } => Some(values.len()),
            _ => None,
        }
    }
}

/// What is known about the ratios `M_{j-1}/M_j` beyond the stored range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// `A = +inf` beyond the stored range: every further ratio is zero.
    Terminated,
    /// The ratio series diverges (quasianalytic class).
    Divergent,
    /// The ratio series converges; `remainder` is the exact sum of the
    /// ratios beyond the stored range.
    Convergent { remainder: f64 },
    /// Nothing is known.
    Unspecified,
}

/// A logarithmically convex sequence `M_0..=M_J`, stored as `log M_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConvexSequence {
    log_m: Vec<f64>,
    normalized: bool,
    tail: Tail,
}

impl LogConvexSequence {
    /// Builds a sequence from `log M_j` values, checking log-convexity.
    pub fn from_log_values(log_m: Vec<f64>) -> Result<Self> {
        if log_m.is_empty() {
            return Err(domain("sequence must be non-empty"));
        }
        if let Some(v) = log_m.iter().find(|v| !v.is_finite()) {
            return Err(domain(format!("log value {v} is not finite")));
        }
        if !log_convex_in_log_domain(&log_m, LOG_CONVEXITY_TOL) {
            return Err(domain("sequence is not logarithmically convex"));
        }
        let normalized = log_m[0] == 0.0;
        Ok(Self {
            log_m,
            normalized,
            tail: Tail::Unspecified,
        })
    }

    /// Builds a sequence from positive values `M_j`.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_log_values(log_positive(values)?)
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Number of stored entries `J + 1`.
    pub fn len(&self) -> usize {
        self.log_m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_m.is_empty()
    }

    /// Largest stored index `J`.
    pub fn last_index(&self) -> usize {
        self.log_m.len() - 1
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_m
    }

    pub fn log_at(&self, j: usize) -> Result<f64> {
        self.log_m.get(j).copied().ok_or(Error::OutOfRange {
            index: j,
            available: self.log_m.len(),
        })
    }

    /// `M_j` in linear scale; may overflow to `+inf`.
    pub fn value(&self, j: usize) -> Result<f64> {
        self.log_at(j).map(f64::exp)
    }

    /// `M_{j-1} / M_j` for `1 <= j <= J`.
    pub fn ratio(&self, j: usize) -> Result<f64> {
        if j == 0 {
            return Err(domain("ratio index must be at least 1"));
        }
        Ok((self.log_at(j - 1)? - self.log_at(j)?).exp())
    }

    /// `M_q / M_{q-1}`, the discrete generator value at `q`.
    pub fn growth(&self, q: usize) -> Result<f64> {
        if q == 0 {
            return Err(domain("growth index must be at least 1"));
        }
        Ok((self.log_at(q)? - self.log_at(q - 1)?).exp())
    }
}

/// `M_0 = 1`, `log M_j = log M_{j-1} + log A(j)` for `j < count`.
pub fn from_generator(gen: &Generator, count: usize) -> Result<LogConvexSequence> {
    gen.validate()?;
    if count == 0 {
        return Err(domain("count must be at least 1"));
    }
    if let Some(table) = gen.table_len() {
        if count > table + 1 {
            return Err(Error::OutOfRange {
                index: count - 1,
                available: table + 1,
            });
        }
    }
    let mut log_m = Vec::with_capacity(count);
    log_m.push(0.0);
    for j in 1..count {
        let prev = log_m[j - 1];
        log_m.push(prev + gen.at(j).ln());
    }
    let tail = match gen.table_len() {
        Some(table) if count == table + 1 => Tail::Terminated,
        Some(_) => Tail::Unspecified,
        None if gen.is_quasianalytic() => Tail::Divergent,
        None => Tail::Unspecified,
    };
    Ok(LogConvexSequence {
        log_m,
        normalized: true,
        tail,
    })
}

/// `2 log v_j <= log v_{j-1} + log v_{j+1} + tol` for every interior `j`.
pub fn is_log_convex(values: &[f64], tol: f64) -> Result<bool> {
    if tol < 0.0 {
        return Err(domain("tolerance must be non-negative"));
    }
    Ok(log_convex_in_log_domain(&log_positive(values)?, tol))
}

fn log_convex_in_log_domain(log_v: &[f64], tol: f64) -> bool {
    log_v.windows(3).all(|w| 2.0 * w[1] <= w[0] + w[2] + tol)
}

fn log_positive(values: &[f64]) -> Result<Vec<f64>> {
    values
        .iter()
        .map(|&v| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(domain(format!(
                    "sequence entries must be positive and finite, got {v}"
                )))
            }
        })
        .collect()
}

/// `sum_{j=lo}^{hi} M_{j-1}/M_j`, accumulated left to right.
pub fn quasianalytic_sum(seq: &LogConvexSequence, lo: usize, hi: usize) -> Result<f64> {
    if lo < 1 || lo > hi {
        return Err(domain(format!(
            "need 1 <= lo <= hi, got lo = {lo}, hi = {hi}"
        )));
    }
    if hi > seq.last_index() {
        return Err(Error::OutOfRange {
            index: hi,
            available: seq.len(),
        });
    }
    let lm = seq.log_values();
    Ok((lo..=hi).map(|j| (lm[j - 1] - lm[j]).exp()).sum())
}

/// The largest log-convex minorant of a sequence together with its
/// contact set `{ j : M^c_j = M_j }`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorantResult {
    pub minorant: LogConvexSequence,
    pub contact_set: Vec<usize>,
}

/// Largest log-convex minorant of positive `values`.
pub fn log_convex_minorant(values: &[f64]) -> Result<MinorantResult> {
    if values.is_empty() {
        return Err(domain("sequence must be non-empty"));
    }
    log_convex_minorant_log(&log_positive(values)?)
}

/// Same as [`log_convex_minorant`] with inputs already in the log domain.
///
/// Lower convex hull of the points `(j, log M_j)` by monotone chain; the
/// abscissae are already sorted so the pass is linear.
pub fn log_convex_minorant_log(log_values: &[f64]) -> Result<MinorantResult> {
    if log_values.is_empty() {
        return Err(domain("sequence must be non-empty"));
    }
    if let Some(v) = log_values.iter().find(|v| !v.is_finite()) {
        return Err(domain(format!("log value {v} is not finite")));
    }
    let y = log_values;
    let mut hull: Vec<usize> = Vec::with_capacity(y.len());
    for j in 0..y.len() {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a - o) as f64 * (y[j] - y[o]) - (y[a] - y[o]) * (j - o) as f64;
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(j);
    }

    let mut envelope = y.to_vec();
    for w in hull.windows(2) {
        let (i, k) = (w[0], w[1]);
        let slope = (y[k] - y[i]) / (k - i) as f64;
        for j in i + 1..k {
            envelope[j] = (y[i] + slope * (j - i) as f64).min(y[j]);
        }
    }
    let contact_set = (0..y.len())
        .filter(|&j| y[j] - envelope[j] <= LOG_CONVEXITY_TOL)
        .collect();
    let normalized = envelope[0] == 0.0;
    Ok(MinorantResult {
        minorant: LogConvexSequence {
            log_m: envelope,
            normalized,
            tail: Tail::Unspecified,
        },
        contact_set,
    })
}

/// `log m_j = log M_j - log j!`.
pub fn factorial_normalized(seq: &LogConvexSequence) -> Vec<f64> {
    let mut log_fact = 0.0;
    seq.log_values()
        .iter()
        .enumerate()
        .map(|(j, &lm)| {
            if j > 0 {
                log_fact += (j as f64).ln();
            }
            lm - log_fact
        })
        .collect()
}

/// `gamma(n) = sup_{1 <= s <= n} s A'(s) / A(s)`. Pass `f64::INFINITY` for
/// the global supremum of a regular class.
pub fn gamma_sup(gen: &Generator, n: f64) -> Result<f64> {
    gen.validate()?;
    if n.is_nan() || n < 1.0 {
        return Err(domain(format!("gamma_sup needs n >= 1, got {n}")));
    }
    match gen {
        Generator::Analytic { .. } => Ok(1.0),
        Generator::ConstantRatio { .. } => Ok(0.0),
        Generator::Logarithmic { alpha, .. } => {
            // s A'/A = 1 + alpha * s / ((s+e) log(s+e)); the second factor
            // rises to a single maximum at s* = u* - e, u* = e (log u* + 1).
            let peak = log_class_peak() - E;
            let s = n.min(peak);
            Ok(1.0 + alpha * s / ((s + E) * (s + E).ln()))
        }
        Generator::Tabulated { values } => {
            let upper = n.min(values.len() as f64);
            // Each piece's elasticity is monotone, so its supremum may be the
            // unattained limit just right of a node; add those limits.
            let right_limits = (1..values.len())
                .take_while(|&k| (k as f64) < upper)
                .map(|k| k as f64 * (values[k] - values[k - 1]) / values[k - 1]);
            Ok(right_limits.fold(scan_sup(|s| gen.elasticity(s), 1.0, upper), f64::max))
        }
    }
}

/// Root `u*` of `u = e (log u + 1)` on `u > e`.
fn log_class_peak() -> f64 {
    let mut u = 9.0_f64;
    for _ in 0..50 {
        let step = (u - E * u.ln() - E) / (1.0 - E / u);
        u -= step;
        if step.abs() < 1e-15 * u {
            break;
        }
    }
    u
}

/// Dense scan followed by golden-section refinement around the best node.
fn scan_sup(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return g(lo);
    }
    let steps = ((hi - lo) / GAMMA_SCAN_STEP).ceil() as usize;
    let h = (hi - lo) / steps as f64;
    let (mut best_s, mut best) = (lo, g(lo));
    for i in 1..=steps {
        let s = if i == steps { hi } else { lo + i as f64 * h };
        let v = g(s);
        if v > best {
            best = v;
            best_s = s;
        }
    }
    let (mut a, mut b) = ((best_s - h).max(lo), (best_s + h).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > GAMMA_REFINE_TOL {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
        best = best.max(gc).max(gd);
    }
    best
}

/// Which exponent enters `Gamma = 4 exp(4 + k * gamma)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum GammaVariant {
    /// `k = 1` with the local supremum `gamma(2 n_f)`; the constant of the
    /// degree-dependent Remez bound.
    #[default]
    #[serde(rename = "section1", alias = "degree")]
    Degree,
    /// `k = 2/e` with the global supremum; the constant of the
    /// propagation-of-smallness estimate.
    #[serde(rename = "section55", alias = "propagation")]
    Propagation,
}

impl GammaVariant {
    pub fn name(self) -> &'static str {
        match self {
            GammaVariant::Degree => "section1",
            GammaVariant::Propagation => "section55",
        }
    }

    /// Coefficient of `gamma` in the exponent.
    pub fn weight(self) -> f64 {
        match self {
            GammaVariant::Degree => 1.0,
            GammaVariant::Propagation => 2.0 / E,
        }
    }
}

/// `Gamma = 4 exp(4 + k gamma)` with `k` chosen by `variant`.
pub fn big_gamma(gamma: f64, variant: GammaVariant) -> Result<f64> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(domain(format!("gamma must be non-negative, got {gamma}")));
    }
    Ok(4.0 * (4.0 + variant.weight() * gamma).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn values(seq: &LogConvexSequence) -> Vec<f64> {
        seq.log_values().iter().map(|v| v.exp()).collect()
    }

    #[test]
    fn generator_examples() {
        let fact = from_generator(&Generator::analytic(1.0).unwrap(), 4).unwrap();
        for (got, want) in values(&fact).iter().zip([1.0, 1.0, 2.0, 6.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let geo = from_generator(&Generator::constant_ratio(PI).unwrap(), 3).unwrap();
        for (got, want) in values(&geo).iter().zip([1.0, PI, PI * PI]) {
            assert!((got - want).abs() < 1e-12);
        }
        let log = from_generator(&Generator::logarithmic(1.0, 1.0).unwrap(), 2).unwrap();
        assert!((log.value(1).unwrap() - 1.313_261_687_518_223).abs() < 1e-12);
    }

    #[test]
    fn tabulated_range_and_tail() {
        let gen = Generator::tabulated(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            from_generator(&gen, 5),
            Err(Error::OutOfRange { .. })
        ));
        assert_eq!(from_generator(&gen, 4).unwrap().tail(), Tail::Terminated);
        assert_eq!(from_generator(&gen, 3).unwrap().tail(), Tail::Unspecified);
        assert_eq!(gen.at(4), f64::INFINITY);
        assert_eq!(gen.value(2.5), 2.5);
        assert_eq!(gen.value(3.5), f64::INFINITY);
    }

    #[test]
    fn rejects_non_monotone_table() {
        let err = Generator::tabulated(vec![1.0, 3.0, 2.0]).unwrap_err();
        assert!(err.to_string().contains("non-decreasing"));
        assert!(Generator::analytic(0.0).is_err());
        assert!(Generator::logarithmic(1.0, -0.5).is_err());
    }

    #[test]
    fn log_convexity_examples() {
        assert!(is_log_convex(&[1.0, 1.0, 2.0, 6.0], 0.0).unwrap());
        assert!(!is_log_convex(&[1.0, 3.0, 4.0], 0.0).unwrap());
        for c in [0.1, 1.0, 7.5] {
            assert!(is_log_convex(&[1.0, c, c * c], 1e-12).unwrap());
        }
        assert!(is_log_convex(&[1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn quasianalytic_sum_examples() {
        let fact = from_generator(&Generator::analytic(1.0).unwrap(), 12).unwrap();
        let h8: f64 = (1..=8).map(|j| 1.0 / j as f64).sum();
        assert!((quasianalytic_sum(&fact, 1, 8).unwrap() - h8).abs() < 1e-13);
        assert!((h8 - 2.717_857_142_857_143).abs() < 1e-13);

        let geo = from_generator(&Generator::constant_ratio(PI).unwrap(), 8).unwrap();
        assert!((quasianalytic_sum(&geo, 1, 5).unwrap() - 5.0 / PI).abs() < 1e-13);
        assert_eq!(quasianalytic_sum(&fact, 1, 1).unwrap(), 1.0);
        assert!(quasianalytic_sum(&fact, 0, 3).is_err());
        assert!(matches!(
            quasianalytic_sum(&fact, 2, 12),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn minorant_examples() {
        let r = log_convex_minorant(&[1.0, 1.0, 2.0, 6.0]).unwrap();
        assert_eq!(r.contact_set, vec![0, 1, 2, 3]);

        let r = log_convex_minorant(&[1.0, 10.0, 10.0, 1000.0]).unwrap();
        assert_eq!(r.contact_set, vec![0, 2, 3]);
        let want = [1.0, 10f64.sqrt(), 10.0, 1000.0];
        for (got, want) in values(&r.minorant).iter().zip(want) {
            assert!((got / want - 1.0).abs() < 1e-12, "{got} vs {want}");
        }

        let r = log_convex_minorant(&[5.0]).unwrap();
        assert_eq!(r.contact_set, vec![0]);
        assert!((r.minorant.value(0).unwrap() - 5.0).abs() < 1e-12);

        assert!(log_convex_minorant(&[]).is_err());
        assert!(log_convex_minorant(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn geometric_contact_includes_collinear_points() {
        let r = log_convex_minorant(&[1.0, 3.0, 9.0, 27.0]).unwrap();
        assert_eq!(r.contact_set, vec![0, 1, 2, 3]);
    }

    #[test]
    fn factorial_normalized_examples() {
        let fact = from_generator(&Generator::analytic(1.0).unwrap(), 30).unwrap();
        assert!(factorial_normalized(&fact).iter().all(|v| v.abs() < 1e-10));

        let geo = from_generator(&Generator::constant_ratio(PI).unwrap(), 6).unwrap();
        let m = factorial_normalized(&geo);
        let mut fact_j = 1.0;
        for (j, lm) in m.iter().enumerate() {
            if j > 0 {
                fact_j *= j as f64;
            }
            assert!((lm.exp() - PI.powi(j as i32) / fact_j).abs() < 1e-12);
        }

        let seq = LogConvexSequence::from_values(&[1.0, 10.0, 10.0, 1000.0]);
        // not log-convex: the raw sequence is rejected, its minorant is not
        assert!(seq.is_err());
        let raw = LogConvexSequence {
            log_m: [1.0f64, 10.0, 10.0, 1000.0]
                .iter()
                .map(|v| v.ln())
                .collect(),
            normalized: true,
            tail: Tail::Unspecified,
        };
        let m: Vec<f64> = factorial_normalized(&raw).iter().map(|v| v.exp()).collect();
        for (got, want) in m.iter().zip([1.0, 10.0, 5.0, 1000.0 / 6.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(
            gamma_sup(&Generator::analytic(2.0).unwrap(), 17.0).unwrap(),
            1.0
        );
        assert_eq!(
            gamma_sup(&Generator::constant_ratio(3.0).unwrap(), 5.0).unwrap(),
            0.0
        );

        // dense-scan oracle of s/((s+e) log(s+e)) on [1, 50]
        let gen = Generator::logarithmic(1.0, 1.0).unwrap();
        let oracle = (0..=490_000)
            .map(|i| 1.0 + i as f64 * 1e-4)
            .map(|s| 1.0 + s / ((s + E) * (s + E).ln()))
            .fold(f64::MIN, f64::max);
        let got = gamma_sup(&gen, 50.0).unwrap();
        assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
        assert!((got - 1.317_844_432_899_372_7).abs() < 1e-12);
        assert!(gamma_sup(&gen, 0.5).is_err());
    }

    #[test]
    fn gamma_tabulated_matches_segment_endpoint_oracle() {
        // on each linear piece s A'/A is monotone, so the supremum is a limit at a node
        let table = vec![1.0, 1.5, 4.0, 4.5, 9.0, 9.0, 20.0];
        let gen = Generator::tabulated(table.clone()).unwrap();
        let mut oracle: f64 = 0.0;
        for i in 1..table.len() {
            let d = table[i] - table[i - 1];
            oracle = oracle.max(i as f64 * d / table[i - 1]);
            oracle = oracle.max((i + 1) as f64 * d / table[i]);
        }
        let got = gamma_sup(&gen, table.len() as f64).unwrap();
        assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
    }

    #[test]
    fn big_gamma_examples() {
        assert!((big_gamma(0.0, GammaVariant::Degree).unwrap() - 218.392_600_145_6).abs() < 1e-6);
        assert!((big_gamma(1.0, GammaVariant::Degree).unwrap() - 593.652_636_798_5).abs() < 1e-6);
        assert!(
            (big_gamma(1.0, GammaVariant::Propagation).unwrap() - 455.799_601_927_8).abs() < 1e-6
        );
        assert!(big_gamma(-1.0, GammaVariant::Degree).is_err());
    }

    fn arb_generator() -> impl Strategy<Value = Generator> {
        prop_oneof![
            (0.1f64..5.0).prop_map(|c| Generator::Analytic { scale: c }),
            (0.1f64..5.0, 0.0f64..3.0)
                .prop_map(|(c, a)| Generator::Logarithmic { scale: c, alpha: a }),
            (0.1f64..50.0).prop_map(|a| Generator::ConstantRatio { a }),
            prop::collection::vec(0.01f64..10.0, 1..40).prop_map(|inc| {
                let mut acc = 0.0;
                Generator::Tabulated {
                    values: inc
                        .into_iter()
                        .map(|d| {
                            acc += d;
                            acc
                        })
                        .collect(),
                }
            }),
        ]
    }

    proptest! {
        #[test]
        fn generated_sequences_are_log_convex(gen in arb_generator(), count in 1usize..300) {
            let count = gen.table_len().map_or(count, |t| count.min(t + 1));
            let seq = from_generator(&gen, count).unwrap();
            prop_assert!(log_convex_in_log_domain(seq.log_values(), LOG_CONVEXITY_TOL));
        }

        #[test]
        fn gamma_sup_is_monotone_in_n(gen in arb_generator(), a in 1.0f64..30.0, b in 1.0f64..30.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(gamma_sup(&gen, lo).unwrap() <= gamma_sup(&gen, hi).unwrap() + 1e-9);
        }

        #[test]
        fn quasianalytic_sum_is_additive(lo in 1usize..40, mid_off in 0usize..40, hi_off in 1usize..40) {
            let seq = from_generator(&Generator::Logarithmic { scale: 1.3, alpha: 0.7 }, 200).unwrap();
            let mid = lo + mid_off;
            let hi = mid + hi_off;
            let whole = quasianalytic_sum(&seq, lo, hi).unwrap();
            let split = quasianalytic_sum(&seq, lo, mid).unwrap() + quasianalytic_sum(&seq, mid + 1, hi).unwrap();
            prop_assert!((whole - split).abs() <= 1e-14 * whole.max(1.0));
        }

        #[test]
        fn minorant_is_idempotent_and_below(logs in prop::collection::vec(-8.0f64..8.0, 1..30)) {
            let first = log_convex_minorant_log(&logs).unwrap();
            for (m, y) in first.minorant.log_values().iter().zip(&logs) {
                prop_assert!(m <= y);
            }
            prop_assert!(first.contact_set.contains(&0));
            prop_assert!(first.contact_set.contains(&(logs.len() - 1)));
            let second = log_convex_minorant_log(first.minorant.log_values()).unwrap();
            for (a, b) in first.minorant.log_values().iter().zip(second.minorant.log_values()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
