//! Even power series `Σ c_j x^j` with `c_j = exp(-C j / log(j + e))`,
//! truncated at order `K` with a certified bound on the discarded tail.

use std::f64::consts::E;

use crate::error::{domain, Result};

/// Default constant; the smallest power of two passing [`domination_check`]
/// for `n <= 20` and `K = 400`.
pub const DEFAULT_NONEXTENDABLE_C: f64 = 2.0;
pub const DEFAULT_TRUNCATION: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    c: f64,
    truncation: usize,
    scale: f64,
    /// `ln c_j` for `j <= K`; `-inf` for odd `j`.
    log_coeffs: Vec<f64>,
    /// `ln j!` for `j <= K`.
    log_fact: Vec<f64>,
}

/// `ln c_j` of the coefficient rule, ignoring parity.
pub fn log_coefficient(c: f64, j: usize) -> f64 {
    let j = j as f64;
    -c * j / (j + E).ln()
}

/// `ln M_n` for the regularized class `M_n = n! (log(n + e))^n`.
pub fn regularized_log_m(n: usize) -> f64 {
    ln_factorial(n) + n as f64 * (n as f64 + E).ln().ln()
}

pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

impl PowerSeries {
    pub fn nonextendable(c: f64, truncation: usize) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("C must be positive, got {c}")));
        }
        if truncation < 10 || !truncation.is_multiple_of(2) {
            return Err(domain(format!(
                "K must be even and at least 10, got {truncation}"
            )));
        }
        let log_coeffs = (0..=truncation)
            .map(|j| {
                if j % 2 == 0 {
                    log_coefficient(c, j)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let mut log_fact = Vec::with_capacity(truncation + 1);
        let mut acc = 0.0;
        for j in 0..=truncation {
            if j > 1 {
                acc += (j as f64).ln();
            }
            log_fact.push(acc);
        }
        Ok(Self {
            c,
            truncation,
            scale: 1.0,
            log_coeffs,
            log_fact,
        })
    }

    /// The same series multiplied by a positive constant.
    pub fn scaled(mut self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(domain(format!("scale must be positive, got {factor}")));
        }
        self.scale *= factor;
        Ok(self)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `c_j` of the (unscaled) series, zero for odd `j`.
    pub fn coefficient(&self, j: usize) -> f64 {
        if j % 2 == 1 {
            0.0
        } else {
            log_coefficient(self.c, j).exp()
        }
    }

    /// Sign and natural log of `|T^{(n)}(x)|` where `T` is the scaled
    /// truncation. All coefficients are nonnegative, so on `[0, 1]` the
    /// truncated derivative is nonnegative and at most the true one.
    pub(crate) fn truncated_log_derivative(&self, n: usize, x: f64) -> f64 {
        if n > self.truncation {
            return f64::NEG_INFINITY;
        }
        let lx = x.abs().ln();
        let mut terms = Vec::with_capacity(self.truncation - n + 1);
        for j in n..=self.truncation {
            let lc = self.log_coeffs[j];
            if lc == f64::NEG_INFINITY {
                continue;
            }
            let power = (j - n) as f64;
            let lp = if power == 0.0 { 0.0 } else { power * lx };
            if lp == f64::NEG_INFINITY {
                continue;
            }
            terms.push(lc + self.log_fact[j] - self.log_fact[j - n] + lp);
        }
        log_sum_exp(&terms) + self.scale.ln()
    }

    /// Signed value of the truncated derivative at `x`, for any real `x`.
    pub(crate) fn truncated_derivative(&self, n: usize, x: f64) -> f64 {
        if x >= 0.0 {
            return self.truncated_log_derivative(n, x).exp();
        }
        // Even series: T^{(n)}(-x) = (-1)^n T^{(n)}(x).
        let v = self.truncated_log_derivative(n, -x).exp();
        if n % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Natural log of a bound on `sup_{[0,1]} |f^{(n)} - T^{(n)}|`, i.e. of
    /// `scale · Σ_{j > K, j even} j^n c_j`.
    pub fn log_tail_bound(&self, n: usize) -> f64 {
        log_power_sum(self.c, n, self.truncation + 2) + self.scale.ln()
    }

    pub fn tail_bound(&self, n: usize) -> f64 {
        self.log_tail_bound(n).exp()
    }

    /// Natural log of a bound on `sup_{[0,1]} |f^{(n)}|`, attained at `x = 1`
    /// by the truncation and widened by the tail.
    pub fn log_derivative_bound(&self, n: usize) -> f64 {
        log_add(
            self.truncated_log_derivative(n, 1.0),
            self.log_tail_bound(n),
        )
    }
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ_{j >= start, j even} j^n c_j` (`start` even), bounded above.
///
/// Terms are summed exactly past the peak of `j^n c_j` until they are
/// negligible; the rest is covered by dyadic blocks `[a, 2a]`, each bounded
/// by `(a + 1) (2a)^n exp(-C a / log(2a + e))`.
fn log_power_sum(c: f64, n: usize, start: usize) -> f64 {
    let nf = n as f64;
    let term = |j: f64| nf * j.ln() - c * j / (j + E).ln();
    let mut terms = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut j = start;
    let mut running = f64::NEG_INFINITY;
    loop {
        let t = term(j as f64);
        terms.push(t);
        running = log_add(running, t);
        let decreasing = t < prev;
        prev = t;
        j += 2;
        if decreasing && t < running - 60.0 {
            break;
        }
        if j > 50_000_000 {
            break;
        }
    }
    let mut total = running;
    let mut a = j as f64;
    loop {
        let block = (a + 1.0).ln() + nf * (2.0 * a).ln() - c * a / (2.0 * a + E).ln();
        total = log_add(total, block);
        let next = (2.0 * a + 1.0).ln() + nf * (4.0 * a).ln() - c * 2.0 * a / (4.0 * a + E).ln();
        if block < total - 70.0 && next < block - 10.0 {
            // Remaining blocks shrink at least geometrically by e^{-10}.
            total = log_add(total, next + (1.0 / (1.0 - (-10.0f64).exp())).ln());
            break;
        }
        a *= 2.0;
    }
    total
}

/// One row of the domination check `Σ_{j=1}^{K} j^n c_j <= M_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationRow {
    pub n: usize,
    pub log_sum: f64,
    pub log_bound: f64,
}

impl DominationRow {
    pub fn holds(&self) -> bool {
        self.log_sum <= self.log_bound
    }
}

/// Compares `Σ_{j=1}^{K} j^n c_j` (all `j`, not only even ones) against the
/// regularized `M_n` for `n = 0..=n_max`.
pub fn domination_check(c: f64, truncation: usize, n_max: usize) -> Vec<DominationRow> {
    (0..=n_max)
        .map(|n| {
            let terms: Vec<f64> = (1..=truncation)
                .map(|j| n as f64 * (j as f64).ln() + log_coefficient(c, j))
                .collect();
            DominationRow {
                n,
                log_sum: log_sum_exp(&terms),
                log_bound: regularized_log_m(n),
            }
        })
        .collect()
}

/// Smallest `C` in `{1, 2, 4, …, 2^20}` for which the domination check
/// holds for every `n <= n_max`.
pub fn search_constant(truncation: usize, n_max: usize) -> Option<f64> {
    (0..=20).map(|k| 2f64.powi(k)).find(|&c| {
        domination_check(c, truncation, n_max)
            .iter()
            .all(DominationRow::holds)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients() {
        for c in [0.5, 1.0, 2.0] {
            let s = PowerSeries::nonextendable(c, 400).unwrap();
            assert_eq!(s.coefficient(0), 1.0);
            assert_eq!(s.coefficient(7), 0.0);
        }
        let root = log_coefficient(1.0, 100).exp().powf(0.01);
        let direct = (-1.0 / (100.0 + E).ln()).exp();
        assert!((root - direct).abs() < 1e-14);
        assert!((root - 0.805_823_997_74).abs() < 1e-10);
    }

    #[test]
    fn invalid_parameters() {
        assert!(PowerSeries::nonextendable(0.0, 400).is_err());
        assert!(PowerSeries::nonextendable(-1.0, 400).is_err());
        assert!(PowerSeries::nonextendable(1.0, 9).is_err());
        assert!(PowerSeries::nonextendable(1.0, 11).is_err());
        assert!(PowerSeries::nonextendable(1.0, 10).is_ok());
    }

    #[test]
    fn default_constant_is_smallest_passing_power_of_two() {
        assert_eq!(
            search_constant(DEFAULT_TRUNCATION, 20),
            Some(DEFAULT_NONEXTENDABLE_C)
        );
        assert!(!domination_check(1.0, 400, 20)
            .iter()
            .all(DominationRow::holds));
    }

    #[test]
    fn domination_matches_plain_summation() {
        for row in domination_check(2.0, 400, 20) {
            let plain: f64 = (1..=400)
                .map(|j| {
                    (j as f64).powi(row.n as i32) * (-2.0 * j as f64 / (j as f64 + E).ln()).exp()
                })
                .sum();
            assert!((row.log_sum - plain.ln()).abs() < 1e-12, "n={}", row.n);
            let bound = (1..=row.n).map(|k| k as f64).product::<f64>()
                * (row.n as f64 + E).ln().powi(row.n as i32);
            assert!((row.log_bound - bound.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_bounds_cover_the_discarded_terms() {
        // Truncate at K and compare against a much longer truncation.
        for (c, k) in [(2.0, 10), (2.0, 40), (1.0, 60), (0.5, 100)] {
            let short = PowerSeries::nonextendable(c, k).unwrap();
            let long = PowerSeries::nonextendable(c, 6000).unwrap();
            for n in [0, 1, 3, 8] {
                let total = long.truncated_log_derivative(n, 1.0).exp();
                let gap = total - short.truncated_log_derivative(n, 1.0).exp();
                let bound = short.tail_bound(n);
                // The difference of two sums carries rounding of order 1e-15 * total.
                assert!(
                    gap <= bound * (1.0 + 1e-12) + 1e-14 * total,
                    "C={c} K={k} n={n}: {gap} > {bound}"
                );
                // The bound is Σ_{j>K, j even} j^n c_j; compare with brute force.
                let brute: f64 = (k + 2..200_000)
                    .step_by(2)
                    .map(|j| (n as f64 * (j as f64).ln() + log_coefficient(c, j)).exp())
                    .sum();
                assert!(
                    bound >= brute * (1.0 - 1e-12),
                    "C={c} K={k} n={n}: {bound} < {brute}"
                );
                assert!(
                    bound <= brute * 1.01,
                    "C={c} K={k} n={n}: {bound} loose vs {brute}"
                );
            }
        }
    }

    #[test]
    fn derivative_values_match_direct_sum() {
        let s = PowerSeries::nonextendable(2.0, 20)
            .unwrap()
            .scaled(0.5)
            .unwrap();
        for &x in &[0.0, 0.3, 1.0, -0.4] {
            for n in 0..4 {
                let mut direct = 0.0;
                for j in (n..=20).filter(|j| j % 2 == 0) {
                    let falling: f64 = (j - n + 1..=j).map(|k| k as f64).product();
                    direct += s.coefficient(j) * falling * f64::powi(x, (j - n) as i32);
                }
                direct *= 0.5;
                let got = s.truncated_derivative(n, x);
                assert!(
                    (got - direct).abs() <= 1e-13 * direct.abs().max(1.0),
                    "x={x} n={n}"
                );
            }
        }
    }
}
