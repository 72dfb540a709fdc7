//! Independent reference computations used by the suites.

use crate::sequences::LogConvexSequence;

/// Lower convex hull of `(j, y_j)` as the upper envelope of all support
/// lines through two sample points, together with the indices on the hull.
/// Quadratic in the number of lines times the length; meant for short inputs.
pub fn brute_force_minorant(y: &[f64], tol: f64) -> (Vec<f64>, Vec<usize>) {
    let n = y.len();
    if n == 1 {
        return (y.to_vec(), vec![0]);
    }
    let mut hull = vec![f64::NEG_INFINITY; n];
    for a in 0..n {
        for b in a + 1..n {
            let slope = (y[b] - y[a]) / (b - a) as f64;
            let line = |j: usize| y[a] + slope * (j as f64 - a as f64);
            let scale = y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            if (0..n).all(|j| y[j] >= line(j) - tol * scale) {
                for (j, h) in hull.iter_mut().enumerate() {
                    *h = h.max(line(j).min(y[j]));
                }
            }
        }
    }
    let contact = (0..n)
        .filter(|&j| y[j] - hull[j] <= tol * y[j].abs().max(1.0))
        .collect();
    (hull, contact)
}

/// `n*` of the flat-zero envelope by direct summation of the stored ratios
/// plus the known remainder; `None` when the tail diverges or is unknown.
pub fn envelope_exponent(seq: &LogConvexSequence, level: f64, remainder: f64) -> Option<usize> {
    let lm = seq.log_values();
    let ratios: Vec<f64> = (1..lm.len()).map(|j| (lm[j - 1] - lm[j]).exp()).collect();
    (0..=ratios.len())
        .find(|&n| ratios[n.min(ratios.len())..].iter().sum::<f64>() + remainder < level)
}

/// `H_n - H_k = Σ_{k < j <= n} 1/j`, the ratio sum of the factorial class.
pub fn harmonic_tail(k: u64, n: u64) -> f64 {
    (k + 1..=n).map(|j| 1.0 / j as f64).sum()
}

/// Largest `N` with `Σ_{k < j <= N} 1/j < e` for the factorial class.
pub fn factorial_degree(k: u64) -> u64 {
    let mut n = k;
    let mut s = 0.0;
    loop {
        s += 1.0 / (n + 1) as f64;
        if s >= std::f64::consts::E {
            return n;
        }
        n += 1;
    }
}
