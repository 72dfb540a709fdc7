//! Seeded random inputs: interval sets, polynomials and sequences.

use rand::Rng;

use crate::funcmodel::{Interval, IntervalSet, Polynomial};

/// A union of at most `max_components` closed intervals inside `iv` with
/// measure at least `min_measure`, by rejection sampling of sorted endpoints.
pub fn random_set(
    rng: &mut impl Rng,
    iv: Interval,
    max_components: usize,
    min_measure: f64,
) -> IntervalSet {
    assert!(
        min_measure < iv.len(),
        "minimum measure must be below the interval length"
    );
    loop {
        let c = rng.random_range(1..=max_components);
        let mut ends: Vec<f64> = (0..2 * c)
            .map(|_| rng.random_range(iv.lo..=iv.hi))
            .collect();
        ends.sort_by(f64::total_cmp);
        let parts: Vec<(f64, f64)> = ends.chunks(2).map(|w| (w[0], w[1])).collect();
        if let Ok(set) = IntervalSet::new(parts) {
            if set.measure() >= min_measure {
                return set;
            }
        }
    }
}

/// Degree uniform in `0..=max_degree`, coefficients uniform in `[-1, 1]`,
/// nonzero leading coefficient.
pub fn random_polynomial(rng: &mut impl Rng, max_degree: usize) -> Polynomial {
    let d = rng.random_range(0..=max_degree);
    let mut coeffs: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..=1.0)).collect();
    if coeffs[d] == 0.0 {
        coeffs[d] = 1.0;
    }
    Polynomial::new(coeffs).expect("finite coefficients")
}

/// `log M_j` uniform in `[-5, 5]`, length uniform in `1..=max_len`.
pub fn random_log_sequence(rng: &mut impl Rng, max_len: usize) -> Vec<f64> {
    let n = rng.random_range(1..=max_len);
    (0..n).map(|_| rng.random_range(-5.0..=5.0)).collect()
}
