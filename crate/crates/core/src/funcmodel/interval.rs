use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// The two closed halves.
    pub fn halves(&self) -> (Interval, Interval) {
        let m = self.midpoint();
        (
            Interval { lo: self.lo, hi: m },
            Interval { lo: m, hi: self.hi },
        )
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = crate::Error;
    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

/// A finite union of disjoint closed subintervals of `[0, 1]` with positive
/// total length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalSet", into = "RawIntervalSet")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    measure: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntervalSet {
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<RawIntervalSet> for IntervalSet {
    type Error = crate::Error;
    fn try_from(raw: RawIntervalSet) -> Result<Self> {
        IntervalSet::new(raw.intervals.into_iter().map(|[a, b]| (a, b)).collect())
    }
}

impl From<IntervalSet> for RawIntervalSet {
    fn from(set: IntervalSet) -> Self {
        RawIntervalSet {
            intervals: set.intervals.into_iter().map(Into::into).collect(),
        }
    }
}

impl IntervalSet {
    /// Validates `a_i <= b_i < a_{i+1}`, endpoints in `[0, 1]`, measure > 0.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(domain("interval set must have at least one component"));
        }
        let mut out = Vec::with_capacity(intervals.len());
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a.is_finite() && b.is_finite()) || a > b {
                return Err(domain(format!(
                    "component {i} = [{a}, {b}] is not an interval"
                )));
            }
            if a < 0.0 || b > 1.0 {
                return Err(domain(format!("component {i} = [{a}, {b}] leaves [0, 1]")));
            }
            if let Some(prev) = out.last() {
                let prev: &Interval = prev;
                if prev.hi >= a {
                    return Err(domain(format!(
                        "components must be sorted and disjoint: [{}, {}] meets [{a}, {b}]",
                        prev.lo, prev.hi
                    )));
                }
            }
            out.push(Interval { lo: a, hi: b });
        }
        let measure: f64 = out.iter().map(Interval::len).sum();
        if !(measure > 0.0) {
            return Err(domain("interval set has zero measure"));
        }
        Ok(Self {
            intervals: out,
            measure,
        })
    }

    pub fn from_interval(iv: Interval) -> Result<Self> {
        Self::new(vec![(iv.lo, iv.hi)])
    }

    pub fn unit() -> Self {
        Self {
            intervals: vec![Interval::UNIT],
            measure: 1.0,
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn min(&self) -> f64 {
        self.intervals[0].lo
    }

    pub fn max(&self) -> f64 {
        self.intervals[self.intervals.len() - 1].hi
    }

    /// `|E ∩ iv|`.
    pub fn measure_within(&self, iv: &Interval) -> f64 {
        self.intervals
            .iter()
            .map(|c| (c.hi.min(iv.hi) - c.lo.max(iv.lo)).max(0.0))
            .sum()
    }

    pub fn is_within(&self, iv: &Interval) -> bool {
        iv.lo <= self.min() && self.max() <= iv.hi
    }

    /// The components of `E ∩ iv` (possibly degenerate), or `None` when the
    /// intersection has zero measure.
    pub fn restrict(&self, iv: &Interval) -> Option<IntervalSet> {
        let parts: Vec<(f64, f64)> = self
            .intervals
            .iter()
            .filter_map(|c| {
                let (a, b) = (c.lo.max(iv.lo), c.hi.min(iv.hi));
                (a <= b).then_some((a, b))
            })
            .collect();
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if last.1 >= a => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        IntervalSet::new(merged).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(IntervalSet::new(vec![(0.0, 0.25), (0.75, 1.0)]).is_ok());
        assert!(IntervalSet::new(vec![(0.5, 0.25)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 0.5), (0.5, 1.0)]).is_err());
        assert!(IntervalSet::new(vec![(0.0, 1.5)]).is_err());
        assert!(IntervalSet::new(vec![(0.3, 0.3)]).is_err());
        assert!(IntervalSet::new(vec![]).is_err());
    }

    #[test]
    fn measures() {
        let e = IntervalSet::new(vec![(0.0, 0.25), (0.75, 1.0)]).unwrap();
        assert_eq!(e.measure(), 0.5);
        assert_eq!(e.measure_within(&Interval::new(0.0, 0.5).unwrap()), 0.25);
        assert!((e.measure_within(&Interval::new(0.2, 0.8).unwrap()) - 0.1).abs() < 1e-15);
        let r = e.restrict(&Interval::new(0.1, 0.9).unwrap()).unwrap();
        assert_eq!(r.intervals().len(), 2);
        assert!((r.measure() - 0.3).abs() < 1e-15);
        assert!(e.restrict(&Interval::new(0.3, 0.7).unwrap()).is_none());
    }

    #[test]
    fn json_shape() {
        let e: IntervalSet =
            serde_json::from_str(r#"{"intervals":[[0.0,0.25],[0.75,1.0]]}"#).unwrap();
        assert_eq!(e.measure(), 0.5);
        assert_eq!(
            serde_json::to_string(&e).unwrap(),
            r#"{"intervals":[[0.0,0.25],[0.75,1.0]]}"#
        );
        assert!(serde_json::from_str::<IntervalSet>(r#"{"intervals":[[0.5,0.25]]}"#).is_err());
    }
}
