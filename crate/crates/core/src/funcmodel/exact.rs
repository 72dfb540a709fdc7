//! Exact rational polynomial arithmetic for zero counting: square-free
//! decomposition (Yun) and root isolation by Sturm-guided bisection.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

type Q = BigRational;

/// Dense polynomial over Q, coefficients from the constant term up, with no
/// trailing zeros (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct QPoly(Vec<Q>);

impl QPoly {
    fn trimmed(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        QPoly(c)
    }

    /// Exact conversion; `None` if any coefficient is not finite.
    pub fn from_f64(coeffs: &[f64]) -> Option<Self> {
        let c = coeffs
            .iter()
            .map(|&x| Q::from_float(x))
            .collect::<Option<Vec<_>>>()?;
        Some(Self::trimmed(c))
    }

    #[cfg(test)]
    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::trimmed(
            coeffs
                .iter()
                .map(|&c| Q::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &Q {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn derivative(&self) -> Self {
        Self::trimmed(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.lead().clone();
        QPoly(self.0.iter().map(|c| c / &lead).collect())
    }

    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = Q::zero();
        Self::trimmed(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) - other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    fn neg(&self) -> Self {
        QPoly(self.0.iter().map(|c| -c).collect())
    }

    fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.0.clone();
        if r.len() < d.0.len() {
            return (QPoly(Vec::new()), self.clone());
        }
        let dl = d.lead();
        let shift_max = r.len() - d.0.len();
        let mut q = vec![Q::zero(); shift_max + 1];
        for shift in (0..=shift_max).rev() {
            let top = &r[shift + d.0.len() - 1];
            if top.is_zero() {
                continue;
            }
            let f = top / dl;
            for (i, dc) in d.0.iter().enumerate() {
                r[shift + i] -= &f * dc;
            }
            q[shift] = f;
        }
        r.truncate(d.0.len() - 1);
        (Self::trimmed(q), Self::trimmed(r))
    }

    fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.div_rem(d);
        debug_assert!(r.is_zero());
        q
    }

    fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: returns `(factor, multiplicity)` with each factor
    /// square-free, pairwise coprime, and of positive degree.
    pub fn square_free_decomposition(&self) -> Vec<(QPoly, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a0 = Self::gcd(&f, &df);
        let mut b = f.div_exact(&a0);
        let c = df.div_exact(&a0);
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = Self::gcd(&b, &d);
            let b_next = b.div_exact(&a);
            let c_next = d.div_exact(&a);
            d = c_next.sub(&b_next.derivative());
            if a.degree() > 0 {
                out.push((a, i));
            }
            b = b_next;
            i += 1;
        }
        out
    }

    fn sturm_chain(&self) -> Vec<QPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain[chain.len() - 1].is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            chain.push(r.neg());
        }
        chain.pop();
        chain
    }

    /// Isolating intervals `(lo, hi]` of the distinct real roots in
    /// `[a, b]`; a root exactly at `a` is reported as the degenerate pair
    /// `(a, a)`. Requires a square-free polynomial.
    pub fn isolate_roots(&self, a: &Q, b: &Q) -> Vec<(Q, Q)> {
        let mut roots = Vec::new();
        if self.is_zero() || self.degree() == 0 || a > b {
            return roots;
        }
        let chain = self.sturm_chain();
        if self.eval(a).is_zero() {
            roots.push((a.clone(), a.clone()));
        }
        let va = variations(&chain, a);
        let vb = variations(&chain, b);
        let mut stack = vec![(a.clone(), va, b.clone(), vb)];
        let two = Q::from_integer(BigInt::from(2));
        while let Some((lo, vlo, hi, vhi)) = stack.pop() {
            let n = vlo - vhi;
            if n == 0 {
                continue;
            }
            if n == 1 {
                roots.push((lo, hi));
                continue;
            }
            let mid = (&lo + &hi) / &two;
            let vm = variations(&chain, &mid);
            stack.push((mid.clone(), vm, hi, vhi));
            stack.push((lo, vlo, mid, vm));
        }
        roots.sort_by(|x, y| x.0.cmp(&y.0));
        roots
    }
}

/// Sign variations of the Sturm chain at `x`, ignoring zeros. For a
/// square-free polynomial, `V(a) - V(b)` counts distinct roots in `(a, b]`.
fn variations(chain: &[QPoly], x: &Q) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Roots of `p` in `[a, b]` counted with multiplicity. `p` must be nonzero.
pub(crate) fn count_roots_with_multiplicity(p: &QPoly, a: &Q, b: &Q) -> usize {
    p.square_free_decomposition()
        .iter()
        .map(|(factor, mult)| mult * factor.isolate_roots(a, b).len())
        .sum()
}

pub(crate) fn rational(x: f64) -> Option<Q> {
    Q::from_float(x)
}
