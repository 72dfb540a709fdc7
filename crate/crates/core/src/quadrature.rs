//! Adaptive interval-halving quadrature.
//!
//! Each panel is accepted once its trapezoid and midpoint estimates agree to
//! within the panel's share of the tolerance; the returned value on an
//! accepted panel is the Simpson combination `(T + 2M) / 3`.

use crate::error::{domain, Result};

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum over accepted panels of `|T - M|`, an upper estimate of the error.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`. `a > b` flips
/// the sign; `a == b` returns zero without evaluating `f`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("integration bounds must be finite"));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive"));
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut acc = Acc {
        value: 0.0,
        err: 0.0,
        evals: 3,
    };
    let (flo, fhi) = (f(lo), f(hi));
    let fmid = f(0.5 * (lo + hi));
    panel(&f, lo, hi, flo, fmid, fhi, tol, 0, &mut acc)?;
    Ok(Quadrature {
        value: sign * acc.value,
        error_estimate: acc.err,
        evaluations: acc.evals,
    })
}

struct Acc {
    value: f64,
    err: f64,
    evals: usize,
}

#[allow(clippy::too_many_arguments)]
fn panel(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) -> Result<()> {
    let w = b - a;
    let trap = 0.5 * w * (fa + fb);
    let mid = w * fm;
    if !(trap.is_finite() && mid.is_finite()) {
        return Err(domain(format!("integrand is not finite on [{a}, {b}]")));
    }
    let diff = (trap - mid).abs();
    if diff <= tol || depth >= MAX_DEPTH {
        acc.value += (trap + 2.0 * mid) / 3.0;
        acc.err += diff;
        return Ok(());
    }
    let m = 0.5 * (a + b);
    let (fl, fr) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    acc.evals += 2;
    panel(f, a, m, fa, fl, fm, 0.5 * tol, depth + 1, acc)?;
    panel(f, m, b, fm, fr, fb, 0.5 * tol, depth + 1, acc)
}
