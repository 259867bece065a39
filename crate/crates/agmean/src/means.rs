//! Bivariate means of positive reals: harmonic, geometric, arithmetic,
//! logarithmic, the arithmetic-geometric mean with its full iteration
//! trace, and the blended family
//!
//! ```text
//! Q_{t,s}(a, b) = G(ta + (1-t)b, tb + (1-t)a)^s * A(a, b)^(1-s)
//! ```
//!
//! All means here are symmetric and homogeneous of degree one.

use crate::elliptic;
use crate::error::{Error, Result};

/// Default relative gap at which the AGM iteration stops.
pub const AGM_TOL: f64 = 1e-16;

const AGM_MAX_ITERS: usize = 40;

/// An unordered pair of positive finite reals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivePair {
    a: f64,
    b: f64,
}

impl PositivePair {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite() {
            Ok(PositivePair { a, b })
        } else {
            Err(Error::domain(format!(
                "pair elements must be positive and finite, got ({a}, {b})"
            )))
        }
    }

    pub fn a(self) -> f64 {
        self.a
    }

    pub fn b(self) -> f64 {
        self.b
    }

    /// The same pair with the larger element first.
    pub fn ordered(self) -> Self {
        if self.a >= self.b {
            self
        } else {
            PositivePair {
                a: self.b,
                b: self.a,
            }
        }
    }
}

/// Harmonic mean `2ab / (a + b)`.
pub fn harmonic(p: PositivePair) -> f64 {
    2.0 * p.a * p.b / (p.a + p.b)
}

/// Geometric mean `sqrt(ab)`.
pub fn geometric(p: PositivePair) -> f64 {
    (p.a * p.b).sqrt()
}

/// Arithmetic mean `(a + b) / 2`.
pub fn arithmetic(p: PositivePair) -> f64 {
    (p.a + p.b) / 2.0
}

/// Logarithmic mean `(a - b) / (ln a - ln b)`, extended continuously to
/// the diagonal.
///
/// The denominator is evaluated as `ln_1p((a - b) / b)`, which is the
/// same quantity without the catastrophic cancellation of subtracting
/// two logarithms of nearby arguments. Once the relative difference
/// drops below `1e-10` even that quotient is `0/0` to working
/// precision, so the evaluation switches to `A * y / arth(y)` with
/// `y = (a - b) / (a + b)`, where `arth` is in its small-argument
/// series regime.
pub fn logarithmic(p: PositivePair) -> f64 {
    let (a, b) = (p.a, p.b);
    if a == b {
        return a;
    }
    if (a - b).abs() <= 1e-10 * a.max(b) {
        let am = arithmetic(p);
        let y = (a - b) / (a + b);
        if y == 0.0 {
            return am;
        }
        let t = elliptic::arth(y).expect("contrast of a positive pair is below one");
        return am * y / t;
    }
    (a - b) / ((a - b) / b).ln_1p()
}

/// Iteration trace of the arithmetic-geometric mean.
///
/// Index 0 holds the (ordered) inputs; entry `n` holds the state after
/// `n` iterations. `a_seq` is nonincreasing, `b_seq` nondecreasing, and
/// every entry brackets the limit value.
#[derive(Clone, Debug)]
pub struct AgmTrace {
    a_seq: Vec<f64>,
    b_seq: Vec<f64>,
    value: f64,
    iterations: usize,
}

impl AgmTrace {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn a_seq(&self) -> &[f64] {
        &self.a_seq
    }

    pub fn b_seq(&self) -> &[f64] {
        &self.b_seq
    }
}

/// Arithmetic-geometric mean: iterates `(a, b) <- ((a+b)/2, sqrt(ab))`
/// until `a - b <= tol * a` and returns the full trace, with
/// `(a + b) / 2` of the final state as the value.
///
/// Convergence is quadratic; the iteration cap exists only to convert a
/// logic error into a report instead of a hang. If the gap stops
/// shrinking at the rounding floor before meeting an extremely small
/// `tol`, the iteration stops there.
pub fn agm(p: PositivePair, tol: f64) -> Result<AgmTrace> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::domain(format!(
            "agm tolerance must be positive and finite, got {tol}"
        )));
    }
    let p = p.ordered();
    let (mut a, mut b) = (p.a, p.b);
    let mut a_seq = vec![a];
    let mut b_seq = vec![b];
    let mut iterations = 0usize;
    let mut gap = a - b;
    while gap > tol * a {
        if iterations == AGM_MAX_ITERS {
            return Err(Error::Convergence {
                max_iters: AGM_MAX_ITERS,
            });
        }
        let mid = 0.5 * (a + b);
        let geo = (a * b).sqrt();
        a = mid.max(geo);
        b = mid.min(geo);
        iterations += 1;
        a_seq.push(a);
        b_seq.push(b);
        let next_gap = a - b;
        if next_gap >= gap {
            break; // the gap stalled at the rounding floor
        }
        gap = next_gap;
    }
    Ok(AgmTrace {
        value: 0.5 * (a + b),
        a_seq,
        b_seq,
        iterations,
    })
}

/// AGM limit value without trace bookkeeping, for hot paths.
pub(crate) fn agm_limit(a0: f64, b0: f64) -> Result<f64> {
    let (mut a, mut b) = if a0 >= b0 { (a0, b0) } else { (b0, a0) };
    if !(b > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!(
            "agm requires positive finite inputs, got ({a0}, {b0})"
        )));
    }
    let mut iterations = 0usize;
    let mut gap = a - b;
    while gap > AGM_TOL * a {
        if iterations == AGM_MAX_ITERS {
            return Err(Error::Convergence {
                max_iters: AGM_MAX_ITERS,
            });
        }
        let mid = 0.5 * (a + b);
        let geo = (a * b).sqrt();
        a = mid.max(geo);
        b = mid.min(geo);
        iterations += 1;
        let next_gap = a - b;
        if next_gap >= gap {
            break;
        }
        gap = next_gap;
    }
    Ok(0.5 * (a + b))
}

/// The blended mean `Q_{t,s}`: geometric mean of the cross-blends
/// `ta + (1-t)b` and `tb + (1-t)a`, raised to `s`, times the arithmetic
/// mean raised to `1 - s`.
///
/// Evaluated as `A * (G/A)^s` with the power in log space. The blends
/// share the pair's arithmetic mean, so the ratio `G/A` is scale free:
/// the exponent stays small for large `s`, homogeneity holds to
/// rounding error, and the intermediate product cannot overflow.
/// At `s = 1` this is the geometric mean of the blends, at `s = 2`
/// their harmonic mean, and at `t = 1/2` the arithmetic mean of the
/// original pair.
pub fn q_mean(t: f64, s: f64, p: PositivePair) -> Result<f64> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::domain(format!(
            "q_mean requires t in (0, 1/2], got {t}"
        )));
    }
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::domain(format!("q_mean requires s >= 1, got {s}")));
    }
    let (a, b) = (p.a, p.b);
    let mean = arithmetic(p);
    let ratio_ab = (t * a + (1.0 - t) * b) / mean;
    let ratio_ba = (t * b + (1.0 - t) * a) / mean;
    let half_log = 0.5 * (ratio_ab * ratio_ba).ln();
    Ok(mean * (s * half_log).exp())
}

/// Normalized contrast `x = (a - b) / (a + b)` of an ordered pair,
/// the modulus under which the mean comparisons reduce to one variable.
pub fn normalized_contrast(p: PositivePair) -> Result<elliptic::Modulus> {
    if p.a < p.b {
        return Err(Error::domain(format!(
            "normalized_contrast requires a >= b, got ({}, {})",
            p.a, p.b
        )));
    }
    elliptic::Modulus::new((p.a - p.b) / (p.a + p.b))
}

#[cfg(test)]
// Frozen reference values keep every digit of the true quantity so the
// constant documents what the tolerance is measured against.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::elliptic::Modulus;
    use std::f64::consts::{E, PI};

    fn pair(a: f64, b: f64) -> PositivePair {
        PositivePair::new(a, b).unwrap()
    }

    fn assert_rel(actual: f64, expected: f64, tol: f64, what: &str) {
        let rel = (actual - expected).abs() / expected.abs().max(1e-300);
        assert!(
            rel <= tol,
            "{what}: got {actual}, want {expected} (rel err {rel:e} > {tol:e})"
        );
    }

    #[test]
    fn pair_rejects_nonpositive_and_nonfinite() {
        assert!(PositivePair::new(0.0, 1.0).is_err());
        assert!(PositivePair::new(1.0, -2.0).is_err());
        assert!(PositivePair::new(f64::NAN, 1.0).is_err());
        assert!(PositivePair::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn ordered_puts_larger_first() {
        let p = pair(2.0, 5.0).ordered();
        assert_eq!((p.a(), p.b()), (5.0, 2.0));
        let q = pair(5.0, 2.0).ordered();
        assert_eq!((q.a(), q.b()), (5.0, 2.0));
    }

    #[test]
    fn simple_mean_values() {
        assert_eq!(harmonic(pair(3.0, 3.0)), 3.0);
        assert_rel(harmonic(pair(1.0, 3.0)), 1.5, 1e-15, "H(1,3)");
        assert_eq!(geometric(pair(7.0, 7.0)), 7.0);
        assert_eq!(geometric(pair(1.0, 4.0)), 2.0);
        assert_eq!(geometric(pair(2.0, 8.0)), 4.0);
        assert_eq!(arithmetic(pair(3.0, 3.0)), 3.0);
        assert_eq!(arithmetic(pair(1.0, 3.0)), 2.0);
        assert_rel(arithmetic(pair(0.1, 0.3)), 0.2, 1e-15, "A(0.1,0.3)");
    }

    #[test]
    fn logarithmic_closed_forms() {
        assert_rel(logarithmic(pair(1.0, E)), E - 1.0, 1e-15, "L(1,e)");
        assert_eq!(logarithmic(pair(4.2, 4.2)), 4.2);
        // L(2,8) = 6/ln 4
        assert_rel(
            logarithmic(pair(2.0, 8.0)),
            4.3280851226668902221,
            1e-15,
            "L(2,8)",
        );
        // symmetric and positive either way around
        assert_eq!(logarithmic(pair(2.0, 8.0)), logarithmic(pair(8.0, 2.0)));
    }

    #[test]
    fn logarithmic_is_smooth_across_the_branch() {
        // the quotient and series branches must agree where they meet
        let base = 3.0;
        for &eps in &[1e-9, 1e-10, 1e-11, 1e-13] {
            let l = logarithmic(pair(base, base * (1.0 + eps)));
            // L(a, a(1+eps)) = a * eps / ln(1+eps) ~ a (1 + eps/2)
            let want = base * (1.0 + eps / 2.0);
            assert_rel(l, want, 1e-13, "L near the diagonal");
        }
    }

    #[test]
    fn agm_fixed_point_and_first_step() {
        let t = agm(pair(4.0, 4.0), AGM_TOL).unwrap();
        assert_eq!(t.value(), 4.0);
        assert_eq!(t.iterations(), 0);

        let t = agm(pair(24.0, 6.0), AGM_TOL).unwrap();
        assert_eq!(t.a_seq()[1], 15.0);
        assert_eq!(t.b_seq()[1], 12.0);
        assert_rel(t.value(), 13.458171481725615421, 1e-15, "agm(24,6)");
        assert!(t.iterations() <= 8, "quadratic convergence expected");
    }

    #[test]
    fn agm_value_reproduces_elliptic_k() {
        // pi / (2 agm(1, 0.5)) = K(sqrt(0.75))
        let v = agm(pair(1.0, 0.5), AGM_TOL).unwrap().value();
        assert_rel(v, 0.72839551552345343459, 1e-15, "agm(1,0.5)");
        let k = elliptic::ellip_k(Modulus::new(0.75f64.sqrt()).unwrap()).unwrap();
        assert_rel(PI / (2.0 * v), k, 1e-12, "Gaussian identity at r = 0.5");
    }

    #[test]
    fn agm_trace_brackets_the_value() {
        for &(a, b) in &[(24.0, 6.0), (1.0, 0.5), (1e-6, 1e6), (5.0, 4.999)] {
            let t = agm(pair(a, b), AGM_TOL).unwrap();
            let v = t.value();
            for (an, bn) in t.a_seq().iter().zip(t.b_seq()) {
                assert!(
                    *bn <= v * (1.0 + 1e-15) && v * (1.0 - 1e-15) <= *an,
                    "trace must bracket the limit: {bn} <= {v} <= {an}"
                );
            }
            for w in t.a_seq().windows(2) {
                assert!(w[1] <= w[0], "a sequence must not increase");
            }
            for w in t.b_seq().windows(2) {
                assert!(w[1] >= w[0] * (1.0 - 1e-15), "b sequence must not decrease");
            }
        }
    }

    #[test]
    fn agm_accepts_unordered_input() {
        let up = agm(pair(6.0, 24.0), AGM_TOL).unwrap();
        let down = agm(pair(24.0, 6.0), AGM_TOL).unwrap();
        assert_eq!(up.value(), down.value());
        assert_eq!(up.a_seq(), down.a_seq());
    }

    #[test]
    fn agm_rejects_bad_tolerance() {
        assert!(agm(pair(1.0, 2.0), 0.0).is_err());
        assert!(agm(pair(1.0, 2.0), -1e-9).is_err());
        assert!(agm(pair(1.0, 2.0), f64::NAN).is_err());
    }

    #[test]
    fn q_mean_special_cases() {
        let p = pair(2.0, 8.0);
        for &t in &[0.1, 0.25, 0.4] {
            let blends = pair(t * 2.0 + (1.0 - t) * 8.0, t * 8.0 + (1.0 - t) * 2.0);
            assert_rel(
                q_mean(t, 1.0, p).unwrap(),
                geometric(blends),
                1e-14,
                "Q at s = 1 is G of the blends",
            );
            assert_rel(
                q_mean(t, 2.0, p).unwrap(),
                harmonic(blends),
                1e-14,
                "Q at s = 2 is H of the blends",
            );
        }
        for &s in &[1.0, 2.0, 7.5, 40.0] {
            assert_rel(
                q_mean(0.5, s, p).unwrap(),
                arithmetic(p),
                1e-13,
                "Q at t = 1/2 is the arithmetic mean",
            );
        }
    }

    #[test]
    fn q_mean_reference_value() {
        let v = q_mean(0.2, 1.5, pair(2.0, 8.0)).unwrap();
        assert_rel(v, 4.5056677770440862942, 1e-14, "Q_{0.2,1.5}(2,8)");
    }

    #[test]
    fn q_mean_is_strictly_increasing_in_t() {
        let p = pair(1.0, 5.0);
        for &s in &[1.0, 1.5, 2.0, 10.0] {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..=10 {
                let t = 0.05 * i as f64;
                let v = q_mean(t, s, p).unwrap();
                assert!(v > prev, "Q must increase in t at (t, s) = ({t}, {s})");
                prev = v;
            }
        }
    }

    #[test]
    fn q_mean_domain_errors() {
        let p = pair(1.0, 2.0);
        assert!(q_mean(0.0, 1.0, p).is_err());
        assert!(q_mean(0.6, 1.0, p).is_err());
        assert!(q_mean(-0.1, 1.0, p).is_err());
        assert!(q_mean(0.2, 0.5, p).is_err());
        assert!(q_mean(0.2, f64::NAN, p).is_err());
    }

    #[test]
    fn normalized_contrast_values() {
        assert_eq!(normalized_contrast(pair(3.0, 1.0)).unwrap().value(), 0.5);
        assert_eq!(normalized_contrast(pair(2.5, 2.5)).unwrap().value(), 0.0);
        assert!(normalized_contrast(pair(1.0, 3.0)).is_err());
        for i in 1..10 {
            let x = i as f64 / 10.0;
            let got = normalized_contrast(pair(1.0 + x, 1.0 - x)).unwrap().value();
            assert_rel(got, x, 1e-14, "contrast of (1+x, 1-x)");
        }
    }
}
