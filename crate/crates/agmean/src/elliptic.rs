//! Complete elliptic integrals of the first and second kind, the Gauss
//! hypergeometric series that defines them, and the inverse hyperbolic
//! tangent.
//!
//! Throughout, `x` is the modulus:
//!
//! ```text
//! K(x) = integral(0 to pi/2) of dt / sqrt(1 - x^2 sin^2(t))
//! E(x) = integral(0 to pi/2) of sqrt(1 - x^2 sin^2(t)) dt
//! ```
//!
//! `K` is evaluated through the arithmetic-geometric mean,
//! `K(x) = pi / (2 agm(1, sqrt(1 - x^2)))`, with the hypergeometric
//! series `K(x) = (pi/2) 2F1(1/2, 1/2; 1; x^2)` kept as an independent
//! second route.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::means;

/// Computes `1 - x^2` as `(1 - x)(1 + x)` to keep precision near `x = 1`.
pub(crate) fn one_minus_sq(x: f64) -> f64 {
    (1.0 - x) * (1.0 + x)
}

/// Elliptic modulus, a value in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulus(f64);

impl Modulus {
    /// Validates `0 <= x <= 1`.
    pub fn new(x: f64) -> Result<Self> {
        if x.is_finite() && (0.0..=1.0).contains(&x) {
            Ok(Modulus(x))
        } else {
            Err(Error::domain(format!("modulus must lie in [0, 1], got {x}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Truncation control for hypergeometric series evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConfig {
    /// Stop once the next term is below `rel_tol` times the partial sum.
    pub rel_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl SeriesConfig {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) {
            return Err(Error::domain(format!(
                "series rel_tol must be positive and finite, got {rel_tol}"
            )));
        }
        if max_terms == 0 {
            return Err(Error::domain("series max_terms must be at least 1"));
        }
        Ok(SeriesConfig { rel_tol, max_terms })
    }
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            rel_tol: 1e-16,
            max_terms: 10_000,
        }
    }
}

/// A truncated series value together with how the truncation went.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// Number of terms accumulated, counting the leading one.
    pub terms: usize,
    /// Whether the relative tail bound was met within `max_terms`.
    pub converged: bool,
}

/// Gauss hypergeometric function `2F1(a, b; c; x)` by direct summation,
/// valid for `|x| < 1`.
///
/// The term ratio is rational in the index, so each term is obtained from
/// the previous one with four multiplies. If `a` or `b` is a nonpositive
/// integer the series terminates and the exact polynomial value is
/// returned.
pub fn hyp2f1(a: f64, b: f64, c: f64, x: f64, config: &SeriesConfig) -> Result<SeriesSum> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::domain("hypergeometric parameters must be finite"));
    }
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::domain(format!(
            "hypergeometric series undefined for nonpositive integer c = {c}"
        )));
    }
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(Error::domain(format!(
            "hypergeometric series requires |x| < 1, got {x}"
        )));
    }
    let mut sum = 1.0;
    let mut term = 1.0;
    for n in 0..config.max_terms.saturating_sub(1) {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * x;
        sum += term;
        if term.abs() <= config.rel_tol * sum.abs() {
            return Ok(SeriesSum {
                value: sum,
                terms: n + 2,
                converged: true,
            });
        }
    }
    Ok(SeriesSum {
        value: sum,
        terms: config.max_terms,
        converged: false,
    })
}

/// Complete elliptic integral of the first kind, by the
/// arithmetic-geometric mean: `K(x) = pi / (2 agm(1, sqrt(1 - x^2)))`.
///
/// Errors when `x = 1`, where `K` diverges.
pub fn ellip_k(x: Modulus) -> Result<f64> {
    let xv = x.value();
    if xv >= 1.0 {
        return Err(Error::domain("ellip_k requires x < 1; K diverges at x = 1"));
    }
    let m = means::agm_limit(1.0, one_minus_sq(xv).sqrt())?;
    Ok(PI / (2.0 * m))
}

/// Complete elliptic integral of the first kind through the
/// hypergeometric series `(pi/2) 2F1(1/2, 1/2; 1; x^2)`.
///
/// Slower than [`ellip_k`] and kept as an independent route for
/// cross-checking; near `x = 1` the term ratio approaches one and the
/// cap in `config` may be reached before the tolerance is.
pub fn ellip_k_series(x: Modulus, config: &SeriesConfig) -> Result<SeriesSum> {
    let xv = x.value();
    if xv >= 1.0 {
        return Err(Error::domain("ellip_k requires x < 1; K diverges at x = 1"));
    }
    let f = hyp2f1(0.5, 0.5, 1.0, xv * xv, config)?;
    Ok(SeriesSum {
        value: FRAC_PI_2 * f.value,
        ..f
    })
}

/// Complete elliptic integral of the second kind,
/// `E(x) = (pi/2) 2F1(-1/2, 1/2; 1; x^2)`, with `E(1) = 1` exactly.
pub fn ellip_e(x: Modulus) -> Result<f64> {
    Ok(ellip_e_series(x, &SeriesConfig::default())?.value)
}

/// Series form of [`ellip_e`] with explicit truncation control.
pub fn ellip_e_series(x: Modulus, config: &SeriesConfig) -> Result<SeriesSum> {
    let xv = x.value();
    if xv == 1.0 {
        return Ok(SeriesSum {
            value: 1.0,
            terms: 0,
            converged: true,
        });
    }
    let f = hyp2f1(-0.5, 0.5, 1.0, xv * xv, config)?;
    Ok(SeriesSum {
        value: FRAC_PI_2 * f.value,
        ..f
    })
}

/// Derivative of `K` with respect to the modulus:
///
/// ```text
/// dK/dx = (E(x) - (1 - x^2) K(x)) / (x (1 - x^2))
/// ```
///
/// with the limit value `0` at `x = 0`.
pub fn dk_dr(x: Modulus) -> Result<f64> {
    let xv = x.value();
    if xv >= 1.0 {
        return Err(Error::domain(
            "dk_dr requires x < 1; K is singular at x = 1",
        ));
    }
    if xv == 0.0 {
        return Ok(0.0);
    }
    let comp = one_minus_sq(xv);
    let k = ellip_k(x)?;
    let e = ellip_e(x)?;
    Ok((e - comp * k) / (xv * comp))
}

/// Both sides of the ascending Landen transformation
/// `K(2 sqrt(r) / (1 + r)) = (1 + r) K(r)` for `0 < r < 1`,
/// returned as `(lhs, rhs)`.
///
/// For `r` extremely close to `1` the transformed modulus can round to
/// `1` in floating point, in which case the evaluation errors.
pub fn landen_pair(r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::domain(format!(
            "landen_pair requires 0 < r < 1, got {r}"
        )));
    }
    let up = 2.0 * r.sqrt() / (1.0 + r);
    let lhs = ellip_k(Modulus::new(up)?)?;
    let rhs = (1.0 + r) * ellip_k(Modulus::new(r)?)?;
    Ok((lhs, rhs))
}

/// Inverse hyperbolic tangent `arth(x) = ln((1 + x) / (1 - x)) / 2` for
/// `|x| < 1`.
///
/// Below `|x| = 1e-2` the odd series
/// `x (1 + x^2/3 + x^4/5 + x^6/7 + x^8/9)` is used: the log form loses
/// relative accuracy as `x` shrinks (its absolute rounding error is
/// fixed while the value is not), whereas at the cut the series'
/// truncation error is already below one part in 1e20. The value is
/// computed on `|x|` and the sign restored, so the function is odd to
/// the last bit.
pub fn arth(x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() >= 1.0 {
        return Err(Error::domain(format!("arth requires |x| < 1, got {x}")));
    }
    let ax = x.abs();
    let v = if ax < 1e-2 {
        let x2 = ax * ax;
        ax * (1.0
            + x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 * (1.0 / 9.0)))))
    } else {
        0.5 * ((1.0 + ax) / (1.0 - ax)).ln()
    };
    Ok(v.copysign(x))
}
