//! Sharp comparison thresholds for the blended mean family against the
//! arithmetic-geometric and logarithmic means, and the auxiliary
//! functions whose sign settles each comparison.
//!
//! With `u = (1 - 2t)^2` and `x` the normalized contrast of the pair,
//! the two comparisons reduce to the sign of
//!
//! ```text
//! f_{u,s}(x) = (s/2) ln(1 - u x^2) + ln(2 K(x) / pi)      (against AGM)
//! g_{u,s}(x) = (s/2) ln(1 - u x^2) + ln(arth(x) / x)      (against L)
//! ```
//!
//! on `0 < x < 1`. `f` is nonnegative for every `x` exactly when
//! `2su <= 1`, and `g` exactly when `3su <= 2`; solving these for `t`
//! gives the thresholds `1/2 - sqrt(2s)/(4s)` and `1/2 - sqrt(6s)/(6s)`.
//! The derivatives factor through the numerators `F` and `G` below,
//! whose power series have the all-positive coefficient families `A_n`
//! and `B_n`.

use std::f64::consts::FRAC_PI_2;

use crate::elliptic::{self, one_minus_sq, Modulus};
use crate::error::{Error, Result};
use crate::means;

/// Which mean the blended family is being compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// Comparison against the arithmetic-geometric mean.
    Agm,
    /// Comparison against the logarithmic mean.
    Log,
}

impl BoundKind {
    /// The sharp threshold in `t` for this comparison at strength `s`.
    pub fn threshold(self, s: f64) -> Result<f64> {
        match self {
            BoundKind::Agm => threshold_ag(s),
            BoundKind::Log => threshold_l(s),
        }
    }
}

/// Parameters of one comparison: blend weight `t`, strength `s`, and
/// which baseline mean to compare against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    t: f64,
    s: f64,
    kind: BoundKind,
}

impl BoundParams {
    pub fn new(t: f64, s: f64, kind: BoundKind) -> Result<Self> {
        if !(t > 0.0 && t <= 0.5) {
            return Err(Error::domain(format!(
                "bound parameter t must lie in (0, 1/2], got {t}"
            )));
        }
        require_strength(s)?;
        Ok(BoundParams { t, s, kind })
    }

    pub fn t(self) -> f64 {
        self.t
    }

    pub fn s(self) -> f64 {
        self.s
    }

    pub fn kind(self) -> BoundKind {
        self.kind
    }
}

/// The reduced parameters `u in [0, 1]`, `s >= 1` of the lemma
/// functions `f` and `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaParams {
    u: f64,
    s: f64,
}

impl LemmaParams {
    pub fn new(u: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) || !u.is_finite() {
            return Err(Error::domain(format!(
                "lemma parameter u must lie in [0, 1], got {u}"
            )));
        }
        require_strength(s)?;
        Ok(LemmaParams { u, s })
    }

    pub fn u(self) -> f64 {
        self.u
    }

    pub fn s(self) -> f64 {
        self.s
    }

    /// Whether `f_{u,s} > 0` on all of `(0, 1)`, i.e. `2su <= 1`.
    pub fn f_positive_everywhere(self) -> bool {
        2.0 * self.s * self.u <= 1.0
    }

    /// Whether `g_{u,s} > 0` on all of `(0, 1)`, i.e. `3su <= 2`.
    pub fn g_positive_everywhere(self) -> bool {
        3.0 * self.s * self.u <= 2.0
    }
}

fn require_strength(s: f64) -> Result<()> {
    if s >= 1.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "strength s must satisfy s >= 1, got {s}"
        )))
    }
}

fn open_unit(x: Modulus, what: &str) -> Result<f64> {
    let v = x.value();
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(Error::domain(format!("{what} requires 0 < x < 1, got {v}")))
    }
}

/// Least `t` at which the blended mean dominates the
/// arithmetic-geometric mean for all pairs: `1/2 - sqrt(2s)/(4s)`.
pub fn threshold_ag(s: f64) -> Result<f64> {
    require_strength(s)?;
    Ok(0.5 - (2.0 * s).sqrt() / (4.0 * s))
}

/// Least `t` at which the blended mean dominates the logarithmic mean
/// for all pairs: `1/2 - sqrt(6s)/(6s)`.
pub fn threshold_l(s: f64) -> Result<f64> {
    require_strength(s)?;
    Ok(0.5 - (6.0 * s).sqrt() / (6.0 * s))
}

/// The reduced parameter `u = (1 - 2t)^2` for `t in (0, 1/2]`.
pub fn u_of_t(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 0.5) {
        return Err(Error::domain(format!(
            "u_of_t requires t in (0, 1/2], got {t}"
        )));
    }
    let d = 1.0 - 2.0 * t;
    Ok(d * d)
}

/// `f_{u,s}(x) = (s/2) ln(1 - u x^2) + ln(2 K(x) / pi)`, the log of the
/// ratio of the blended mean to the arithmetic-geometric mean at
/// contrast `x`.
///
/// Positive for every `x` exactly when `2su <= 1`. The second term is
/// computed as `-ln(agm(1, sqrt(1 - x^2)))` and the first through
/// `ln_1p`, so the value stays accurate as both terms vanish at small
/// `x`.
pub fn f_lemma(lp: LemmaParams, x: Modulus) -> Result<f64> {
    let xv = open_unit(x, "f_lemma")?;
    let m = means::agm_limit(1.0, one_minus_sq(xv).sqrt())?;
    Ok(0.5 * lp.s * (-lp.u * xv * xv).ln_1p() - m.ln())
}

/// `g_{u,s}(x) = (s/2) ln(1 - u x^2) + ln(arth(x) / x)`, the log of the
/// ratio of the blended mean to the logarithmic mean at contrast `x`.
///
/// Positive for every `x` exactly when `3su <= 2`. Below `x = 1e-2` the
/// second term is evaluated as `ln_1p` of the series
/// `x^2/3 + x^4/5 + x^6/7 + x^8/9`, because the direct quotient
/// `arth(x)/x` is `1 + O(x^2)` and the log would lose the signal: near
/// the critical parameters `g` is the x^4-sized remainder of two
/// x^2-sized terms, so both terms need full relative accuracy.
pub fn g_lemma(lp: LemmaParams, x: Modulus) -> Result<f64> {
    let xv = open_unit(x, "g_lemma")?;
    let log_arth_ratio = if xv < 1e-2 {
        let x2 = xv * xv;
        (x2 * (1.0 / 3.0 + x2 * (1.0 / 5.0 + x2 * (1.0 / 7.0 + x2 * (1.0 / 9.0))))).ln_1p()
    } else {
        (elliptic::arth(xv)? / xv).ln()
    };
    Ok(0.5 * lp.s * (-lp.u * xv * xv).ln_1p() + log_arth_ratio)
}

/// Numerator of the derivative of `f`:
///
/// ```text
/// F_{u,s}(x) = -s u x^2 (1 - x^2) K(x) + (1 - u x^2) [E(x) - (1 - x^2) K(x)]
/// ```
///
/// so that `f'(x) = F_{u,s}(x) / (x (1 - x^2) (1 - u x^2) K(x))`, whose
/// denominator is positive on `(0, 1)`.
pub fn capital_f(lp: LemmaParams, x: Modulus) -> Result<f64> {
    let xv = open_unit(x, "capital_f")?;
    let comp = one_minus_sq(xv);
    let k = elliptic::ellip_k(x)?;
    let e = elliptic::ellip_e(x)?;
    let x2 = xv * xv;
    Ok(-lp.s * lp.u * x2 * comp * k + (1.0 - lp.u * x2) * (e - comp * k))
}

/// Power series form of [`capital_f`]:
///
/// ```text
/// F_{u,s}(x) = (pi/2) x^2 [ 1/2 - su + sum_n p_n A_n x^(2n+2) ]
/// ```
///
/// with `p_n = ((1/2)_n)^2 / (2 (n+1)! (n+2)!)` and `A_n` from
/// [`coeff_a`], truncated after `n_terms` terms.
pub fn series_f(lp: LemmaParams, x: Modulus, n_terms: usize) -> Result<f64> {
    let xv = open_unit(x, "series_f")?;
    let x2 = xv * xv;
    let mut p = 0.25;
    let mut xpow = x2;
    let mut sum = 0.0;
    for n in 0..n_terms {
        let nf = n as f64;
        sum += p * coeff_a(n, lp) * xpow;
        p *= (nf + 0.5) * (nf + 0.5) / ((nf + 2.0) * (nf + 3.0));
        xpow *= x2;
    }
    Ok(FRAC_PI_2 * x2 * (0.5 - lp.s * lp.u + sum))
}

/// Series coefficient of `F`:
/// `A_n = su (n+2)(2n + 3/2) + (n + 1/2)^2 - u (n+1)(n+2)`, positive
/// for every `n >= 0`, `u in [0, 1]`, `s >= 1`.
pub fn coeff_a(n: usize, lp: LemmaParams) -> f64 {
    let nf = n as f64;
    lp.s * lp.u * (nf + 2.0) * (2.0 * nf + 1.5) + (nf + 0.5) * (nf + 0.5)
        - lp.u * (nf + 1.0) * (nf + 2.0)
}

/// Numerator of the derivative of `g`:
///
/// ```text
/// G_{u,s}(x) = -s u x^2 (1 - x^2) arth(x) + (1 - u x^2) [x - (1 - x^2) arth(x)]
/// ```
///
/// so that `g'(x) = G_{u,s}(x) / (x (1 - x^2) (1 - u x^2) arth(x))`.
pub fn capital_g(lp: LemmaParams, x: Modulus) -> Result<f64> {
    let xv = open_unit(x, "capital_g")?;
    let comp = one_minus_sq(xv);
    let at = elliptic::arth(xv)?;
    let x2 = xv * xv;
    Ok(-lp.s * lp.u * x2 * comp * at + (1.0 - lp.u * x2) * (xv - comp * at))
}

/// Power series form of [`capital_g`]:
///
/// ```text
/// G_{u,s}(x) = x^3 [ 2/3 - su + sum_n B_n x^(2n+2) / ((2n+1)(2n+3)(2n+5)) ]
/// ```
///
/// with `B_n` from [`coeff_b`], truncated after `n_terms` terms.
pub fn series_g(lp: LemmaParams, x: Modulus, n_terms: usize) -> Result<f64> {
    let xv = open_unit(x, "series_g")?;
    let x2 = xv * xv;
    let mut xpow = x2;
    let mut sum = 0.0;
    for n in 0..n_terms {
        let nf = n as f64;
        let denom = (2.0 * nf + 1.0) * (2.0 * nf + 3.0) * (2.0 * nf + 5.0);
        sum += coeff_b(n, lp) * xpow / denom;
        xpow *= x2;
    }
    Ok(xv * x2 * (2.0 / 3.0 - lp.s * lp.u + sum))
}

/// Series coefficient of `G`: `B_n = 2u(s-1)(2n+5) + 2(2n+1)`, positive
/// for every `n >= 0`, `u in [0, 1]`, `s >= 1`.
pub fn coeff_b(n: usize, lp: LemmaParams) -> f64 {
    let nf = n as f64;
    2.0 * lp.u * (lp.s - 1.0) * (2.0 * nf + 5.0) + 2.0 * (2.0 * nf + 1.0)
}

/// `ln(Q_{t,s} / AGM)` at contrast `x`, which equals
/// `f_lemma(u_of_t(t), s, x)`.
pub fn log_ratio_ag(bp: BoundParams, x: Modulus) -> Result<f64> {
    if bp.kind != BoundKind::Agm {
        return Err(Error::domain(
            "log_ratio_ag requires parameters with the AGM comparison kind",
        ));
    }
    f_lemma(LemmaParams::new(u_of_t(bp.t)?, bp.s)?, x)
}

/// `ln(Q_{t,s} / L)` at contrast `x`, which equals
/// `g_lemma(u_of_t(t), s, x)`.
pub fn log_ratio_l(bp: BoundParams, x: Modulus) -> Result<f64> {
    if bp.kind != BoundKind::Log {
        return Err(Error::domain(
            "log_ratio_l requires parameters with the logarithmic comparison kind",
        ));
    }
    g_lemma(LemmaParams::new(u_of_t(bp.t)?, bp.s)?, x)
}

/// Kind-dispatching form of [`log_ratio_ag`] / [`log_ratio_l`].
pub fn log_ratio(bp: BoundParams, x: Modulus) -> Result<f64> {
    match bp.kind {
        BoundKind::Agm => log_ratio_ag(bp, x),
        BoundKind::Log => log_ratio_l(bp, x),
    }
}
