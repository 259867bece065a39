//! The named verification suites: sample construction and per-sample
//! evaluation.
//!
//! Every sample evaluation produces a margin-scale value (positive
//! means headroom) so the aggregate's minimum is the worst case over
//! the whole sample, whatever the suite measures.

use std::f64::consts::FRAC_PI_2;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::{run_samples, Agg, Outcome};
use super::SampleSpec;
use crate::bounds::{self, BoundKind, BoundParams, LemmaParams};
use crate::elliptic::{self, one_minus_sq, Modulus};
use crate::error::{Error, Result};
use crate::means::{self, PositivePair};

/// Floor for strict-positivity checks: absorbs rounding noise where the
/// tested quantity vanishes at x -> 0.
pub(crate) const STRICT_FLOOR: f64 = -1e-13;

/// Strength values exercised by the theorem and lemma suites.
const S_SET: [f64; 5] = [1.0, 1.5, 2.0, 5.0, 10.0];

pub(crate) fn dispatch(
    name: &str,
    spec: &SampleSpec,
    parallel: bool,
    detailed: bool,
) -> Result<(Agg, Option<Vec<Outcome>>)> {
    match name {
        "mean_chain" => Ok(mean_chain(spec, parallel, detailed)),
        "eq_1_6" => Ok(agm_chain(spec, parallel, detailed)),
        "l_ag_sandwich" => Ok(l_ag_sandwich(spec, parallel, detailed)),
        "gaussian_identity" => Ok(gaussian_identity(spec, parallel, detailed)),
        "landen" => Ok(landen(spec, parallel, detailed)),
        "dkdr" => Ok(dkdr(spec, parallel, detailed)),
        "lemma21" => Ok(lemma_suite(spec, parallel, detailed, 1.0, 2.0, bounds::f_lemma)),
        "lemma22" => Ok(lemma_suite(spec, parallel, detailed, 2.0, 3.0, bounds::g_lemma)),
        "coeffs" => Ok(coeffs(spec, parallel, detailed)),
        "reduction_identities" => Ok(reduction_identities(spec, parallel, detailed)),
        "theorem11" => Ok(theorem_suite(spec, parallel, detailed, BoundKind::Agm)),
        "theorem12" => Ok(theorem_suite(spec, parallel, detailed, BoundKind::Log)),
        _ => Err(Error::UnknownSuite(name.to_string())),
    }
}

/// Deterministic sample pairs `(1, e^w)`, `w` uniform in
/// `[-range, range]` and never exactly zero, from a counter-based
/// generator so the stream is identical across platforms and runs.
pub(crate) fn random_pairs(spec: &SampleSpec) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed());
    let range = spec.ratio_log_range();
    (0..spec.n())
        .map(|_| loop {
            let unit = (rng.next_u64() >> 11) as f64 / 9007199254740992.0;
            let w = (2.0 * unit - 1.0) * range;
            if w != 0.0 {
                break (1.0, w.exp());
            }
        })
        .collect()
}

/// The searcher's scan grid `10^(-k/4)` for `k = 4..24`: failures of a
/// super-threshold comparison appear near `x = 0`, so the scan walks
/// from `0.1` down to `1e-6`.
pub(crate) fn small_x_scan() -> impl Iterator<Item = f64> {
    (4..=24).map(|k| 10f64.powf(-(k as f64) / 4.0))
}

/// `ln(Q_{t,s}(a,b)) - ln(base(a,b))` straight from the mean
/// definitions, with the base picked by the comparison kind. This is
/// the route that does not go through the contrast reduction.
pub(crate) fn direct_margin(bp: BoundParams, a: f64, b: f64) -> f64 {
    let p = PositivePair::new(a, b).expect("sample pairs are positive");
    let q = means::q_mean(bp.t(), bp.s(), p).expect("validated bound params");
    let base = match bp.kind() {
        BoundKind::Agm => means::agm_limit(a, b).expect("sample pairs are positive"),
        BoundKind::Log => means::logarithmic(p),
    };
    q.ln() - base.ln()
}

fn modulus(x: f64) -> Modulus {
    Modulus::new(x).expect("grid points lie in [0, 1]")
}

fn interior_grid(points: usize) -> Vec<f64> {
    (1..=points)
        .map(|i| i as f64 / (points + 1) as f64)
        .collect()
}

fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let step = (stop - start) / (points - 1) as f64;
    (0..points).map(|i| start + step * i as f64).collect()
}

/// The `t` whose squared deviation from 1/2 gives `u`; reports lemma
/// parameters in the same coordinates as the theorem suites.
fn t_of_u(u: f64) -> f64 {
    (1.0 - u.sqrt()) / 2.0
}

fn mean_chain(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let pairs = random_pairs(spec);
    run_samples(&pairs, parallel, detailed, |i, &(a, b)| {
        let p = PositivePair::new(a, b).expect("sample pairs are positive");
        let h = means::harmonic(p);
        let g = means::geometric(p);
        let l = means::logarithmic(p);
        let am = means::arithmetic(p);
        let value = (g - h).min(l - g).min(am - l) / am;
        Outcome::new(i, value > 0.0, value).at_pair(a, b)
    })
}

fn agm_chain(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let pairs = random_pairs(spec);
    run_samples(&pairs, parallel, detailed, |i, &(a, b)| {
        let p = PositivePair::new(a, b).expect("sample pairs are positive");
        let g = means::geometric(p);
        let am = means::arithmetic(p);
        let mid = (am * g).sqrt();
        let ag = means::agm_limit(a, b).expect("sample pairs are positive");
        let value = (mid - g).min(ag - mid).min(am - ag) / am;
        Outcome::new(i, value > 0.0, value).at_pair(a, b)
    })
}

fn l_ag_sandwich(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let pairs = random_pairs(spec);
    run_samples(&pairs, parallel, detailed, |i, &(a, b)| {
        let p = PositivePair::new(a, b).expect("sample pairs are positive");
        let l = means::logarithmic(p);
        let am = means::arithmetic(p);
        let ag = means::agm_limit(a, b).expect("sample pairs are positive");
        let value = (ag - l).min(FRAC_PI_2 * l - ag) / am;
        Outcome::new(i, value > 0.0, value).at_pair(a, b)
    })
}

fn gaussian_identity(
    spec: &SampleSpec,
    parallel: bool,
    detailed: bool,
) -> (Agg, Option<Vec<Outcome>>) {
    let _ = spec;
    let grid = interior_grid(50);
    run_samples(&grid, parallel, detailed, |i, &r| {
        let ag = means::agm_limit(1.0, r).expect("grid r is positive");
        let k = elliptic::ellip_k(modulus(one_minus_sq(r).sqrt())).expect("complement below one");
        let residual = (ag * k - FRAC_PI_2).abs();
        let value = 1e-12 - residual;
        Outcome::new(i, value > 0.0, value).at_x(r)
    })
}

fn landen(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let _ = spec;
    let grid = interior_grid(50);
    run_samples(&grid, parallel, detailed, |i, &r| {
        let (lhs, rhs) = elliptic::landen_pair(r).expect("grid r lies in (0,1)");
        let value = 1e-12 - (lhs - rhs).abs() / rhs;
        Outcome::new(i, value > 0.0, value).at_x(r)
    })
}

fn dkdr(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let _ = spec;
    let grid = linspace(0.01, 0.95, 50);
    run_samples(&grid, parallel, detailed, |i, &x| {
        let h = 1e-6;
        let plus = elliptic::ellip_k(modulus(x + h)).expect("x + h below one");
        let minus = elliptic::ellip_k(modulus(x - h)).expect("x - h above zero");
        let fd = (plus - minus) / (2.0 * h);
        let d = elliptic::dk_dr(modulus(x)).expect("grid x below one");
        let value = 1e-6 - (d - fd).abs() / fd.abs();
        Outcome::new(i, value > 0.0, value).at_x(x)
    })
}

#[derive(Clone, Copy)]
enum LemmaProbe {
    /// Sub-boundary parameters: the lemma function must be positive at
    /// this grid point.
    Hold { u: f64, s: f64, x: f64 },
    /// Super-boundary parameters: a small-x scan must find a strictly
    /// negative value.
    Fail { u: f64, s: f64 },
}

/// Shared shape of the two lemma suites. `boundary` is the critical
/// product (1 for `f`, 2 for `g`), `factor` its multiplier of `su`
/// (2 resp. 3), so the dichotomy is `factor * s * u` against
/// `boundary`.
fn lemma_suite(
    spec: &SampleSpec,
    parallel: bool,
    detailed: bool,
    boundary: f64,
    factor: f64,
    eval_fn: fn(LemmaParams, Modulus) -> Result<f64>,
) -> (Agg, Option<Vec<Outcome>>) {
    let fractions = [0.0, 0.25, 0.5, 0.75, 1.0];
    let super_products = [1.01, 1.2, 1.5, 2.0];
    let mut probes = Vec::new();
    for &s in &S_SET {
        let u_boundary = boundary / (factor * s);
        for &fraction in &fractions {
            let u = fraction * u_boundary;
            for &x in spec.x_grid() {
                probes.push(LemmaProbe::Hold { u, s, x });
            }
        }
        for &p in &super_products {
            let u = (p * boundary / (factor * s)).min(1.0);
            probes.push(LemmaProbe::Fail { u, s });
        }
    }
    run_samples(&probes, parallel, detailed, move |i, probe| match *probe {
        LemmaProbe::Hold { u, s, x } => {
            let params = LemmaParams::new(u, s).expect("sub-boundary u stays in [0,1]");
            let v = eval_fn(params, modulus(x)).expect("grid x lies in (0,1)");
            Outcome::new(i, v > 0.0, v).at_ts(t_of_u(u), s).at_x(x)
        }
        LemmaProbe::Fail { u, s } => {
            let params = LemmaParams::new(u, s).expect("super-boundary u is capped at 1");
            let found = small_x_scan()
                .map(|x| eval_fn(params, modulus(x)).expect("scan x lies in (0,1)"))
                .fold(f64::INFINITY, f64::min);
            let value = -found;
            Outcome::new(i, value > 1e-13, value).at_ts(t_of_u(u), s)
        }
    })
}

#[derive(Clone, Copy)]
enum CoeffProbe {
    A { u: f64, s: f64 },
    B { u: f64, s: f64 },
}

fn coeffs(spec: &SampleSpec, parallel: bool, detailed: bool) -> (Agg, Option<Vec<Outcome>>) {
    let _ = spec;
    let s_set = [1.0, 1.5, 2.0, 10.0];
    let mut probes = Vec::new();
    for &s in &s_set {
        for iu in 0..=10 {
            let u = iu as f64 / 10.0;
            probes.push(CoeffProbe::A { u, s });
            probes.push(CoeffProbe::B { u, s });
        }
    }
    run_samples(&probes, parallel, detailed, |i, probe| {
        let (u, s, min_value) = match *probe {
            CoeffProbe::A { u, s } => {
                let params = LemmaParams::new(u, s).expect("grid u in [0,1]");
                let min = (0..=10_000)
                    .map(|n| bounds::coeff_a(n, params))
                    .fold(f64::INFINITY, f64::min);
                (u, s, min)
            }
            CoeffProbe::B { u, s } => {
                let params = LemmaParams::new(u, s).expect("grid u in [0,1]");
                let min = (0..=10_000)
                    .map(|n| bounds::coeff_b(n, params))
                    .fold(f64::INFINITY, f64::min);
                (u, s, min)
            }
        };
        Outcome::new(i, min_value > 0.0, min_value).at_ts(t_of_u(u), s)
    })
}

#[derive(Clone, Copy)]
enum ReductionProbe {
    /// The contrast-reduced AGM ratio must equal the composed lemma
    /// function.
    ComposeAg { t: f64, s: f64, x: f64 },
    /// Same for the logarithmic comparison.
    ComposeL { t: f64, s: f64, x: f64 },
    /// `AG(a,b)/A(a,b) = pi/(2 K(x))` at the pair's contrast.
    GaussReduction { a: f64, b: f64 },
    /// `exp(log_ratio_ag)` must match `Q/AG` from the definitions.
    DirectAg { t: f64, s: f64, a: f64, b: f64 },
    /// `exp(log_ratio_l)` must match `Q/L` from the definitions.
    DirectL { t: f64, s: f64, a: f64, b: f64 },
    /// Truncated series of `F` against its direct evaluation.
    SeriesF { u: f64, s: f64, x: f64 },
    /// Truncated series of `G` against its direct evaluation.
    SeriesG { u: f64, s: f64, x: f64 },
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn reduction_identities(
    spec: &SampleSpec,
    parallel: bool,
    detailed: bool,
) -> (Agg, Option<Vec<Outcome>>) {
    let ts_set = [(0.1, 1.0), (0.25, 2.0), (0.4, 5.0)];
    let us_set = [(0.3, 1.0), (0.5, 2.0), (1.0, 1.5)];
    let series_x = [0.1, 0.3, 0.5, 0.7];
    let mut probes = Vec::new();
    for &(t, s) in &ts_set {
        for &x in spec.x_grid() {
            probes.push(ReductionProbe::ComposeAg { t, s, x });
            probes.push(ReductionProbe::ComposeL { t, s, x });
        }
    }
    for &(a, b) in &random_pairs(spec) {
        probes.push(ReductionProbe::GaussReduction { a, b });
        probes.push(ReductionProbe::DirectAg { t: 0.3, s: 2.0, a, b });
        probes.push(ReductionProbe::DirectL { t: 0.2, s: 1.5, a, b });
    }
    for &(u, s) in &us_set {
        for &x in &series_x {
            probes.push(ReductionProbe::SeriesF { u, s, x });
            probes.push(ReductionProbe::SeriesG { u, s, x });
        }
    }
    run_samples(&probes, parallel, detailed, |i, probe| match *probe {
        ReductionProbe::ComposeAg { t, s, x } => {
            let bp = BoundParams::new(t, s, BoundKind::Agm).expect("grid t, s in range");
            let lhs = bounds::log_ratio_ag(bp, modulus(x)).expect("grid x in (0,1)");
            let params = LemmaParams::new(bounds::u_of_t(t).expect("t in range"), s)
                .expect("u image in [0,1]");
            let rhs = bounds::f_lemma(params, modulus(x)).expect("grid x in (0,1)");
            let value = 1e-13 - rel_err(lhs, rhs);
            Outcome::new(i, value > 0.0, value).at_ts(t, s).at_x(x)
        }
        ReductionProbe::ComposeL { t, s, x } => {
            let bp = BoundParams::new(t, s, BoundKind::Log).expect("grid t, s in range");
            let lhs = bounds::log_ratio_l(bp, modulus(x)).expect("grid x in (0,1)");
            let params = LemmaParams::new(bounds::u_of_t(t).expect("t in range"), s)
                .expect("u image in [0,1]");
            let rhs = bounds::g_lemma(params, modulus(x)).expect("grid x in (0,1)");
            let value = 1e-13 - rel_err(lhs, rhs);
            Outcome::new(i, value > 0.0, value).at_ts(t, s).at_x(x)
        }
        ReductionProbe::GaussReduction { a, b } => {
            let p = PositivePair::new(a, b).expect("sample pairs are positive").ordered();
            let x = means::normalized_contrast(p).expect("ordered pair");
            let ag = means::agm_limit(a, b).expect("sample pairs are positive");
            let lhs = ag / means::arithmetic(p);
            let rhs = std::f64::consts::PI
                / (2.0 * elliptic::ellip_k(x).expect("contrast below one"));
            let value = 1e-12 - rel_err(lhs, rhs);
            Outcome::new(i, value > 0.0, value).at_pair(a, b).at_x(x.value())
        }
        ReductionProbe::DirectAg { t, s, a, b } => {
            let bp = BoundParams::new(t, s, BoundKind::Agm).expect("fixed t, s in range");
            let p = PositivePair::new(a, b).expect("sample pairs are positive").ordered();
            let x = means::normalized_contrast(p).expect("ordered pair");
            let reduced = bounds::log_ratio_ag(bp, x).expect("contrast in (0,1)").exp();
            let q = means::q_mean(t, s, p).expect("fixed t, s in range");
            let ag = means::agm_limit(a, b).expect("sample pairs are positive");
            let value = 1e-11 - rel_err(reduced, q / ag);
            Outcome::new(i, value > 0.0, value).at_ts(t, s).at_pair(a, b)
        }
        ReductionProbe::DirectL { t, s, a, b } => {
            let bp = BoundParams::new(t, s, BoundKind::Log).expect("fixed t, s in range");
            let p = PositivePair::new(a, b).expect("sample pairs are positive").ordered();
            let x = means::normalized_contrast(p).expect("ordered pair");
            let reduced = bounds::log_ratio_l(bp, x).expect("contrast in (0,1)").exp();
            let q = means::q_mean(t, s, p).expect("fixed t, s in range");
            let l = means::logarithmic(p);
            let value = 1e-11 - rel_err(reduced, q / l);
            Outcome::new(i, value > 0.0, value).at_ts(t, s).at_pair(a, b)
        }
        ReductionProbe::SeriesF { u, s, x } => {
            let params = LemmaParams::new(u, s).expect("fixed u, s in range");
            let series = bounds::series_f(params, modulus(x), 200).expect("x in (0,1)");
            let direct = bounds::capital_f(params, modulus(x)).expect("x in (0,1)");
            let value = 1e-10 - rel_err(series, direct);
            Outcome::new(i, value > 0.0, value).at_ts(t_of_u(u), s).at_x(x)
        }
        ReductionProbe::SeriesG { u, s, x } => {
            let params = LemmaParams::new(u, s).expect("fixed u, s in range");
            let series = bounds::series_g(params, modulus(x), 200).expect("x in (0,1)");
            let direct = bounds::capital_g(params, modulus(x)).expect("x in (0,1)");
            let value = 1e-10 - rel_err(series, direct);
            Outcome::new(i, value > 0.0, value).at_ts(t_of_u(u), s).at_x(x)
        }
    })
}

#[derive(Clone, Copy)]
enum TheoremProbe {
    /// At the threshold the log-ratio must clear the strictness floor,
    /// and be strictly positive away from the origin.
    Grid { s: f64, x: f64 },
    /// Just below the threshold the searcher must produce a witness
    /// that re-verifies through the direct mean definitions.
    Search { s: f64 },
}

fn theorem_suite(
    spec: &SampleSpec,
    parallel: bool,
    detailed: bool,
    kind: BoundKind,
) -> (Agg, Option<Vec<Outcome>>) {
    let near_zero = [1e-4, 3e-4, 1e-3, 3e-3];
    let near_one = [0.995, 0.999, 0.9999];
    let mut probes = Vec::new();
    for &s in &S_SET {
        for &x in &near_zero {
            probes.push(TheoremProbe::Grid { s, x });
        }
        for &x in spec.x_grid() {
            probes.push(TheoremProbe::Grid { s, x });
        }
        for &x in &near_one {
            probes.push(TheoremProbe::Grid { s, x });
        }
        probes.push(TheoremProbe::Search { s });
    }
    run_samples(&probes, parallel, detailed, move |i, probe| match *probe {
        TheoremProbe::Grid { s, x } => {
            let t = kind.threshold(s).expect("s >= 1");
            let bp = BoundParams::new(t, s, kind).expect("threshold lies in (0, 1/2)");
            let v = bounds::log_ratio(bp, modulus(x)).expect("grid x in (0,1)");
            let pass = v > STRICT_FLOOR && (x < 1e-2 || v > 0.0);
            Outcome::new(i, pass, v).at_ts(t, s).at_x(x)
        }
        TheoremProbe::Search { s } => {
            let t = kind.threshold(s).expect("s >= 1") - 0.01;
            let bp = BoundParams::new(t, s, kind).expect("sub-threshold t stays positive");
            match super::search_counterexample(bp) {
                Some(cx) => {
                    let (a, b) = (cx.a.expect("searcher pair"), cx.b.expect("searcher pair"));
                    let direct = direct_margin(bp, a, b);
                    Outcome::new(i, direct < 0.0, -direct)
                        .at_ts(t, s)
                        .at_x(cx.x.expect("searcher contrast"))
                        .at_pair(a, b)
                }
                None => Outcome::new(i, false, -1.0).at_ts(t, s),
            }
        }
    })
}
