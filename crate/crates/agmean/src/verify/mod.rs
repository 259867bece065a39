//! Sampling verification harness.
//!
//! Each named suite evaluates a family of samples and reduces them to a
//! [`VerifyReport`]. Every sample carries a margin-scale `value`:
//! positive means headroom above the suite's floor, so `worst_margin`
//! is the tightest sample of the run. Identity suites report
//! `tolerance - residual`, inequality suites report the raw log-ratio
//! or normalized gap, and the sub-threshold search legs report the
//! (positive) deficit of the witness they are required to find. On a
//! correct build every suite therefore ends with `failures == 0`.
//!
//! All sampling is deterministic: pairs come from a counter-based
//! generator seeded through [`SampleSpec`], grids are fixed, and the
//! aggregation is order insensitive, so repeated runs and the parallel
//! and sequential drivers produce byte-identical reports.

mod engine;
mod suites;

use serde::Serialize;

use crate::bounds::{self, BoundKind, BoundParams};
use crate::elliptic::Modulus;
use crate::error::{Error, Result};
use engine::{Agg, Outcome};
use suites::STRICT_FLOOR;

/// Registry of suite names accepted by [`run_suite`], in report order.
pub const SUITE_NAMES: [&str; 12] = [
    "mean_chain",
    "eq_1_6",
    "l_ag_sandwich",
    "gaussian_identity",
    "landen",
    "dkdr",
    "lemma21",
    "lemma22",
    "coeffs",
    "reduction_identities",
    "theorem11",
    "theorem12",
];

/// Sampling plan shared by the suites: how many random pairs, the seed,
/// the log-ratio range of the pairs, and the deterministic x grid.
#[derive(Clone, Debug)]
pub struct SampleSpec {
    n: usize,
    seed: u64,
    ratio_log_range: f64,
    x_grid: Vec<f64>,
}

impl SampleSpec {
    /// Builds a spec after validating every field: `n` must be
    /// positive, the range positive and finite, and the grid nonempty
    /// with every point inside the open interval (0, 1).
    pub fn new(n: usize, seed: u64, ratio_log_range: f64, x_grid: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("sample count must be positive"));
        }
        if !(ratio_log_range > 0.0 && ratio_log_range.is_finite()) {
            return Err(Error::domain(format!(
                "ratio_log_range must be positive and finite, got {ratio_log_range}"
            )));
        }
        if x_grid.is_empty() {
            return Err(Error::domain("x grid must be nonempty"));
        }
        for &x in &x_grid {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::domain(format!(
                    "x grid points must lie in (0, 1), got {x}"
                )));
            }
        }
        Ok(SampleSpec {
            n,
            seed,
            ratio_log_range,
            x_grid,
        })
    }

    /// Same plan with a different seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Same plan with a different sample count.
    pub fn with_n(self, n: usize) -> Result<Self> {
        SampleSpec::new(n, self.seed, self.ratio_log_range, self.x_grid)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ratio_log_range(&self) -> f64 {
        self.ratio_log_range
    }

    pub fn x_grid(&self) -> &[f64] {
        &self.x_grid
    }
}

impl Default for SampleSpec {
    /// 1000 pairs, seed 42, pair ratios up to `e^7` either way, and 99
    /// equispaced x values `0.01, 0.02, ..., 0.99`.
    fn default() -> Self {
        let x_grid = (1..=99).map(|i| i as f64 / 100.0).collect();
        SampleSpec::new(1000, 42, 7.0, x_grid).expect("default plan is valid")
    }
}

/// Location and value of a failing sample (or of a search witness).
#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub x: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub value: f64,
}

/// Aggregated result of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub samples: usize,
    pub passes: usize,
    pub failures: usize,
    pub worst_margin: f64,
    pub counterexample: Option<Counterexample>,
    pub seed: u64,
}

/// One evaluated sample, for the detailed (per-row) output.
#[derive(Clone, Debug, Serialize)]
pub struct SampleRecord {
    pub suite: String,
    pub index: usize,
    pub t: Option<f64>,
    pub s: Option<f64>,
    pub x: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub value: f64,
    pub pass: bool,
}

/// One strength value's row in a sharpness scan.
#[derive(Clone, Debug, Serialize)]
pub struct SharpnessRow {
    pub s: f64,
    pub threshold: f64,
    pub holds_at_threshold: bool,
    pub fails_below: bool,
}

fn build_report(suite: &str, agg: &Agg, seed: u64) -> VerifyReport {
    VerifyReport {
        suite: suite.to_string(),
        samples: agg.samples,
        passes: agg.passes,
        failures: agg.samples - agg.passes,
        worst_margin: agg.worst,
        counterexample: agg.first_fail.as_ref().map(|o| Counterexample {
            t: o.t,
            s: o.s,
            x: o.x,
            a: o.a,
            b: o.b,
            value: o.value,
        }),
        seed,
    }
}

fn record_from(suite: &str, o: &Outcome) -> SampleRecord {
    SampleRecord {
        suite: suite.to_string(),
        index: o.index,
        t: o.t,
        s: o.s,
        x: o.x,
        a: o.a,
        b: o.b,
        value: o.value,
        pass: o.pass,
    }
}

/// Runs one named suite with the default driver (parallel when the
/// `parallel` feature is compiled in).
pub fn run_suite(name: &str, spec: &SampleSpec) -> Result<VerifyReport> {
    let (agg, _) = suites::dispatch(name, spec, cfg!(feature = "parallel"), false)?;
    Ok(build_report(name, &agg, spec.seed()))
}

/// Runs one named suite strictly sequentially. The report is identical
/// to [`run_suite`]'s; this exists for comparison and benchmarking.
pub fn run_suite_seq(name: &str, spec: &SampleSpec) -> Result<VerifyReport> {
    let (agg, _) = suites::dispatch(name, spec, false, false)?;
    Ok(build_report(name, &agg, spec.seed()))
}

/// Runs one named suite and also returns every evaluated sample as a
/// row, in sample order.
pub fn run_suite_detailed(name: &str, spec: &SampleSpec) -> Result<(VerifyReport, Vec<SampleRecord>)> {
    let (agg, outcomes) = suites::dispatch(name, spec, cfg!(feature = "parallel"), true)?;
    let outcomes = outcomes.expect("detailed dispatch returns outcomes");
    let records = outcomes.iter().map(|o| record_from(name, o)).collect();
    Ok((build_report(name, &agg, spec.seed()), records))
}

/// Runs every registered suite, in registry order.
pub fn run_all(spec: &SampleSpec) -> Vec<VerifyReport> {
    SUITE_NAMES
        .iter()
        .map(|name| run_suite(name, spec).expect("registry names are known"))
        .collect()
}

enum CheckProbe {
    Grid(f64),
    Pair(f64, f64),
}

/// Checks one comparison `Q_{t,s} >= base` for arbitrary (validated)
/// parameters, over the spec's x grid via the contrast reduction and
/// over the spec's random pairs via the direct mean definitions. A
/// sample passes when its margin clears the strictness floor.
pub fn check_inequality(bp: BoundParams, spec: &SampleSpec) -> VerifyReport {
    let name = match bp.kind() {
        BoundKind::Agm => "check_agm",
        BoundKind::Log => "check_log",
    };
    let mut probes: Vec<CheckProbe> = spec.x_grid().iter().map(|&x| CheckProbe::Grid(x)).collect();
    probes.extend(
        suites::random_pairs(spec)
            .into_iter()
            .map(|(a, b)| CheckProbe::Pair(a, b)),
    );
    let (agg, _) = engine::run_samples(
        &probes,
        cfg!(feature = "parallel"),
        false,
        |i, probe| match *probe {
            CheckProbe::Grid(x) => {
                let m = Modulus::new(x).expect("grid x lies in (0,1)");
                let v = bounds::log_ratio(bp, m).expect("validated parameters");
                Outcome::new(i, v > STRICT_FLOOR, v)
                    .at_ts(bp.t(), bp.s())
                    .at_x(x)
            }
            CheckProbe::Pair(a, b) => {
                let v = suites::direct_margin(bp, a, b);
                Outcome::new(i, v > STRICT_FLOOR, v)
                    .at_ts(bp.t(), bp.s())
                    .at_pair(a, b)
            }
        },
    );
    build_report(name, &agg, spec.seed())
}

/// Scans small contrasts `x = 10^(-k/4)`, `k = 4..24`, for a
/// counterexample to `Q_{t,s} >= base`. A candidate only counts when
/// the reduced log-ratio is below the strictness floor *and* the
/// direct comparison of the means at `(1+x, 1-x)` confirms the
/// violation, so floating-point noise cannot produce a witness.
/// Returns the first (largest-x) confirmed witness.
pub fn search_counterexample(bp: BoundParams) -> Option<Counterexample> {
    for x in suites::small_x_scan() {
        let m = Modulus::new(x).expect("scan x lies in (0,1)");
        let v = bounds::log_ratio(bp, m).expect("validated parameters");
        if v < STRICT_FLOOR {
            let (a, b) = (1.0 + x, 1.0 - x);
            if suites::direct_margin(bp, a, b) < 0.0 {
                return Some(Counterexample {
                    t: Some(bp.t()),
                    s: Some(bp.s()),
                    x: Some(x),
                    a: Some(a),
                    b: Some(b),
                    value: v,
                });
            }
        }
    }
    None
}

/// For each strength value, checks that the comparison holds at its
/// threshold and that the searcher finds a violation `delta` below it.
/// `delta` must be at least 0.01 (the searcher's detectability limit)
/// and must leave the shifted parameter positive.
pub fn sharpness_scan(kind: BoundKind, s_values: &[f64], delta: f64) -> Result<Vec<SharpnessRow>> {
    if !(delta.is_finite() && delta >= 0.01) {
        return Err(Error::domain(format!(
            "sharpness delta must be at least 0.01, got {delta}"
        )));
    }
    let spec = SampleSpec::default();
    s_values
        .iter()
        .map(|&s| {
            let threshold = kind.threshold(s)?;
            let below = threshold - delta;
            if below <= 0.0 {
                return Err(Error::domain(format!(
                    "delta {delta} pushes the parameter to {below} at s = {s}"
                )));
            }
            let at = BoundParams::new(threshold, s, kind)?;
            let holds_at_threshold = check_inequality(at, &spec).failures == 0;
            let fails_below = search_counterexample(BoundParams::new(below, s, kind)?).is_some();
            Ok(SharpnessRow {
                s,
                threshold,
                holds_at_threshold,
                fails_below,
            })
        })
        .collect()
}

/// Pretty-printed JSON array of reports, with a trailing newline.
pub fn reports_to_json(reports: &[VerifyReport]) -> String {
    let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
    out.push('\n');
    out
}

/// CSV of per-sample rows: header line, one row per record, empty
/// fields for absent coordinates, LF line endings.
pub fn records_to_csv(records: &[SampleRecord]) -> String {
    use std::fmt::Write;
    let mut out = String::with_capacity(64 + records.len() * 48);
    out.push_str("suite,index,t,s,x,a,b,value,pass\n");
    for r in records {
        let _ = write!(out, "{},{}", r.suite, r.index);
        for field in [r.t, r.s, r.x, r.a, r.b] {
            match field {
                Some(v) => {
                    let _ = write!(out, ",{v}");
                }
                None => out.push(','),
            }
        }
        let _ = writeln!(out, ",{},{}", r.value, r.pass);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_spec() -> SampleSpec {
        SampleSpec::default().with_n(50).expect("positive count")
    }

    #[test]
    fn every_registered_suite_passes_cleanly() {
        let spec = quick_spec();
        for report in run_all(&spec) {
            assert_eq!(
                report.failures, 0,
                "suite {} reported failures, worst margin {}",
                report.suite, report.worst_margin
            );
            assert_eq!(report.samples, report.passes + report.failures);
            assert!(report.counterexample.is_none());
            assert!(report.worst_margin.is_finite());
            assert_eq!(report.seed, spec.seed());
        }
    }

    #[test]
    fn report_order_matches_the_registry() {
        let spec = quick_spec();
        let names: Vec<String> = run_all(&spec).into_iter().map(|r| r.suite).collect();
        assert_eq!(names, SUITE_NAMES);
    }

    #[test]
    fn unknown_suite_names_are_rejected() {
        let err = run_suite("no_such_suite", &quick_spec()).unwrap_err();
        assert!(matches!(err, Error::UnknownSuite(_)));
    }

    #[test]
    fn repeated_runs_serialize_identically() {
        let spec = quick_spec();
        let first = reports_to_json(&run_all(&spec));
        let second = reports_to_json(&run_all(&spec));
        assert_eq!(first, second);
    }

    #[test]
    fn parallel_and_sequential_drivers_agree() {
        let spec = quick_spec();
        for name in SUITE_NAMES {
            let par = run_suite(name, &spec).unwrap();
            let seq = run_suite_seq(name, &spec).unwrap();
            assert_eq!(
                reports_to_json(&[par]),
                reports_to_json(&[seq]),
                "driver mismatch in {name}"
            );
        }
    }

    #[test]
    fn random_pairs_are_deterministic_and_in_range() {
        let spec = SampleSpec::default();
        let pairs = suites::random_pairs(&spec);
        assert_eq!(pairs, suites::random_pairs(&spec));
        assert_eq!(pairs.len(), spec.n());
        let bound = spec.ratio_log_range().exp();
        for &(a, b) in &pairs {
            assert_eq!(a, 1.0);
            assert!(b > 0.0 && b != 1.0);
            assert!(b <= bound && b >= 1.0 / bound);
        }
        let reseeded = suites::random_pairs(&spec.clone().with_seed(43));
        assert_ne!(pairs, reseeded);
    }

    #[test]
    fn detailed_rows_match_the_aggregate() {
        let spec = quick_spec();
        let (report, records) = run_suite_detailed("mean_chain", &spec).unwrap();
        assert_eq!(records.len(), report.samples);
        let worst = records.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
        assert_eq!(worst, report.worst_margin);
        for (i, r) in records.iter().enumerate() {
            assert_eq!(r.index, i);
            assert_eq!(r.suite, "mean_chain");
            assert!(r.pass);
            assert!(r.a.is_some() && r.b.is_some());
        }
    }

    #[test]
    fn csv_output_has_header_and_one_row_per_sample() {
        let spec = quick_spec();
        let (_, records) = run_suite_detailed("gaussian_identity", &spec).unwrap();
        let csv = records_to_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "suite,index,t,s,x,a,b,value,pass");
        assert_eq!(lines.len(), 1 + records.len());
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
        // Absent coordinates serialize as empty fields.
        assert!(lines[1].starts_with("gaussian_identity,0,,,"));
    }

    #[test]
    fn check_inequality_passes_above_threshold_and_fails_below() {
        let spec = quick_spec();
        let s = 2.0;
        let thr = BoundKind::Agm.threshold(s).unwrap();

        let good = BoundParams::new(thr, s, BoundKind::Agm).unwrap();
        let report = check_inequality(good, &spec);
        assert_eq!(report.suite, "check_agm");
        assert_eq!(report.failures, 0);
        assert_eq!(report.samples, spec.x_grid().len() + spec.n());

        let bad = BoundParams::new(thr - 0.05, s, BoundKind::Agm).unwrap();
        let report = check_inequality(bad, &spec);
        assert!(report.failures > 0);
        assert!(report.worst_margin < 0.0);
        assert!(report.counterexample.is_some());
    }

    #[test]
    fn check_inequality_reports_the_log_kind() {
        let spec = quick_spec();
        let bp = BoundParams::new(0.4, 1.0, BoundKind::Log).unwrap();
        assert_eq!(check_inequality(bp, &spec).suite, "check_log");
    }

    #[test]
    fn searcher_finds_witnesses_below_every_threshold() {
        for kind in [BoundKind::Agm, BoundKind::Log] {
            for s in [1.0, 1.5, 2.0, 5.0, 10.0] {
                let t = kind.threshold(s).unwrap() - 0.01;
                let bp = BoundParams::new(t, s, kind).unwrap();
                let cx = search_counterexample(bp)
                    .unwrap_or_else(|| panic!("no witness at s = {s} for {kind:?}"));
                assert!(cx.value < 0.0);
                // The witness must violate the comparison through the
                // direct mean definitions too.
                let (a, b) = (cx.a.unwrap(), cx.b.unwrap());
                assert!(suites::direct_margin(bp, a, b) < 0.0);
                assert_eq!(cx.t, Some(t));
                assert_eq!(cx.s, Some(s));
            }
        }
    }

    #[test]
    fn searcher_is_silent_at_and_above_the_threshold() {
        for kind in [BoundKind::Agm, BoundKind::Log] {
            for s in [1.0, 2.0, 10.0] {
                let thr = kind.threshold(s).unwrap();
                for t in [thr, thr + 0.01, 0.5] {
                    let bp = BoundParams::new(t, s, kind).unwrap();
                    assert!(
                        search_counterexample(bp).is_none(),
                        "spurious witness at t = {t}, s = {s} for {kind:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn searcher_deficit_grows_as_t_drops_further() {
        let s = 2.0;
        let thr = BoundKind::Agm.threshold(s).unwrap();
        let shallow = search_counterexample(
            BoundParams::new(thr - 0.01, s, BoundKind::Agm).unwrap(),
        )
        .unwrap();
        let deep = search_counterexample(
            BoundParams::new(thr - 0.05, s, BoundKind::Agm).unwrap(),
        )
        .unwrap();
        assert!(deep.value < shallow.value);
    }

    #[test]
    fn sharpness_scan_confirms_both_sides() {
        let rows = sharpness_scan(BoundKind::Log, &[1.0, 2.0, 5.0], 0.01).unwrap();
        assert_eq!(rows.len(), 3);
        for row in rows {
            assert!(row.holds_at_threshold, "threshold row failed at s = {}", row.s);
            assert!(row.fails_below, "no witness below threshold at s = {}", row.s);
            assert_eq!(row.threshold, BoundKind::Log.threshold(row.s).unwrap());
        }
    }

    #[test]
    fn sharpness_scan_rejects_tiny_and_oversized_deltas() {
        assert!(matches!(
            sharpness_scan(BoundKind::Agm, &[2.0], 0.001),
            Err(Error::Domain(_))
        ));
        // threshold_ag(1) is about 0.146, so delta 0.2 would push the
        // parameter negative.
        assert!(matches!(
            sharpness_scan(BoundKind::Agm, &[1.0], 0.2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sample_spec_validates_its_fields() {
        assert!(SampleSpec::new(0, 1, 7.0, vec![0.5]).is_err());
        assert!(SampleSpec::new(10, 1, 0.0, vec![0.5]).is_err());
        assert!(SampleSpec::new(10, 1, 7.0, vec![]).is_err());
        assert!(SampleSpec::new(10, 1, 7.0, vec![0.5, 1.0]).is_err());
        assert!(SampleSpec::default().with_n(0).is_err());
    }

    #[test]
    fn default_spec_matches_the_documented_plan() {
        let spec = SampleSpec::default();
        assert_eq!(spec.n(), 1000);
        assert_eq!(spec.seed(), 42);
        assert_eq!(spec.ratio_log_range(), 7.0);
        assert_eq!(spec.x_grid().len(), 99);
        assert_eq!(spec.x_grid()[0], 0.01);
        assert_eq!(spec.x_grid()[98], 0.99);
    }

    #[test]
    fn report_json_has_the_expected_fields() {
        let spec = quick_spec();
        let report = run_suite("landen", &spec).unwrap();
        let json = reports_to_json(&[report]);
        for key in [
            "\"suite\"",
            "\"samples\"",
            "\"passes\"",
            "\"failures\"",
            "\"worst_margin\"",
            "\"counterexample\"",
            "\"seed\"",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        assert!(json.ends_with('\n'));
    }
}
