//! Command-line front end: evaluate means and special functions, print
//! comparison thresholds, run verification suites, search for
//! counterexamples, and emit CSV tables for external plotting.
//!
//! Exit codes: 0 success (for `search`, a counterexample was found),
//! 1 for `search` with no counterexample or `verify` with failures,
//! 2 usage errors (unknown names, malformed arguments), 3 domain
//! violations, 4 unwritable output paths.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use agmean::bounds::{self, BoundKind, BoundParams, LemmaParams};
use agmean::elliptic::{self, Modulus};
use agmean::means::{self, PositivePair, AGM_TOL};
use agmean::verify::{self, SampleSpec, VerifyReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "agmean",
    version,
    about = "Means, elliptic integrals, and sharp mean-comparison thresholds",
    propagate_version = true
)]
struct Cli {
    /// Output format. Tables are always CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Seed for the deterministic sample generator.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    /// Compare against the arithmetic-geometric mean.
    Ag,
    /// Compare against the logarithmic mean.
    L,
}

impl Kind {
    fn bound(self) -> BoundKind {
        match self {
            Kind::Ag => BoundKind::Agm,
            Kind::L => BoundKind::Log,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a mean or special function at the given arguments.
    ///
    /// Names: H, G, L, A, agm, qmean (two positional arguments each,
    /// qmean also needs --t and --s) and K, E, dkdr, arth (one
    /// argument).
    Eval(EvalArgs),
    /// Print the comparison threshold for one or more strength values.
    ///
    /// Rows hold s, threshold, u = (1-2t)^2 at the threshold, and the
    /// critical product (2su for ag, 3su for l).
    Threshold(ThresholdArgs),
    /// Run a verification suite (or all of them) and report statistics.
    Verify(VerifyArgs),
    /// Search for a counterexample to the comparison at (t, s).
    ///
    /// Prints the witness (x, a, b, lhs, rhs, margin) and exits 0 when
    /// one is found, prints "none" and exits 1 otherwise.
    Search(SearchArgs),
    /// Emit a CSV table (always CSV, regardless of --format).
    Table(TableArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Function name: H, G, L, A, agm, qmean, K, E, dkdr, arth.
    name: String,

    /// Positional real arguments.
    #[arg(allow_negative_numbers = true)]
    args: Vec<f64>,

    /// Blend parameter for qmean, in (0, 1/2].
    #[arg(long)]
    t: Option<f64>,

    /// Strength parameter for qmean, at least 1.
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Comparison kind.
    #[arg(value_enum)]
    kind: Kind,

    /// Strength value, or range start:stop:step (endpoints inclusive
    /// within half a step).
    s: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or "all".
    suite: String,

    /// Number of random sample pairs drawn by the sampling suites.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct SearchArgs {
    /// Comparison kind.
    #[arg(value_enum)]
    kind: Kind,

    /// Blend parameter, in (0, 1/2].
    #[arg(long, allow_negative_numbers = true)]
    t: f64,

    /// Strength parameter, at least 1.
    #[arg(long, allow_negative_numbers = true)]
    s: f64,
}

#[derive(Args)]
struct TableArgs {
    #[command(subcommand)]
    what: TableWhat,
}

#[derive(Copy, Clone, ValueEnum)]
enum TableKind {
    Ag,
    L,
    Both,
}

#[derive(Copy, Clone, ValueEnum)]
enum LemmaWhich {
    /// The AGM-comparison lemma function f.
    F,
    /// The logarithmic-comparison lemma function g.
    G,
}

#[derive(Subcommand)]
enum TableWhat {
    /// Log-ratio of the blended mean to the base mean over an x grid.
    /// Columns: x,log_ratio.
    Ratios {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        s: f64,
        /// Contrast grid, start:stop:step in (0, 1).
        #[arg(long)]
        x: String,
    },
    /// A lemma function over an x grid. Columns: x,value.
    Lemma {
        #[arg(long, value_enum)]
        which: LemmaWhich,
        #[arg(long)]
        u: f64,
        #[arg(long)]
        s: f64,
        /// Contrast grid, start:stop:step in (0, 1).
        #[arg(long)]
        x: String,
    },
    /// Thresholds over an s grid. Columns: s,threshold for a single
    /// kind, s,threshold_ag,threshold_l for both.
    Thresholds {
        #[arg(long, value_enum)]
        kind: TableKind,
        /// Strength grid, start:stop:step with every value at least 1.
        #[arg(long)]
        s: String,
    },
}

/// Failure modes that map onto the exit-code contract.
enum Failure {
    /// Exit 2: unknown names, malformed ranges, wrong arity.
    Usage(String),
    /// Exit 3: arguments outside a function's domain.
    Domain(String),
    /// Exit 4: the --out path could not be written.
    Unwritable(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (message, code) = match self {
            Failure::Usage(m) => (m, 2),
            Failure::Domain(m) => (m, 3),
            Failure::Unwritable(m) => (m, 4),
        };
        eprintln!("error: {message}");
        ExitCode::from(code)
    }
}

impl From<agmean::Error> for Failure {
    fn from(err: agmean::Error) -> Self {
        match err {
            agmean::Error::UnknownSuite(_) => Failure::Usage(err.to_string()),
            _ => Failure::Domain(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(failure) => failure.report(),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let (output, code) = match &cli.command {
        Command::Eval(args) => (cmd_eval(args, cli.format)?, ExitCode::SUCCESS),
        Command::Threshold(args) => (cmd_threshold(args, cli.format)?, ExitCode::SUCCESS),
        Command::Verify(args) => cmd_verify(args, cli.format, cli.seed)?,
        Command::Search(args) => cmd_search(args, cli.format)?,
        Command::Table(args) => (cmd_table(args)?, ExitCode::SUCCESS),
    };
    match &cli.out {
        Some(path) => fs::write(path, output).map_err(|err| {
            Failure::Unwritable(format!("cannot write {}: {err}", path.display()))
        })?,
        None => print!("{output}"),
    }
    Ok(code)
}

/// Joins optional CSV fields: absent values become empty fields.
fn csv_opt(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_eval(args: &EvalArgs, format: Format) -> Result<String, Failure> {
    let positional = &args.args;
    let need = |n: usize| -> Result<(), Failure> {
        if positional.len() == n {
            Ok(())
        } else {
            Err(Failure::Usage(format!(
                "{} takes exactly {n} positional argument{}, got {}",
                args.name,
                if n == 1 { "" } else { "s" },
                positional.len()
            )))
        }
    };
    let pair = || -> Result<PositivePair, Failure> {
        need(2)?;
        Ok(PositivePair::new(positional[0], positional[1])?)
    };
    let single = || -> Result<f64, Failure> {
        need(1)?;
        Ok(positional[0])
    };

    let value = match args.name.as_str() {
        "H" => means::harmonic(pair()?),
        "G" => means::geometric(pair()?),
        "L" => means::logarithmic(pair()?),
        "A" => means::arithmetic(pair()?),
        "agm" => means::agm(pair()?, AGM_TOL)?.value(),
        "qmean" => {
            let t = args.t.ok_or_else(|| Failure::Usage("qmean requires --t".into()))?;
            let s = args.s.ok_or_else(|| Failure::Usage("qmean requires --s".into()))?;
            means::q_mean(t, s, pair()?)?
        }
        "K" => elliptic::ellip_k(Modulus::new(single()?)?)?,
        "E" => elliptic::ellip_e(Modulus::new(single()?)?)?,
        "dkdr" => elliptic::dk_dr(Modulus::new(single()?)?)?,
        "arth" => elliptic::arth(single()?)?,
        other => return Err(Failure::Usage(format!("unknown function name '{other}'"))),
    };

    Ok(match format {
        Format::Plain => format!("{value}\n"),
        Format::Json => {
            let doc = json!({
                "name": args.name,
                "args": positional,
                "t": args.t,
                "s": args.s,
                "value": value,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        Format::Csv => {
            let a = positional.first().copied();
            let b = positional.get(1).copied();
            format!(
                "name,a,b,t,s,value\n{},{},{},{},{},{}\n",
                args.name,
                csv_opt(a),
                csv_opt(b),
                csv_opt(args.t),
                csv_opt(args.s),
                value
            )
        }
    })
}

/// One threshold row: the strength, the threshold itself, the deviation
/// parameter it maps to, and the critical product that sits exactly at
/// the comparison boundary.
struct ThresholdRow {
    s: f64,
    threshold: f64,
    u: f64,
    product: f64,
}

fn threshold_rows(kind: BoundKind, s_values: &[f64]) -> Result<Vec<ThresholdRow>, Failure> {
    s_values
        .iter()
        .map(|&s| {
            let threshold = kind.threshold(s)?;
            let u = bounds::u_of_t(threshold)?;
            let product = match kind {
                BoundKind::Agm => 2.0 * s * u,
                BoundKind::Log => 3.0 * s * u,
            };
            Ok(ThresholdRow {
                s,
                threshold,
                u,
                product,
            })
        })
        .collect()
}

fn cmd_threshold(args: &ThresholdArgs, format: Format) -> Result<String, Failure> {
    let s_values = parse_range(&args.s)?;
    let rows = threshold_rows(args.kind.bound(), &s_values)?;
    Ok(match format {
        Format::Plain => {
            if let [row] = rows.as_slice() {
                format!("{}\n", row.threshold)
            } else {
                let mut out = String::new();
                for r in &rows {
                    let _ = writeln!(
                        out,
                        "s={} threshold={} u={} product={}",
                        r.s, r.threshold, r.u, r.product
                    );
                }
                out
            }
        }
        Format::Json => {
            let docs: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({"s": r.s, "threshold": r.threshold, "u": r.u, "product": r.product})
                })
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&docs).expect("serializable"))
        }
        Format::Csv => {
            let mut out = String::from("s,threshold,u,product\n");
            for r in &rows {
                let _ = writeln!(out, "{},{},{},{}", r.s, r.threshold, r.u, r.product);
            }
            out
        }
    })
}

fn cmd_verify(
    args: &VerifyArgs,
    format: Format,
    seed: Option<u64>,
) -> Result<(String, ExitCode), Failure> {
    let mut spec = SampleSpec::default();
    if let Some(seed) = seed {
        spec = spec.with_seed(seed);
    }
    if let Some(samples) = args.samples {
        spec = spec.with_n(samples)?;
    }
    let reports = if args.suite == "all" {
        verify::run_all(&spec)
    } else {
        vec![verify::run_suite(&args.suite, &spec)?]
    };
    let clean = reports.iter().all(|r| r.failures == 0);
    let code = if clean {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };

    let output = match format {
        Format::Plain => {
            let mut out = String::new();
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{}: samples={} passes={} failures={} worst_margin={} seed={}",
                    r.suite, r.samples, r.passes, r.failures, r.worst_margin, r.seed
                );
                if let Some(cx) = &r.counterexample {
                    let _ = writeln!(
                        out,
                        "  counterexample: t={} s={} x={} a={} b={} value={}",
                        csv_opt(cx.t),
                        csv_opt(cx.s),
                        csv_opt(cx.x),
                        csv_opt(cx.a),
                        csv_opt(cx.b),
                        cx.value
                    );
                }
            }
            out
        }
        Format::Json => verify::reports_to_json(&reports),
        Format::Csv => reports_to_csv(&reports),
    };
    Ok((output, code))
}

fn reports_to_csv(reports: &[VerifyReport]) -> String {
    let mut out =
        String::from("suite,samples,passes,failures,worst_margin,seed,cx_t,cx_s,cx_x,cx_a,cx_b,cx_value\n");
    for r in reports {
        let cx = r.counterexample.as_ref();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.suite,
            r.samples,
            r.passes,
            r.failures,
            r.worst_margin,
            r.seed,
            csv_opt(cx.and_then(|c| c.t)),
            csv_opt(cx.and_then(|c| c.s)),
            csv_opt(cx.and_then(|c| c.x)),
            csv_opt(cx.and_then(|c| c.a)),
            csv_opt(cx.and_then(|c| c.b)),
            csv_opt(cx.map(|c| c.value)),
        );
    }
    out
}

fn cmd_search(args: &SearchArgs, format: Format) -> Result<(String, ExitCode), Failure> {
    let kind = args.kind.bound();
    let bp = BoundParams::new(args.t, args.s, kind)?;
    let found = verify::search_counterexample(bp);

    let witness = found.as_ref().map(|cx| {
        let (a, b) = (cx.a.expect("searcher pair"), cx.b.expect("searcher pair"));
        let p = PositivePair::new(a, b).expect("searcher pair is positive");
        let lhs = means::q_mean(args.t, args.s, p).expect("validated parameters");
        let rhs = match kind {
            BoundKind::Agm => means::agm(p, AGM_TOL).expect("positive pair").value(),
            BoundKind::Log => means::logarithmic(p),
        };
        (cx.x.expect("searcher contrast"), a, b, lhs, rhs, lhs - rhs)
    });

    let output = match (format, &witness) {
        (Format::Plain, Some((x, a, b, lhs, rhs, margin))) => {
            format!("x={x} a={a} b={b} lhs={lhs} rhs={rhs} margin={margin}\n")
        }
        (Format::Plain, None) => "none\n".to_string(),
        (Format::Json, w) => {
            let doc = match w {
                Some((x, a, b, lhs, rhs, margin)) => json!({
                    "kind": match kind { BoundKind::Agm => "ag", BoundKind::Log => "l" },
                    "t": args.t,
                    "s": args.s,
                    "found": true,
                    "x": x,
                    "a": a,
                    "b": b,
                    "lhs": lhs,
                    "rhs": rhs,
                    "margin": margin,
                }),
                None => json!({
                    "kind": match kind { BoundKind::Agm => "ag", BoundKind::Log => "l" },
                    "t": args.t,
                    "s": args.s,
                    "found": false,
                }),
            };
            format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializable"))
        }
        (Format::Csv, w) => {
            let mut out = String::from("x,a,b,lhs,rhs,margin\n");
            if let Some((x, a, b, lhs, rhs, margin)) = w {
                let _ = writeln!(out, "{x},{a},{b},{lhs},{rhs},{margin}");
            }
            out
        }
    };
    let code = if witness.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    };
    Ok((output, code))
}

fn cmd_table(args: &TableArgs) -> Result<String, Failure> {
    match &args.what {
        TableWhat::Ratios { kind, t, s, x } => {
            let bp = BoundParams::new(*t, *s, kind.bound())?;
            let mut out = String::from("x,log_ratio\n");
            for x in parse_range(x)? {
                let value = bounds::log_ratio(bp, Modulus::new(x)?)?;
                let _ = writeln!(out, "{x},{value}");
            }
            Ok(out)
        }
        TableWhat::Lemma { which, u, s, x } => {
            let lp = LemmaParams::new(*u, *s)?;
            let mut out = String::from("x,value\n");
            for x in parse_range(x)? {
                let m = Modulus::new(x)?;
                let value = match which {
                    LemmaWhich::F => bounds::f_lemma(lp, m)?,
                    LemmaWhich::G => bounds::g_lemma(lp, m)?,
                };
                let _ = writeln!(out, "{x},{value}");
            }
            Ok(out)
        }
        TableWhat::Thresholds { kind, s } => {
            let s_values = parse_range(s)?;
            let mut out = String::new();
            match kind {
                TableKind::Both => {
                    out.push_str("s,threshold_ag,threshold_l\n");
                    for s in s_values {
                        let ag = BoundKind::Agm.threshold(s)?;
                        let l = BoundKind::Log.threshold(s)?;
                        let _ = writeln!(out, "{s},{ag},{l}");
                    }
                }
                TableKind::Ag | TableKind::L => {
                    let kind = match kind {
                        TableKind::Ag => BoundKind::Agm,
                        _ => BoundKind::Log,
                    };
                    out.push_str("s,threshold\n");
                    for s in s_values {
                        let value = kind.threshold(s)?;
                        let _ = writeln!(out, "{s},{value}");
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Parses either a single real or an inclusive range `start:stop:step`.
/// Grid points are generated as `start + k * step`, and the endpoint is
/// kept when it lands within half a step of `stop`.
fn parse_range(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = |why: &str| Failure::Usage(format!("invalid range '{text}': {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    let parse = |part: &str| -> Result<f64, Failure> {
        let v: f64 = part
            .parse()
            .map_err(|_| bad("parts must be real numbers"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad("parts must be finite"))
        }
    };
    match parts.as_slice() {
        [single] => Ok(vec![parse(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step == 0.0 {
                return Err(bad("step must be nonzero"));
            }
            if (stop - start) * step < 0.0 {
                return Err(bad("step points away from stop"));
            }
            let count = ((stop - start) / step + 0.5).floor() as usize + 1;
            if count > 1_000_000 {
                return Err(bad("more than 1000000 grid points"));
            }
            Ok((0..count).map(|k| start + k as f64 * step).collect())
        }
        _ => Err(bad("expected value or start:stop:step")),
    }
}
