//! `sqfree` subcommands. Every run is a pure function of its arguments: the
//! same [`RunConfig`] always produces the same bytes.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use sqfree_core::expsum::ScanReport;
use sqfree_core::{
    build_mobius, classify_arc, error_exponent_fit, lemma_diagnostics, rep_counts_all, s_decomposed, s_direct,
    singular_series, trace_pipeline, w_bound_ratio, w_count, ArcKind, ExpSumValue, MobiusTable, RepResult,
};

use crate::error::CliError;
use crate::output::{csv_document, json_document, resolve_out_path, write_atomic, Format};
use crate::parallel::{scan_minor_arcs_par, wscan};

#[derive(Debug, Clone, Parser)]
#[command(name = "sqfree", version, about = "Exponential sums over squarefree integers")]
pub struct RunConfig {
    /// Seed for every random draw in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output encoding; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MethodArg {
    Direct,
    Decomposed,
    Both,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Squarefree counts Q(N) from the Möbius sieve.
    Sieve {
        #[arg(long)]
        limit: usize,
        /// Emit (N, Q(N)) rows.
        #[arg(long)]
        emit_counts: bool,
        /// Row spacing; defaults to powers of ten plus the limit.
        #[arg(long)]
        every: Option<usize>,
    },
    /// Major/minor arc classification of one α or a grid.
    Arcs {
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        /// Classify alpha = i/K for i = 0..K.
        #[arg(long)]
        grid: Option<usize>,
    },
    /// S(α) by one or both evaluation routes.
    Expsum {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
    },
    /// Dyadic block trace of the bound on |S(α)|.
    Trace {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        qdissect: u64,
    },
    /// Seeded minor-arc scan of |S(α)|·Q/N.
    Scan {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        samples: usize,
        /// Also write the JSON summary to this path.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// W(D, z) with optional bound ratio and proof diagnostics.
    Wcount {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        z: f64,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, requires = "q")]
        diagnostics: bool,
    },
    /// W(D, z) bound ratios over a (D, z) grid.
    Wscan {
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<u64>,
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<f64>,
        /// Fixed q; defaults to the largest convergent denominator below 4D².
        #[arg(long)]
        q: Option<u64>,
    },
    /// Exact representation counts r_ν.
    Reps {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        nu: u32,
        /// All r_ν(n), n ≤ N, as CSV.
        #[arg(long)]
        all: bool,
        /// Compare several N at once (CSV of results).
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<u64>>,
        #[arg(long, default_value_t = 10_000)]
        primes: u64,
    },
    /// Truncated singular series 𝔖_ν(N).
    Singular {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        nu: u32,
        #[arg(long, default_value_t = 10_000)]
        primes: u64,
    },
    /// Power-law fit of |error| against N from a CSV file.
    Fit {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Rendered artifact of a run plus anything destined for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub body: String,
    /// Secondary file (scan summary) to write alongside the main output.
    pub side: Option<(PathBuf, String)>,
    pub warnings: Vec<String>,
}

impl Artifact {
    fn new(body: String) -> Self {
        Artifact { body, side: None, warnings: Vec::new() }
    }
}

fn table_for(n: u64) -> Result<MobiusTable, CliError> {
    let limit = usize::try_from(n).map_err(|_| CliError::Capacity(format!("N = {n} exceeds address space")))?;
    Ok(build_mobius(limit.max(1))?)
}

fn value_json(v: &ExpSumValue) -> serde_json::Value {
    json!({ "re": v.re, "im": v.im, "abs": v.abs(), "method": v.method })
}

fn rep_row(r: &RepResult) -> Vec<String> {
    vec![r.n.to_string(), r.count.to_string(), r.singular.to_string(), r.main_term.to_string(), r.rel_error.to_string()]
}

const REP_HEADER: [&str; 5] = ["N", "count", "singular", "main_term", "rel_error"];

/// Builds the artifact for `config` without touching the filesystem (except
/// reading `fit --input`).
pub fn render(config: &RunConfig) -> Result<Artifact, CliError> {
    let fmt = config.output;
    match &config.command {
        &Command::Sieve { limit, emit_counts, every } => {
            let table = build_mobius(limit)?;
            let mut points: Vec<usize> = match every {
                Some(0) => return Err(CliError::validation("every must be at least 1")),
                Some(k) => (k..=limit).step_by(k).collect(),
                None => std::iter::successors(Some(1usize), |&p| p.checked_mul(10)).take_while(|&p| p <= limit).collect(),
            };
            if points.last() != Some(&limit) {
                points.push(limit);
            }
            if !emit_counts {
                points = vec![limit];
            }
            let rows: Vec<(usize, u64)> =
                points.iter().map(|&n| Ok((n, table.squarefree_count(n)?))).collect::<Result<_, CliError>>()?;
            match fmt.unwrap_or(Format::Csv) {
                Format::Csv => Ok(Artifact::new(csv_document(
                    &["N", "count"],
                    rows.iter().map(|(n, c)| [n.to_string(), c.to_string()]),
                )?)),
                Format::Json => Ok(Artifact::new(json_document(&json!({
                    "limit": limit,
                    "primes": table.primes().len(),
                    "counts": rows.iter().map(|&(n, c)| json!({ "N": n, "count": c })).collect::<Vec<_>>(),
                }))?)),
            }
        }

        &Command::Arcs { alpha, n, q, grid } => {
            let mut warnings = Vec::new();
            if q.saturating_mul(q) > n {
                warnings.push(format!("Q = {q} exceeds sqrt(N); the minor-arc bound is stated for Q <= N^(1/2)"));
            }
            let art = match (alpha, grid) {
                (Some(a), None) => {
                    let label = classify_arc(a, n, q)?;
                    match fmt.unwrap_or(Format::Json) {
                        Format::Json => json_document(&json!({ "alpha": a, "n": n, "q": q, "label": label }))?,
                        Format::Csv => csv_document(&["alpha", "kind", "a", "q", "err"], [arc_row(a, &label)])?,
                    }
                }
                (None, Some(k)) if k >= 1 => {
                    let rows = (0..k)
                        .map(|i| {
                            let a = i as f64 / k as f64;
                            Ok(arc_row(a, &classify_arc(a, n, q)?))
                        })
                        .collect::<Result<Vec<_>, CliError>>()?;
                    csv_document(&["alpha", "kind", "a", "q", "err"], rows)?
                }
                (None, Some(_)) => return Err(CliError::validation("grid must be at least 1")),
                _ => return Err(CliError::validation("arcs needs exactly one of --alpha or --grid")),
            };
            Ok(Artifact { body: art, side: None, warnings })
        }

        &Command::Expsum { n, alpha, method } => {
            let table = table_for(n)?;
            let body = match method {
                MethodArg::Direct | MethodArg::Decomposed => {
                    let v = if method == MethodArg::Direct {
                        s_direct(&table, n, alpha)?
                    } else {
                        s_decomposed(&table, n, alpha)?
                    };
                    let mut doc = value_json(&v);
                    doc["n"] = json!(n);
                    doc["alpha"] = json!(alpha);
                    doc
                }
                MethodArg::Both => {
                    let d = s_direct(&table, n, alpha)?;
                    let e = s_decomposed(&table, n, alpha)?;
                    let q = table.squarefree_count(n as usize)? as f64;
                    let diff = d.distance(&e);
                    json!({
                        "n": n,
                        "alpha": alpha,
                        "re": d.re,
                        "im": d.im,
                        "abs": d.abs(),
                        "methods": ["direct", "decomposed"],
                        "direct": value_json(&d),
                        "decomposed": value_json(&e),
                        "difference": diff,
                        "agreement": diff <= 1e-6 * q.max(1.0),
                    })
                }
            };
            if fmt == Some(Format::Csv) {
                return Err(CliError::validation("expsum emits JSON only"));
            }
            Ok(Artifact::new(json_document(&body)?))
        }

        &Command::Trace { n, alpha, qdissect } => {
            if fmt == Some(Format::Csv) {
                return Err(CliError::validation("trace emits JSON only"));
            }
            let table = table_for(n)?;
            let report = trace_pipeline(&table, n, alpha, qdissect)?;
            let mut doc = serde_json::to_value(&report)?;
            doc["thresholds"] = json!({
                "regime_split": "LargeD iff D > sqrt(q)/4",
                "lemma_hypothesis": "D^2 > q/4",
            });
            Ok(Artifact::new(json_document(&doc)?))
        }

        Command::Scan { n, q, samples, summary } => {
            let (n, q, samples) = (*n, *q, *samples);
            sqfree_core::expsum::check_scan(n, q, samples)?;
            let table = table_for(n)?;
            let report = scan_minor_arcs_par(&table, n, q, samples, config.seed)?;
            let summary_doc = json_document(&scan_summary(&report))?;
            let body = match fmt.unwrap_or(Format::Csv) {
                Format::Csv => csv_document(
                    &["alpha", "abs_s", "ratio", "arc_kind"],
                    report.rows.iter().map(|r| {
                        [r.alpha.to_string(), r.abs_s.to_string(), r.ratio.to_string(), r.kind.as_str().to_string()]
                    }),
                )?,
                Format::Json => summary_doc.clone(),
            };
            let side = summary.as_ref().map(|p| (p.clone(), summary_doc));
            Ok(Artifact { body, side, warnings: Vec::new() })
        }

        &Command::Wcount { alpha, d, z, q, diagnostics } => {
            if fmt == Some(Format::Csv) {
                return Err(CliError::validation("wcount emits JSON only"));
            }
            let doc = match (q, diagnostics) {
                (Some(q), true) => serde_json::to_value(lemma_diagnostics(alpha, d, z, q)?)?,
                (Some(q), false) => json!({
                    "alpha": alpha, "d": d, "z": z, "q": q,
                    "w": w_count(alpha, d, z)?,
                    "bound_rhs": sqfree_core::counting::w_bound_rhs(d, z, q),
                    "ratio": w_bound_ratio(alpha, d, z, q)?,
                }),
                (None, _) => json!({ "alpha": alpha, "d": d, "z": z, "w": w_count(alpha, d, z)? }),
            };
            Ok(Artifact::new(json_document(&doc)?))
        }

        Command::Wscan { alpha, d, z, q } => {
            let rows = wscan(*alpha, d, z, *q)?;
            let body = match fmt.unwrap_or(Format::Csv) {
                Format::Csv => csv_document(
                    &["D", "z", "q", "w", "bound_rhs", "ratio"],
                    rows.iter().map(|r| {
                        [
                            r.d.to_string(),
                            r.z.to_string(),
                            r.q.to_string(),
                            r.w.to_string(),
                            r.bound_rhs.to_string(),
                            r.ratio.to_string(),
                        ]
                    }),
                )?,
                Format::Json => json_document(&json!({ "alpha": alpha, "rows": rows }))?,
            };
            Ok(Artifact::new(body))
        }

        Command::Reps { n, nu, all, ns, primes } => render_reps(*n, *nu, *all, ns.as_deref(), *primes, fmt),

        &Command::Singular { n, nu, primes } => {
            if fmt == Some(Format::Csv) {
                return Err(CliError::validation("singular emits JSON only"));
            }
            let s = singular_series(n, nu, primes)?;
            Ok(Artifact::new(json_document(&json!({
                "n": n, "nu": nu, "prime_limit": primes, "value": s.value, "tail_bound": s.tail_bound,
            }))?))
        }

        Command::Fit { input } => {
            if fmt == Some(Format::Csv) {
                return Err(CliError::validation("fit emits JSON only"));
            }
            let points = read_fit_points(input)?;
            let fit = error_exponent_fit(&points)?;
            Ok(Artifact::new(json_document(&json!({
                "slope": fit.slope, "intercept": fit.intercept, "points": points.len(),
            }))?))
        }
    }
}

fn arc_row(alpha: f64, label: &sqfree_core::ArcLabel) -> [String; 5] {
    match label.witness {
        Some(w) => [alpha.to_string(), label.kind.as_str().into(), w.a.to_string(), w.q.to_string(), w.err.to_string()],
        None => [alpha.to_string(), label.kind.as_str().into(), String::new(), String::new(), String::new()],
    }
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    n: u64,
    q: u64,
    samples: usize,
    seed: u64,
    generator: &'a str,
    minor_count: usize,
    major_count: usize,
    max_ratio: f64,
    argmax_alpha: f64,
    p50: f64,
    p90: f64,
    p99: f64,
}

fn scan_summary(r: &ScanReport) -> ScanSummary<'_> {
    ScanSummary {
        n: r.n,
        q: r.q,
        samples: r.rows.len(),
        seed: r.seed,
        generator: r.generator,
        minor_count: r.minor_count,
        major_count: r.rows.iter().filter(|s| s.kind == ArcKind::Major).count(),
        max_ratio: r.max_ratio,
        argmax_alpha: r.argmax_alpha,
        p50: r.quantiles[0].1,
        p90: r.quantiles[1].1,
        p99: r.quantiles[2].1,
    }
}

fn render_reps(
    n: Option<u64>,
    nu: u32,
    all: bool,
    ns: Option<&[u64]>,
    primes: u64,
    fmt: Option<Format>,
) -> Result<Artifact, CliError> {
    match (n, ns) {
        (Some(n), None) if all => {
            if fmt == Some(Format::Json) {
                return Err(CliError::validation("reps --all emits CSV only"));
            }
            let table = table_for(n)?;
            let counts = rep_counts_all(&table, n, nu)?;
            Ok(Artifact::new(csv_document(&["n", "r_nu"], counts.iter().map(|(k, r)| [k.to_string(), r.to_string()]))?))
        }
        (Some(n), None) => {
            let table = table_for(n)?;
            let counts = rep_counts_all(&table, n, nu)?;
            let count = counts.get(n).unwrap_or(0);
            if nu < 2 {
                // no singular series for ν = 1; r_1 is μ² itself
                return Ok(Artifact::new(json_document(&json!({ "n": n, "nu": nu, "count": count }))?));
            }
            let r = RepResult::from_count(n, nu, count, &singular_series(n, nu, primes)?);
            match fmt.unwrap_or(Format::Json) {
                Format::Json => Ok(Artifact::new(json_document(&r)?)),
                Format::Csv => Ok(Artifact::new(csv_document(&REP_HEADER, [rep_row(&r)])?)),
            }
        }
        (None, Some(list)) if !all => {
            if fmt == Some(Format::Json) {
                return Err(CliError::validation("reps --ns emits CSV only"));
            }
            let max = *list.iter().max().ok_or_else(|| CliError::validation("ns must not be empty"))?;
            let table = table_for(max)?;
            let counts = rep_counts_all(&table, max, nu)?;
            let rows = list
                .iter()
                .map(|&k| {
                    let c = counts.get(k).filter(|_| k >= 1).ok_or_else(|| CliError::validation("each N must be at least 1"))?;
                    Ok(rep_row(&RepResult::from_count(k, nu, c, &singular_series(k, nu, primes)?)))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(Artifact::new(csv_document(&REP_HEADER, rows)?))
        }
        _ => Err(CliError::validation("reps needs --n (optionally with --all) or --ns")),
    }
}

/// Reads (N, abs_error) points from either an `N,abs_error` file or a
/// `N,count,singular,main_term,rel_error` file written by `reps --ns`.
pub fn read_fit_points(path: &std::path::Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::validation(format!("cannot read input: {e}")))?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let n_col = col("N").ok_or_else(|| CliError::validation("input must have an N column"))?;
    let source = match (col("abs_error"), col("count"), col("main_term")) {
        (Some(e), _, _) => Err(e),
        (None, Some(c), Some(m)) => Ok((c, m)),
        _ => return Err(CliError::validation("input needs abs_error or count and main_term columns")),
    };
    let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| CliError::validation(format!("not a number: {s:?}")));
    let mut points = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let n = parse(&rec[n_col])?;
        let err = match source {
            Err(e) => parse(&rec[e])?,
            Ok((c, m)) => (parse(&rec[c])? - parse(&rec[m])?).abs(),
        };
        points.push((n, err));
    }
    Ok(points)
}

/// Renders and writes the artifact. Nothing is written on error.
pub fn run(config: &RunConfig) -> Result<Artifact, CliError> {
    let art = render(config)?;
    match &config.out {
        Some(p) => write_atomic(&resolve_out_path(p), art.body.as_bytes())?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(art.body.as_bytes())?;
        }
    }
    if let Some((p, doc)) = &art.side {
        write_atomic(&resolve_out_path(p), doc.as_bytes())?;
    }
    Ok(art)
}

/// Parses `args`, runs, reports errors as one JSON line on stderr, and
/// returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string().lines().next().unwrap_or_default().trim_start_matches("error: ").to_string();
            eprintln!("{}", CliError::Validation(if detail.is_empty() { msg } else { detail }).to_line());
            return 2;
        }
    };
    match run(&config) {
        Ok(art) => {
            for w in &art.warnings {
                eprintln!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("{}", e.to_line());
            e.exit_code()
        }
    }
}
