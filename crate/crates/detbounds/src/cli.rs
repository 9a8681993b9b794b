//! Single-binary command line: bound tables, constructions, the exhaustive
//! search, verification claims, and the log-determinant series.
//!
//! Exit codes: 0 success, 1 internal error, 2 hypothesis violation or
//! inapplicable claim (reported, not crashed), 64 usage.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{lower_bound_table, upper_bound_table, BoundTable};
use crate::error::{Error, Result};
use crate::matrix::{format_matrix, parse_matrix, DenseMatrix};
use crate::rational::{parse_rational, rat_int, to_f64, Rational};
use crate::search::{
    envelope_to_json, search_maxdet_with, SearchConfig, COMFORTABLE_SEARCH_ORDER,
};
use crate::verify::{Status, VerificationReport};

/// Fixed default seed so runs are reproducible unless --random-seed is given.
pub const DEFAULT_SEED: u64 = 0x5eed_d00d_2026;

/// clap value parser for "p/q" or integer flags, so bad values fail at
/// argument parsing (exit 64) before any computation.
fn rational_flag(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Parser)]
#[command(
    name = "detbounds",
    version,
    about = "Exact determinant bounds for perturbed diagonal matrices",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
    /// Write the report to a file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the lower and upper bound tables for (n, eps, delta).
    Bounds {
        #[arg(long)]
        n: usize,
        /// Perturbation size, "p/q" or an integer.
        #[arg(long, value_parser = rational_flag)]
        eps: Rational,
        /// Diagonal perturbation; defaults to 0.
        #[arg(long, value_parser = rational_flag)]
        delta: Option<Rational>,
        /// Also emit a sample grid of (eps, float value) rows with this many
        /// steps up to eps.
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Emit a constructed matrix in the text format.
    Construct {
        #[arg(long, value_enum)]
        kind: ConstructKind,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_flag)]
        eps: Option<Rational>,
        #[arg(long, value_parser = rational_flag)]
        delta: Option<Rational>,
        /// Use the (1+eps)I + eps(U - U^T) variant of skew-tri.
        #[arg(long)]
        inflate: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Exhaustive maximal-determinant search over unit-diagonal ±eps
    /// matrices.
    Search {
        #[arg(long)]
        n: usize,
        /// Right end of the search domain (0, domain-hi].
        #[arg(long, default_value = "2", value_parser = rational_flag)]
        domain_hi: Rational,
        /// Worker threads for the scan; 0 uses the default pool.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also list every canonical witness per piece (n <= 4).
        #[arg(long)]
        all_witnesses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run a verification claim and report pass/fail/inapplicable.
    Verify {
        #[arg(long, value_enum)]
        claim: Claim,
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = rational_flag)]
        eps: Option<Rational>,
        #[arg(long, value_parser = rational_flag)]
        delta: Option<Rational>,
        /// Sample the diagonal as exactly zero (sandwich only).
        #[arg(long)]
        zero_diag: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Draw the seed from system entropy instead of the fixed default.
        #[arg(long)]
        random_seed: bool,
        /// Matrix file for theorem1/theorem4-forward inputs.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// theorem4 direction: converse (default) or forward.
        #[arg(long, value_enum)]
        direction: Option<Direction>,
        #[command(flatten)]
        common: Common,
    },
    /// Log-determinant of I - E by the trace power series.
    Fredholm {
        /// Matrix file holding E in the text format.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_terms: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Claim {
    Sandwich,
    Theorem1,
    Remark1,
    Sharpness,
    Theorem4,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Converse,
    Forward,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructKind {
    Toeplitz,
    SkewTri,
    SkewHadamard,
    PerturbIdentity,
}

pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::HypothesisViolated { .. }
        | Error::NotDiagonallyDominant { .. }
        | Error::NotPolynomial { .. }
        | Error::NotNonnegative { .. }
        | Error::Unconstructible { .. }
        | Error::InvalidOrder { .. }
        | Error::OrderTooLarge { .. }
        | Error::NonConvergent { .. }
        | Error::ZeroPolynomial
        | Error::Parse(_) => 2,
        Error::Timeout => 1,
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Bounds {
            n,
            eps,
            delta,
            grid,
            common,
        } => {
            let lower = lower_bound_table(n, &eps, delta.as_ref());
            let upper = upper_bound_table(n, &eps);
            let grid_rows = grid.map(|steps| bound_grid(n, &eps, delta.as_ref(), steps));
            let output = match common.emit {
                Emit::Json => {
                    let mut doc = json!({
                        "lower": serde_json::to_value(lower.to_json()).unwrap(),
                        "upper": serde_json::to_value(upper.to_json()).unwrap(),
                    });
                    if let Some(rows) = grid_rows {
                        doc["grid"] = serde_json::Value::Array(rows);
                    }
                    serde_json::to_string_pretty(&doc).unwrap()
                }
                Emit::Text => {
                    let mut s = String::new();
                    s.push_str(&bound_table_text(&lower, "lower bounds"));
                    s.push('\n');
                    s.push_str(&bound_table_text(&upper, "upper bounds"));
                    if let Some(rows) = grid_rows {
                        s.push_str("\ngrid:\n");
                        for row in rows {
                            s.push_str(&serde_json::to_string(&row).unwrap());
                            s.push('\n');
                        }
                    }
                    s
                }
            };
            write_output(&common, &output)?;
            Ok(0)
        }
        Command::Construct {
            kind,
            n,
            eps,
            delta,
            inflate,
            common,
        } => {
            let need_eps = || {
                eps.clone().ok_or_else(|| Error::Parse("--eps is required for this kind".into()))
            };
            let (matrix, compact): (DenseMatrix<Rational>, Option<Vec<String>>) = match kind {
                ConstructKind::Toeplitz => (
                    crate::construct::toeplitz_f(
                        n,
                        &delta.clone().unwrap_or_else(|| rat_int(0)),
                        &need_eps()?,
                    ),
                    None,
                ),
                ConstructKind::SkewTri => {
                    (crate::construct::skew_tri(n, &need_eps()?, inflate), None)
                }
                ConstructKind::SkewHadamard => {
                    let h = crate::construct::skew_hadamard(n)?;
                    let rows = h.compact_rows();
                    (h.matrix().clone(), Some(rows))
                }
                ConstructKind::PerturbIdentity => {
                    let h = crate::construct::skew_hadamard(n)?;
                    (crate::construct::perturb_identity(&h, &need_eps()?), None)
                }
            };
            let output = match common.emit {
                Emit::Json => {
                    let rows: Vec<Vec<String>> = (0..matrix.order())
                        .map(|i| {
                            (0..matrix.order())
                                .map(|j| matrix.get(i, j).to_string())
                                .collect()
                        })
                        .collect();
                    let mut doc = json!({"n": matrix.order(), "rows": rows});
                    if let Some(c) = &compact {
                        doc["compact"] = json!(c);
                    }
                    serde_json::to_string_pretty(&doc).unwrap()
                }
                Emit::Text => {
                    let mut s = format_matrix(&matrix);
                    if let Some(c) = &compact {
                        s.push('\n');
                        for row in c {
                            s.push_str(row);
                            s.push('\n');
                        }
                    }
                    s
                }
            };
            write_output(&common, &output)?;
            Ok(0)
        }
        Command::Search {
            n,
            domain_hi,
            threads,
            all_witnesses,
            common,
        } => {
            if n > COMFORTABLE_SEARCH_ORDER {
                eprintln!(
                    "warning: order {n} scans {} patterns; expect a very long run",
                    crate::search::canonical_pattern_count(n)
                );
            }
            let config = SearchConfig {
                domain_hi,
                threads,
                ..SearchConfig::default()
            };
            let env = search_maxdet_with(n, &config)?;
            let doc = envelope_to_json(n, &env, all_witnesses)?;
            let output = match common.emit {
                Emit::Json => serde_json::to_string_pretty(&doc).unwrap(),
                Emit::Text => envelope_text(&doc),
            };
            write_output(&common, &output)?;
            Ok(0)
        }
        Command::Verify {
            claim,
            n,
            eps,
            delta,
            zero_diag,
            trials,
            seed,
            random_seed,
            matrix,
            direction,
            common,
        } => {
            let seed = seed.unwrap_or_else(|| {
                if random_seed {
                    rand::random()
                } else {
                    DEFAULT_SEED
                }
            });
            let report = run_claim(
                claim, n, eps, delta, zero_diag, trials, seed, matrix, direction,
            )?;
            let output = match common.emit {
                Emit::Json => serde_json::to_string_pretty(&report).unwrap(),
                Emit::Text => report_text(&report),
            };
            write_output(&common, &output)?;
            Ok(match report.status {
                Status::Pass => 0,
                Status::Inapplicable => 2,
                Status::Fail => 1,
            })
        }
        Command::Fredholm {
            matrix,
            tol,
            max_terms,
            common,
        } => {
            let text = std::fs::read_to_string(&matrix)
                .map_err(|e| Error::Parse(format!("{}: {e}", matrix.display())))?;
            let e = parse_matrix(&text)?;
            let r = crate::fredholm::fredholm_log_det(&e, tol, max_terms)?;
            let exact = crate::matrix::det_rational(&DenseMatrix::identity(e.order()).sub(&e));
            let doc = json!({
                "log_det": r.log_det,
                "det": r.log_det.exp(),
                "terms_used": r.terms_used,
                "tail_bound": r.tail_bound,
                "exact_det": exact.to_string(),
                "exact_det_float": to_f64(&exact),
            });
            let output = match common.emit {
                Emit::Json => serde_json::to_string_pretty(&doc).unwrap(),
                Emit::Text => format!(
                    "log det(I-E) = {} ({} terms, tail <= {})\ndet(I-E) = {} (exact {})\n",
                    r.log_det,
                    r.terms_used,
                    r.tail_bound,
                    r.log_det.exp(),
                    exact
                ),
            };
            write_output(&common, &output)?;
            Ok(0)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_claim(
    claim: Claim,
    n: usize,
    eps: Option<Rational>,
    delta: Option<Rational>,
    zero_diag: bool,
    trials: usize,
    seed: u64,
    matrix: Option<PathBuf>,
    direction: Option<Direction>,
) -> Result<VerificationReport> {
    let need_eps =
        || eps.clone().ok_or_else(|| Error::Parse("--eps is required for this claim".into()));
    let delta_or_zero = delta.clone().unwrap_or_else(|| rat_int(0));
    match claim {
        Claim::Sandwich => {
            crate::verify::sandwich_test(n, &need_eps()?, &delta_or_zero, zero_diag, trials, seed)
        }
        Claim::Theorem1 => {
            let f = match matrix {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    parse_matrix(&text)?
                }
                None => crate::construct::toeplitz_f(n, &delta_or_zero, &need_eps()?),
            };
            crate::verify::theorem1_test(&f, trials, seed)
        }
        Claim::Remark1 => crate::verify::remark1_counterexample(n),
        Claim::Sharpness => crate::verify::sharpness_check(n, &need_eps()?, &delta_or_zero),
        Claim::Theorem4 => match direction.unwrap_or(Direction::Converse) {
            Direction::Converse => {
                let h = crate::construct::skew_hadamard(n)?;
                crate::verify::theorem4_check_converse(&h)
            }
            Direction::Forward => {
                let m = match matrix {
                    Some(path) => {
                        let text = std::fs::read_to_string(&path)
                            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                        parse_matrix(&text)?
                    }
                    None => crate::construct::skew_hadamard(n)?.matrix().clone(),
                };
                crate::verify::theorem4_check_forward(&m).map(|(r, _)| r)
            }
        },
    }
}

fn bound_grid(
    n: usize,
    eps: &Rational,
    delta: Option<&Rational>,
    steps: usize,
) -> Vec<serde_json::Value> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|i| {
            let e = eps * Rational::new((i as i64).into(), (steps as i64).into());
            let lower = lower_bound_table(n, &e, delta);
            let upper = upper_bound_table(n, &e);
            let mut values = serde_json::Map::new();
            for (name, entry) in lower.entries.iter().chain(upper.entries.iter()) {
                if entry.valid {
                    values.insert(name.clone(), json!(entry.float));
                }
            }
            json!({"eps": e.to_string(), "values": values})
        })
        .collect()
}

fn bound_table_text(t: &BoundTable, title: &str) -> String {
    let mut s = format!(
        "{title} (n = {}, eps = {}{})\n",
        t.n,
        t.eps,
        t.delta
            .as_ref()
            .map(|d| format!(", delta = {d}"))
            .unwrap_or_default()
    );
    for (name, e) in &t.entries {
        let exact = match &e.exact {
            crate::bounds::ExactExpr::Rational(x) => x.to_string(),
            crate::bounds::ExactExpr::Pow { base, exp } => format!("({base})^({exp})"),
            crate::bounds::ExactExpr::ExpTimes { coeff, exponent } => {
                format!("{coeff}*exp({exponent})")
            }
        };
        s.push_str(&format!(
            "  {name:<24} {exact:<28} ~ {:<22.12} {}\n",
            e.float,
            if e.valid {
                "valid".to_string()
            } else {
                format!("INVALID: needs {}", e.hypothesis)
            }
        ));
    }
    s
}

fn envelope_text(doc: &crate::search::EnvelopeJson) -> String {
    let mut s = format!("maximal determinant envelope, n = {}\n", doc.n);
    for (i, p) in doc.pieces.iter().enumerate() {
        let poly = crate::search::poly_from_json(&p.poly).expect("own output parses");
        s.push_str(&format!(
            "  piece {} on ({}, {}]: {}   coeffs {}\n",
            i, p.interval[0], p.interval[1], poly.pretty(), poly
        ));
        for line in p.witness.lines() {
            s.push_str(&format!("      {line}\n"));
        }
    }
    for (i, b) in doc.breakpoints.iter().enumerate() {
        let poly = crate::search::poly_from_json(&b.cubic_or_poly).expect("own output parses");
        match &b.exact {
            Some(x) => s.push_str(&format!(
                "  breakpoint {i}: exactly {x}, root of {poly}\n"
            )),
            None => s.push_str(&format!(
                "  breakpoint {i}: in ({}, {}], root of {poly}\n",
                b.bracket[0], b.bracket[1]
            )),
        }
    }
    if let Some(all) = &doc.all_witnesses {
        for (i, pats) in all.iter().enumerate() {
            s.push_str(&format!("  piece {i} has {} canonical witnesses\n", pats.len()));
        }
    }
    s
}

fn report_text(r: &VerificationReport) -> String {
    let mut s = format!(
        "claim: {}\nstatus: {:?}\nseed: {}\ntrials: {}\ndetail: {}\n",
        r.claim, r.status, r.seed, r.trials, r.detail
    );
    for f in r.failures.iter().take(10) {
        s.push_str(&format!(
            "  failure at trial {}: observed {} vs bound {} (input {})\n",
            f.trial, f.observed, f.bound, f.input_digest
        ));
    }
    if r.failures.len() > 10 {
        s.push_str(&format!("  ... {} failures total\n", r.failures.len()));
    }
    s
}

fn write_output(common: &Common, output: &str) -> Result<()> {
    match &common.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            f.write_all(output.as_bytes())
                .and_then(|_| if output.ends_with('\n') { Ok(()) } else { f.write_all(b"\n") })
                .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        }
        None => {
            if output.ends_with('\n') {
                print!("{output}");
            } else {
                println!("{output}");
            }
        }
    }
    Ok(())
}
