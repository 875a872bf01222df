//! Command-line front end. [`run`] takes the argument vector and output
//! streams and returns the process exit code.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{self, Catalog, Expr, Status};
use crate::modularity::{find_scaling, robins_check, GEtaList};
use crate::rat::{self, Rational};
use crate::search::fit_product;
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "qseries", version, about = "Exact q-series: Nahm sums, products, identity verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Corpus file (defaults to the built-in corpus)
    #[arg(long, env = "QSERIES_CORPUS")]
    corpus: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Selection {
    /// Glob over identity ids
    #[arg(long)]
    filter: Option<String>,
    /// Only entries with this status
    #[arg(long, value_parser = parse_status)]
    status: Option<Status>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify one identity
    Verify {
        #[arg(long)]
        id: String,
        #[arg(long, default_value = "100", value_parser = parse_order)]
        order: Rational,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Include wall-clock timings
        #[arg(long)]
        timings: bool,
    },
    /// Verify every selected corpus entry
    VerifyAll {
        #[arg(long, default_value = "100", value_parser = parse_order)]
        order: Rational,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        select: Selection,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Worker threads (default: all cores)
        #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: Option<u16>,
        #[arg(long)]
        timings: bool,
    },
    /// Expand an expression
    Eval {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "100", value_parser = parse_order)]
        order: Rational,
        /// Append the O(q^N) term
        #[arg(long)]
        show_order: bool,
    },
    /// m-dissect an expression or the left side of a corpus entry
    Dissect {
        #[arg(long, conflicts_with = "id", required_unless_present = "id")]
        expr: Option<String>,
        #[arg(long)]
        id: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        m: i64,
        #[arg(long, default_value = "100", value_parser = parse_order)]
        order: Rational,
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Robins' modularity criterion for a generalized eta-product
    Modcheck {
        /// Bracket list [[N,g,r],...]
        #[arg(long, allow_hyphen_values = true)]
        geta: String,
        #[arg(long)]
        level: Option<i64>,
    },
    /// Least scaling tau -> k tau that makes a geta-list pass the criterion
    Scale {
        #[arg(long, allow_hyphen_values = true)]
        geta: String,
        #[arg(long)]
        level: Option<i64>,
    },
    /// Fit an expansion as a product and J-quotient
    Fit {
        #[arg(long)]
        expr: String,
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        modulus: i64,
        #[arg(long, default_value = "100", value_parser = parse_order)]
        order: Rational,
    },
    /// Print the corpus in its text format
    Corpus {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        select: Selection,
        /// Only list ids and statuses
        #[arg(long)]
        list: bool,
    },
}

fn parse_order(s: &str) -> std::result::Result<Rational, String> {
    let r = rat::parse_rational(s).ok_or_else(|| format!("'{s}' is not a rational number"))?;
    if r < Rational::from_integer(1) {
        return Err(format!("order must be at least 1, got {r}"));
    }
    Ok(r)
}

fn parse_status(s: &str) -> std::result::Result<Status, String> {
    s.parse()
}

fn load(c: &CorpusArgs) -> Result<Catalog> {
    match &c.corpus {
        None => Ok(catalog::builtin()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            Catalog::parse(&text)
        }
    }
}

fn report_line(r: &catalog::VerifyReport, timings: bool) -> String {
    let mut s = format!("{}: {} (order {})", r.id, r.outcome, r.order);
    if timings {
        s.push_str(&format!(" [{:.3}s]", r.seconds));
    }
    s
}

/// Run with `argv` (including the program name). Exit codes: 0 success,
/// 1 a check failed, 2 usage or parse error.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.cmd, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse { .. } | Error::UnknownIdentity(_) | Error::InvalidArgument(_) | Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    match cmd {
        Command::Verify { id, order, corpus, format, timings } => {
            let cat = load(&corpus)?;
            let r = catalog::verify(cat.get(&id)?, order);
            match format {
                Format::Text => writeln!(out, "{}", report_line(&r, timings)).map_err(io)?,
                Format::Json => writeln!(out, "{}", catalog::reports_to_json(std::slice::from_ref(&r), timings)).map_err(io)?,
            }
            Ok(if r.outcome.is_equal() { 0 } else { 1 })
        }
        Command::VerifyAll { order, corpus, select, format, jobs, timings } => {
            let cat = load(&corpus)?.filter(select.filter.as_deref(), select.status)?;
            let reports = catalog::verify_all(&cat, order, jobs.map(usize::from));
            let ok = reports.iter().all(|r| r.outcome.is_equal());
            match format {
                Format::Text => {
                    for r in &reports {
                        writeln!(out, "{}", report_line(r, timings)).map_err(io)?;
                    }
                    let n_ok = reports.iter().filter(|r| r.outcome.is_equal()).count();
                    writeln!(out, "{n_ok}/{} equal", reports.len()).map_err(io)?;
                }
                Format::Json => writeln!(out, "{}", catalog::reports_to_json(&reports, timings)).map_err(io)?,
            }
            Ok(if ok { 0 } else { 1 })
        }
        Command::Eval { expr, order, show_order } => {
            let s = catalog::parse_expr(&expr)?.eval(order)?;
            let text = if show_order { s.to_string_with_order() } else { s.to_string() };
            writeln!(out, "{text}").map_err(io)?;
            Ok(0)
        }
        Command::Dissect { expr, id, m, order, corpus } => {
            let e: Expr = match (expr, id) {
                (Some(x), _) => catalog::parse_expr(&x)?,
                (None, Some(id)) => load(&corpus)?.get(&id)?.lhs.clone(),
                (None, None) => return Err(Error::InvalidArgument("need --expr or --id".into())),
            };
            let rep = catalog::dissection_check(&e, m, &[], order)?;
            for c in &rep.components {
                writeln!(out, "F{}: {}", c.index, c.series.to_string_with_order()).map_err(io)?;
            }
            Ok(0)
        }
        Command::Modcheck { geta, level } => {
            let list = GEtaList::parse(&geta, level)?;
            let rep = robins_check(&list);
            write!(out, "{}", rep.trace(&list)).map_err(io)?;
            writeln!(out, "valinf={} val0={} modular={}", rep.valinf, rep.val0, rep.is_modular).map_err(io)?;
            Ok(if rep.is_modular { 0 } else { 1 })
        }
        Command::Scale { geta, level } => {
            let list = GEtaList::parse(&geta, level)?;
            let s = find_scaling(&list);
            writeln!(out, "k={} n0={} level={}", s.k, s.n0, s.level).map_err(io)?;
            Ok(0)
        }
        Command::Fit { expr, modulus, order } => {
            let s = catalog::parse_expr(&expr)?.eval(order)?;
            match fit_product(&s, modulus, order)? {
                Some(fit) => {
                    writeln!(out, "{fit}").map_err(io)?;
                    Ok(0)
                }
                None => {
                    writeln!(out, "no representation found within window (modulus {modulus}, order {order})")
                        .map_err(io)?;
                    Ok(1)
                }
            }
        }
        Command::Corpus { corpus, select, list } => {
            let cat = load(&corpus)?.filter(select.filter.as_deref(), select.status)?;
            if list {
                for e in cat.entries() {
                    writeln!(out, "{}\t{}\t{}", e.id, e.status, e.provenance).map_err(io)?;
                }
            } else {
                write!(out, "{}", cat.to_text()).map_err(io)?;
            }
            Ok(0)
        }
    }
}
