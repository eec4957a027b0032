//! Command-line front end. [`run`] parses arguments, executes one command
//! and writes a deterministic line-oriented report.
//!
//! Exit codes: 0 when the check holds, 1 when a violation or failed
//! verification is reported, 2 for usage, input and parse errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::core2d::{classify_two_orbifold, ConeOrder, TwoOrbifold};
use crate::splitproc::{run_split, SplitStrategy};
use crate::sumtree::{canonicalize, efficiency_violations, equivalent, RealizationTree};
use crate::text::{parse, Document};
use crate::verify::{alpha_suite, run_all, tree_lemma_suite, SuiteReport, VerifyMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "orbsum",
    version,
    about = "Connected-sum trees of spherical 3-orbifolds"
)]
pub struct Cli {
    /// Document with atom and realization declarations.
    #[arg(short, long, global = true)]
    pub file: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    FirstFit,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the invariants of a realization.
    Validate { realization: String },
    /// Classify a closed orientable 2-orbifold by genus and cone orders.
    Classify { genus: u32, orders: Vec<u32> },
    /// List identity summands incident to a sum of their own type.
    Efficient { realization: String },
    /// Reduce to an efficient realization and print its multisets.
    Canonicalize { realization: String },
    /// Whether two realizations have the same canonical form.
    Equivalent { first: String, second: String },
    /// Run the three-phase splitting process and print its trace.
    Split {
        realization: String,
        #[arg(long, value_enum, default_value = "first-fit")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Number of p-cyclic sums involving a vertex-free component.
    Nu {
        realization: String,
        #[arg(long)]
        p: u32,
    },
    /// Tree lemma and α invariance over small trees and forests.
    LemmaCheck {
        #[arg(long, default_value_t = 5)]
        max_edges: usize,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, default_value_t = 4)]
        max_edges: usize,
        #[arg(long, conflicts_with = "random")]
        exhaustive: bool,
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        iters: u64,
    },
    /// Print the document in normal form.
    Format,
}

/// A failure that ends the command with a usage exit code.
struct Usage(String);

fn load(cli_file: &Option<PathBuf>) -> Result<Document, Usage> {
    let path = cli_file
        .as_ref()
        .ok_or_else(|| Usage("this command needs --file".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))
}

fn lookup<'a>(doc: &'a Document, name: &str) -> Result<&'a RealizationTree, Usage> {
    doc.realization(name)
        .ok_or_else(|| Usage(format!("no realization named `{name}`")))
}

fn report_suites(out: &mut dyn Write, reports: &[SuiteReport]) -> std::io::Result<i32> {
    for r in reports {
        writeln!(out, "{r}")?;
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    writeln!(out, "verify suites={} failed={failed}", reports.len())?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_VIOLATION })
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Usage> {
    let io = |e: std::io::Error| Usage(format!("write failed: {e}"));
    let doc = || load(&cli.file);
    match &cli.command {
        Command::Validate { realization } => {
            let doc = doc()?;
            let violations = lookup(&doc, realization)?.validate();
            for v in &violations {
                writeln!(out, "violation {v}").map_err(io)?;
            }
            if violations.is_empty() {
                writeln!(out, "valid").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_VIOLATION)
            }
        }
        Command::Classify { genus, orders } => {
            let o = TwoOrbifold::from_raw(*genus, orders).map_err(|e| Usage(e.to_string()))?;
            writeln!(out, "{}", classify_two_orbifold(&o)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Efficient { realization } => {
            let doc = doc()?;
            let t = lookup(&doc, realization)?;
            let vs = efficiency_violations(t).map_err(|e| Usage(e.to_string()))?;
            for v in &vs {
                let e = t.edges()[v.edge];
                writeln!(
                    out,
                    "violation node={} edge={} type={}",
                    t.node(v.node).label,
                    v.edge,
                    e.sum_type
                )
                .map_err(io)?;
            }
            if vs.is_empty() {
                writeln!(out, "efficient").map_err(io)?;
                Ok(EXIT_OK)
            } else {
                writeln!(out, "inefficient violations={}", vs.len()).map_err(io)?;
                Ok(EXIT_VIOLATION)
            }
        }
        Command::Canonicalize { realization } => {
            let doc = doc()?;
            let form =
                canonicalize(lookup(&doc, realization)?).map_err(|e| Usage(e.to_string()))?;
            writeln!(out, "{form}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Equivalent { first, second } => {
            let doc = doc()?;
            let same = equivalent(lookup(&doc, first)?, lookup(&doc, second)?)
                .map_err(|e| Usage(e.to_string()))?;
            writeln!(out, "equivalent {same}").map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Split {
            realization,
            strategy,
            seed,
        } => {
            let doc = doc()?;
            let strategy = match strategy {
                StrategyArg::FirstFit => SplitStrategy::FirstFit,
                StrategyArg::Random => SplitStrategy::Random { seed: *seed },
            };
            match run_split(lookup(&doc, realization)?, strategy) {
                Ok(trace) => {
                    writeln!(out, "{trace}").map_err(io)?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(out, "violation {e}").map_err(io)?;
                    Ok(EXIT_VIOLATION)
                }
            }
        }
        Command::Nu { realization, p } => {
            let doc = doc()?;
            let order = ConeOrder::new(*p).map_err(|e| Usage(e.to_string()))?;
            match crate::nu::nu(lookup(&doc, realization)?, order) {
                Ok(v) => {
                    writeln!(out, "nu p={p} value={v}").map_err(io)?;
                    Ok(EXIT_OK)
                }
                Err(e) => {
                    writeln!(out, "refused {e}").map_err(io)?;
                    Ok(EXIT_VIOLATION)
                }
            }
        }
        Command::LemmaCheck { max_edges } => report_suites(
            out,
            &[tree_lemma_suite(*max_edges), alpha_suite(*max_edges)],
        )
        .map_err(io),
        Command::Verify {
            max_edges,
            exhaustive: _,
            random,
            seed,
            iters,
        } => {
            let mode = if *random {
                VerifyMode::Random {
                    max_edges: *max_edges,
                    seed: *seed,
                    iters: *iters,
                }
            } else {
                VerifyMode::Exhaustive {
                    max_edges: *max_edges,
                }
            };
            report_suites(out, &run_all(mode)).map_err(io)
        }
        Command::Format => {
            write!(out, "{}", crate::text::serialize(&doc()?)).map_err(io)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs one command line (including the program name) and returns the exit
/// code. Reports go to `out`, errors to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
