//! `goldbach`: residue tables, partition counts, exact bounds and range scans.
//!
//! Data goes to stdout (or `--output`), diagnostics to stderr. Exit status is
//! 0 on success, 1 when a scan finds violations and 2 on usage errors.

mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use goldbach_core::scan::{self, ReportWriter, ScanConfig, ScanReport};
use goldbach_core::OutputFormat;

use crate::render::{Echo, Renderer};

#[derive(Debug, Parser)]
#[command(name = "goldbach", version, about = "Goldbach partitions through residue classes")]
struct Cli {
    /// Output format; scans default to csv, everything else to plain.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write data here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for scans.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for sampled soundness checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Scan checkpoint file; an existing one is resumed.
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Csv,
    Jsonl,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Plain => "plain",
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Residues n1 mod p for odd n1 in [3, n1_max] and odd primes p <= prime_max.
    Table { n1_max: u64, prime_max: u64 },
    /// Partition counts for one even q.
    Count { q: u64 },
    /// Every candidate n1 for q with its admissibility and primality flags.
    Partitions { q: u64 },
    /// Exact breakdown of the lower bound at q.
    Bound { q: u64 },
    /// Bound minima at q = p^2 + 3 for primes p in [p_lo, p_hi].
    Minima { p_lo: u64, p_hi: u64 },
    /// Audit every even q in [q_lo, q_hi].
    Scan {
        q_lo: u64,
        q_hi: u64,
        /// Integers per work unit (even).
        #[arg(long, default_value_t = scan::DEFAULT_CHUNK)]
        chunk: u64,
        /// Inflate the bound at this q to exercise violation reporting.
        #[arg(long, hide = true)]
        inject_violation: Option<u64>,
    },
}

/// Any error; reported on stderr with exit status 2.
pub(crate) struct Failure(String);

impl From<goldbach_core::Error> for Failure {
    fn from(e: goldbach_core::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure(format!("cannot create {}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    if let Command::Scan { q_lo, q_hi, chunk, inject_violation } = cli.command {
        return run_scan(&cli, q_lo, q_hi, chunk, inject_violation);
    }
    if cli.checkpoint.is_some() {
        return Err(Failure("--checkpoint only applies to scan".into()));
    }
    let format = cli.format.unwrap_or(Format::Plain);
    // Rendered in memory so a failing command leaves no partial output.
    let mut buf = Vec::new();
    let mut r = Renderer::new(&mut buf, format);
    match cli.command {
        Command::Table { n1_max, prime_max } => {
            r.echo(&Echo::new("table").field("n1_max", n1_max).field("prime_max", prime_max))?;
            render::table(&mut r, n1_max, prime_max)?;
        }
        Command::Count { q } => {
            r.echo(&Echo::new("count").field("q", q))?;
            render::count(&mut r, q)?;
        }
        Command::Partitions { q } => {
            r.echo(&Echo::new("partitions").field("q", q))?;
            render::partitions(&mut r, q)?;
        }
        Command::Bound { q } => {
            r.echo(&Echo::new("bound").field("q", q))?;
            render::bound(&mut r, q)?;
        }
        Command::Minima { p_lo, p_hi } => {
            r.echo(&Echo::new("minima").field("p_lo", p_lo).field("p_hi", p_hi))?;
            render::minima(&mut r, p_lo, p_hi)?;
        }
        Command::Scan { .. } => unreachable!(),
    }
    let mut out = open_output(cli.output.as_ref())?;
    out.write_all(&buf)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run_scan(cli: &Cli, q_lo: u64, q_hi: u64, chunk: u64, inject_violation: Option<u64>) -> Result<ExitCode, Failure> {
    let format = match cli.format {
        None | Some(Format::Csv) => OutputFormat::Csv,
        Some(Format::Jsonl) => OutputFormat::Jsonl,
        Some(Format::Plain) => return Err(Failure("scan writes csv or jsonl".into())),
    };
    let workers = cli.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let config = ScanConfig { q_lo, q_hi, chunk, workers, seed: cli.seed, format, inject_violation };
    config.validate()?;

    let report = match &cli.checkpoint {
        Some(cp) if cp.exists() => {
            let output = cli.output.as_ref().ok_or_else(|| Failure("resuming a scan needs --output".into()))?;
            eprintln!("resuming from {}", cp.display());
            scan::resume_matching(&config, cp, output)?
        }
        Some(cp) => {
            if cli.output.is_none() {
                return Err(Failure("--checkpoint needs --output".into()));
            }
            let mut sink = ReportWriter::new(open_output(cli.output.as_ref())?, format);
            scan::scan_range(&config, &mut sink, Some(cp))?
        }
        None => {
            let mut sink = ReportWriter::new(open_output(cli.output.as_ref())?, format);
            scan::scan_range(&config, &mut sink, None)?
        }
    };
    summarise(&report);
    Ok(if report.has_violations() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn summarise(report: &ScanReport) {
    eprintln!("records: {}", report.records_written);
    eprintln!("violations: {}", report.violations.len());
    if !report.violations.is_empty() {
        let shown: Vec<String> = report.violations.iter().take(20).map(u64::to_string).collect();
        eprintln!("violating q: {}", shown.join(" "));
    }
    eprintln!("soundness failures: {}", report.soundness_failures.len());
    if let Some((q, margin)) = &report.min_margin {
        eprintln!("min margin: q={q} goldbach_ordered-A={margin}");
    }
}
