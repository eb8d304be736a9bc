//! CSV and JSONL report encoding.
//!
//! Both formats open with one self-describing configuration line and keep
//! the bound as separate integer numerator and denominator fields.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde_json::Value;

use super::{ScanConfig, ScanRecord, Special};
use crate::error::{invalid, Error, Result};

pub const CSV_HEADER: &str = "q,n,p_j,A_num,A_den,goldbach_ordered,admissible_count,conjecture_ok,soundness_ok,special";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(invalid(format!("unknown scan format {other:?}"))),
        }
    }
}

/// Receives records in ascending `q` order from a single writer.
pub trait RecordSink {
    /// Called once before the first record of a fresh scan; not on resume.
    fn begin(&mut self, config: &ScanConfig) -> io::Result<()>;

    fn write_records(&mut self, records: &[ScanRecord]) -> io::Result<()>;

    /// Makes everything written so far durable. A checkpoint is only
    /// advanced after this returns.
    fn flush(&mut self) -> io::Result<()>;
}

/// Discards records. Useful when only the [`super::ScanReport`] matters.
#[derive(Debug, Default)]
pub struct NullSink;

impl RecordSink for NullSink {
    fn begin(&mut self, _: &ScanConfig) -> io::Result<()> {
        Ok(())
    }

    fn write_records(&mut self, _: &[ScanRecord]) -> io::Result<()> {
        Ok(())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Keeps every record in memory.
#[derive(Debug, Default)]
pub struct VecSink {
    pub records: Vec<ScanRecord>,
}

impl RecordSink for VecSink {
    fn begin(&mut self, _: &ScanConfig) -> io::Result<()> {
        Ok(())
    }

    fn write_records(&mut self, records: &[ScanRecord]) -> io::Result<()> {
        self.records.extend_from_slice(records);
        Ok(())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

/// Encodes records as CSV or JSONL onto any writer.
pub struct ReportWriter<W: Write> {
    out: W,
    format: OutputFormat,
    line: String,
}

impl<W: Write> ReportWriter<W> {
    pub fn new(out: W, format: OutputFormat) -> Self {
        Self { out, format, line: String::new() }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> RecordSink for ReportWriter<W> {
    fn begin(&mut self, config: &ScanConfig) -> io::Result<()> {
        writeln!(self.out, "{}", preamble(config))?;
        if self.format == OutputFormat::Csv {
            writeln!(self.out, "{CSV_HEADER}")?;
        }
        Ok(())
    }

    fn write_records(&mut self, records: &[ScanRecord]) -> io::Result<()> {
        for r in records {
            self.line.clear();
            match self.format {
                OutputFormat::Csv => encode_csv(r, &mut self.line),
                OutputFormat::Jsonl => encode_jsonl(r, &mut self.line),
            }
            self.line.push('\n');
            self.out.write_all(self.line.as_bytes())?;
        }
        Ok(())
    }

    fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// The configuration echo line that opens every report.
///
/// Worker count is deliberately absent: it never changes the output.
pub fn preamble(config: &ScanConfig) -> String {
    let inject = config.inject_violation.map_or(String::new(), |q| format!(" inject_violation={q}"));
    match config.format {
        OutputFormat::Csv => format!(
            "# goldbach-scan q_lo={} q_hi={} chunk={} seed={} format=csv{inject}",
            config.q_lo, config.q_hi, config.chunk, config.seed
        ),
        OutputFormat::Jsonl => {
            let mut cfg = serde_json::json!({
                "command": "scan",
                "q_lo": config.q_lo,
                "q_hi": config.q_hi,
                "chunk": config.chunk,
                "seed": config.seed,
                "format": "jsonl",
            });
            if let Some(q) = config.inject_violation {
                cfg["inject_violation"] = q.into();
            }
            serde_json::json!({ "config": cfg }).to_string()
        }
    }
}

/// Recovers the output-affecting configuration from a preamble line.
pub(crate) fn parse_preamble(line: &str) -> Result<ScanConfig> {
    let bad = || Error::Checkpoint(format!("unrecognised report preamble {line:?}"));
    let mut config = ScanConfig::default();
    if let Some(rest) = line.strip_prefix("# goldbach-scan ") {
        for field in rest.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(bad)?;
            match k {
                "q_lo" => config.q_lo = v.parse().map_err(|_| bad())?,
                "q_hi" => config.q_hi = v.parse().map_err(|_| bad())?,
                "chunk" => config.chunk = v.parse().map_err(|_| bad())?,
                "seed" => config.seed = v.parse().map_err(|_| bad())?,
                "format" => config.format = v.parse().map_err(|_| bad())?,
                "inject_violation" => config.inject_violation = Some(v.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        return Ok(config);
    }
    let value: Value = serde_json::from_str(line).map_err(|_| bad())?;
    let cfg = value.get("config").ok_or_else(bad)?;
    let field = |k: &str| cfg.get(k).and_then(Value::as_u64).ok_or_else(bad);
    config.q_lo = field("q_lo")?;
    config.q_hi = field("q_hi")?;
    config.chunk = field("chunk")?;
    config.seed = field("seed")?;
    config.format = OutputFormat::Jsonl;
    config.inject_violation = cfg.get("inject_violation").and_then(Value::as_u64);
    Ok(config)
}

fn encode_csv(r: &ScanRecord, out: &mut String) {
    let _ = write!(
        out,
        "{},{},{},{},{},{},{},{},{},{}",
        r.q,
        r.n,
        r.p_j,
        r.a_num,
        r.a_den,
        r.goldbach_ordered,
        r.admissible_count,
        r.conjecture_ok,
        r.soundness_ok,
        r.special.as_str()
    );
}

fn encode_jsonl(r: &ScanRecord, out: &mut String) {
    let _ = write!(
        out,
        "{{\"q\":{},\"n\":{},\"p_j\":{},\"A_num\":{},\"A_den\":{},\"goldbach_ordered\":{},\
         \"admissible_count\":{},\"conjecture_ok\":{},\"soundness_ok\":{},\"special\":\"{}\"}}",
        r.q,
        r.n,
        r.p_j,
        r.a_num,
        r.a_den,
        r.goldbach_ordered,
        r.admissible_count,
        r.conjecture_ok,
        r.soundness_ok,
        r.special.as_str()
    );
}

/// Parses one data line back into a record.
pub(crate) fn decode(line: &str, format: OutputFormat) -> Result<ScanRecord> {
    let bad = || Error::Checkpoint(format!("malformed report row {line:?}"));
    match format {
        OutputFormat::Csv => {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(bad());
            }
            Ok(ScanRecord {
                q: f[0].parse().map_err(|_| bad())?,
                n: f[1].parse().map_err(|_| bad())?,
                p_j: f[2].parse().map_err(|_| bad())?,
                a_num: f[3].parse::<BigInt>().map_err(|_| bad())?,
                a_den: f[4].parse::<BigUint>().map_err(|_| bad())?,
                goldbach_ordered: f[5].parse().map_err(|_| bad())?,
                admissible_count: f[6].parse().map_err(|_| bad())?,
                conjecture_ok: f[7].parse().map_err(|_| bad())?,
                soundness_ok: f[8].parse().map_err(|_| bad())?,
                special: f[9].parse().map_err(|_| bad())?,
            })
        }
        OutputFormat::Jsonl => {
            let v: Value = serde_json::from_str(line).map_err(|_| bad())?;
            let uint = |k: &str| v.get(k).and_then(Value::as_u64).ok_or_else(bad);
            let digits = |k: &str| match v.get(k) {
                Some(Value::Number(n)) => Ok(n.to_string()),
                _ => Err(bad()),
            };
            let boolean = |k: &str| v.get(k).and_then(Value::as_bool).ok_or_else(bad);
            Ok(ScanRecord {
                q: uint("q")?,
                n: uint("n")?,
                p_j: uint("p_j")?,
                a_num: digits("A_num")?.parse().map_err(|_| bad())?,
                a_den: digits("A_den")?.parse().map_err(|_| bad())?,
                goldbach_ordered: uint("goldbach_ordered")?,
                admissible_count: uint("admissible_count")?,
                conjecture_ok: boolean("conjecture_ok")?,
                soundness_ok: boolean("soundness_ok")?,
                special: v.get("special").and_then(Value::as_str).ok_or_else(bad)?.parse().map_err(|_| bad())?,
            })
        }
    }
}

impl Special {
    pub fn as_str(self) -> &'static str {
        match self {
            Special::None => "none",
            Special::Four => "q4",
            Special::EmptyCutoff => "empty_cutoff",
        }
    }
}

impl FromStr for Special {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Special::None),
            "q4" => Ok(Special::Four),
            "empty_cutoff" => Ok(Special::EmptyCutoff),
            other => Err(invalid(format!("unknown special flag {other:?}"))),
        }
    }
}
