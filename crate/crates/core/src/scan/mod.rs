//! Range audit: one [`ScanRecord`] per even `q`, written in ascending order.
//!
//! Work is split into contiguous chunks of `chunk` consecutive integers
//! (`chunk / 2` even values of `q`). Chunks are computed by a pool of workers
//! sharing one immutable [`PrimeTable`], then handed to the sink strictly in
//! order by a single writer. The checkpoint advances only after a chunk has
//! been flushed, so an interrupted scan resumes at a chunk boundary and
//! produces the same bytes as an uninterrupted one.
//!
//! Soundness of the admissibility predicate is re-derived from residues for
//! every `n1` when `q <= 100_000`. Above that, each record checks
//! `admissible_count <= goldbach_ordered` and each chunk re-checks 16
//! admissible candidates drawn from a seeded generator.

mod checkpoint;
mod format;
mod kernel;

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use checkpoint::Checkpoint;
pub use format::{preamble, NullSink, OutputFormat, RecordSink, ReportWriter, VecSink, CSV_HEADER};

use crate::bound::{BoundEvaluator, Rational};
use crate::error::{invalid, Error, Result};
use crate::partition::admissible_unchecked;
use crate::primes::{build_table, predicate_cutoff, PrimeTable};
use kernel::PairKernel;

/// Every `n1` is re-verified up to this `q`; above it verification is sampled.
pub const FULL_VERIFY_LIMIT: u64 = 100_000;

/// Admissible candidates re-checked per chunk above [`FULL_VERIFY_LIMIT`].
pub const SAMPLES_PER_CHUNK: usize = 16;

pub const DEFAULT_CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub q_lo: u64,
    pub q_hi: u64,
    /// Width of one work unit in integers; even, at least 2.
    pub chunk: u64,
    pub workers: usize,
    pub seed: u64,
    pub format: OutputFormat,
    /// Test hook: inflates the bound at this `q` above the true count so the
    /// violation path can be exercised. Must be `>= 12` and inside the range.
    pub inject_violation: Option<u64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            q_lo: 4,
            q_hi: 4,
            chunk: DEFAULT_CHUNK,
            workers: 1,
            seed: 0,
            format: OutputFormat::Csv,
            inject_violation: None,
        }
    }
}

impl ScanConfig {
    pub fn new(q_lo: u64, q_hi: u64) -> Self {
        Self { q_lo, q_hi, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.q_lo < 4 || self.q_lo % 2 != 0 || self.q_hi % 2 != 0 || self.q_hi < self.q_lo {
            return Err(invalid(format!(
                "scan range must be even with 4 <= q_lo <= q_hi, got [{}, {}]",
                self.q_lo, self.q_hi
            )));
        }
        if self.chunk < 2 || self.chunk % 2 != 0 {
            return Err(invalid(format!("chunk must be even and >= 2, got {}", self.chunk)));
        }
        if self.workers == 0 {
            return Err(invalid("workers must be at least 1"));
        }
        if let Some(q) = self.inject_violation {
            if q < 12 || q % 2 != 0 || q < self.q_lo || q > self.q_hi {
                return Err(invalid(format!("inject_violation must be an even q >= 12 in range, got {q}")));
            }
        }
        Ok(())
    }

    fn chunks_from(&self, start: u64) -> impl Iterator<Item = (u64, u64)> + '_ {
        (start..=self.q_hi).step_by(self.chunk as usize).map(|lo| (lo, (lo + self.chunk - 2).min(self.q_hi)))
    }
}

/// Rows outside the domain where the bound is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Special {
    None,
    /// `q = 4 = 2 + 2`; the odd machinery does not apply.
    Four,
    /// No bound cutoff prime (`q < 12`): `A = n` by convention.
    EmptyCutoff,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRecord {
    pub q: u64,
    pub n: u64,
    pub p_j: u64,
    pub a_num: BigInt,
    pub a_den: BigUint,
    pub goldbach_ordered: u64,
    pub admissible_count: u64,
    /// `goldbach_ordered > A`, decided by cross-multiplication. Special rows
    /// lie outside the bound's domain and are reported as satisfied.
    pub conjecture_ok: bool,
    pub soundness_ok: bool,
    pub special: Special,
}

impl ScanRecord {
    pub fn bound(&self) -> Rational {
        Rational::new(self.a_num.clone(), BigInt::from(self.a_den.clone()))
    }

    /// Nearest `f64` to the bound, for plotting only.
    pub fn bound_approx(&self) -> f64 {
        self.bound().to_f64().unwrap_or(f64::NAN)
    }

    /// `goldbach_ordered - A`.
    pub fn margin(&self) -> Rational {
        let den = BigInt::from(self.a_den.clone());
        // gcd(G*den - num, den) = gcd(num, den) = 1, so this is reduced.
        Rational::new_raw(&den * self.goldbach_ordered - &self.a_num, den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub q_lo: u64,
    pub q_hi: u64,
    pub records_written: u64,
    /// `q` values with `conjecture_ok = false`.
    pub violations: Vec<u64>,
    /// `q` values with `soundness_ok = false`.
    pub soundness_failures: Vec<u64>,
    /// Smallest `goldbach_ordered - A`, ties to the smaller `q`. Rows inside
    /// the bound's domain take precedence over special rows.
    pub min_margin: Option<(u64, Rational)>,
    /// Last `q` written; `q_lo - 2` if none.
    pub checkpoint: u64,
    pub complete: bool,
    min_margin_special: bool,
}

impl ScanReport {
    fn new(q_lo: u64, q_hi: u64) -> Self {
        Self {
            q_lo,
            q_hi,
            records_written: 0,
            violations: Vec::new(),
            soundness_failures: Vec::new(),
            min_margin: None,
            checkpoint: q_lo - 2,
            complete: false,
            min_margin_special: false,
        }
    }

    pub fn has_violations(&self) -> bool {
        !self.violations.is_empty() || !self.soundness_failures.is_empty()
    }

    /// Folds one record into the aggregates.
    pub fn observe(&mut self, r: &ScanRecord) {
        self.records_written += 1;
        self.checkpoint = r.q;
        if !r.conjecture_ok {
            self.violations.push(r.q);
        }
        if !r.soundness_ok {
            self.soundness_failures.push(r.q);
        }
        let special = r.special != Special::None;
        let margin = r.margin();
        let better = match &self.min_margin {
            None => true,
            Some((_, best)) => match (self.min_margin_special, special) {
                (true, false) => true,
                (false, true) => false,
                _ => margin < *best,
            },
        };
        if better {
            self.min_margin = Some((r.q, margin));
            self.min_margin_special = special;
        }
    }
}

/// Everything a worker needs to turn a `q` into a record.
struct Engine<'a> {
    table: &'a PrimeTable,
    kernel: PairKernel<'a>,
    bounds: BoundEvaluator,
    seed: u64,
    inject_violation: Option<u64>,
}

impl<'a> Engine<'a> {
    fn new(table: &'a PrimeTable, q_hi: u64, seed: u64, inject_violation: Option<u64>) -> Result<Self> {
        if !table.covers(q_hi) {
            return Err(Error::OutOfTable { value: q_hi, limit: table.limit() });
        }
        Ok(Self {
            table,
            kernel: PairKernel::new(table),
            bounds: BoundEvaluator::new(q_hi.max(6), table)?,
            seed,
            inject_violation,
        })
    }

    fn record(&self, q: u64) -> ScanRecord {
        if q == 4 {
            return ScanRecord {
                q,
                n: 0,
                p_j: 0,
                a_num: BigInt::zero(),
                a_den: BigUint::from(1u8),
                goldbach_ordered: 1,
                admissible_count: 0,
                conjecture_ok: true,
                soundness_ok: true,
                special: Special::Four,
            };
        }

        let m = q / 2 - 1;
        let mut goldbach = self.kernel.symmetric_count(m, 1);
        if self.table.is_prime(q - 2) {
            goldbach += 2;
        }

        // An admissible n1 is exactly a prime pair with both parts above
        // the largest predicate prime.
        let cutoff = predicate_cutoff(q, self.table);
        let r = cutoff.last().copied().unwrap_or(0);
        let admissible = self.kernel.symmetric_count(m, r.div_ceil(2));

        let mut soundness_ok = admissible <= goldbach;
        if q <= FULL_VERIFY_LIMIT {
            let v = self.kernel.verify_admissible(q, cutoff);
            soundness_ok &= v.unsound == 0 && v.admissible == admissible;
        }

        let mut bound = self.bounds.evaluate(q);
        if self.inject_violation == Some(q) {
            let floor = if bound.num.is_negative() { BigInt::zero() } else { bound.num.clone() };
            bound.num = floor + BigInt::from(&bound.den * goldbach);
        }
        let special = if bound.p_j == 0 { Special::EmptyCutoff } else { Special::None };
        let conjecture_ok = special != Special::None || bound.exceeded_by(goldbach);

        ScanRecord {
            q,
            n: q / 2 - 2,
            p_j: bound.p_j,
            a_num: bound.num,
            a_den: bound.den,
            goldbach_ordered: goldbach,
            admissible_count: admissible,
            conjecture_ok,
            soundness_ok,
            special,
        }
    }

    fn chunk(&self, lo: u64, hi: u64) -> Vec<ScanRecord> {
        let mut records: Vec<ScanRecord> = (lo..=hi).step_by(2).map(|q| self.record(q)).collect();
        if hi > FULL_VERIFY_LIMIT {
            self.sample_soundness(lo, &mut records);
        }
        records
    }

    /// Re-checks seeded random admissible candidates against the prime table.
    fn sample_soundness(&self, lo: u64, records: &mut [ScanRecord]) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ lo.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let first = records.partition_point(|r| r.q <= FULL_VERIFY_LIMIT);
        let eligible = records.len() - first;
        for _ in 0..SAMPLES_PER_CHUNK {
            let idx = first + rng.gen_range(0..eligible);
            let q = records[idx].q;
            let cutoff = predicate_cutoff(q, self.table);
            let odd_count = q / 2 - 2;
            let mut k = rng.gen_range(0..odd_count);
            for _ in 0..odd_count {
                let n1 = 3 + 2 * k;
                if admissible_unchecked(q, n1, cutoff) {
                    if !(self.table.is_prime(n1) && self.table.is_prime(q - n1)) {
                        records[idx].soundness_ok = false;
                    }
                    break;
                }
                k = (k + 1) % odd_count;
            }
        }
    }
}

/// Computes records for `[q_lo, q_hi]` in memory on the calling thread.
pub fn compute_records(table: &PrimeTable, q_lo: u64, q_hi: u64, seed: u64) -> Result<Vec<ScanRecord>> {
    let config = ScanConfig { q_lo, q_hi, chunk: q_hi - q_lo + 2, seed, ..ScanConfig::default() };
    config.validate()?;
    let engine = Engine::new(table, q_hi, seed, None)?;
    Ok(engine.chunk(q_lo, q_hi))
}

/// Scans `[config.q_lo, config.q_hi]` into `sink`, maintaining a checkpoint
/// file when a path is given.
pub fn scan_range(config: &ScanConfig, sink: &mut dyn RecordSink, checkpoint: Option<&Path>) -> Result<ScanReport> {
    scan_range_until(config, sink, checkpoint, |_| false)
}

/// As [`scan_range`], but stops cleanly after any chunk for which
/// `stop(last_q_of_chunk)` returns true. The report then has
/// `complete = false` and the checkpoint points at that chunk.
pub fn scan_range_until(
    config: &ScanConfig,
    sink: &mut dyn RecordSink,
    checkpoint: Option<&Path>,
    stop: impl Fn(u64) -> bool,
) -> Result<ScanReport> {
    config.validate()?;
    let table = build_table(config.q_hi)?;
    let engine = Engine::new(&table, config.q_hi, config.seed, config.inject_violation)?;
    sink.begin(config)?;
    if let Some(path) = checkpoint {
        Checkpoint::fresh(config.q_lo, config.q_hi, config.chunk).write(path)?;
    }
    let mut report = ScanReport::new(config.q_lo, config.q_hi);
    drive(&engine, config, config.q_lo, sink, checkpoint, &mut report, &stop)?;
    Ok(report)
}

fn drive(
    engine: &Engine<'_>,
    config: &ScanConfig,
    start: u64,
    sink: &mut dyn RecordSink,
    checkpoint: Option<&Path>,
    report: &mut ScanReport,
    stop: &dyn Fn(u64) -> bool,
) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let chunks: Vec<(u64, u64)> = config.chunks_from(start).collect();
    let batch = config.workers * 4;

    for group in chunks.chunks(batch) {
        let computed: Vec<Vec<ScanRecord>> =
            pool.install(|| group.par_iter().map(|&(lo, hi)| engine.chunk(lo, hi)).collect());
        for (&(_, hi), records) in group.iter().zip(computed) {
            sink.write_records(&records)?;
            sink.flush()?;
            for r in &records {
                report.observe(r);
            }
            if let Some(path) = checkpoint {
                Checkpoint { q_lo: config.q_lo, q_hi: config.q_hi, chunk: config.chunk, last_completed: hi }
                    .write(path)?;
            }
            if hi != config.q_hi && stop(hi) {
                return Ok(());
            }
        }
    }
    report.complete = true;
    Ok(())
}

/// Continues an interrupted scan whose report is being written to `output`.
///
/// Rows already in `output` up to the checkpoint are re-read to rebuild the
/// aggregates; anything after it (a partially written chunk) is truncated.
/// The finished file and report are identical to an uninterrupted run.
pub fn resume(checkpoint: &Path, output: &Path, workers: usize) -> Result<ScanReport> {
    resume_inner(checkpoint, output, workers, None)
}

/// As [`resume`], refusing unless the checkpoint and report were produced
/// with the same output-affecting parameters as `expected`.
pub fn resume_matching(expected: &ScanConfig, checkpoint: &Path, output: &Path) -> Result<ScanReport> {
    expected.validate()?;
    resume_inner(checkpoint, output, expected.workers, Some(expected))
}

fn resume_inner(
    checkpoint_path: &Path,
    output: &Path,
    workers: usize,
    expected: Option<&ScanConfig>,
) -> Result<ScanReport> {
    let cp = Checkpoint::read(checkpoint_path)?;
    let file =
        File::open(output).map_err(|e| Error::Checkpoint(format!("cannot open report {}: {e}", output.display())))?;
    let mut reader = BufReader::new(file);
    let mut line = String::new();
    let mut offset = 0u64;

    let mut read = |line: &mut String| -> Result<usize> {
        line.clear();
        Ok(reader.read_line(line)?)
    };

    offset += read(&mut line)? as u64;
    let mut config = format::parse_preamble(line.trim_end_matches('\n'))?;
    config.workers = workers;
    if (config.q_lo, config.q_hi, config.chunk) != (cp.q_lo, cp.q_hi, cp.chunk) {
        return Err(Error::Checkpoint(format!(
            "checkpoint range [{}, {}] chunk {} does not match report [{}, {}] chunk {}",
            cp.q_lo, cp.q_hi, cp.chunk, config.q_lo, config.q_hi, config.chunk
        )));
    }
    if let Some(exp) = expected {
        let mut want = exp.clone();
        want.workers = workers;
        if want != config {
            return Err(Error::Checkpoint(format!(
                "refusing to resume: requested {:?} but the interrupted scan used {:?}",
                preamble(exp),
                preamble(&config)
            )));
        }
    }
    if config.format == OutputFormat::Csv {
        offset += read(&mut line)? as u64;
        if line.trim_end_matches('\n') != CSV_HEADER {
            return Err(Error::Checkpoint("report is missing the CSV header".into()));
        }
    }

    let mut report = ScanReport::new(cp.q_lo, cp.q_hi);
    let mut expected_q = cp.q_lo;
    while expected_q <= cp.last_completed {
        let len = read(&mut line)?;
        if len == 0 || !line.ends_with('\n') {
            break;
        }
        let record = format::decode(line.trim_end_matches('\n'), config.format)?;
        if record.q != expected_q {
            return Err(Error::Checkpoint(format!("report row for q={} where q={expected_q} was expected", record.q)));
        }
        report.observe(&record);
        offset += len as u64;
        expected_q += 2;
    }
    if expected_q != cp.last_completed + 2 {
        return Err(Error::Checkpoint(format!("report ends before the checkpointed q={}", cp.last_completed)));
    }

    let file = OpenOptions::new().write(true).open(output)?;
    file.set_len(offset)?;
    if cp.is_complete() {
        report.complete = true;
        return Ok(report);
    }

    let table = build_table(config.q_hi)?;
    let engine = Engine::new(&table, config.q_hi, config.seed, config.inject_violation)?;
    let file = OpenOptions::new().append(true).open(output)?;
    let mut sink = ReportWriter::new(BufWriter::new(file), config.format);
    drive(&engine, &config, cp.last_completed + 2, &mut sink, Some(checkpoint_path), &mut report, &|_| false)?;
    Ok(report)
}

/// The `q` in `[q_lo, q_hi]` minimising `goldbach_ordered - A`.
pub fn min_margin(q_lo: u64, q_hi: u64) -> Result<(u64, Rational)> {
    if q_hi < q_lo {
        return Err(invalid(format!("empty range [{q_lo}, {q_hi}]")));
    }
    let report = scan_range(&ScanConfig::new(q_lo, q_hi), &mut NullSink, None)?;
    report.min_margin.ok_or_else(|| invalid("empty range"))
}
