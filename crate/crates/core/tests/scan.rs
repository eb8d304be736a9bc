mod common;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use goldbach_core::scan::{
    resume, resume_matching, scan_range, scan_range_until, Checkpoint, NullSink, OutputFormat, ReportWriter,
    ScanConfig, ScanRecord, Special, VecSink, CSV_HEADER,
};
use goldbach_core::{primes::build_table, Error};
use tempfile::TempDir;

fn config(q_lo: u64, q_hi: u64, chunk: u64, workers: usize, format: OutputFormat) -> ScanConfig {
    ScanConfig { q_lo, q_hi, chunk, workers, format, ..ScanConfig::default() }
}

fn scan_to_bytes(cfg: &ScanConfig) -> Vec<u8> {
    let mut sink = ReportWriter::new(Vec::new(), cfg.format);
    scan_range(cfg, &mut sink, None).unwrap();
    sink.into_inner()
}

fn scan_to_file(cfg: &ScanConfig, out: &Path, cp: &Path, stop_after: Option<u64>) -> goldbach_core::scan::ScanReport {
    let file = BufWriter::new(File::create(out).unwrap());
    let mut sink = ReportWriter::new(file, cfg.format);
    scan_range_until(cfg, &mut sink, Some(cp), |last| stop_after.is_some_and(|s| last >= s)).unwrap()
}

#[test]
fn records_match_brute_force() {
    let mut sink = VecSink::default();
    let report = scan_range(&config(4, 3000, 128, 2, OutputFormat::Csv), &mut sink, None).unwrap();
    let flags = common::prime_flags(3000);
    assert_eq!(report.records_written, 1499);
    for r in &sink.records {
        assert_eq!(r.goldbach_ordered, common::goldbach_ordered(r.q, &flags), "q={}", r.q);
        assert_eq!(r.n, r.q / 2 - 2);
        assert!(r.soundness_ok);
        if r.q >= 12 {
            assert_eq!(r.special, Special::None);
            assert_eq!(r.admissible_count, common::admissible_count(r.q), "q={}", r.q);
            assert_eq!(r.bound(), common::bound(r.q), "q={}", r.q);
            let exceeds = r.bound() < common::ratio(r.goldbach_ordered as i64, 1);
            assert_eq!(r.conjecture_ok, exceeds, "q={}", r.q);
        }
    }
    assert_eq!(sink.records[0].special, Special::Four);
    assert!(sink.records[1..4].iter().all(|r| r.special == Special::EmptyCutoff));
}

#[test]
fn output_is_independent_of_workers_and_chunking() {
    for format in [OutputFormat::Csv, OutputFormat::Jsonl] {
        let reference = scan_to_bytes(&config(4, 20_000, 1024, 1, format));
        for workers in [2, 3, 8] {
            assert_eq!(scan_to_bytes(&config(4, 20_000, 1024, workers, format)), reference);
        }
        // The chunk size is echoed in the first line; every row after it agrees.
        let rows =
            |b: &[u8]| String::from_utf8(b.to_vec()).unwrap().lines().skip(1).map(String::from).collect::<Vec<_>>();
        assert_eq!(rows(&scan_to_bytes(&config(4, 20_000, 98, 4, format))), rows(&reference));
    }
}

#[test]
fn csv_layout() {
    let bytes = scan_to_bytes(&config(4, 20, 8, 1, OutputFormat::Csv));
    let text = String::from_utf8(bytes).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# goldbach-scan q_lo=4 q_hi=20 chunk=8 seed=0 format=csv");
    assert_eq!(lines[1], CSV_HEADER);
    assert_eq!(lines[2], "4,0,0,0,1,1,0,true,true,q4");
    assert_eq!(lines[3], "6,1,0,1,1,1,1,true,true,empty_cutoff");
    assert_eq!(lines[5], "10,3,0,3,1,3,1,true,true,empty_cutoff");
    assert_eq!(lines[6], "12,4,3,1,3,2,2,true,true,none");
    assert_eq!(lines[10], "20,8,3,5,3,4,2,true,true,none");
    assert_eq!(lines.len(), 11);
}

#[test]
fn interrupted_scan_resumes_to_identical_bytes() {
    for format in [OutputFormat::Csv, OutputFormat::Jsonl] {
        let cfg = config(4, 10_000, 500, 2, format);
        let reference = scan_to_bytes(&cfg);

        let dir = TempDir::new().unwrap();
        let (out, cp) = (dir.path().join("scan.out"), dir.path().join("scan.cp"));
        let partial = scan_to_file(&cfg, &out, &cp, Some(5000));
        assert!(!partial.complete);
        let mark = Checkpoint::read(&cp).unwrap();
        assert!(mark.last_completed >= 5000 && mark.last_completed < 10_000);
        assert_eq!(partial.checkpoint, mark.last_completed);

        // A half-written chunk after the checkpoint is discarded on resume.
        fs::OpenOptions::new().append(true).open(&out).unwrap().write_all(b"9999,garbage,row").unwrap();

        let resumed = resume(&cp, &out, 3).unwrap();
        assert!(resumed.complete);
        assert_eq!(fs::read(&out).unwrap(), reference);

        let fresh = scan_range(&cfg, &mut NullSink, None).unwrap();
        assert_eq!(resumed.records_written, fresh.records_written);
        assert_eq!(resumed.min_margin, fresh.min_margin);
        assert_eq!(resumed.violations, fresh.violations);
        assert_eq!(Checkpoint::read(&cp).unwrap().last_completed, 10_000);
    }
}

#[test]
fn resuming_a_finished_scan_changes_nothing() {
    let cfg = config(4, 4000, 256, 2, OutputFormat::Csv);
    let dir = TempDir::new().unwrap();
    let (out, cp) = (dir.path().join("scan.csv"), dir.path().join("scan.cp"));
    let first = scan_to_file(&cfg, &out, &cp, None);
    let before = fs::read(&out).unwrap();
    let again = resume_matching(&cfg, &cp, &out).unwrap();
    assert_eq!(fs::read(&out).unwrap(), before);
    assert_eq!(again.records_written, first.records_written);
    assert_eq!(again.min_margin, first.min_margin);
    assert!(again.complete);
}

#[test]
fn resume_refuses_different_parameters() {
    let cfg = config(4, 4000, 256, 2, OutputFormat::Csv);
    let dir = TempDir::new().unwrap();
    let (out, cp) = (dir.path().join("scan.csv"), dir.path().join("scan.cp"));
    scan_to_file(&cfg, &out, &cp, Some(1000));
    let before = fs::read(&out).unwrap();
    for other in [
        ScanConfig { q_hi: 5000, ..cfg.clone() },
        ScanConfig { chunk: 512, ..cfg.clone() },
        ScanConfig { seed: 7, ..cfg.clone() },
        ScanConfig { format: OutputFormat::Jsonl, ..cfg.clone() },
    ] {
        assert!(matches!(resume_matching(&other, &cp, &out), Err(Error::Checkpoint(_))), "{other:?}");
        assert_eq!(fs::read(&out).unwrap(), before);
    }
    // A different worker count is not a different scan.
    resume_matching(&ScanConfig { workers: 1, ..cfg }, &cp, &out).unwrap();
}

#[test]
fn corrupt_state_is_rejected() {
    let cfg = config(4, 4000, 256, 1, OutputFormat::Csv);
    let dir = TempDir::new().unwrap();
    let (out, cp) = (dir.path().join("scan.csv"), dir.path().join("scan.cp"));
    scan_to_file(&cfg, &out, &cp, Some(1000));
    let good_cp = fs::read_to_string(&cp).unwrap();

    fs::write(&cp, "not a checkpoint\n").unwrap();
    assert!(matches!(resume(&cp, &out, 1), Err(Error::Checkpoint(_))));

    // Checkpoint claims more progress than the report holds.
    fs::write(&cp, "goldbach-scan v1 4 4000 256\n3074\n").unwrap();
    assert!(matches!(resume(&cp, &out, 1), Err(Error::Checkpoint(_))));

    // Checkpoint for a different range than the report's preamble.
    fs::write(&cp, good_cp.replace(" 4000 ", " 4096 ")).unwrap();
    assert!(matches!(resume(&cp, &out, 1), Err(Error::Checkpoint(_))));

    fs::write(&cp, &good_cp).unwrap();
    fs::write(&out, "# something else\n").unwrap();
    assert!(resume(&cp, &out, 1).is_err());
}

/// Writes through to a file and starts failing after a byte budget.
struct FailingWriter {
    inner: BufWriter<File>,
    budget: usize,
}

impl Write for FailingWriter {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        if buf.len() > self.budget {
            return Err(io::Error::other("disk full"));
        }
        self.budget -= buf.len();
        self.inner.write(buf)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[test]
fn sink_failure_leaves_a_resumable_checkpoint() {
    let cfg = config(4, 6000, 256, 2, OutputFormat::Csv);
    let reference = scan_to_bytes(&cfg);
    let dir = TempDir::new().unwrap();
    let (out, cp) = (dir.path().join("scan.csv"), dir.path().join("scan.cp"));

    let writer = FailingWriter { inner: BufWriter::new(File::create(&out).unwrap()), budget: reference.len() / 2 };
    let mut sink = ReportWriter::new(writer, cfg.format);
    let err = scan_range(&cfg, &mut sink, Some(&cp)).unwrap_err();
    assert!(matches!(err, Error::Sink(_)), "{err}");
    let _ = sink.into_inner().inner.flush();

    let mark = Checkpoint::read(&cp).unwrap();
    assert!(mark.last_completed < 6000);
    resume(&cp, &out, 2).unwrap();
    assert_eq!(fs::read(&out).unwrap(), reference);
}

#[test]
fn injected_violation_is_reported() {
    let mut sink = VecSink::default();
    let cfg = ScanConfig { inject_violation: Some(5000), ..config(4, 10_000, 512, 2, OutputFormat::Csv) };
    let report = scan_range(&cfg, &mut sink, None).unwrap();
    assert_eq!(report.violations, vec![5000]);
    assert!(report.has_violations());
    let hit: Vec<&ScanRecord> = sink.records.iter().filter(|r| !r.conjecture_ok).collect();
    assert_eq!(hit.len(), 1);
    assert!(hit[0].bound() >= common::ratio(hit[0].goldbach_ordered as i64, 1));
}

#[test]
fn sampled_verification_above_the_full_limit() {
    let mut sink = VecSink::default();
    let cfg = config(99_000, 110_000, 2048, 2, OutputFormat::Csv);
    let report = scan_range(&cfg, &mut sink, None).unwrap();
    assert!(report.soundness_failures.is_empty());
    let table = build_table(110_000).unwrap();
    for r in sink.records.iter().step_by(97) {
        let g = goldbach_core::partition::goldbach_count(r.q, &table).unwrap();
        assert_eq!(r.goldbach_ordered, g.ordered);
        assert_eq!(r.admissible_count, common::admissible_count(r.q));
    }
}

#[test]
fn bad_configurations_are_rejected() {
    for cfg in [
        config(5, 100, 16, 1, OutputFormat::Csv),
        config(2, 100, 16, 1, OutputFormat::Csv),
        config(4, 101, 16, 1, OutputFormat::Csv),
        config(100, 4, 16, 1, OutputFormat::Csv),
        config(4, 100, 15, 1, OutputFormat::Csv),
        config(4, 100, 16, 0, OutputFormat::Csv),
    ] {
        assert!(scan_range(&cfg, &mut NullSink, None).is_err(), "{cfg:?}");
    }
}
