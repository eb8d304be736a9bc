//! Audits every even q up to a limit and prints the summary.
//!
//! ```text
//! cargo run --release -p goldbach-core --example audit -- 1000000
//! ```

use std::time::Instant;

use goldbach_core::scan::{scan_range, NullSink, ScanConfig};

fn main() {
    let q_hi: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(100_000);
    let start = Instant::now();
    let report = match scan_range(&ScanConfig::new(4, q_hi), &mut NullSink, None) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    };
    println!("scanned {} even q in {:.2?}", report.records_written, start.elapsed());
    println!("bound violations: {:?}", report.violations);
    println!("soundness failures: {:?}", report.soundness_failures);
    if let Some((q, margin)) = report.min_margin {
        println!("smallest margin over the bound: {margin} at q={q}");
    }
}
