use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &str = "goldbach-scan v1";

/// Progress marker of a scan: the range parameters and the last `q` whose
/// whole chunk reached the sink.
///
/// On disk it is two lines of UTF-8 text:
///
/// ```text
/// goldbach-scan v1 <q_lo> <q_hi> <chunk>
/// <last completed q>
/// ```
///
/// Before the first chunk completes the second line holds `q_lo - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub q_lo: u64,
    pub q_hi: u64,
    pub chunk: u64,
    pub last_completed: u64,
}

impl Checkpoint {
    pub fn fresh(q_lo: u64, q_hi: u64, chunk: u64) -> Self {
        Self { q_lo, q_hi, chunk, last_completed: q_lo - 2 }
    }

    pub fn is_complete(&self) -> bool {
        self.last_completed == self.q_hi
    }

    pub fn encode(&self) -> String {
        format!("{MAGIC} {} {} {}\n{}\n", self.q_lo, self.q_hi, self.chunk, self.last_completed)
    }

    pub fn decode(text: &str) -> Result<Self> {
        let corrupt = |why: &str| Error::Checkpoint(format!("corrupt checkpoint ({why})"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| corrupt("empty file"))?;
        let params = header.strip_prefix(MAGIC).ok_or_else(|| corrupt("bad header"))?;
        let nums: Vec<u64> = params
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| corrupt("bad header"))?;
        let [q_lo, q_hi, chunk] = nums[..] else {
            return Err(corrupt("bad header"));
        };
        let last_completed =
            lines.next().and_then(|l| l.trim().parse::<u64>().ok()).ok_or_else(|| corrupt("missing progress line"))?;
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(corrupt("trailing data"));
        }

        if q_lo < 4 || q_lo % 2 != 0 || q_hi < q_lo || q_hi % 2 != 0 || chunk < 2 || chunk % 2 != 0 {
            return Err(corrupt("invalid range parameters"));
        }
        let aligned = last_completed + 2 == q_lo
            || last_completed == q_hi
            || (last_completed >= q_lo && (last_completed + 2 - q_lo) % chunk == 0);
        if last_completed + 2 < q_lo || last_completed > q_hi || last_completed % 2 != 0 || !aligned {
            return Err(corrupt("progress outside range or off a chunk boundary"));
        }
        Ok(Self { q_lo, q_hi, chunk, last_completed })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Checkpoint(format!("cannot read {}: {e}", path.display())))?;
        Self::decode(&text)
    }

    /// Replaces the file atomically.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        fs::write(&tmp, self.encode())?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
