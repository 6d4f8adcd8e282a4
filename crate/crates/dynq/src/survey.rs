//! Field enumeration, survey bounds and the per-field result cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use qarith::exactnum::{fmt_rational, squarefree_kernel};
use qarith::{make_field, QuadField};

use crate::config::Schedule;
use crate::CliError;

/// Squarefree d ≠ 1 with |disc Q(√d)| ≤ n, ordered by (|Δ|, d).
pub fn fields_up_to(n: u64) -> Vec<i64> {
    let n = n as i64;
    let mut ds: Vec<i64> = (-n..=n)
        .filter(|&d| d != 0 && d != 1 && squarefree_kernel(&BigInt::from(d)) == BigInt::from(d))
        .filter(|&d| disc(d).abs() <= n)
        .collect();
    ds.sort_by_key(|&d| (disc(d).abs(), d));
    ds
}

fn disc(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

pub struct Bounds {
    pub height: Schedule,
    pub rational: Option<Schedule>,
}

impl Bounds {
    pub fn for_field(&self, k: &QuadField) -> (BigRational, Option<BigRational>) {
        let n = k.disc().unsigned_abs();
        (self.height.at(n), self.rational.as_ref().map(|s| s.at(n)))
    }
}

pub fn parse_fields(s: &str) -> Result<Vec<QuadField>, CliError> {
    s.split(',')
        .map(|t| {
            let d: i64 = t.trim().parse().map_err(|_| CliError::Usage(format!("bad field {t:?}")))?;
            make_field(d).map_err(|e| CliError::Usage(format!("field {d}: {e}")))
        })
        .collect()
}

/// Completed (field, bounds) runs, one JSON-lines file each, written by atomic rename.
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: &Path) -> Result<Cache, CliError> {
        fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    pub fn path(&self, k: &QuadField, b: &BigRational, rational: Option<&BigRational>) -> PathBuf {
        let tag = |x: &BigRational| fmt_rational(x).replace('/', "_");
        let r = rational.map(tag).unwrap_or_else(|| "none".into());
        self.dir.join(format!("survey_d{}_b{}_r{r}.jsonl", k.d, tag(b)))
    }

    pub fn get(&self, path: &Path) -> Option<String> {
        fs::read_to_string(path).ok()
    }

    pub fn put(&self, path: &Path, body: &str) -> Result<(), CliError> {
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(body.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_discriminants() {
        assert_eq!(fields_up_to(8), vec![-3, -1, 5, -7, -2, 2]);
        let ds = fields_up_to(24);
        assert_eq!(ds.len(), 17);
        assert!(ds.iter().all(|&d| disc(d).abs() <= 24));
    }
}
