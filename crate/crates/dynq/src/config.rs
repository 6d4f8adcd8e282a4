//! `key = value` configuration. Numbers are exact rationals written `num/den` or as integers.

use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qarith::exactnum::parse_rational;

use crate::CliError;

/// A piecewise-linear function of |Δ| through anchor pairs, constant beyond the ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule(pub Vec<(BigRational, BigRational)>);

impl Schedule {
    pub fn constant(v: BigRational) -> Schedule {
        Schedule(vec![(BigRational::one(), v)])
    }

    pub fn linear(from: i64, to: i64, max_disc: u64) -> Schedule {
        let r = |n: i64| BigRational::from_integer(n.into());
        Schedule(vec![(r(1), r(from)), (r(max_disc.max(1) as i64), r(to))])
    }

    /// `d1:b1, d2:b2, …` with increasing d.
    pub fn parse(s: &str) -> Result<Schedule, CliError> {
        let mut pts = Vec::new();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (d, b) = pair.split_once(':').ok_or_else(|| CliError::Config(format!("anchor {pair:?} is not d:bound")))?;
            pts.push((number(d.trim())?, number(b.trim())?));
        }
        if pts.is_empty() || pts.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(CliError::Config(format!("schedule {s:?} needs anchors with increasing |disc|")));
        }
        Ok(Schedule(pts))
    }

    /// Value at |Δ|, rounded down to an integer.
    pub fn at(&self, disc_abs: u64) -> BigRational {
        let x = BigRational::from_integer(disc_abs.into());
        let pts = &self.0;
        let v = if x <= pts[0].0 {
            pts[0].1.clone()
        } else if x >= pts[pts.len() - 1].0 {
            pts[pts.len() - 1].1.clone()
        } else {
            let i = pts.iter().position(|(d, _)| d > &x).unwrap();
            let ((x0, y0), (x1, y1)) = (&pts[i - 1], &pts[i]);
            y0 + (y1 - y0) * (&x - x0) / (x1 - x0)
        };
        v.floor()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    pub disc_bound: Option<u64>,
    pub height_schedule: Option<Schedule>,
    pub rational_height_schedule: Option<Schedule>,
    pub worker_count: Option<usize>,
    pub cache_dir: Option<PathBuf>,
}

pub fn number(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).map_err(|e| CliError::Config(format!("{s:?}: {e}")))
}

fn count(key: &str, s: &str) -> Result<u64, CliError> {
    let v = number(s)?;
    if !v.is_integer() || v < BigRational::zero() {
        return Err(CliError::Config(format!("{key} must be a nonnegative integer, got {s}")));
    }
    v.to_integer().to_u64().ok_or_else(|| CliError::Config(format!("{key} out of range")))
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "disc_bound" => cfg.disc_bound = Some(count(key, value)?),
                "height_schedule" => cfg.height_schedule = Some(Schedule::parse(value)?),
                "rational_height_schedule" => cfg.rational_height_schedule = Some(Schedule::parse(value)?),
                "worker_count" => cfg.worker_count = Some(count(key, value)? as usize),
                "cache_dir" => cfg.cache_dir = Some(PathBuf::from(value)),
                _ => return Err(CliError::Config(format!("line {}: unknown key {key}", n + 1))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        Config::parse(&std::fs::read_to_string(path)?)
    }
}
