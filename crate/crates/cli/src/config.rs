//! `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gz_core::analysis::BStarParams;
use gz_core::lfunc::{MAX_ZERO_HEIGHT, MAX_ZERO_MODULUS};
use gz_core::numtheory::DEFAULT_SIEVE_CAP;

use crate::error::{CliError, CliResult};

pub const CACHE_ENV: &str = "GZ_CACHE_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::Usage(format!("unknown format {s:?}, expected csv or json"))),
        }
    }
}

impl std::fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Geometric x-grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub cache_dir: PathBuf,
    pub sieve_limit: u64,
    pub moduli: Vec<u64>,
    pub height: f64,
    pub grid: GridSpec,
    pub bstar: BStarParams,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_dir: PathBuf::from(".gz-cache"),
            sieve_limit: 1_000_000,
            moduli: vec![1, 3, 4, 5],
            height: 200.0,
            grid: GridSpec {
                x_min: 1e3,
                x_max: 1e6,
                points: 25,
            },
            bstar: BStarParams::default(),
            format: OutputFormat::Csv,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str, line: usize) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value {value:?} for {key}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key = value")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "cache_dir" => cfg.cache_dir = PathBuf::from(value),
                "sieve_limit" => cfg.sieve_limit = parse_num(key, value, line)?,
                "moduli" => {
                    cfg.moduli = value
                        .split(',')
                        .map(|m| parse_num(key, m.trim(), line))
                        .collect::<CliResult<_>>()?
                }
                "height" => cfg.height = parse_num(key, value, line)?,
                "grid_min" => cfg.grid.x_min = parse_num(key, value, line)?,
                "grid_max" => cfg.grid.x_max = parse_num(key, value, line)?,
                "grid_points" => cfg.grid.points = parse_num(key, value, line)?,
                "c1" => cfg.bstar.c1 = parse_num(key, value, line)?,
                "epsilon" => cfg.bstar.epsilon = parse_num(key, value, line)?,
                "format" => cfg.format = value.parse()?,
                _ => return Err(CliError::Usage(format!("config line {line}: unknown key {key:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let moduli: Vec<String> = self.moduli.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "cache_dir = {}", self.cache_dir.display());
        let _ = writeln!(out, "sieve_limit = {}", self.sieve_limit);
        let _ = writeln!(out, "moduli = {}", moduli.join(","));
        let _ = writeln!(out, "height = {}", self.height);
        let _ = writeln!(out, "grid_min = {}", self.grid.x_min);
        let _ = writeln!(out, "grid_max = {}", self.grid.x_max);
        let _ = writeln!(out, "grid_points = {}", self.grid.points);
        let _ = writeln!(out, "c1 = {}", self.bstar.c1);
        let _ = writeln!(out, "epsilon = {}", self.bstar.epsilon);
        let _ = writeln!(out, "format = {}", self.format);
        out
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.sieve_limit < 2 || self.sieve_limit > DEFAULT_SIEVE_CAP {
            return bad(format!("sieve_limit {} outside [2, {DEFAULT_SIEVE_CAP}]", self.sieve_limit));
        }
        if self.moduli.is_empty() {
            return bad("moduli list is empty".into());
        }
        if let Some(q) = self.moduli.iter().find(|&&q| q == 0 || q > MAX_ZERO_MODULUS) {
            return bad(format!("modulus {q} outside [1, {MAX_ZERO_MODULUS}]"));
        }
        if !(self.height > 0.0 && self.height <= MAX_ZERO_HEIGHT) {
            return bad(format!("height {} outside (0, {MAX_ZERO_HEIGHT}]", self.height));
        }
        let g = &self.grid;
        if !(g.x_min >= 1.0 && g.x_max > g.x_min) || g.points < 2 {
            return bad(format!("grid [{}, {}] x {} is not a valid geometric grid", g.x_min, g.x_max, g.points));
        }
        if g.x_max > self.sieve_limit as f64 {
            return bad(format!("grid_max {} beyond sieve_limit {}", g.x_max, self.sieve_limit));
        }
        BStarParams::new(self.bstar.c1, self.bstar.epsilon).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    /// Applies `GZ_CACHE_DIR` when set.
    pub fn with_env(mut self) -> Self {
        if let Some(dir) = std::env::var_os(CACHE_ENV) {
            if !dir.is_empty() {
                self.cache_dir = PathBuf::from(dir);
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig {
            moduli: vec![1, 7, 8],
            height: 123.456789012345,
            ..RunConfig::default()
        };
        cfg.bstar.epsilon = 1.0 / 7.0;
        cfg.grid.x_min = 1234.5;
        cfg.format = OutputFormat::Json;
        cfg.cache_dir = PathBuf::from("/tmp/some where");
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(RunConfig::parse(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
    }

    #[test]
    fn comments_and_errors() {
        let cfg = RunConfig::parse("# hello\n\nheight = 50\n  moduli = 3, 5 \n").unwrap();
        assert_eq!(cfg.height, 50.0);
        assert_eq!(cfg.moduli, vec![3, 5]);
        for bad in [
            "height 5",
            "colour = red",
            "height = abc",
            "height = 5000",
            "moduli = 0",
            "moduli = 101",
            "epsilon = 1.5",
            "grid_max = 1e9",
            "format = xml",
        ] {
            assert!(RunConfig::parse(bad).is_err(), "{bad}");
        }
    }
}
