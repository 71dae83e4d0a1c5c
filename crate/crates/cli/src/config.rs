//! Run configuration: flags layered over an optional key=value file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Settings shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub disc_d: u64,
    pub level: u64,
    pub bound: u64,
    pub x_cutoffs: Vec<u64>,
    pub output_dir: PathBuf,
    pub threads: usize,
    pub cache_dir: PathBuf,
    /// Index of the Galois orbit of eigenforms to use.
    pub form: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            disc_d: 11,
            level: 1,
            bound: 100_000,
            x_cutoffs: Vec::new(),
            output_dir: PathBuf::from("out"),
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_dir: PathBuf::from(".toric-cache"),
            form: 0,
        }
    }
}

/// Values given on the command line; `None` falls through to the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub disc_d: Option<u64>,
    pub level: Option<u64>,
    pub bound: Option<u64>,
    pub x_cutoffs: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub form: Option<usize>,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_kv(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> CliResult<T> {
    v.replace('_', "").parse().map_err(|_| CliError::Usage(format!("bad value for {key}: {v}")))
}

pub fn parse_cutoffs(v: &str) -> CliResult<Vec<u64>> {
    v.split(',').filter(|s| !s.trim().is_empty()).map(|s| num("x", s.trim())).collect()
}

impl RunConfig {
    pub fn from_map(map: &BTreeMap<String, String>) -> CliResult<Self> {
        let mut c = RunConfig::default();
        for (k, v) in map {
            match k.as_str() {
                "disc" | "disc_d" => c.disc_d = num(k, v)?,
                "level" => c.level = num(k, v)?,
                "bound" => c.bound = num(k, v)?,
                "x" | "x_cutoffs" => c.x_cutoffs = parse_cutoffs(v)?,
                "output_dir" | "out" => c.output_dir = PathBuf::from(v),
                "threads" => c.threads = num(k, v)?,
                "cache_dir" => c.cache_dir = PathBuf::from(v),
                "form" => c.form = num(k, v)?,
                _ => return Err(CliError::Usage(format!("unknown config key {k}"))),
            }
        }
        Ok(c)
    }

    /// The file (if any) first, then every flag that was given.
    pub fn resolve(file: Option<&Path>, o: &Overrides) -> CliResult<Self> {
        let mut c = match file {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                RunConfig::from_map(&parse_kv(&text)?)?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = o.disc_d {
            c.disc_d = v;
        }
        if let Some(v) = o.level {
            c.level = v;
        }
        if let Some(v) = o.bound {
            c.bound = v;
        }
        if let Some(v) = &o.x_cutoffs {
            c.x_cutoffs = v.clone();
        }
        if let Some(v) = &o.output_dir {
            c.output_dir = v.clone();
        }
        if let Some(v) = o.threads {
            c.threads = v;
        }
        if let Some(v) = &o.cache_dir {
            c.cache_dir = v.clone();
        }
        if let Some(v) = o.form {
            c.form = v;
        }
        if c.threads == 0 {
            return Err(CliError::Usage("threads must be positive".into()));
        }
        Ok(c)
    }

    /// Cutoffs for statistics, defaulting to five equal steps up to the bound.
    pub fn cutoffs(&self) -> CliResult<Vec<u64>> {
        let xs = if self.x_cutoffs.is_empty() {
            (1..=5).map(|k| self.bound * k / 5).collect()
        } else {
            self.x_cutoffs.clone()
        };
        if let Some(&m) = xs.iter().find(|&&x| x > self.bound || x == 0) {
            return Err(CliError::Usage(format!("cutoff {m} must lie in 1..={}", self.bound)));
        }
        Ok(xs)
    }

    /// Stem shared by the output files of one order.
    pub fn stem(&self) -> String {
        format!("d{}_l{}", self.disc_d, self.level)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let map = parse_kv("disc = 23\nbound=1_000 # comment\n\nx=200,400\n").unwrap();
        let file = RunConfig::from_map(&map).unwrap();
        assert_eq!((file.disc_d, file.bound, file.x_cutoffs.clone()), (23, 1000, vec![200, 400]));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "disc=23\nbound=1000\nlevel=1\n").unwrap();
        let o = Overrides { bound: Some(500), ..Default::default() };
        let c = RunConfig::resolve(Some(&path), &o).unwrap();
        assert_eq!((c.disc_d, c.bound), (23, 500));
        assert!(parse_kv("nonsense").is_err());
        assert!(RunConfig::from_map(&parse_kv("colour=red").unwrap()).is_err());
    }

    #[test]
    fn default_cutoffs() {
        let c = RunConfig { bound: 1000, ..Default::default() };
        assert_eq!(c.cutoffs().unwrap(), vec![200, 400, 600, 800, 1000]);
        let bad = RunConfig { bound: 10, x_cutoffs: vec![20], ..Default::default() };
        assert!(bad.cutoffs().is_err());
    }
}
