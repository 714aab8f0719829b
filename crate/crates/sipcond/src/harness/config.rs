//! `key = value` experiment configuration with flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::FiniteRangeKernel;
use crate::rng::DEFAULT_SEED;
use crate::test_function::TestFunction;

/// Parsed configuration: the subcommand, its scalar/list parameters and the
/// common run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub subcommand: String,
    values: BTreeMap<String, String>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tolerance: f64,
}

/// Default tolerance for windows and quadrature checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Keys every subcommand accepts.
const COMMON_KEYS: &[&str] = &["seed", "out", "threads", "tolerance"];

impl ExperimentConfig {
    pub fn new(subcommand: &str) -> Self {
        ExperimentConfig {
            subcommand: subcommand.to_string(),
            values: BTreeMap::new(),
            seed: DEFAULT_SEED,
            out: None,
            threads: None,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped, later lines override earlier ones.
    pub fn parse_str(subcommand: &str, text: &str) -> Result<Self> {
        let mut cfg = Self::new(subcommand);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config(format!("line {}: empty key", lineno + 1)));
            }
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn from_file(subcommand: &str, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_str(subcommand, &text)
    }

    /// Sets one key; the common settings are parsed immediately.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse_as(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => {
                let t: usize = parse_as(key, value)?;
                if t == 0 {
                    return Err(Error::Config("threads must be at least 1".into()));
                }
                self.threads = Some(t);
            }
            "tolerance" => {
                let t: f64 = parse_as(key, value)?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Config("tolerance must be positive".into()));
                }
                self.tolerance = t;
            }
            _ => {
                self.values.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Rejects keys outside `allowed` (plus the common settings).
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for k in self.values.keys() {
            if !allowed.contains(&k.as_str()) && !COMMON_KEYS.contains(&k.as_str()) {
                let mut known: Vec<&str> = allowed.to_vec();
                known.sort_unstable();
                return Err(Error::Config(format!(
                    "unknown key `{k}` for `{}` (known: {})",
                    self.subcommand,
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_as(key, v),
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        match self.raw(key) {
            None => Err(Error::Config(format!("missing key `{key}`"))),
            Some(v) => parse_as(key, v),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_as(key, s))
                .collect(),
        }
    }

    /// `weights = p(1), ..., p(R)` (with an optional `range = R` that must
    /// match), else `kernel = nn | range2 | <path>` where a path names a file
    /// of weights separated by whitespace or commas.
    pub fn kernel(&self) -> Result<FiniteRangeKernel> {
        if self.raw("weights").is_some() {
            if self.raw("kernel").is_some() {
                return Err(Error::Config("give either `kernel` or `weights`, not both".into()));
            }
            let weights: Vec<f64> = self.list("weights", &[])?;
            if let Some(r) = self.raw("range") {
                let r: usize = parse_as("range", r)?;
                if r != weights.len() {
                    return Err(Error::Config(format!("range = {r} but {} weights given", weights.len())));
                }
            }
            return FiniteRangeKernel::new(weights).map_err(|e| Error::Config(format!("weights: {e}")));
        }
        let spec = self.raw("kernel").unwrap_or("nn");
        if let Some(k) = FiniteRangeKernel::preset(spec) {
            return Ok(k);
        }
        let text = std::fs::read_to_string(spec)
            .map_err(|e| Error::Config(format!("kernel `{spec}` is neither a preset (nn, range2) nor a readable file: {e}")))?;
        let weights = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| parse_as("kernel weight", s))
            .collect::<Result<Vec<f64>>>()?;
        FiniteRangeKernel::new(weights).map_err(|e| Error::Config(format!("kernel file `{spec}`: {e}")))
    }

    /// `phi = raised-cosine | poly | d-<base>` with `phi_center`, `phi_halfwidth`.
    pub fn test_function(&self) -> Result<TestFunction> {
        let name = self.raw("phi").unwrap_or("raised-cosine");
        TestFunction::from_name(name, self.get("phi_center", 0.0)?, self.get("phi_halfwidth", 1.0)?)
    }

    /// 64-bit FNV-1a hash of the canonical `key = value` listing.
    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical().as_bytes())
    }

    /// Sorted listing of all settings except the output path and threads,
    /// which do not affect results.
    pub fn canonical(&self) -> String {
        let mut s = format!("subcommand = {}\nseed = {}\ntolerance = {:e}\n", self.subcommand, self.seed, self.tolerance);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

fn parse_as<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}` (expected {})", std::any::type_name::<T>())))
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines_comments_and_overrides() {
        let cfg = ExperimentConfig::parse_str(
            "variance",
            "# comment\ngamma = 1.5\n\nrho=2 # inline\nns = 20, 40,80\ngamma = 2\nseed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.get::<f64>("gamma", 0.0).unwrap(), 2.0);
        assert_eq!(cfg.get::<f64>("rho", 0.0).unwrap(), 2.0);
        assert_eq!(cfg.list::<u32>("ns", &[]).unwrap(), vec![20, 40, 80]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.get::<f64>("missing", 4.5).unwrap(), 4.5);
    }

    #[test]
    fn errors_are_config_errors() {
        assert!(matches!(ExperimentConfig::parse_str("x", "novalue"), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse_str("x", "seed = -3"), Err(Error::Config(_))));
        let cfg = ExperimentConfig::parse_str("x", "gamma = abc\nbogus = 1").unwrap();
        assert!(matches!(cfg.get::<f64>("gamma", 1.0), Err(Error::Config(_))));
        assert!(matches!(cfg.check_keys(&["gamma"]), Err(Error::Config(_))));
        assert!(cfg.check_keys(&["gamma", "bogus"]).is_ok());
    }

    #[test]
    fn missing_kernel_file_is_a_config_error() {
        let cfg = ExperimentConfig::parse_str("kernel-info", "kernel = /nonexistent/weights.txt").unwrap();
        let e = cfg.kernel().unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        assert_ne!(e.exit_code(), 0);
    }

    #[test]
    fn kernel_file_is_read() {
        let path = std::env::temp_dir().join(format!("sipcond-kernel-{}.txt", std::process::id()));
        std::fs::write(&path, "0.3, 0.0\n0.2\n").unwrap();
        let cfg = ExperimentConfig::parse_str("kernel-info", &format!("kernel = {}", path.display())).unwrap();
        assert_eq!(cfg.kernel().unwrap().weights(), &[0.3, 0.0, 0.2]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn inline_weights_with_range() {
        let cfg = ExperimentConfig::parse_str("kernel-info", "range = 2\nweights = 0.25, 0.25").unwrap();
        assert_eq!(cfg.kernel().unwrap(), FiniteRangeKernel::range_two());
        let bad = ExperimentConfig::parse_str("kernel-info", "range = 3\nweights = 0.25, 0.25").unwrap();
        assert!(matches!(bad.kernel(), Err(Error::Config(_))));
        let reducible = ExperimentConfig::parse_str("kernel-info", "weights = 0, 0.5").unwrap();
        assert!(matches!(reducible.kernel(), Err(Error::Config(_))));
    }

    #[test]
    fn hash_ignores_output_settings_and_order() {
        let a = ExperimentConfig::parse_str("v", "gamma = 1\nrho = 2\nout = a.csv").unwrap();
        let b = ExperimentConfig::parse_str("v", "rho = 2\ngamma = 1\nthreads = 3").unwrap();
        let c = ExperimentConfig::parse_str("v", "rho = 2\ngamma = 1.5").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
