//! `key = value` run configuration with `#` comments.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graphrank::Sigma;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub nmf_rank: usize,
    pub pca_dims: usize,
    pub nmf_max_iter: usize,
    pub nmf_tol: f64,
    pub graph_k: usize,
    pub alpha: f64,
    pub sigma: Sigma,
    pub n_folds: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            nmf_rank: 30,
            pca_dims: 30,
            nmf_max_iter: 500,
            nmf_tol: 1e-6,
            graph_k: 10,
            alpha: 0.99,
            sigma: Sigma::Auto,
            n_folds: 10,
            seed: 42,
        }
    }
}

pub const KEYS: [&str; 9] = [
    "nmf_rank",
    "pca_dims",
    "nmf_max_iter",
    "nmf_tol",
    "graph_k",
    "alpha",
    "sigma",
    "n_folds",
    "seed",
];

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| Error::InvalidConfigValue {
        key: key.to_string(),
        reason: format!("`{value}`: {e}"),
    })
}

impl Config {
    /// Parses config text; absent keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidConfigValue {
                key: line.to_string(),
                reason: format!("line {} is not `key = value`", lineno + 1),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "nmf_rank" => self.nmf_rank = parse_value(key, value)?,
            "pca_dims" => self.pca_dims = parse_value(key, value)?,
            "nmf_max_iter" => self.nmf_max_iter = parse_value(key, value)?,
            "nmf_tol" => self.nmf_tol = parse_value(key, value)?,
            "graph_k" => self.graph_k = parse_value(key, value)?,
            "alpha" => self.alpha = parse_value(key, value)?,
            "sigma" => {
                self.sigma = if value.eq_ignore_ascii_case("auto") {
                    Sigma::Auto
                } else {
                    Sigma::Fixed(parse_value(key, value)?)
                }
            }
            "n_folds" => self.n_folds = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidConfigValue {
                key: key.to_string(),
                reason: reason.to_string(),
            })
        };
        if self.n_folds < 2 {
            return Err(Error::TooFewFolds);
        }
        if self.nmf_rank == 0 {
            return bad("nmf_rank", "must be ≥ 1");
        }
        if self.pca_dims == 0 {
            return bad("pca_dims", "must be ≥ 1");
        }
        if self.nmf_max_iter == 0 {
            return bad("nmf_max_iter", "must be ≥ 1");
        }
        if self.nmf_tol < 0.0 || !self.nmf_tol.is_finite() {
            return bad("nmf_tol", "must be a finite value ≥ 0");
        }
        if self.graph_k == 0 {
            return bad("graph_k", "must be ≥ 1");
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return bad("alpha", "must satisfy 0 ≤ alpha < 1");
        }
        if let Sigma::Fixed(s) = self.sigma {
            if s <= 0.0 || !s.is_finite() {
                return bad("sigma", "must be `auto` or a positive number");
            }
        }
        Ok(())
    }
}

impl fmt::Display for Config {
    /// Every key, in the file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nmf_rank = {}", self.nmf_rank)?;
        writeln!(f, "pca_dims = {}", self.pca_dims)?;
        writeln!(f, "nmf_max_iter = {}", self.nmf_max_iter)?;
        writeln!(f, "nmf_tol = {:e}", self.nmf_tol)?;
        writeln!(f, "graph_k = {}", self.graph_k)?;
        writeln!(f, "alpha = {}", self.alpha)?;
        match self.sigma {
            Sigma::Auto => writeln!(f, "sigma = auto")?,
            Sigma::Fixed(s) => writeln!(f, "sigma = {s}")?,
        }
        writeln!(f, "n_folds = {}", self.n_folds)?;
        writeln!(f, "seed = {}", self.seed)
    }
}
