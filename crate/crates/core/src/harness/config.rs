//! Flat `key = value` run configuration.
//!
//! Keys match the long flags of `hsolve run`; `#` starts a comment, list
//! values are comma separated:
//!
//! ```text
//! k = 20, 40
//! ppwl = 10
//! N = 4, 9
//! strategy = deflation
//! inner-tol = 1e-5
//! ```

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::harness::experiment::{default_outer, ExperimentConfig, Resolution};
use crate::ras::StrategyKind;

/// Run settings; `None`/empty fields fall back to defaults in [`RunSettings::to_experiment`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    pub k: Vec<f64>,
    pub n_glob: Option<usize>,
    pub ppwl: Option<u32>,
    pub subdomains: Vec<usize>,
    pub strategy: Option<StrategyKind>,
    pub inner_tol: Option<f64>,
    pub outer_tol: Option<f64>,
    pub max_outer: Option<usize>,
    pub restart: Option<usize>,
    pub overlap: Option<usize>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub strict: bool,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::InvalidConfig(format!("line {line}: {msg}"))
}

fn list<V: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<V>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| bad(line, format!("`{key}`: cannot parse `{s}`"))))
        .collect()
}

fn one<V: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| bad(line, format!("`{key}`: cannot parse `{value}`")))
}

pub fn parse_config(text: &str) -> Result<RunSettings> {
    let mut s = RunSettings::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| bad(line, format!("expected `key = value`, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        match key.replace('_', "-").as_str() {
            "k" => s.k = list(line, key, value)?,
            "n-glob" => s.n_glob = Some(one(line, key, value)?),
            "ppwl" => s.ppwl = Some(one(line, key, value)?),
            "N" | "subdomains" => s.subdomains = list(line, key, value)?,
            "strategy" => {
                s.strategy = Some(value.parse().map_err(|e: String| bad(line, e))?);
            }
            "inner-tol" => s.inner_tol = Some(one(line, key, value)?),
            "outer-tol" => s.outer_tol = Some(one(line, key, value)?),
            "max-outer" => s.max_outer = Some(one(line, key, value)?),
            "restart" => s.restart = Some(one(line, key, value)?),
            "overlap" => s.overlap = Some(one(line, key, value)?),
            "csv" => s.csv = Some(PathBuf::from(value)),
            "json" => s.json = Some(PathBuf::from(value)),
            "strict" => s.strict = one(line, key, value)?,
            _ => return Err(bad(line, format!("unknown key `{key}`"))),
        }
    }
    Ok(s)
}

impl RunSettings {
    /// Fields set in `over` replace those in `self`.
    pub fn merge(mut self, over: RunSettings) -> RunSettings {
        if !over.k.is_empty() {
            self.k = over.k;
        }
        if !over.subdomains.is_empty() {
            self.subdomains = over.subdomains;
        }
        self.n_glob = over.n_glob.or(self.n_glob);
        self.ppwl = over.ppwl.or(self.ppwl);
        self.strategy = over.strategy.or(self.strategy);
        self.inner_tol = over.inner_tol.or(self.inner_tol);
        self.outer_tol = over.outer_tol.or(self.outer_tol);
        self.max_outer = over.max_outer.or(self.max_outer);
        self.restart = over.restart.or(self.restart);
        self.overlap = over.overlap.or(self.overlap);
        self.csv = over.csv.or(self.csv);
        self.json = over.json.or(self.json);
        self.strict |= over.strict;
        self
    }

    pub fn to_experiment(&self) -> Result<ExperimentConfig> {
        if self.k.is_empty() {
            return Err(Error::InvalidConfig("at least one wave number `k` is required".into()));
        }
        let resolution = match (self.n_glob, self.ppwl) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("give either `n-glob` or `ppwl`, not both".into()))
            }
            (Some(n), None) => Resolution::NGlob(n),
            (None, Some(p)) => Resolution::Ppwl(p),
            (None, None) => Resolution::Ppwl(10),
        };
        for &k in &self.k {
            resolution.n_glob(k)?;
        }
        let subdomains = if self.subdomains.is_empty() {
            vec![4]
        } else {
            self.subdomains.clone()
        };
        let mut cfg = ExperimentConfig::new(
            self.k.clone(),
            resolution,
            subdomains,
            self.strategy.unwrap_or(StrategyKind::Direct),
        );
        if let Some(tol) = self.inner_tol {
            cfg = cfg.with_inner_tol(tol);
        }
        let mut outer = default_outer();
        if let Some(tol) = self.outer_tol {
            outer.rel_tol = tol;
        }
        if let Some(m) = self.max_outer {
            outer.max_iterations = m;
        }
        outer.restart = self.restart;
        outer.validate()?;
        cfg.outer = outer;
        if let Some(o) = self.overlap {
            cfg.overlap = o;
        }
        Ok(cfg)
    }
}
