//! Run configuration: a TOML document with `[model]`, `[market]` and
//! optional `[grid]` / `[engine]` blocks, overridable by CLI flags.
//! Unknown keys are errors; parse errors name the offending key.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::ModelSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    BlackScholes {
        sigma: f64,
    },
    Merton {
        sigma: f64,
        lambda: f64,
        mu_j: f64,
        delta_j: f64,
    },
    Kou {
        sigma: f64,
        lambda: f64,
        p: f64,
        eta1: f64,
        eta2: f64,
    },
    VarianceGamma {
        theta: f64,
        sigma: f64,
        kappa: f64,
    },
    Nig {
        alpha: f64,
        beta: f64,
        delta: f64,
    },
    Cgmy {
        c: f64,
        g: f64,
        m: f64,
        y: f64,
    },
}

impl From<ModelConfig> for ModelSpec {
    fn from(c: ModelConfig) -> ModelSpec {
        match c {
            ModelConfig::BlackScholes { sigma } => ModelSpec::BlackScholes { sigma },
            ModelConfig::Merton {
                sigma,
                lambda,
                mu_j,
                delta_j,
            } => ModelSpec::Merton {
                sigma,
                lambda,
                mu_j,
                delta_j,
            },
            ModelConfig::Kou {
                sigma,
                lambda,
                p,
                eta1,
                eta2,
            } => ModelSpec::Kou {
                sigma,
                lambda,
                p,
                eta1,
                eta2,
            },
            ModelConfig::VarianceGamma {
                theta,
                sigma,
                kappa,
            } => ModelSpec::VarianceGamma {
                theta,
                sigma,
                kappa,
            },
            ModelConfig::Nig { alpha, beta, delta } => ModelSpec::Nig { alpha, beta, delta },
            ModelConfig::Cgmy { c, g, m, y } => ModelSpec::Cgmy { c, g, m, y },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketSection {
    s0: f64,
    strike: f64,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GridSection {
    tau_max: Option<f64>,
    tau_ratio: Option<f64>,
    tau_count: Option<u32>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct EngineSection {
    n_terms: Option<usize>,
    range_width: Option<f64>,
    n_paths: Option<u64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    model: ModelConfig,
    market: MarketSection,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    engine: EngineSection,
}

/// Optional CLI-side overrides applied on top of the file values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub s0: Option<f64>,
    pub strike: Option<f64>,
    pub tau_max: Option<f64>,
    pub tau_ratio: Option<f64>,
    pub tau_count: Option<u32>,
    pub n_terms: Option<usize>,
    pub n_paths: Option<u64>,
    pub seed: Option<u64>,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub s0: f64,
    pub strike: f64,
    pub tau_max: f64,
    pub tau_ratio: f64,
    pub tau_count: u32,
    pub n_terms: usize,
    pub range_width: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path, over: &Overrides, out: Option<PathBuf>) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: FileConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{e}")))?;
        let cfg = RunConfig {
            model: file.model.into(),
            s0: over.s0.unwrap_or(file.market.s0),
            strike: over.strike.unwrap_or(file.market.strike),
            tau_max: over.tau_max.or(file.grid.tau_max).unwrap_or(0.1),
            tau_ratio: over.tau_ratio.or(file.grid.tau_ratio).unwrap_or(10.0),
            tau_count: over.tau_count.or(file.grid.tau_count).unwrap_or(6),
            n_terms: over
                .n_terms
                .or(file.engine.n_terms)
                .unwrap_or(crate::pricing::DEFAULT_N_TERMS),
            range_width: file
                .engine
                .range_width
                .unwrap_or(crate::pricing::DEFAULT_RANGE_WIDTH),
            n_paths: over.n_paths.or(file.engine.n_paths).unwrap_or(1_000_000),
            seed: over.seed.or(file.engine.seed).unwrap_or(42),
            out,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if let Err(v) = self.model.validate() {
            return Err(Error::InvalidModel(v));
        }
        if !(self.s0 > 0.0) || !(self.strike > 0.0) {
            return Err(Error::Config(format!(
                "market: need s0 > 0 and strike > 0, got {} and {}",
                self.s0, self.strike
            )));
        }
        if !(self.tau_max > 0.0) {
            return Err(Error::Config(format!(
                "grid: tau_max must be > 0, got {}",
                self.tau_max
            )));
        }
        if !(self.tau_ratio > 1.0) {
            return Err(Error::Config(format!(
                "grid: tau_ratio must be > 1 (strictly decreasing grid), got {}",
                self.tau_ratio
            )));
        }
        if self.tau_count == 0 {
            return Err(Error::Config("grid: tau_count must be >= 1".into()));
        }
        if self.n_terms < 16 {
            return Err(Error::Config(format!(
                "engine: n_terms must be >= 16, got {}",
                self.n_terms
            )));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("engine: n_paths must be >= 1".into()));
        }
        Ok(())
    }

    /// Geometric expiry grid, strictly decreasing from `tau_max`.
    pub fn taus(&self) -> Vec<f64> {
        (0..self.tau_count)
            .map(|i| self.tau_max / self.tau_ratio.powi(i as i32))
            .collect()
    }
}
