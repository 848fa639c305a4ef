use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use finsler_pl::{RadiusConfig, SearchConfig, ShortenConfig, Tolerances};
use serde::{Deserialize, Serialize};

pub const CONFIG_ENV: &str = "FINSLER_PL_CONFIG";

/// Everything a run depends on besides its inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub search: SearchConfig,
    pub shorten: ShortenConfig,
    pub radius: RadiusConfig,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            search: SearchConfig::default(),
            shorten: ShortenConfig::default(),
            radius: RadiusConfig::default(),
            seed: 7,
            threads: None,
            out: None,
            verbose: false,
        }
    }
}

/// Command-line values that override the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub verbose: bool,
    pub metric_tol: Option<f64>,
}

fn read(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// Flags, then the file named by `--config` or the environment, then defaults.
pub fn load(flags: &Overrides) -> Result<RunConfig> {
    let file = flags.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let mut cfg = match file {
        Some(p) => read(&p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = flags.seed {
        cfg.seed = s;
    }
    if let Some(t) = flags.threads {
        cfg.threads = Some(t);
    }
    if let Some(o) = &flags.out {
        cfg.out = Some(o.clone());
    }
    if let Some(t) = flags.metric_tol {
        cfg.tolerances.metric = t;
    }
    cfg.verbose |= flags.verbose;
    Ok(cfg)
}
