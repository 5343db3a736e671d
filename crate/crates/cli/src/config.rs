use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use wenxian_core::concordance::SuggestConfig;
use wenxian_core::disambig::DisambigConfig;
use wenxian_core::translit::TranslitConfig;

use crate::error::{CliError, Result};

pub const DATA_DIR_ENV: &str = "WENXIAN_DATA_DIR";
pub const DEFAULT_ADDR: &str = "127.0.0.1:7878";

/// `wenxian.toml`. Every section is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub data_dir: Option<PathBuf>,
    pub service: ServiceConfig,
    /// Corpus name → input path, served by `serve`.
    pub corpora: BTreeMap<String, PathBuf>,
    /// Gazetteer name → TSV path.
    pub gazetteers: BTreeMap<String, PathBuf>,
    pub translit: TranslitConfig,
    pub disambig: DisambigConfig,
    pub suggest: SuggestConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub addr: String,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            addr: DEFAULT_ADDR.into(),
        }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(CliError::MissingInput(path.to_path_buf()));
        }
        let mut cfg = Config::parse(&std::fs::read_to_string(path)?)?;
        // relative paths in the file are relative to the file
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(d) = cfg.data_dir.as_mut() {
            fix(d);
        }
        cfg.corpora.values_mut().for_each(fix);
        cfg.gazetteers.values_mut().for_each(fix);
        Ok(cfg)
    }
}

/// Existing paths are used as given; otherwise relative paths are tried
/// under the data directory.
pub fn resolve_input(data_dir: Option<&Path>, p: &Path) -> Result<PathBuf> {
    if p.exists() {
        return Ok(p.to_path_buf());
    }
    if let (Some(d), true) = (data_dir, p.is_relative()) {
        let q = d.join(p);
        if q.exists() {
            return Ok(q);
        }
    }
    Err(CliError::MissingInput(p.to_path_buf()))
}
