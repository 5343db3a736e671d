use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A labelled set of surface variants counted together.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawKeywordSet")]
pub struct KeywordSet {
    label: String,
    surfaces: Vec<String>,
}

#[derive(Deserialize)]
struct RawKeywordSet {
    #[serde(default)]
    label: String,
    surfaces: Vec<String>,
}

impl TryFrom<RawKeywordSet> for KeywordSet {
    type Error = Error;

    fn try_from(raw: RawKeywordSet) -> Result<Self> {
        KeywordSet::new(raw.label, raw.surfaces)
    }
}

impl KeywordSet {
    /// An empty label defaults to the surfaces joined with `|`.
    pub fn new<S: Into<String>>(label: impl Into<String>, surfaces: impl IntoIterator<Item = S>) -> Result<Self> {
        let surfaces: Vec<String> = surfaces.into_iter().map(Into::into).collect();
        if surfaces.is_empty() {
            return Err(invalid("keyword set must have at least one surface"));
        }
        let mut seen = HashSet::new();
        for s in &surfaces {
            if s.is_empty() {
                return Err(invalid("keyword surfaces must be non-empty"));
            }
            if !seen.insert(s.as_str()) {
                return Err(invalid(format!("duplicate surface {s}")));
            }
        }
        let mut label = label.into();
        if label.is_empty() {
            label = surfaces.join("|");
        }
        Ok(KeywordSet { label, surfaces })
    }

    pub fn single(surface: impl Into<String>) -> Result<Self> {
        let s = surface.into();
        KeywordSet::new(s.clone(), [s])
    }

    /// Parses `label=a|b|c` or `a|b|c`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (label, rest) = match spec.split_once('=') {
            Some((l, r)) => (l.trim(), r),
            None => ("", spec),
        };
        KeywordSet::new(label, rest.split('|').map(str::trim).filter(|s| !s.is_empty()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    pub(crate) fn surface_chars(&self) -> Vec<Vec<char>> {
        self.surfaces.iter().map(|s| s.chars().collect()).collect()
    }
}
