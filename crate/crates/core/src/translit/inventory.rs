use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DEFAULT_INVENTORY: &str = include_str!("../../data/phono_inventory.tsv");

/// Characters common in transliterations, each weighted in [0, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhonoInventory {
    weights: BTreeMap<char, f64>,
}

impl PhonoInventory {
    pub fn new(weights: BTreeMap<char, f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Schema("phonotactic inventory is empty".into()));
        }
        if let Some((c, w)) = weights.iter().find(|(_, w)| !(0.0..=1.0).contains(*w)) {
            return Err(Error::Schema(format!("weight {w} for {c} outside [0, 1]")));
        }
        Ok(PhonoInventory { weights })
    }

    /// The shipped starter inventory.
    pub fn builtin() -> Self {
        Self::parse(DEFAULT_INVENTORY).expect("builtin inventory parses")
    }

    pub fn uniform(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(|c| (c, 1.0)).collect())
    }

    /// `char<TAB>weight` per line; a bare char means weight 1.0; `#` comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split('\t');
            let ch = parts.next().unwrap_or_default().trim();
            let mut chars = ch.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(Error::Schema(format!("inventory line {}: expected one character", i + 1)));
            };
            let w = match parts.next() {
                Some(w) => w
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Schema(format!("inventory line {}: bad weight", i + 1)))?,
                None => 1.0,
            };
            weights.insert(c, w);
        }
        Self::new(weights)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn weight(&self, c: char) -> f64 {
        self.weights.get(&c).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn chars(&self) -> impl Iterator<Item = (char, f64)> + '_ {
        self.weights.iter().map(|(&c, &w)| (c, w))
    }

    /// Mean character weight over the surface.
    pub fn fraction(&self, surface: &str) -> f64 {
        let n = surface.chars().count();
        if n == 0 {
            return 0.0;
        }
        surface.chars().map(|c| self.weight(c)).sum::<f64>() / n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_and_parse() {
        let inv = PhonoInventory::builtin();
        assert!(inv.len() > 100);
        for c in "爾斯亞里克拉西".chars() {
            assert_eq!(inv.weight(c), 1.0);
        }
        assert!(PhonoInventory::parse("").is_err());
        assert!(PhonoInventory::parse("爾\t1.5").is_err());
        assert!(PhonoInventory::parse("爾斯\t1").is_err());
        assert_eq!(PhonoInventory::parse("爾\n斯\t0.25").unwrap().weight('斯'), 0.25);
    }

    #[test]
    fn fractions() {
        let inv = PhonoInventory::uniform("德模克拉西").unwrap();
        assert_eq!(inv.fraction("德模克拉西"), 1.0);
        assert_eq!(inv.fraction("天地人"), 0.0);
        assert!((inv.fraction("德模天地西") - 0.6).abs() < 1e-12);
    }
}
