use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::inventory::PhonoInventory;
use crate::corpus::{Corpus, Scope};
use crate::error::{invalid, Result};
use crate::ngram::{extract_repeated_strings, prune_subsumed, ExtractConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterId {
    Contrast,
    Phonotactic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", content = "filter", rename_all = "snake_case")]
pub enum FilterState {
    Generated,
    DroppedBy(FilterId),
    Survived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub surface: String,
    pub total_freq: usize,
    pub doc_freq: usize,
    pub filter_state: FilterState,
    /// Survivors only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_score: Option<f64>,
}

impl Candidate {
    pub fn is_live(&self) -> bool {
        !matches!(self.filter_state, FilterState::DroppedBy(_))
    }

    fn drop_by(&mut self, f: FilterId) {
        debug_assert!(self.is_live(), "filter states only move forward");
        self.filter_state = FilterState::DroppedBy(f);
        self.rank_score = None;
    }
}

/// Survivors and the candidates a stage removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilterOutcome {
    pub kept: Vec<Candidate>,
    pub dropped: Vec<Candidate>,
    pub warnings: Vec<String>,
}

/// Repeated strings of the target corpus, minus those that only ever occur
/// inside a longer candidate.
pub fn generate_candidates(corpus: &Corpus, cfg: &ExtractConfig) -> Result<Vec<Candidate>> {
    let words = extract_repeated_strings(corpus, Scope::Corpus, cfg)?;
    Ok(prune_subsumed(&words)
        .into_iter()
        .map(|w| Candidate {
            surface: w.surface,
            total_freq: w.total_freq,
            doc_freq: w.doc_freq,
            filter_state: FilterState::Generated,
            rank_score: None,
        })
        .collect())
}

/// Gold surfaces occurring at least `min_freq` times in `corpus` that the
/// candidate list lacks. Empty means the generator is complete.
pub fn completeness_gaps<'g>(
    corpus: &Corpus,
    candidates: &[Candidate],
    gold: impl IntoIterator<Item = &'g str>,
    min_freq: usize,
) -> Vec<String> {
    let have: BTreeSet<&str> = candidates.iter().map(|c| c.surface.as_str()).collect();
    gold.into_iter()
        .filter(|g| !have.contains(g))
        .filter(|g| {
            let q: Vec<char> = g.chars().collect();
            corpus.index().count(&q) >= min_freq
        })
        .map(str::to_string)
        .collect()
}

/// Drops a candidate when its relative frequency in the contrast corpus is at
/// least `threshold` times its relative frequency in the target.
pub fn filter_contrast(
    candidates: Vec<Candidate>,
    target: &Corpus,
    contrast: &Corpus,
    threshold: f64,
) -> Result<FilterOutcome> {
    if !(threshold > 0.0) {
        return Err(invalid("contrast threshold must be positive"));
    }
    let contrast_chars = contrast.total_chars();
    if contrast_chars == 0 {
        return Ok(FilterOutcome {
            kept: candidates,
            dropped: Vec::new(),
            warnings: vec!["contrast corpus is empty; contrast filter skipped".into()],
        });
    }
    let target_chars = target.total_chars().max(1) as f64;
    let mut out = FilterOutcome {
        kept: Vec::new(),
        dropped: Vec::new(),
        warnings: Vec::new(),
    };
    for mut c in candidates {
        let q: Vec<char> = c.surface.chars().collect();
        let contrast_rel = contrast.index().count(&q) as f64 / contrast_chars as f64;
        let target_rel = c.total_freq as f64 / target_chars;
        if contrast_rel > 0.0 && contrast_rel >= threshold * target_rel {
            c.drop_by(FilterId::Contrast);
            out.dropped.push(c);
        } else {
            out.kept.push(c);
        }
    }
    Ok(out)
}

/// Keeps candidates whose mean inventory weight reaches `min_fraction`.
pub fn filter_phonotactic(candidates: Vec<Candidate>, inventory: &PhonoInventory, min_fraction: f64) -> Result<FilterOutcome> {
    if !(0.0..=1.0).contains(&min_fraction) {
        return Err(invalid("min_fraction must lie in [0, 1]"));
    }
    let mut out = FilterOutcome {
        kept: Vec::new(),
        dropped: Vec::new(),
        warnings: Vec::new(),
    };
    for mut c in candidates {
        // small tolerance so 3 of 5 at weight 1.0 meets 0.6 exactly
        if inventory.fraction(&c.surface) + 1e-12 >= min_fraction {
            out.kept.push(c);
        } else {
            c.drop_by(FilterId::Phonotactic);
            out.dropped.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, DocMeta};

    fn corpus(texts: &[&str]) -> Corpus {
        let mut b = CorpusBuilder::default();
        for (i, t) in texts.iter().enumerate() {
            b.ingest_str(t, DocMeta::new(format!("d{i}"))).unwrap();
        }
        b.build()
    }

    fn cand(s: &str, f: usize) -> Candidate {
        Candidate {
            surface: s.into(),
            total_freq: f,
            doc_freq: 1,
            filter_state: FilterState::Generated,
            rank_score: None,
        }
    }

    #[test]
    fn frequency_threshold() {
        let c = corpus(&["曰德模克拉西者。謂德模克拉西也。稱伯理璽天德。"]);
        let cands = generate_candidates(&c, &ExtractConfig::default()).unwrap();
        assert!(cands.iter().any(|x| x.surface == "德模克拉西" && x.total_freq == 2));
        assert!(!cands.iter().any(|x| x.surface == "伯理璽天德"));
        assert!(completeness_gaps(&c, &cands, ["德模克拉西", "伯理璽天德"], 2).is_empty());
    }

    #[test]
    fn contrast_rules() {
        // target 10 chars; contrast 10 chars
        let target = corpus(&["甲乙甲乙丙丁戊己庚辛"]);
        let contrast = corpus(&["甲乙甲乙子丑寅卯辰巳"]);
        let out = filter_contrast(vec![cand("甲乙", 2), cand("丙丁", 2)], &target, &contrast, 1.0).unwrap();
        // equal relative frequency at threshold 1.0 → dropped
        assert_eq!(out.dropped.len(), 1);
        assert_eq!(out.dropped[0].surface, "甲乙");
        assert_eq!(out.dropped[0].filter_state, FilterState::DroppedBy(FilterId::Contrast));
        // absent from contrast → kept
        assert_eq!(out.kept[0].surface, "丙丁");
        let lenient = filter_contrast(vec![cand("甲乙", 2)], &target, &contrast, 1.5).unwrap();
        assert_eq!(lenient.kept.len(), 1);
        let empty = Corpus::from_docs(Default::default(), Vec::new()).unwrap();
        let id = filter_contrast(vec![cand("甲乙", 2)], &target, &empty, 1.0).unwrap();
        assert_eq!(id.kept.len(), 1);
        assert_eq!(id.warnings.len(), 1);
    }

    #[test]
    fn phonotactic_rules() {
        let inv = PhonoInventory::uniform("德模克拉西").unwrap();
        let out = filter_phonotactic(
            vec![cand("德模克拉西", 2), cand("天地人", 2), cand("德模天地西", 2)],
            &inv,
            0.5,
        )
        .unwrap();
        let kept: Vec<&str> = out.kept.iter().map(|c| c.surface.as_str()).collect();
        assert_eq!(kept, vec!["德模克拉西", "德模天地西"]);
        assert_eq!(out.dropped[0].filter_state, FilterState::DroppedBy(FilterId::Phonotactic));
        assert!(filter_phonotactic(Vec::new(), &inv, 1.5).is_err());
    }
}
