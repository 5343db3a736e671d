use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::session::Session;
use crate::corpus::{Corpus, Span};
use crate::error::{invalid, Result};
use crate::ngram::count_substrings;

const EPSILON: f64 = 1e-9;

/// Common function characters; never suggested on their own.
pub const DEFAULT_STOPLIST: &[&str] = &[
    "的", "了", "之", "也", "是", "在", "與", "和", "而", "其", "者", "以", "於", "于", "把",
    "被", "這", "那", "就", "又", "不", "有", "我", "你", "他", "她", "它", "一", "着", "著",
    "个", "個", "乎", "焉", "矣", "哉", "兮",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuggestConfig {
    pub top_k: usize,
    pub min_len: usize,
    pub max_len: usize,
    pub stoplist: Vec<String>,
}

impl Default for SuggestConfig {
    fn default() -> Self {
        SuggestConfig {
            top_k: 20,
            min_len: 1,
            max_len: 4,
            stoplist: DEFAULT_STOPLIST.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuggestStatus {
    Ok,
    NoRelevantMarks,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub surface: String,
    pub neighborhood_freq: usize,
    pub corpus_freq: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestions {
    pub status: SuggestStatus,
    pub neighborhood_sentences: usize,
    pub items: Vec<Suggestion>,
}

/// Candidate keywords from the sentences of relevant and answer marks, ranked
/// by how much more frequent they are there than in the whole corpus.
pub fn suggest_keywords(session: &Session, corpus: &Corpus, cfg: &SuggestConfig) -> Result<Suggestions> {
    session.check_current(corpus)?;
    if cfg.top_k == 0 || cfg.min_len == 0 || cfg.min_len > cfg.max_len {
        return Err(invalid("suggestions need top_k ≥ 1 and 1 ≤ min_len ≤ max_len"));
    }
    let mut pieces: BTreeSet<(usize, Span)> = BTreeSet::new();
    for m in session.marks.iter().filter(|m| m.label.is_positive()) {
        let d = corpus.doc_index(&m.hit.doc_id)?;
        let doc = &corpus.docs()[d];
        if let Some(s) = doc.sentence_of(m.hit.start) {
            pieces.insert((d, doc.sentences[s]));
        }
    }
    if pieces.is_empty() {
        return Ok(Suggestions {
            status: SuggestStatus::NoRelevantMarks,
            neighborhood_sentences: 0,
            items: Vec::new(),
        });
    }

    let hood_chars: usize = pieces.iter().map(|(_, s)| s.len()).sum();
    let corpus_chars = corpus.total_chars().max(1);
    let words = count_substrings(
        pieces
            .iter()
            .map(|&(d, s)| (d, &corpus.docs()[d].text[s.start..s.end])),
        cfg.min_len,
        cfg.max_len,
        1,
    );
    let existing = session.all_surfaces();
    let stop: BTreeSet<&str> = cfg.stoplist.iter().map(String::as_str).collect();
    let mut items: Vec<Suggestion> = words
        .into_iter()
        .filter(|w| !existing.contains(w.surface.as_str()) && !stop.contains(w.surface.as_str()))
        .map(|w| {
            let q: Vec<char> = w.surface.chars().collect();
            let corpus_freq = corpus.index().count(&q);
            let hood_rel = w.total_freq as f64 / hood_chars as f64;
            let corpus_rel = corpus_freq as f64 / corpus_chars as f64;
            Suggestion {
                ratio: hood_rel / (corpus_rel + EPSILON),
                surface: w.surface,
                neighborhood_freq: w.total_freq,
                corpus_freq,
            }
        })
        .collect();
    items.sort_by(|a, b| {
        b.ratio
            .total_cmp(&a.ratio)
            .then(b.neighborhood_freq.cmp(&a.neighborhood_freq))
            .then_with(|| a.surface.cmp(&b.surface))
    });
    items.truncate(cfg.top_k);
    Ok(Suggestions {
        status: SuggestStatus::Ok,
        neighborhood_sentences: pieces.len(),
        items,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concordance::session::tests::tiny;
    use crate::concordance::session::{MarkLabel, MarkedStatement, Provenance};

    fn marked_session(c: &Corpus) -> Session {
        let mut s = Session::new("s", c).unwrap();
        s.create_list(c, "k").unwrap();
        s.add_keyword(c, "k", "吃", Provenance::Seed).unwrap();
        let hits = s.search(c, "k", 30).unwrap();
        // the 吃 of 把唐僧蒸了吃
        s.mark(
            c,
            MarkedStatement {
                hit: hits[1].hit_ref(),
                label: MarkLabel::Relevant,
                note: String::new(),
                answer_surface: None,
            },
        )
        .unwrap();
        s
    }

    #[test]
    fn one_sentence_neighborhood() {
        let c = tiny();
        let s = marked_session(&c);
        let cfg = SuggestConfig {
            top_k: 100,
            ..Default::default()
        };
        let got = suggest_keywords(&s, &c, &cfg).unwrap();
        assert_eq!(got.status, SuggestStatus::Ok);
        assert_eq!(got.neighborhood_sentences, 1);
        let surfaces: Vec<&str> = got.items.iter().map(|i| i.surface.as_str()).collect();
        assert!(surfaces.contains(&"唐僧"));
        assert!(surfaces.contains(&"蒸"));
        for banned in ["吃", "了", "把", "的"] {
            assert!(!surfaces.contains(&banned), "{banned}");
        }
        // hand computation: sentence 把唐僧蒸了吃。 has 7 chars; the corpus 31
        let zheng = got.items.iter().find(|i| i.surface == "蒸").unwrap();
        let expect = (1.0 / 7.0) / (1.0 / 31.0 + 1e-9);
        assert!((zheng.ratio - expect).abs() < 1e-6);
        let ts = got.items.iter().find(|i| i.surface == "唐僧").unwrap();
        assert_eq!(ts.corpus_freq, 3);
        assert!(ts.ratio < zheng.ratio);
    }

    #[test]
    fn subtraction_empties_list() {
        let c = tiny();
        let mut s = marked_session(&c);
        let cfg = SuggestConfig {
            top_k: 1000,
            ..Default::default()
        };
        for item in suggest_keywords(&s, &c, &cfg).unwrap().items {
            s.add_keyword(&c, "k", &item.surface, Provenance::Suggested).unwrap();
        }
        let again = suggest_keywords(&s, &c, &cfg).unwrap();
        assert!(again.items.is_empty());
    }

    #[test]
    fn no_marks_status() {
        let c = tiny();
        let s = Session::new("s", &c).unwrap();
        let got = suggest_keywords(&s, &c, &SuggestConfig::default()).unwrap();
        assert_eq!(got.status, SuggestStatus::NoRelevantMarks);
        assert!(got.items.is_empty());
    }
}
