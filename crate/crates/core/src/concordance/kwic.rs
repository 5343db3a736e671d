use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Scope};
use crate::error::Result;
use crate::temporal::KeywordSet;

pub const DEFAULT_CONTEXT_WIDTH: usize = 30;

/// Location of a match; the key marks refer to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HitRef {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KwicHit {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub surface: String,
    pub left: String,
    pub right: String,
    /// Index of the sentence containing the match start.
    pub sentence: usize,
}

impl KwicHit {
    pub fn hit_ref(&self) -> HitRef {
        HitRef {
            doc_id: self.doc_id.clone(),
            start: self.start,
            end: self.end,
        }
    }
}

/// One hit per occurrence of any surface, in document order. Context is
/// clamped at document edges, never padded.
pub fn kwic_search(corpus: &Corpus, scope: Scope<'_>, kw: &KeywordSet, width: usize) -> Result<Vec<KwicHit>> {
    let docs = crate::temporal::scope_doc_indices(corpus, scope)?;
    let surfaces = kw.surface_chars();
    let mut hits = Vec::new();
    for d in docs {
        let doc = &corpus.docs()[d];
        let mut found: Vec<(usize, usize)> = Vec::new();
        for s in &surfaces {
            found.extend(corpus.locate_in(d, s).into_iter().map(|p| (p, s.len())));
        }
        found.sort_unstable();
        for (start, len) in found {
            let end = start + len;
            hits.push(KwicHit {
                doc_id: doc.doc_id.clone(),
                start,
                end,
                surface: doc.text[start..end].iter().collect(),
                left: doc.text[start.saturating_sub(width)..start].iter().collect(),
                right: doc.text[end..(end + width).min(doc.len())].iter().collect(),
                sentence: doc.sentence_of(start).unwrap_or(0),
            });
        }
    }
    Ok(hits)
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

    #[test]
    fn clamped_context() {
        let c = corpus(&["唐僧在此。行者也在。唐僧"]);
        let hits = kwic_search(&c, Scope::Corpus, &KeywordSet::single("唐僧").unwrap(), 3).unwrap();
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].left, "");
        assert_eq!(hits[0].right, "在此。");
        assert_eq!(hits[1].left, "也在。");
        assert_eq!(hits[1].right, "");
        assert_eq!(hits[1].sentence, 2);
    }

    #[test]
    fn absent_and_count_parity() {
        let c = corpus(&["啊啊啊", "啊"]);
        let kw = KeywordSet::single("啊啊").unwrap();
        let hits = kwic_search(&c, Scope::Corpus, &kw, 30).unwrap();
        assert_eq!(hits.len(), c.count_occurrences("啊啊", Scope::Corpus).unwrap());
        assert!(kwic_search(&c, Scope::Corpus, &KeywordSet::single("無").unwrap(), 30).unwrap().is_empty());
    }
}
