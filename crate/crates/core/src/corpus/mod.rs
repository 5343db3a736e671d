//! Corpus ingestion, normalization, segmentation and exact occurrence counting.

mod date;
mod index;
pub mod io;
mod segment;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use unicode_normalization::UnicodeNormalization;

pub use date::PartialDate;
pub use index::CorpusIndex;
pub use segment::{split_sentences, Segment, SegmentKind, Span};

use crate::error::{invalid, Error, Result};
use crate::text::is_cjk_ideograph;

pub const DEFAULT_CHUNK_LEN: usize = 40;

/// How chapters are located in a raw body.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChapterMarkers {
    #[default]
    None,
    /// Every match starts a chapter that runs to the next match (or the end).
    Pattern(String),
    /// Explicit `[start, end)` character ranges over the normalized body.
    Ranges(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocMeta {
    pub doc_id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub collection: String,
    #[serde(default)]
    pub date: PartialDate,
    #[serde(default)]
    pub chapters: ChapterMarkers,
}

impl DocMeta {
    pub fn new(doc_id: impl Into<String>) -> Self {
        DocMeta {
            doc_id: doc_id.into(),
            ..Default::default()
        }
    }

    pub fn with_date(mut self, date: PartialDate) -> Self {
        self.date = date;
        self
    }

    pub fn with_collection(mut self, collection: impl Into<String>) -> Self {
        self.collection = collection.into();
        self
    }

    pub fn with_chapters(mut self, chapters: ChapterMarkers) -> Self {
        self.chapters = chapters;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Chunk length used for bodies without sentence punctuation.
    pub chunk_len: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            chunk_len: DEFAULT_CHUNK_LEN,
        }
    }
}

/// A dated, sourced, normalized and segmented text.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusDoc {
    pub doc_id: String,
    pub title: String,
    pub collection: String,
    pub date: PartialDate,
    pub chapters: Vec<Span>,
    pub sentences: Vec<Span>,
    pub sentence_kind: SegmentKind,
    pub text: Vec<char>,
}

impl CorpusDoc {
    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn body(&self) -> String {
        self.text.iter().collect()
    }

    pub fn slice(&self, span: Span) -> String {
        self.text[span.start..span.end].iter().collect()
    }

    pub fn cjk_chars(&self) -> usize {
        self.text.iter().filter(|&&c| is_cjk_ideograph(c)).count()
    }

    /// Index of the sentence containing character `pos`.
    pub fn sentence_of(&self, pos: usize) -> Option<usize> {
        let i = self.sentences.partition_point(|s| s.end <= pos);
        (i < self.sentences.len() && self.sentences[i].start <= pos).then_some(i)
    }

    /// Index of the chapter containing character `pos`.
    pub fn chapter_of(&self, pos: usize) -> Option<usize> {
        let i = self.chapters.partition_point(|s| s.end <= pos);
        (i < self.chapters.len() && self.chapters[i].start <= pos).then_some(i)
    }

    pub fn sentence_segments(&self) -> Vec<Segment> {
        self.sentences
            .iter()
            .map(|s| Segment {
                doc_id: self.doc_id.clone(),
                start: s.start,
                end: s.end,
                kind: self.sentence_kind,
            })
            .collect()
    }

    pub fn chapter_segments(&self) -> Vec<Segment> {
        self.chapters
            .iter()
            .map(|s| Segment {
                doc_id: self.doc_id.clone(),
                start: s.start,
                end: s.end,
                kind: SegmentKind::Chapter,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub doc_id: String,
    pub chars: usize,
    pub cjk_chars: usize,
    pub sentences: usize,
    pub chapters: usize,
}

/// Decodes, normalizes (NFC) and segments a raw document.
pub fn prepare_document(raw: &[u8], meta: DocMeta, config: &IngestConfig) -> Result<CorpusDoc> {
    let decoded = std::str::from_utf8(raw).map_err(|e| Error::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;
    let normalized: String = decoded.nfc().collect();
    let text: Vec<char> = normalized.chars().collect();
    let chapters = locate_chapters(&normalized, text.len(), &meta.chapters)?;
    let (sentences, sentence_kind) = split_sentences(&text, config.chunk_len);
    Ok(CorpusDoc {
        doc_id: meta.doc_id,
        title: meta.title,
        collection: meta.collection,
        date: meta.date,
        chapters,
        sentences,
        sentence_kind,
        text,
    })
}

fn locate_chapters(body: &str, len: usize, markers: &ChapterMarkers) -> Result<Vec<Span>> {
    match markers {
        ChapterMarkers::None => Ok(Vec::new()),
        ChapterMarkers::Pattern(p) => {
            let re = regex::Regex::new(p)?;
            let mut starts = Vec::new();
            // byte offsets -> char offsets, single forward pass
            let mut chars_before = 0;
            let mut last_byte = 0;
            for m in re.find_iter(body) {
                if m.start() == m.end() {
                    continue;
                }
                chars_before += body[last_byte..m.start()].chars().count();
                last_byte = m.start();
                starts.push(chars_before);
            }
            Ok(starts
                .iter()
                .enumerate()
                .map(|(i, &s)| Span::new(s, starts.get(i + 1).copied().unwrap_or(len)))
                .collect())
        }
        ChapterMarkers::Ranges(ranges) => {
            let mut out: Vec<Span> = Vec::with_capacity(ranges.len());
            for &(start, end) in ranges {
                if start >= end || end > len {
                    return Err(invalid(format!(
                        "chapter range [{start}, {end}) is empty or exceeds body length {len}"
                    )));
                }
                if let Some(prev) = out.last() {
                    if start < prev.end {
                        return Err(Error::OverlappingChapters {
                            prev_start: prev.start,
                            prev_end: prev.end,
                            start,
                            end,
                        });
                    }
                }
                out.push(Span::new(start, end));
            }
            Ok(out)
        }
    }
}

/// Accumulates documents for a new corpus generation.
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    config: IngestConfig,
    docs: Vec<CorpusDoc>,
    ids: HashMap<String, usize>,
}

impl CorpusBuilder {
    pub fn new(config: IngestConfig) -> Self {
        CorpusBuilder {
            config,
            ..Default::default()
        }
    }

    /// Starts a new generation from an existing one.
    pub fn extend_from(corpus: &Corpus) -> Self {
        let mut b = CorpusBuilder::new(corpus.config);
        for d in &corpus.docs {
            b.ids.insert(d.doc_id.clone(), b.docs.len());
            b.docs.push(d.clone());
        }
        b
    }

    pub fn ingest(&mut self, raw: &[u8], meta: DocMeta) -> Result<IngestReport> {
        let doc = prepare_document(raw, meta, &self.config)?;
        self.push(doc)
    }

    pub fn ingest_str(&mut self, text: &str, meta: DocMeta) -> Result<IngestReport> {
        self.ingest(text.as_bytes(), meta)
    }

    pub fn push(&mut self, doc: CorpusDoc) -> Result<IngestReport> {
        if doc.doc_id.is_empty() {
            return Err(Error::Schema("document id must be non-empty".into()));
        }
        if self.ids.contains_key(&doc.doc_id) {
            return Err(Error::DuplicateDocument(doc.doc_id));
        }
        let report = IngestReport {
            doc_id: doc.doc_id.clone(),
            chars: doc.len(),
            cjk_chars: doc.cjk_chars(),
            sentences: doc.sentences.len(),
            chapters: doc.chapters.len(),
        };
        self.ids.insert(doc.doc_id.clone(), self.docs.len());
        self.docs.push(doc);
        Ok(report)
    }

    pub fn build(self) -> Corpus {
        let index = CorpusIndex::build(self.docs.iter().map(|d| d.text.as_slice()));
        let generation = generation_id(&self.config, &self.docs);
        Corpus {
            config: self.config,
            docs: self.docs,
            ids: self.ids,
            index,
            generation,
        }
    }
}

fn generation_id(config: &IngestConfig, docs: &[CorpusDoc]) -> String {
    let mut h = Sha256::new();
    h.update(b"wenxian-corpus-v1\0");
    h.update((config.chunk_len as u64).to_le_bytes());
    for d in docs {
        for field in [&d.doc_id, &d.title, &d.collection] {
            h.update(field.as_bytes());
            h.update([0u8]);
        }
        h.update(d.date.to_string().as_bytes());
        h.update([0u8]);
        for c in &d.chapters {
            h.update((c.start as u64).to_le_bytes());
            h.update((c.end as u64).to_le_bytes());
        }
        h.update([0xffu8]);
        h.update(d.body().as_bytes());
        h.update([0u8]);
    }
    hex::encode(&h.finalize()[..8])
}

/// Which part of a corpus a query covers.
#[derive(Debug, Clone, Copy)]
pub enum Scope<'a> {
    Corpus,
    Docs(&'a [String]),
    Segments(&'a [Segment]),
}

/// An immutable corpus generation: documents plus their index.
#[derive(Debug, Clone)]
pub struct Corpus {
    config: IngestConfig,
    docs: Vec<CorpusDoc>,
    ids: HashMap<String, usize>,
    index: CorpusIndex,
    generation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub generation: String,
    pub documents: usize,
    pub chars: usize,
    pub cjk_chars: usize,
    pub sentences: usize,
    pub chapters: usize,
    pub collections: Vec<String>,
}

impl Corpus {
    pub fn from_docs(config: IngestConfig, docs: Vec<CorpusDoc>) -> Result<Corpus> {
        let mut b = CorpusBuilder::new(config);
        for d in docs {
            b.push(d)?;
        }
        Ok(b.build())
    }

    pub fn generation(&self) -> &str {
        &self.generation
    }

    pub fn config(&self) -> &IngestConfig {
        &self.config
    }

    pub fn docs(&self) -> &[CorpusDoc] {
        &self.docs
    }

    pub fn index(&self) -> &CorpusIndex {
        &self.index
    }

    pub fn doc_index(&self, doc_id: &str) -> Result<usize> {
        self.ids
            .get(doc_id)
            .copied()
            .ok_or_else(|| Error::UnknownDocument(doc_id.to_string()))
    }

    pub fn doc(&self, doc_id: &str) -> Result<&CorpusDoc> {
        Ok(&self.docs[self.doc_index(doc_id)?])
    }

    pub fn total_chars(&self) -> usize {
        self.docs.iter().map(CorpusDoc::len).sum()
    }

    pub fn stats(&self) -> CorpusStats {
        let mut collections: Vec<String> = self.docs.iter().map(|d| d.collection.clone()).collect();
        collections.sort();
        collections.dedup();
        CorpusStats {
            generation: self.generation.clone(),
            documents: self.docs.len(),
            chars: self.total_chars(),
            cjk_chars: self.docs.iter().map(CorpusDoc::cjk_chars).sum(),
            sentences: self.docs.iter().map(|d| d.sentences.len()).sum(),
            chapters: self.docs.iter().map(|d| d.chapters.len()).sum(),
            collections,
        }
    }

    pub fn segment_sentences(&self, doc_id: &str) -> Result<Vec<Segment>> {
        Ok(self.doc(doc_id)?.sentence_segments())
    }

    /// Overlapping occurrence count of `query` within `scope`.
    ///
    /// For a segment set, counts are summed per segment; a match must lie
    /// entirely inside a segment.
    pub fn count_occurrences(&self, query: &str, scope: Scope<'_>) -> Result<usize> {
        let q: Vec<char> = query.chars().collect();
        if q.is_empty() {
            return Err(invalid("query must be non-empty"));
        }
        self.count_chars(&q, scope)
    }

    pub(crate) fn count_chars(&self, q: &[char], scope: Scope<'_>) -> Result<usize> {
        match scope {
            Scope::Corpus => Ok(self.index.count(q)),
            Scope::Docs(ids) => {
                let mut total = 0;
                for id in ids {
                    total += self.index.locate_in(self.doc_index(id)?, q).len();
                }
                Ok(total)
            }
            Scope::Segments(segs) => {
                let mut cache: HashMap<usize, Vec<usize>> = HashMap::new();
                let mut total = 0;
                for s in segs {
                    let d = self.doc_index(&s.doc_id)?;
                    if s.start > s.end || s.end > self.docs[d].len() {
                        return Err(invalid(format!(
                            "segment [{}, {}) out of range for {}",
                            s.start, s.end, s.doc_id
                        )));
                    }
                    let pos = cache.entry(d).or_insert_with(|| self.index.locate_in(d, q));
                    total += count_within(pos, s.start, s.end, q.len());
                }
                Ok(total)
            }
        }
    }

    /// Sorted occurrence offsets of `query` in document `doc`.
    pub fn locate_in(&self, doc: usize, query: &[char]) -> Vec<usize> {
        self.index.locate_in(doc, query)
    }
}

/// Number of matches (sorted start offsets `pos`, length `len`) fully inside `[start, end)`.
pub(crate) fn count_within(pos: &[usize], start: usize, end: usize, len: usize) -> usize {
    if end < start + len {
        return 0;
    }
    let lo = pos.partition_point(|&p| p < start);
    let hi = pos.partition_point(|&p| p + len <= end);
    hi.saturating_sub(lo)
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{} chars\t{} cjk\t{} sentences\t{} chapters",
            self.doc_id, self.chars, self.cjk_chars, self.sentences, self.chapters
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[(&str, &str)]) -> Corpus {
        let mut b = CorpusBuilder::new(IngestConfig::default());
        for (id, text) in docs {
            b.ingest_str(text, DocMeta::new(*id)).unwrap();
        }
        b.build()
    }

    #[test]
    fn overlap_convention() {
        let c = corpus(&[("a", "平等之平等"), ("b", "哈哈哈")]);
        assert_eq!(c.count_occurrences("平等", Scope::Corpus).unwrap(), 2);
        assert_eq!(c.count_occurrences("哈哈", Scope::Corpus).unwrap(), 2);
        let only_b = vec!["b".to_string()];
        assert_eq!(c.count_occurrences("平等", Scope::Docs(&only_b)).unwrap(), 0);
        assert!(matches!(
            c.count_occurrences("", Scope::Corpus),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn segment_scope_requires_containment() {
        let c = corpus(&[("a", "平等之平等")]);
        let seg = |s, e| Segment {
            doc_id: "a".into(),
            start: s,
            end: e,
            kind: SegmentKind::Chunk,
        };
        assert_eq!(c.count_occurrences("平等", Scope::Segments(&[seg(0, 3)])).unwrap(), 1);
        assert_eq!(c.count_occurrences("平等", Scope::Segments(&[seg(1, 4)])).unwrap(), 0);
        assert_eq!(
            c.count_occurrences("平等", Scope::Segments(&[seg(0, 2), seg(3, 5)])).unwrap(),
            2
        );
    }

    #[test]
    fn empty_body() {
        let mut b = CorpusBuilder::default();
        let r = b.ingest(b"", DocMeta::new("e")).unwrap();
        assert_eq!((r.chars, r.sentences), (0, 0));
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let mut b = CorpusBuilder::default();
        let mut raw = "天下".as_bytes().to_vec();
        raw.push(0xff);
        match b.ingest(&raw, DocMeta::new("x")) {
            Err(Error::InvalidEncoding { offset }) => assert_eq!(offset, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nfc_applied_once() {
        let mut b = CorpusBuilder::default();
        // e + combining acute -> é
        let r = b.ingest_str("e\u{301}", DocMeta::new("n")).unwrap();
        assert_eq!(r.chars, 1);
    }

    #[test]
    fn chapter_pattern_and_ranges() {
        let mut b = CorpusBuilder::default();
        let text = "序。第一回甲乙。第二回丙丁。";
        let meta = DocMeta::new("n").with_chapters(ChapterMarkers::Pattern("第.回".into()));
        b.ingest_str(text, meta).unwrap();
        let bad = DocMeta::new("m").with_chapters(ChapterMarkers::Ranges(vec![(0, 4), (3, 6)]));
        assert!(matches!(
            b.ingest_str(text, bad),
            Err(Error::OverlappingChapters { .. })
        ));
        let c = b.build();
        let d = c.doc("n").unwrap();
        assert_eq!(d.chapters, vec![Span::new(2, 8), Span::new(8, 14)]);
        assert_eq!(d.chapter_of(1), None);
        assert_eq!(d.chapter_of(9), Some(1));
        assert_eq!(d.sentence_of(2), Some(1));
    }

    #[test]
    fn determinism() {
        let a = corpus(&[("a", "天下太平。萬國來朝！")]);
        let b = corpus(&[("a", "天下太平。萬國來朝！")]);
        assert_eq!(a.generation(), b.generation());
        assert_eq!(a.docs(), b.docs());
        let c = corpus(&[("a", "天下太平。萬國來朝")]);
        assert_ne!(a.generation(), c.generation());
    }
}
