//! Repeated character-string ("pseudo-word") extraction.
//!
//! The scope's sentence segments are concatenated into one symbol sequence in
//! which every break character (whitespace, punctuation) and every segment end
//! becomes a shared separator. A suffix array plus LCP array then yields, for
//! each length `L` in the band, maximal runs of suffixes sharing an `L`-symbol
//! separator-free prefix; the run length is the overlapping occurrence count.
//!
//! Cost: `O(n)` construction (SA-IS) and `O(n * (max_len - min_len + 1))`
//! enumeration. Memory is about 13 bytes per character (symbols, suffix array,
//! LCP, a capped distance-to-separator byte), i.e. ~1.6 GB at 120M characters.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Scope, Span};
use crate::error::{invalid, Result};
use crate::suffix::{lcp_array, suffix_array};
use crate::text::is_break_char;

pub const HARD_MAX_LEN: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PseudoWord {
    pub surface: String,
    pub length: usize,
    pub total_freq: usize,
    pub doc_freq: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub min_len: usize,
    pub max_len: usize,
    pub min_freq: usize,
    pub hard_cap: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            min_len: 2,
            max_len: 8,
            min_freq: 2,
            hard_cap: HARD_MAX_LEN,
        }
    }
}

impl ExtractConfig {
    pub fn band(min_len: usize, max_len: usize, min_freq: usize) -> Self {
        ExtractConfig {
            min_len,
            max_len,
            min_freq,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_len < 1 || self.min_len > self.max_len {
            return Err(invalid(format!(
                "length band {}..{} is invalid",
                self.min_len, self.max_len
            )));
        }
        if self.max_len > self.hard_cap {
            return Err(invalid(format!(
                "max_len {} exceeds hard cap {}",
                self.max_len, self.hard_cap
            )));
        }
        if self.min_freq < 2 {
            return Err(invalid("min_freq must be at least 2"));
        }
        Ok(())
    }
}

/// Extracts every string in the length band whose overlapping occurrence
/// count within the scope's sentences is at least `min_freq`.
pub fn extract_repeated_strings(
    corpus: &Corpus,
    scope: Scope<'_>,
    config: &ExtractConfig,
) -> Result<Vec<PseudoWord>> {
    config.validate()?;
    let pieces = scope_pieces(corpus, scope)?;
    Ok(count_substrings(
        pieces
            .iter()
            .map(|&(d, s)| (d, &corpus.docs()[d].text[s.start..s.end])),
        config.min_len,
        config.max_len,
        config.min_freq,
    ))
}

/// Sentence-bounded pieces `(document index, span)` covered by a scope.
pub(crate) fn scope_pieces(corpus: &Corpus, scope: Scope<'_>) -> Result<Vec<(usize, Span)>> {
    let mut out = Vec::new();
    match scope {
        Scope::Corpus => {
            for (d, doc) in corpus.docs().iter().enumerate() {
                out.extend(doc.sentences.iter().map(|&s| (d, s)));
            }
        }
        Scope::Docs(ids) => {
            for id in ids {
                let d = corpus.doc_index(id)?;
                out.extend(corpus.docs()[d].sentences.iter().map(|&s| (d, s)));
            }
        }
        Scope::Segments(segs) => {
            for seg in segs {
                let d = corpus.doc_index(&seg.doc_id)?;
                let doc = &corpus.docs()[d];
                if seg.start > seg.end || seg.end > doc.len() {
                    return Err(invalid(format!(
                        "segment [{}, {}) out of range for {}",
                        seg.start, seg.end, seg.doc_id
                    )));
                }
                for s in &doc.sentences {
                    let start = s.start.max(seg.start);
                    let end = s.end.min(seg.end);
                    if start < end {
                        out.push((d, Span::new(start, end)));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Core counter: `min_freq` may be 1 here (used for small neighborhoods).
/// Results are sorted by `total_freq` descending, then surface.
pub(crate) fn count_substrings<'a>(
    pieces: impl IntoIterator<Item = (usize, &'a [char])>,
    min_len: usize,
    max_len: usize,
    min_freq: usize,
) -> Vec<PseudoWord> {
    let mut symbols: Vec<u32> = Vec::new();
    let mut piece_docs: Vec<(usize, usize)> = Vec::new(); // (symbol start, doc)
    for (doc, text) in pieces {
        piece_docs.push((symbols.len(), doc));
        symbols.extend(
            text.iter()
                .map(|&c| if is_break_char(c) { 0 } else { c as u32 + 1 }),
        );
        symbols.push(0);
    }
    let n = symbols.len();
    if n == 0 || min_len == 0 || min_len > max_len {
        return Vec::new();
    }

    // separator-free run length starting at each position, capped at max_len
    let mut rem = vec![0u8; n];
    let cap = max_len.min(u8::MAX as usize) as u8;
    for i in (0..n).rev() {
        rem[i] = if symbols[i] == 0 {
            0
        } else if i + 1 < n {
            rem[i + 1].saturating_add(1).min(cap)
        } else {
            1
        };
    }

    let sa = suffix_array(&symbols, char::MAX as u32 + 1);
    let lcp = lcp_array(&symbols, &sa);
    let doc_at = |p: usize| {
        let k = piece_docs.partition_point(|&(s, _)| s <= p) - 1;
        piece_docs[k].1
    };
    let max_doc = piece_docs.iter().map(|&(_, d)| d).max().unwrap_or(0);
    let mut stamp = vec![usize::MAX; max_doc + 1];
    let mut block_id = 0usize;

    let mut out = Vec::new();
    for len in min_len..=max_len.min(cap as usize) {
        let mut i = 0;
        while i < n {
            let p = sa[i] as usize;
            if (rem[p] as usize) < len {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < n && lcp[j] as usize >= len {
                j += 1;
            }
            let count = j - i;
            if count >= min_freq {
                block_id += 1;
                let mut doc_freq = 0;
                for &q in &sa[i..j] {
                    let d = doc_at(q as usize);
                    if stamp[d] != block_id {
                        stamp[d] = block_id;
                        doc_freq += 1;
                    }
                }
                let surface: String = symbols[p..p + len]
                    .iter()
                    .map(|&s| char::from_u32(s - 1).expect("valid scalar"))
                    .collect();
                out.push(PseudoWord {
                    surface,
                    length: len,
                    total_freq: count,
                    doc_freq,
                });
            }
            i = j;
        }
    }
    sort_words(&mut out);
    out
}

/// Canonical output order: frequency descending, then codepoint order.
pub fn sort_words(words: &mut [PseudoWord]) {
    words.sort_by(|a, b| {
        b.total_freq
            .cmp(&a.total_freq)
            .then_with(|| a.surface.cmp(&b.surface))
    });
}

/// Drops every candidate that never occurs outside a superstring candidate
/// (some superstring has the same total frequency).
pub fn prune_subsumed(candidates: &[PseudoWord]) -> Vec<PseudoWord> {
    let freq: HashMap<&str, usize> = candidates
        .iter()
        .map(|w| (w.surface.as_str(), w.total_freq))
        .collect();
    let mut subsumed: HashMap<&str, ()> = HashMap::new();
    for t in candidates {
        let offsets: Vec<usize> = t
            .surface
            .char_indices()
            .map(|(i, _)| i)
            .chain(std::iter::once(t.surface.len()))
            .collect();
        for a in 0..offsets.len() {
            for b in a + 1..offsets.len() {
                if a == 0 && b == offsets.len() - 1 {
                    continue;
                }
                let s = &t.surface[offsets[a]..offsets[b]];
                if freq.get(s) == Some(&t.total_freq) {
                    subsumed.insert(s, ());
                }
            }
        }
    }
    candidates
        .iter()
        .filter(|w| !subsumed.contains_key(w.surface.as_str()))
        .cloned()
        .collect()
}

/// Tab-separated export: `surface	length	total_freq	doc_freq`, with header.
pub fn write_tsv(words: &[PseudoWord], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "surface\tlength\ttotal_freq\tdoc_freq")?;
    for p in words {
        writeln!(w, "{}\t{}\t{}\t{}", p.surface, p.length, p.total_freq, p.doc_freq)?;
    }
    Ok(())
}
