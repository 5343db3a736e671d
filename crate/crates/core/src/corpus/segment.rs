use serde::{Deserialize, Serialize};

use crate::text::{
    is_closing_mark, is_sentence_delimiter, is_sentence_punctuation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Sentence,
    Chapter,
    Chunk,
}

/// Half-open character range within one document body.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Span { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }
}

/// A range of a named document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segment {
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn span(&self) -> Span {
        Span::new(self.start, self.end)
    }
}

fn has_content(piece: &[char]) -> bool {
    piece
        .iter()
        .any(|&c| !c.is_whitespace() && !is_sentence_delimiter(c) && !is_closing_mark(c))
}

/// Pieces with no content are folded into their predecessor (or, at the start
/// of the text, into their successor) so segments always tile the body.
fn merge_contentless(text: &[char], pieces: Vec<Span>) -> Vec<Span> {
    let mut out: Vec<Span> = Vec::with_capacity(pieces.len());
    let mut pending_start: Option<usize> = None;
    for p in pieces {
        if has_content(&text[p.start..p.end]) {
            let start = pending_start.take().unwrap_or(p.start);
            out.push(Span::new(start, p.end));
        } else if let Some(last) = out.last_mut() {
            last.end = p.end;
        } else if pending_start.is_none() {
            pending_start = Some(p.start);
        }
    }
    out
}

/// Splits a body into sentences (or fixed-length chunks when the body has no
/// sentence punctuation). Returned spans are ordered, non-overlapping and,
/// unless the body has no content at all, tile it exactly.
pub fn split_sentences(text: &[char], chunk_len: usize) -> (Vec<Span>, SegmentKind) {
    if text.iter().any(|&c| is_sentence_punctuation(c)) {
        (merge_contentless(text, delimiter_pieces(text)), SegmentKind::Sentence)
    } else {
        (merge_contentless(text, chunk_pieces(text, chunk_len.max(1))), SegmentKind::Chunk)
    }
}

fn delimiter_pieces(text: &[char]) -> Vec<Span> {
    let n = text.len();
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < n {
        if is_sentence_delimiter(text[i]) {
            let mut j = i + 1;
            while j < n && (is_sentence_delimiter(text[j]) || is_closing_mark(text[j])) {
                j += 1;
            }
            pieces.push(Span::new(start, j));
            start = j;
            i = j;
        } else {
            i += 1;
        }
    }
    if start < n {
        pieces.push(Span::new(start, n));
    }
    pieces
}

fn chunk_pieces(text: &[char], chunk_len: usize) -> Vec<Span> {
    let n = text.len();
    let mut pieces = Vec::new();
    let mut line_start = 0;
    while line_start < n {
        let line_end = text[line_start..]
            .iter()
            .position(|&c| c == '\n')
            .map(|p| line_start + p)
            .unwrap_or(n);
        let mut s = line_start;
        while s < line_end {
            let e = (s + chunk_len).min(line_end);
            pieces.push(Span::new(s, e));
            s = e;
        }
        if line_end < n {
            // the newline itself; merged into the preceding chunk
            pieces.push(Span::new(line_end, line_end + 1));
        }
        line_start = line_end + 1;
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn texts(text: &[char], spans: &[Span]) -> Vec<String> {
        spans.iter().map(|s| text[s.start..s.end].iter().collect()).collect()
    }

    #[test]
    fn two_clauses() {
        let t = chars("天下太平。萬國來朝！");
        let (spans, kind) = split_sentences(&t, 40);
        assert_eq!(kind, SegmentKind::Sentence);
        assert_eq!(texts(&t, &spans), vec!["天下太平。", "萬國來朝！"]);
    }

    #[test]
    fn closing_quote_attaches() {
        let t = chars("曰：「可。」遂行。\n");
        let (spans, _) = split_sentences(&t, 40);
        assert_eq!(texts(&t, &spans), vec!["曰：「可。」", "遂行。\n"]);
    }

    #[test]
    fn chunk_fallback() {
        let t: Vec<char> = std::iter::repeat('字').take(100).collect();
        let (spans, kind) = split_sentences(&t, 40);
        assert_eq!(kind, SegmentKind::Chunk);
        let lens: Vec<usize> = spans.iter().map(Span::len).collect();
        assert_eq!(lens, vec![40, 40, 20]);
    }

    #[test]
    fn empty_and_blank() {
        assert!(split_sentences(&[], 40).0.is_empty());
        assert!(split_sentences(&chars("\n\n  "), 40).0.is_empty());
    }

    #[test]
    fn leading_blank_lines_fold_forward() {
        let t = chars("\n\n甲乙。丙");
        let (spans, _) = split_sentences(&t, 40);
        assert_eq!(texts(&t, &spans), vec!["\n\n甲乙。", "丙"]);
    }
}
