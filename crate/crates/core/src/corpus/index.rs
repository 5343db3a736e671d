use std::cmp::Ordering;

use crate::suffix::suffix_array;

const SEPARATOR: u32 = 0;
const UPPER: u32 = char::MAX as u32 + 1;

fn symbol(c: char) -> u32 {
    c as u32 + 1
}

/// Immutable suffix-array index over every document of a corpus generation.
///
/// Documents are concatenated with a separator symbol that no query can
/// contain, so matches never straddle two documents. Counting a query of
/// length `m` costs `O(m log n)`; locating costs an extra `O(occ log occ)`.
#[derive(Debug, Clone)]
pub struct CorpusIndex {
    symbols: Vec<u32>,
    sa: Vec<u32>,
    doc_starts: Vec<usize>,
}

impl CorpusIndex {
    pub fn build<'a>(docs: impl IntoIterator<Item = &'a [char]>) -> Self {
        let mut symbols = Vec::new();
        let mut doc_starts = Vec::new();
        for text in docs {
            doc_starts.push(symbols.len());
            symbols.extend(text.iter().map(|&c| symbol(c)));
            symbols.push(SEPARATOR);
        }
        let sa = suffix_array(&symbols, UPPER);
        CorpusIndex {
            symbols,
            sa,
            doc_starts,
        }
    }

    pub fn num_docs(&self) -> usize {
        self.doc_starts.len()
    }

    fn compare_prefix(&self, suffix: usize, query: &[u32]) -> Ordering {
        let tail = &self.symbols[suffix..];
        let k = tail.len().min(query.len());
        match tail[..k].cmp(&query[..k]) {
            Ordering::Equal if k < query.len() => Ordering::Less,
            Ordering::Equal => Ordering::Equal,
            o => o,
        }
    }

    /// Range of suffix-array ranks whose suffixes start with `query`.
    fn range(&self, query: &[char]) -> std::ops::Range<usize> {
        if query.is_empty() {
            return 0..0;
        }
        let q: Vec<u32> = query.iter().map(|&c| symbol(c)).collect();
        let lo = self
            .sa
            .partition_point(|&p| self.compare_prefix(p as usize, &q) == Ordering::Less);
        let hi = lo
            + self.sa[lo..]
                .partition_point(|&p| self.compare_prefix(p as usize, &q) == Ordering::Equal);
        lo..hi
    }

    /// Overlapping occurrence count over the whole corpus.
    pub fn count(&self, query: &[char]) -> usize {
        self.range(query).len()
    }

    /// Every occurrence as `(document index, character offset)`, in document
    /// order then offset order.
    pub fn locate(&self, query: &[char]) -> Vec<(usize, usize)> {
        let mut globals: Vec<usize> = self.sa[self.range(query)]
            .iter()
            .map(|&p| p as usize)
            .collect();
        globals.sort_unstable();
        let mut out = Vec::with_capacity(globals.len());
        let mut doc = 0;
        for g in globals {
            while doc + 1 < self.doc_starts.len() && self.doc_starts[doc + 1] <= g {
                doc += 1;
            }
            out.push((doc, g - self.doc_starts[doc]));
        }
        out
    }

    /// Occurrence offsets within a single document, ascending.
    pub fn locate_in(&self, doc: usize, query: &[char]) -> Vec<usize> {
        let start = self.doc_starts[doc];
        let end = self
            .doc_starts
            .get(doc + 1)
            .copied()
            .unwrap_or(self.symbols.len());
        let mut out: Vec<usize> = self.sa[self.range(query)]
            .iter()
            .map(|&p| p as usize)
            .filter(|&g| g >= start && g < end)
            .map(|g| g - start)
            .collect();
        out.sort_unstable();
        out
    }
}
