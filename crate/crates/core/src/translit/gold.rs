use std::collections::BTreeSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// One marked transliteration occurrence (character offsets).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GoldSpan {
    pub surface: String,
    pub doc_id: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSpans {
    pub spans: Vec<GoldSpan>,
}

impl GoldSpans {
    pub fn surfaces(&self) -> BTreeSet<String> {
        self.spans.iter().map(|s| s.surface.clone()).collect()
    }

    pub fn doc_ids(&self) -> BTreeSet<&str> {
        self.spans.iter().map(|s| s.doc_id.as_str()).collect()
    }

    /// Every span must lie in its document and spell its surface.
    pub fn validate(&self, corpus: &Corpus) -> Result<()> {
        for (i, s) in self.spans.iter().enumerate() {
            let doc = corpus.doc(&s.doc_id)?;
            let ok = s.start < s.end
                && s.end <= doc.len()
                && doc.text[s.start..s.end].iter().copied().eq(s.surface.chars());
            if !ok {
                return Err(Error::Schema(format!(
                    "gold span {} ({} in {} at {}..{}) does not match the text",
                    i + 1,
                    s.surface,
                    s.doc_id,
                    s.start,
                    s.end
                )));
            }
        }
        Ok(())
    }

    /// TSV with header `surface	doc_id	start	end`.
    pub fn read_tsv(r: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["surface", "doc_id", "start", "end"] {
            return Err(Error::Schema("gold span header must be surface, doc_id, start, end".into()));
        }
        let mut spans = Vec::new();
        for (i, rec) in rdr.deserialize().enumerate() {
            let span: GoldSpan = rec.map_err(|e| Error::Schema(format!("gold span row {}: {e}", i + 1)))?;
            spans.push(span);
        }
        Ok(GoldSpans { spans })
    }

    pub fn write_tsv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
        for s in &self.spans {
            wtr.serialize(s)?;
        }
        wtr.flush()?;
        Ok(())
    }
}
