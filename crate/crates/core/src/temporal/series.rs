use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::bucket::{Assigner, Bucket, Bucketing};
use super::keyword::KeywordSet;
use crate::corpus::{Corpus, CorpusDoc, Scope};
use crate::error::{invalid, Result};

/// Bucketed counts. Buckets missing from `points` are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    pub label: String,
    pub bucketing: Bucketing,
    pub points: BTreeMap<Bucket, usize>,
    pub total: usize,
    /// Documents in scope that could not be bucketed (no usable date).
    pub excluded_docs: Vec<String>,
}

impl TimeSeries {
    pub fn get(&self, bucket: &Bucket) -> usize {
        self.points.get(bucket).copied().unwrap_or(0)
    }

    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "bucket\t{}", self.label)?;
        for (b, c) in &self.points {
            writeln!(w, "{b}\t{c}")?;
        }
        Ok(())
    }
}

/// Document indices covered by a document-level scope.
pub(crate) fn scope_docs(corpus: &Corpus, scope: Scope<'_>) -> Result<Vec<usize>> {
    match scope {
        Scope::Corpus => Ok((0..corpus.docs().len()).collect()),
        Scope::Docs(ids) => ids.iter().map(|id| corpus.doc_index(id)).collect(),
        Scope::Segments(_) => Err(invalid(
            "temporal analyses take a corpus or document scope, not a segment set",
        )),
    }
}

pub(crate) struct ScopedDocs<'c> {
    pub in_scope: Vec<bool>,
    pub refs: Vec<&'c CorpusDoc>,
}

impl<'c> ScopedDocs<'c> {
    pub fn new(corpus: &'c Corpus, scope: Scope<'_>) -> Result<Self> {
        let idx = scope_docs(corpus, scope)?;
        let mut in_scope = vec![false; corpus.docs().len()];
        for &d in &idx {
            in_scope[d] = true;
        }
        let refs = idx.iter().map(|&d| &corpus.docs()[d]).collect();
        Ok(ScopedDocs {
            in_scope,
            refs,
        })
    }

    pub fn excluded(&self, assigner: &Assigner<'_>) -> Vec<String> {
        self.refs
            .iter()
            .filter(|d| !assigner.admits(d))
            .map(|d| d.doc_id.clone())
            .collect()
    }
}

/// Per-bucket overlapping occurrence counts of a keyword set (summed over
/// its surfaces).
pub fn keyword_timeseries(
    corpus: &Corpus,
    scope: Scope<'_>,
    kw: &KeywordSet,
    bucketing: &Bucketing,
) -> Result<TimeSeries> {
    let docs = ScopedDocs::new(corpus, scope)?;
    let assigner = Assigner::new(bucketing, &docs.refs)?;
    let mut points = BTreeMap::new();
    for surface in kw.surface_chars() {
        for (d, pos) in corpus.index().locate(&surface) {
            if !docs.in_scope[d] {
                continue;
            }
            if let Some(b) = assigner.bucket(&corpus.docs()[d], pos, surface.len()) {
                *points.entry(b).or_insert(0) += 1;
            }
        }
    }
    let total = points.values().sum();
    Ok(TimeSeries {
        label: kw.label().to_string(),
        bucketing: bucketing.clone(),
        points,
        total,
        excluded_docs: docs.excluded(&assigner),
    })
}
