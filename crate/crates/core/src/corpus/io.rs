//! Corpus input formats and the stored-generation file.
//!
//! * Line-delimited JSON (`.jsonl`): one document object per line with
//!   `id`, `text` and optional `title`, `collection`, `date`,
//!   `chapter_pattern`, `chapter_ranges`.
//! * Sidecar metadata (`.tsv`): header `id	title	collection	date	chapter_pattern	path`,
//!   one row per plain UTF-8 text file; `path` is relative to the sidecar
//!   and defaults to `<id>.txt`.
//! * Plain text (`.txt`): a single document whose id is the file stem.
//! * Stored generation (`.json`): the output of `save_generation`.

use std::fs;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChapterMarkers, Corpus, CorpusBuilder, CorpusDoc, DocMeta, IngestConfig, IngestReport, PartialDate};
use crate::error::{Error, Result};

pub const GENERATION_SCHEMA: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlRecord {
    id: String,
    text: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    collection: String,
    #[serde(default)]
    date: PartialDate,
    #[serde(default)]
    chapter_pattern: Option<String>,
    #[serde(default)]
    chapter_ranges: Option<Vec<(usize, usize)>>,
}

fn markers(pattern: Option<String>, ranges: Option<Vec<(usize, usize)>>) -> Result<ChapterMarkers> {
    match (pattern.filter(|p| !p.is_empty()), ranges) {
        (Some(_), Some(_)) => Err(Error::Schema(
            "chapter_pattern and chapter_ranges are mutually exclusive".into(),
        )),
        (Some(p), None) => Ok(ChapterMarkers::Pattern(p)),
        (None, Some(r)) => Ok(ChapterMarkers::Ranges(r)),
        (None, None) => Ok(ChapterMarkers::None),
    }
}

/// Ingests every line of a JSONL stream. Blank lines are skipped.
pub fn ingest_jsonl(reader: impl BufRead, builder: &mut CorpusBuilder) -> Result<Vec<IngestReport>> {
    let mut reports = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: JsonlRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Schema(format!("line {}: {e}", lineno + 1)))?;
        let meta = DocMeta {
            doc_id: rec.id,
            title: rec.title,
            collection: rec.collection,
            date: rec.date,
            chapters: markers(rec.chapter_pattern, rec.chapter_ranges)?,
        };
        reports.push(builder.ingest(rec.text.as_bytes(), meta)?);
    }
    Ok(reports)
}

#[derive(Debug, Deserialize)]
struct SidecarRow {
    id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    collection: String,
    #[serde(default)]
    date: String,
    #[serde(default)]
    chapter_pattern: String,
    #[serde(default)]
    path: String,
}

/// Ingests the text files listed in a tab-separated sidecar.
pub fn ingest_sidecar(path: &Path, builder: &mut CorpusBuilder) -> Result<Vec<IngestReport>> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .flexible(true)
        .quoting(false)
        .from_path(path)?;
    let mut reports = Vec::new();
    for (i, row) in rdr.deserialize::<SidecarRow>().enumerate() {
        let row = row.map_err(|e| Error::Schema(format!("sidecar row {}: {e}", i + 2)))?;
        let file = if row.path.is_empty() {
            dir.join(format!("{}.txt", row.id))
        } else {
            dir.join(&row.path)
        };
        let raw = fs::read(&file)?;
        let meta = DocMeta {
            doc_id: row.id,
            title: row.title,
            collection: row.collection,
            date: row.date.parse()?,
            chapters: markers(Some(row.chapter_pattern), None)?,
        };
        reports.push(builder.ingest(&raw, meta)?);
    }
    Ok(reports)
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredDoc {
    doc_id: String,
    title: String,
    collection: String,
    date: PartialDate,
    chapters: Vec<(usize, usize)>,
    body: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct StoredGeneration {
    schema_version: u32,
    generation: String,
    config: IngestConfig,
    docs: Vec<StoredDoc>,
}

pub fn save_generation(corpus: &Corpus, w: impl Write) -> Result<()> {
    let stored = StoredGeneration {
        schema_version: GENERATION_SCHEMA,
        generation: corpus.generation().to_string(),
        config: *corpus.config(),
        docs: corpus
            .docs()
            .iter()
            .map(|d| StoredDoc {
                doc_id: d.doc_id.clone(),
                title: d.title.clone(),
                collection: d.collection.clone(),
                date: d.date,
                chapters: d.chapters.iter().map(|s| (s.start, s.end)).collect(),
                body: d.body(),
            })
            .collect(),
    };
    serde_json::to_writer(w, &stored)?;
    Ok(())
}

/// Loads a stored generation, re-segmenting and re-indexing. The recomputed
/// generation id must match the stored one.
pub fn load_generation(r: impl Read) -> Result<Corpus> {
    let stored: StoredGeneration = serde_json::from_reader(r)?;
    if stored.schema_version != GENERATION_SCHEMA {
        return Err(Error::Schema(format!(
            "unsupported generation schema {}",
            stored.schema_version
        )));
    }
    let mut b = CorpusBuilder::new(stored.config);
    for d in stored.docs {
        let meta = DocMeta {
            doc_id: d.doc_id,
            title: d.title,
            collection: d.collection,
            date: d.date,
            chapters: ChapterMarkers::Ranges(d.chapters),
        };
        b.ingest(d.body.as_bytes(), meta)?;
    }
    let corpus = b.build();
    if corpus.generation() != stored.generation {
        return Err(Error::Schema(format!(
            "generation mismatch: stored {} recomputed {}",
            stored.generation,
            corpus.generation()
        )));
    }
    Ok(corpus)
}

/// Loads any supported corpus input, dispatching on the file extension.
pub fn load_path(path: &Path, config: IngestConfig) -> Result<(Corpus, Vec<IngestReport>)> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let mut b = CorpusBuilder::new(config);
    let reports = match ext {
        "json" => {
            let corpus = load_generation(std::io::BufReader::new(fs::File::open(path)?))?;
            let reports = corpus.docs().iter().map(report_of).collect();
            return Ok((corpus, reports));
        }
        "jsonl" => ingest_jsonl(std::io::BufReader::new(fs::File::open(path)?), &mut b)?,
        "tsv" => ingest_sidecar(path, &mut b)?,
        _ => {
            let raw = fs::read(path)?;
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("doc")
                .to_string();
            vec![b.ingest(&raw, DocMeta::new(id))?]
        }
    };
    Ok((b.build(), reports))
}

fn report_of(d: &CorpusDoc) -> IngestReport {
    IngestReport {
        doc_id: d.doc_id.clone(),
        chars: d.len(),
        cjk_chars: d.cjk_chars(),
        sentences: d.sentences.len(),
        chapters: d.chapters.len(),
    }
}
