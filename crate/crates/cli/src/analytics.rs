//! Query plumbing shared by the batch jobs and the service, so both return
//! the same numbers for the same question.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use wenxian_core::concordance::KwicHit;
use wenxian_core::corpus::{Corpus, Scope};
use wenxian_core::temporal::{normalized_event_rate, Bucketing, KeywordSet};
use wenxian_core::{Error, Result};

/// `a|b;label=c|d` → two keyword sets.
pub fn parse_sets(spec: &str) -> Result<Vec<KeywordSet>> {
    let sets: Vec<KeywordSet> = spec
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(KeywordSet::parse)
        .collect::<Result<_>>()?;
    if sets.is_empty() {
        return Err(Error::InvalidArgument("no keyword sets given".into()));
    }
    Ok(sets)
}

/// `label=a|b@9` → the set and its rank.
pub fn parse_master(spec: &str) -> Result<(KeywordSet, u32)> {
    let (set, rank) = spec
        .rsplit_once('@')
        .ok_or_else(|| Error::InvalidArgument(format!("master {spec} needs @rank")))?;
    let rank = rank
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad rank in {spec}")))?;
    Ok((KeywordSet::parse(set)?, rank))
}

pub fn masters(specs: &[String]) -> Result<(Vec<KeywordSet>, HashMap<String, u32>)> {
    let mut sets = Vec::new();
    let mut ranks = HashMap::new();
    for s in specs {
        let (k, r) = parse_master(s)?;
        ranks.insert(k.label().to_string(), r);
        sets.push(k);
    }
    Ok((sets, ranks))
}

pub fn scope(docs: &[String]) -> Scope<'_> {
    if docs.is_empty() {
        Scope::Corpus
    } else {
        Scope::Docs(docs)
    }
}

/// `doc_id start end left keyword right`, one hit per line.
pub fn write_kwic_tsv(hits: &[KwicHit], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "doc_id\tstart\tend\tleft\tkeyword\tright")?;
    for h in hits {
        let (l, r) = (cell(&h.left), cell(&h.right));
        writeln!(w, "{}\t{}\t{}\t{l}\t{}\t{r}", h.doc_id, h.start, h.end, h.surface)?;
    }
    Ok(())
}

/// Context may span line breaks; keep one hit per row.
fn cell(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\t', "\\t").replace('\n', "\\n").replace('\r', "\\r")
}

pub const DRC_SMILE_CHARACTERS: [&str; 3] = ["寶玉", "黛玉", "寶釵"];
pub const DRC_SMILE_EVENT: &str = "笑道";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartRow {
    pub chapter: String,
    pub character: String,
    /// Times the character "笑道" in the chapter.
    pub raw: usize,
    /// Times the character's name appears in the chapter.
    pub appearances: usize,
    /// `raw / appearances`; absent when the character does not appear.
    pub normalized: Option<f64>,
}

/// Per-chapter smile counts and appearance-normalized rates for the three
/// protagonists, subject immediately followed by the event.
pub fn drc_smiles(corpus: &Corpus, doc: Option<&str>) -> Result<Vec<ChartRow>> {
    let doc_id = match doc {
        Some(d) => d.to_string(),
        None => match corpus.docs() {
            [only] => only.doc_id.clone(),
            _ => return Err(Error::InvalidArgument("corpus has several documents; pass a doc id".into())),
        },
    };
    let d = corpus.doc(&doc_id)?;
    if d.chapters.is_empty() {
        return Err(Error::InvalidArgument(format!("document {doc_id} has no chapter segmentation")));
    }
    let ids = [doc_id];
    let event = KeywordSet::single(DRC_SMILE_EVENT)?;
    let series = DRC_SMILE_CHARACTERS
        .iter()
        .map(|c| normalized_event_rate(corpus, Scope::Docs(&ids), &KeywordSet::single(*c)?, &event, 0, &Bucketing::Chapter))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for i in 0..series[0].points.len() {
        for (c, s) in DRC_SMILE_CHARACTERS.iter().zip(&series) {
            let p = &s.points[i];
            rows.push(ChartRow {
                chapter: p.bucket.to_string(),
                character: c.to_string(),
                raw: p.numerator,
                appearances: p.denominator,
                normalized: p.rate,
            });
        }
    }
    Ok(rows)
}

pub fn write_chart_tsv(rows: &[ChartRow], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "chapter\tcharacter\traw\tappearances\tnormalized")?;
    for r in rows {
        let n = r.normalized.map(|x| format!("{x:.6}")).unwrap_or_default();
        writeln!(w, "{}\t{}\t{}\t{}\t{}", r.chapter, r.character, r.raw, r.appearances, n)?;
    }
    Ok(())
}
