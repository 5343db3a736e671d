use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::Serialize;

use super::bucket::chapter_label;
use super::keyword::KeywordSet;
use crate::corpus::Corpus;
use crate::error::{invalid, Result};

/// Entity × chapter occurrence counts for one chaptered document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresenceMatrix {
    pub doc_id: String,
    pub entities: Vec<String>,
    /// `d001`, `d002`, ...
    pub columns: Vec<String>,
    pub counts: Vec<Vec<usize>>,
}

impl PresenceMatrix {
    pub fn chapters(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, entity: &str) -> Option<&[usize]> {
        self.entities
            .iter()
            .position(|e| e == entity)
            .map(|i| self.counts[i].as_slice())
    }

    pub fn present(&self, row: usize, chapter: usize) -> bool {
        self.counts[row][chapter] > 0
    }

    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        write!(w, "entity")?;
        for c in &self.columns {
            write!(w, "\t{c}")?;
        }
        writeln!(w)?;
        for (e, row) in self.entities.iter().zip(&self.counts) {
            write!(w, "{e}")?;
            for n in row {
                write!(w, "\t{n}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Occurrences wholly inside a chapter are counted for that chapter; text
/// before the first chapter marker belongs to no column.
pub fn presence_matrix(corpus: &Corpus, doc_id: &str, entities: &[KeywordSet]) -> Result<PresenceMatrix> {
    let d = corpus.doc_index(doc_id)?;
    let doc = &corpus.docs()[d];
    if doc.chapters.is_empty() {
        return Err(invalid(format!("document {doc_id} has no chapter segmentation")));
    }
    let mut counts = vec![vec![0; doc.chapters.len()]; entities.len()];
    for (row, kw) in counts.iter_mut().zip(entities) {
        for surface in kw.surface_chars() {
            for pos in corpus.locate_in(d, &surface) {
                if let Some(c) = doc.chapter_of(pos) {
                    if pos + surface.len() <= doc.chapters[c].end {
                        row[c] += 1;
                    }
                }
            }
        }
    }
    Ok(PresenceMatrix {
        doc_id: doc_id.to_string(),
        entities: entities.iter().map(|k| k.label().to_string()).collect(),
        columns: (1..=doc.chapters.len()).map(chapter_label).collect(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PowerRank {
    pub monster: String,
    /// Highest rank among co-present masters; 0 when none.
    pub proxy: u32,
    pub co_present_masters: Vec<String>,
    /// Chapters (1-based) in which the proxy-setting master appears with the monster.
    pub supporting_chapters: Vec<usize>,
}

/// Ranks monsters by the most powerful master seen in any of their chapters.
/// Ties go to more co-present masters, then to input row order.
pub fn power_proxy(
    monsters: &PresenceMatrix,
    masters: &PresenceMatrix,
    master_ranks: &HashMap<String, u32>,
) -> Result<Vec<PowerRank>> {
    if monsters.columns != masters.columns {
        return Err(invalid("monster and master matrices use different chapter axes"));
    }
    for (j, m) in masters.entities.iter().enumerate() {
        match master_ranks.get(m) {
            Some(0) => return Err(invalid(format!("rank for {m} must be positive"))),
            Some(_) => {}
            None if masters.counts[j].iter().any(|&n| n > 0) => {
                return Err(invalid(format!("no rank given for master {m}")))
            }
            None => {}
        }
    }

    let mut ranked: Vec<(usize, PowerRank)> = Vec::with_capacity(monsters.entities.len());
    for (i, name) in monsters.entities.iter().enumerate() {
        let mut proxy = 0;
        let mut co = BTreeSet::new();
        let mut support = Vec::new();
        for c in 0..monsters.chapters() {
            if !monsters.present(i, c) {
                continue;
            }
            for (j, m) in masters.entities.iter().enumerate() {
                if !masters.present(j, c) {
                    continue;
                }
                co.insert(j);
                let r = master_ranks[m];
                if r > proxy {
                    proxy = r;
                    support.clear();
                }
                if r == proxy && support.last() != Some(&(c + 1)) {
                    support.push(c + 1);
                }
            }
        }
        ranked.push((
            i,
            PowerRank {
                monster: name.clone(),
                proxy,
                co_present_masters: co.into_iter().map(|j| masters.entities[j].clone()).collect(),
                supporting_chapters: support,
            },
        ));
    }
    ranked.sort_by(|(ia, a), (ib, b)| {
        b.proxy
            .cmp(&a.proxy)
            .then(b.co_present_masters.len().cmp(&a.co_present_masters.len()))
            .then(ia.cmp(ib))
    });
    Ok(ranked.into_iter().map(|(_, r)| r).collect())
}
