use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;

use super::session::{MarkLabel, Session};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::temporal::chapter_label;

/// Gold answers: one surface per line, UTF-8. Blank lines and `#` comments
/// are skipped.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct GoldSet {
    pub surfaces: BTreeSet<String>,
}

impl GoldSet {
    pub fn parse(text: &str) -> Result<Self> {
        let mut surfaces = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let s = line.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            if s.chars().any(char::is_whitespace) {
                return Err(Error::Schema(format!("gold line {}: one surface per line", i + 1)));
            }
            if !surfaces.insert(s.to_string()) {
                return Err(Error::Schema(format!("gold line {}: duplicate surface {s}", i + 1)));
            }
        }
        Ok(GoldSet { surfaces })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let text = String::from_utf8(bytes).map_err(|e| Error::InvalidEncoding {
            offset: e.utf8_error().valid_up_to(),
        })?;
        GoldSet::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionReport {
    pub session_id: String,
    pub answers: Vec<String>,
    pub relevant_marks: usize,
    pub irrelevant_marks: usize,
    pub answer_marks: usize,
    pub gold_size: Option<usize>,
    pub correct: Option<usize>,
    /// `None` with no answers (or no gold).
    pub precision: Option<f64>,
    /// `None` with an empty (or no) gold set.
    pub recall: Option<f64>,
    pub missed: Vec<String>,
    pub spurious: Vec<String>,
}

pub fn session_report(session: &Session, gold: Option<&GoldSet>) -> SessionReport {
    let answers: BTreeSet<String> = session
        .marks
        .iter()
        .filter(|m| m.label == MarkLabel::Answer)
        .filter_map(|m| m.answer_surface.as_ref())
        .map(|s| s.trim().to_string())
        .collect();
    let count = |l: MarkLabel| session.marks.iter().filter(|m| m.label == l).count();
    let mut report = SessionReport {
        session_id: session.session_id.clone(),
        answers: answers.iter().cloned().collect(),
        relevant_marks: count(MarkLabel::Relevant),
        irrelevant_marks: count(MarkLabel::Irrelevant),
        answer_marks: count(MarkLabel::Answer),
        gold_size: None,
        correct: None,
        precision: None,
        recall: None,
        missed: Vec::new(),
        spurious: Vec::new(),
    };
    if let Some(g) = gold {
        let correct = answers.intersection(&g.surfaces).count();
        report.gold_size = Some(g.len());
        report.correct = Some(correct);
        report.precision = (!answers.is_empty()).then(|| correct as f64 / answers.len() as f64);
        report.recall = (!g.is_empty()).then(|| correct as f64 / g.len() as f64);
        report.missed = g.surfaces.difference(&answers).cloned().collect();
        report.spurious = answers.difference(&g.surfaces).cloned().collect();
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnmarkedChapter {
    pub doc_id: String,
    pub chapter: String,
}

/// Places a search may have gone blind: keywords whose latest search found
/// nothing, keywords never searched, and chapters containing session hits
/// that carry no mark.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HealthPanel {
    pub zero_hit_keywords: Vec<String>,
    pub unsearched_keywords: Vec<String>,
    pub unmarked_chapters: Vec<UnmarkedChapter>,
}

pub fn health_panel(session: &Session, corpus: &Corpus) -> Result<HealthPanel> {
    session.check_current(corpus)?;
    let surfaces = session.all_surfaces();
    let mut zero = Vec::new();
    let mut unsearched = Vec::new();
    for s in &surfaces {
        match session.last_hits.get(*s) {
            Some(0) => zero.push(s.to_string()),
            Some(_) => {}
            None => unsearched.push(s.to_string()),
        }
    }
    let mut unmarked = Vec::new();
    for (d, doc) in corpus.docs().iter().enumerate() {
        if doc.chapters.is_empty() {
            continue;
        }
        let mut has_hit = vec![false; doc.chapters.len()];
        for s in &surfaces {
            let q: Vec<char> = s.chars().collect();
            for p in corpus.locate_in(d, &q) {
                if let Some(c) = doc.chapter_of(p) {
                    has_hit[c] = true;
                }
            }
        }
        let mut marked = vec![false; doc.chapters.len()];
        for m in session.marks.iter().filter(|m| m.hit.doc_id == doc.doc_id) {
            if let Some(c) = doc.chapter_of(m.hit.start) {
                marked[c] = true;
            }
        }
        for c in 0..doc.chapters.len() {
            if has_hit[c] && !marked[c] {
                unmarked.push(UnmarkedChapter {
                    doc_id: doc.doc_id.clone(),
                    chapter: chapter_label(c + 1),
                });
            }
        }
    }
    Ok(HealthPanel {
        zero_hit_keywords: zero,
        unsearched_keywords: unsearched,
        unmarked_chapters: unmarked,
    })
}
