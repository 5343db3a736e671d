use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::kwic::{kwic_search, HitRef, KwicHit};
use crate::corpus::{Corpus, Scope};
use crate::error::{invalid, Error, Result};
use crate::temporal::KeywordSet;

pub const SESSION_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Seed,
    Suggested,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordEntry {
    pub surface: String,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordList {
    pub name: String,
    pub entries: Vec<KeywordEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkLabel {
    Relevant,
    Irrelevant,
    Answer,
}

impl MarkLabel {
    /// Relevant and answer marks both feed keyword suggestions.
    pub fn is_positive(self) -> bool {
        !matches!(self, MarkLabel::Irrelevant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedStatement {
    pub hit: HitRef,
    pub label: MarkLabel,
    #[serde(default)]
    pub note: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_surface: Option<String>,
}

/// Everything that changes a session. The log of these is the source of truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Action {
    CreateList {
        name: String,
    },
    AddKeyword {
        list: String,
        surface: String,
        provenance: Provenance,
    },
    /// Per-surface hit counts observed when the list was searched.
    Search {
        list: String,
        counts: Vec<(String, usize)>,
    },
    Mark(MarkedStatement),
    Unmark {
        hit: HitRef,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub seq: u64,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub schema_version: u32,
    pub session_id: String,
    pub generation: String,
    pub lists: Vec<KeywordList>,
    pub marks: Vec<MarkedStatement>,
    /// Surface → hits at its most recent search.
    pub last_hits: BTreeMap<String, usize>,
    pub log: Vec<LogEntry>,
}

pub fn validate_session_id(id: &str) -> Result<()> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("session id {id:?} must be 1-128 chars of [A-Za-z0-9_-]")))
    }
}

impl Session {
    pub fn new(session_id: impl Into<String>, corpus: &Corpus) -> Result<Self> {
        let session_id = session_id.into();
        validate_session_id(&session_id)?;
        Ok(Session {
            schema_version: SESSION_SCHEMA_VERSION,
            session_id,
            generation: corpus.generation().to_string(),
            lists: Vec::new(),
            marks: Vec::new(),
            last_hits: BTreeMap::new(),
            log: Vec::new(),
        })
    }

    /// Rebuilds a session by re-applying its log against `corpus`.
    pub fn replay(session_id: &str, corpus: &Corpus, log: &[LogEntry]) -> Result<Self> {
        let mut s = Session::new(session_id, corpus)?;
        for e in log {
            s.apply(corpus, e.action.clone())?;
        }
        Ok(s)
    }

    pub fn is_stale(&self, corpus: &Corpus) -> bool {
        self.generation != corpus.generation()
    }

    pub fn check_current(&self, corpus: &Corpus) -> Result<()> {
        if self.is_stale(corpus) {
            return Err(Error::StaleGeneration {
                session: self.generation.clone(),
                corpus: corpus.generation().to_string(),
            });
        }
        Ok(())
    }

    pub fn list(&self, name: &str) -> Option<&KeywordList> {
        self.lists.iter().find(|l| l.name == name)
    }

    pub fn keyword_set(&self, list: &str) -> Result<KeywordSet> {
        let l = self
            .list(list)
            .ok_or_else(|| invalid(format!("no keyword list {list}")))?;
        KeywordSet::new(l.name.clone(), l.entries.iter().map(|e| e.surface.clone()))
    }

    /// Every surface in any list.
    pub fn all_surfaces(&self) -> BTreeSet<&str> {
        self.lists
            .iter()
            .flat_map(|l| l.entries.iter().map(|e| e.surface.as_str()))
            .collect()
    }

    pub fn mark_for(&self, hit: &HitRef) -> Option<&MarkedStatement> {
        self.marks.iter().find(|m| &m.hit == hit)
    }

    /// Validates and applies one action, appending it to the log.
    pub fn apply(&mut self, corpus: &Corpus, action: Action) -> Result<()> {
        self.check_current(corpus)?;
        match &action {
            Action::CreateList { name } => {
                if name.trim().is_empty() {
                    return Err(invalid("list name must be non-empty"));
                }
                if self.list(name).is_some() {
                    return Err(invalid(format!("list {name} already exists")));
                }
                self.lists.push(KeywordList {
                    name: name.clone(),
                    entries: Vec::new(),
                });
            }
            Action::AddKeyword {
                list,
                surface,
                provenance,
            } => {
                if surface.is_empty() {
                    return Err(invalid("keyword surface must be non-empty"));
                }
                let l = self
                    .lists
                    .iter_mut()
                    .find(|l| &l.name == list)
                    .ok_or_else(|| invalid(format!("no keyword list {list}")))?;
                if let Some(e) = l.entries.iter().find(|e| &e.surface == surface) {
                    return Err(invalid(format!(
                        "{surface} is already in {list} ({:?}); provenance cannot change",
                        e.provenance
                    )));
                }
                l.entries.push(KeywordEntry {
                    surface: surface.clone(),
                    provenance: *provenance,
                });
            }
            Action::Search { list, counts } => {
                let kw = self.keyword_set(list)?;
                let expected = surface_counts(corpus, &kw);
                if &expected != counts {
                    return Err(invalid(format!(
                        "search counts for {list} do not match this corpus"
                    )));
                }
                for (s, n) in counts {
                    self.last_hits.insert(s.clone(), *n);
                }
            }
            Action::Mark(m) => {
                self.validate_mark(corpus, m)?;
                match self.marks.iter_mut().find(|x| x.hit == m.hit) {
                    Some(x) => *x = m.clone(),
                    None => self.marks.push(m.clone()),
                }
            }
            Action::Unmark { hit } => {
                let before = self.marks.len();
                self.marks.retain(|m| &m.hit != hit);
                if self.marks.len() == before {
                    return Err(invalid("no mark on that hit"));
                }
            }
        }
        let seq = self.log.last().map_or(0, |e| e.seq + 1);
        self.log.push(LogEntry { seq, action });
        Ok(())
    }

    fn validate_mark(&self, corpus: &Corpus, m: &MarkedStatement) -> Result<()> {
        if m.label == MarkLabel::Answer
            && m.answer_surface.as_deref().map_or(true, |s| s.trim().is_empty())
        {
            return Err(invalid("an answer mark needs a non-empty answer surface"));
        }
        let doc = corpus.doc(&m.hit.doc_id)?;
        if m.hit.start >= m.hit.end || m.hit.end > doc.len() {
            return Err(invalid("mark references a span outside the document"));
        }
        let text: String = doc.text[m.hit.start..m.hit.end].iter().collect();
        if !self.all_surfaces().contains(text.as_str()) {
            return Err(invalid(format!(
                "mark references {text:?}, which is not a hit of any session keyword"
            )));
        }
        Ok(())
    }

    pub fn create_list(&mut self, corpus: &Corpus, name: &str) -> Result<()> {
        self.apply(corpus, Action::CreateList { name: name.into() })
    }

    pub fn add_keyword(&mut self, corpus: &Corpus, list: &str, surface: &str, provenance: Provenance) -> Result<()> {
        self.apply(
            corpus,
            Action::AddKeyword {
                list: list.into(),
                surface: surface.into(),
                provenance,
            },
        )
    }

    /// Runs a KWIC search for a list and records it.
    pub fn search(&mut self, corpus: &Corpus, list: &str, width: usize) -> Result<Vec<KwicHit>> {
        self.check_current(corpus)?;
        let kw = self.keyword_set(list)?;
        let hits = kwic_search(corpus, Scope::Corpus, &kw, width)?;
        let counts = surface_counts(corpus, &kw);
        self.apply(
            corpus,
            Action::Search {
                list: list.into(),
                counts,
            },
        )?;
        Ok(hits)
    }

    pub fn mark(&mut self, corpus: &Corpus, mark: MarkedStatement) -> Result<()> {
        self.apply(corpus, Action::Mark(mark))
    }

    pub fn unmark(&mut self, corpus: &Corpus, hit: HitRef) -> Result<()> {
        self.apply(corpus, Action::Unmark { hit })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value = serde_json::from_str(text)?;
        match v.get("schema_version").and_then(|x| x.as_u64()) {
            Some(n) if n == SESSION_SCHEMA_VERSION as u64 => {}
            Some(n) => return Err(Error::Schema(format!("unsupported session schema version {n}"))),
            None => return Err(Error::Schema("session file lacks schema_version".into())),
        }
        let s: Session = serde_json::from_value(v)?;
        validate_session_id(&s.session_id)?;
        Ok(s)
    }
}

fn surface_counts(corpus: &Corpus, kw: &KeywordSet) -> Vec<(String, usize)> {
    kw.surfaces()
        .iter()
        .map(|s| {
            let q: Vec<char> = s.chars().collect();
            (s.clone(), corpus.index().count(&q))
        })
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, DocMeta};

    pub(crate) fn tiny() -> Corpus {
        let mut b = CorpusBuilder::default();
        b.ingest_str("妖怪要吃唐僧肉。把唐僧蒸了吃。行者打妖怪。", DocMeta::new("a"))
            .unwrap();
        b.ingest_str("唐僧騎馬。八戒吃飯。", DocMeta::new("b")).unwrap();
        b.build()
    }

    pub(crate) fn hit(doc: &str, start: usize, end: usize) -> HitRef {
        HitRef {
            doc_id: doc.into(),
            start,
            end,
        }
    }

    #[test]
    fn provenance_is_immutable() {
        let c = tiny();
        let mut s = Session::new("s1", &c).unwrap();
        s.create_list(&c, "actions").unwrap();
        s.add_keyword(&c, "actions", "吃", Provenance::Seed).unwrap();
        assert!(s.add_keyword(&c, "actions", "吃", Provenance::Manual).is_err());
        assert_eq!(s.list("actions").unwrap().entries[0].provenance, Provenance::Seed);
    }

    #[test]
    fn marks_must_reference_hits() {
        let c = tiny();
        let mut s = Session::new("s1", &c).unwrap();
        s.create_list(&c, "k").unwrap();
        s.add_keyword(&c, "k", "吃", Provenance::Seed).unwrap();
        let hits = s.search(&c, "k", 30).unwrap();
        assert_eq!(hits.len(), 3);
        let good = MarkedStatement {
            hit: hits[1].hit_ref(),
            label: MarkLabel::Relevant,
            note: String::new(),
            answer_surface: None,
        };
        s.mark(&c, good.clone()).unwrap();
        let mut bad = good.clone();
        bad.hit = hit("a", 0, 2);
        assert!(s.mark(&c, bad).is_err());
        let mut answer = good.clone();
        answer.label = MarkLabel::Answer;
        assert!(s.mark(&c, answer.clone()).is_err());
        answer.answer_surface = Some("唐僧".into());
        s.mark(&c, answer).unwrap();
        assert_eq!(s.marks.len(), 1);
        assert_eq!(s.marks[0].label, MarkLabel::Answer);
    }

    #[test]
    fn replay_reproduces_state() {
        let c = tiny();
        let mut s = Session::new("s1", &c).unwrap();
        s.create_list(&c, "k").unwrap();
        s.add_keyword(&c, "k", "吃", Provenance::Seed).unwrap();
        let hits = s.search(&c, "k", 5).unwrap();
        s.mark(
            &c,
            MarkedStatement {
                hit: hits[0].hit_ref(),
                label: MarkLabel::Irrelevant,
                note: "noise".into(),
                answer_surface: None,
            },
        )
        .unwrap();
        s.add_keyword(&c, "k", "蒸", Provenance::Suggested).unwrap();
        s.unmark(&c, hits[0].hit_ref()).unwrap();
        let r = Session::replay("s1", &c, &s.log).unwrap();
        assert_eq!(r, s);
        let back = Session::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn stale_generation_is_read_only() {
        let c = tiny();
        let mut s = Session::new("s1", &c).unwrap();
        s.create_list(&c, "k").unwrap();
        let mut b = CorpusBuilder::extend_from(&c);
        b.ingest_str("新文。", DocMeta::new("c")).unwrap();
        let c2 = b.build();
        assert!(matches!(s.create_list(&c2, "x"), Err(Error::StaleGeneration { .. })));
        assert!(s.is_stale(&c2));
    }

    #[test]
    fn schema_checked() {
        assert!(matches!(Session::from_json(r#"{"session_id":"x"}"#), Err(Error::Schema(_))));
        assert!(matches!(
            Session::from_json(r#"{"schema_version":99,"session_id":"x"}"#),
            Err(Error::Schema(_))
        ));
        assert!(validate_session_id("../etc").is_err());
    }
}
