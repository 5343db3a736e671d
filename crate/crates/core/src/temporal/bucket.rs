use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::CorpusDoc;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Bucketing {
    Year,
    Month,
    Chapter,
    Periods { periods: Vec<(i32, i32)> },
}

impl Bucketing {
    pub fn periods(periods: Vec<(i32, i32)>) -> Result<Self> {
        validate_periods(&periods)?;
        Ok(Bucketing::Periods { periods })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Bucketing::Periods { periods } => validate_periods(periods),
            _ => Ok(()),
        }
    }

    /// Parses `year`, `month`, `chapter` or `1898-1900,1901-1914`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "year" => Ok(Bucketing::Year),
            "month" => Ok(Bucketing::Month),
            "chapter" => Ok(Bucketing::Chapter),
            other => Bucketing::periods(parse_periods(other)?),
        }
    }
}

pub fn parse_periods(spec: &str) -> Result<Vec<(i32, i32)>> {
    spec.split(',')
        .map(|p| {
            let (a, b) = p
                .trim()
                .split_once('-')
                .ok_or_else(|| invalid(format!("bad period {p}")))?;
            Ok((
                a.trim().parse().map_err(|_| invalid(format!("bad period {p}")))?,
                b.trim().parse().map_err(|_| invalid(format!("bad period {p}")))?,
            ))
        })
        .collect()
}

pub fn validate_periods(periods: &[(i32, i32)]) -> Result<()> {
    if periods.is_empty() {
        return Err(invalid("at least one period is required"));
    }
    for (i, &(s, e)) in periods.iter().enumerate() {
        if s > e {
            return Err(invalid(format!("period {s}-{e} is reversed")));
        }
        if i > 0 && s <= periods[i - 1].1 {
            return Err(invalid("periods must be ordered and non-overlapping"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    Year(i32),
    Month(i32, u8),
    /// 1-based chapter number.
    Chapter(usize),
    Period(i32, i32),
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bucket::Year(y) => write!(f, "{y}"),
            Bucket::Month(y, m) => write!(f, "{y}-{m:02}"),
            Bucket::Chapter(c) => write!(f, "{}", chapter_label(*c)),
            Bucket::Period(s, e) => write!(f, "{s}-{e}"),
        }
    }
}

impl Serialize for Bucket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `d001` for chapter 1.
pub fn chapter_label(chapter: usize) -> String {
    format!("d{chapter:03}")
}

/// Assigns documents (and positions within them) to buckets.
pub(crate) struct Assigner<'a> {
    bucketing: &'a Bucketing,
    chapterless_single: bool,
}

impl<'a> Assigner<'a> {
    /// Chapter bucketing across several documents requires chapter structure
    /// in each; a single chapterless document is treated as one chapter.
    pub fn new(bucketing: &'a Bucketing, docs: &[&CorpusDoc]) -> Result<Self> {
        bucketing.validate()?;
        let mut chapterless_single = false;
        if *bucketing == Bucketing::Chapter {
            let chapterless: Vec<&str> = docs
                .iter()
                .filter(|d| d.chapters.is_empty())
                .map(|d| d.doc_id.as_str())
                .collect();
            if !chapterless.is_empty() {
                if docs.len() > 1 {
                    return Err(invalid(format!(
                        "chapter bucketing over several documents needs chapter structure; missing in {}",
                        chapterless.join(", ")
                    )));
                }
                chapterless_single = true;
            }
        }
        Ok(Assigner {
            bucketing,
            chapterless_single,
        })
    }

    /// Whether the document can be bucketed at all (carries the needed date).
    pub fn admits(&self, doc: &CorpusDoc) -> bool {
        self.doc_bucket(doc).is_some() || *self.bucketing == Bucketing::Chapter
    }

    fn doc_bucket(&self, doc: &CorpusDoc) -> Option<Bucket> {
        match self.bucketing {
            Bucketing::Year => doc.date.get_year().map(Bucket::Year),
            Bucketing::Month => match (doc.date.get_year(), doc.date.get_month()) {
                (Some(y), Some(m)) => Some(Bucket::Month(y, m)),
                _ => None,
            },
            Bucketing::Periods { periods } => {
                let y = doc.date.get_year()?;
                periods
                    .iter()
                    .find(|&&(s, e)| s <= y && y <= e)
                    .map(|&(s, e)| Bucket::Period(s, e))
            }
            Bucketing::Chapter => None,
        }
    }

    /// Bucket for a match `[pos, pos + len)`.
    pub fn bucket(&self, doc: &CorpusDoc, pos: usize, len: usize) -> Option<Bucket> {
        match self.bucketing {
            Bucketing::Chapter => {
                if self.chapterless_single && doc.chapters.is_empty() {
                    return Some(Bucket::Chapter(1));
                }
                let c = doc.chapter_of(pos)?;
                (pos + len <= doc.chapters[c].end).then_some(Bucket::Chapter(c + 1))
            }
            _ => self.doc_bucket(doc),
        }
    }

    /// Every bucket the given documents can contribute to.
    pub fn universe(&self, docs: &[&CorpusDoc]) -> Vec<Bucket> {
        let mut out: Vec<Bucket> = match self.bucketing {
            Bucketing::Chapter => {
                let max = docs
                    .iter()
                    .map(|d| if d.chapters.is_empty() && self.chapterless_single { 1 } else { d.chapters.len() })
                    .max()
                    .unwrap_or(0);
                (1..=max).map(Bucket::Chapter).collect()
            }
            Bucketing::Periods { periods } => {
                periods.iter().map(|&(s, e)| Bucket::Period(s, e)).collect()
            }
            _ => docs.iter().filter_map(|d| self.doc_bucket(d)).collect(),
        };
        out.sort();
        out.dedup();
        out
    }
}
