use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::bucket::{validate_periods, Assigner, Bucketing};
use super::keyword::KeywordSet;
use super::series::{ScopedDocs, TimeSeries};
use crate::corpus::{Corpus, CorpusDoc, Scope};
use crate::error::{invalid, Result};
use crate::ngram::{count_substrings, prune_subsumed, ExtractConfig};

/// Co-occurrence window. `Chars(n)` tiles each document into consecutive
/// non-overlapping blocks of `n` characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "size", rename_all = "lowercase")]
pub enum Window {
    Sentence,
    Chars(usize),
}

impl Window {
    /// `sentence` or `chars:N`.
    pub fn parse(spec: &str) -> Result<Self> {
        if spec == "sentence" {
            return Ok(Window::Sentence);
        }
        let n = spec
            .strip_prefix("chars:")
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| invalid(format!("bad window {spec}")))?;
        Window::Chars(n).validated()
    }

    fn validated(self) -> Result<Self> {
        match self {
            Window::Chars(0) => Err(invalid("character window must be at least 1")),
            w => Ok(w),
        }
    }

    /// Window id and start offset of a match fully inside one window.
    fn locate(&self, doc: &CorpusDoc, pos: usize, len: usize) -> Option<(usize, usize)> {
        match *self {
            Window::Sentence => {
                let s = doc.sentence_of(pos)?;
                let span = doc.sentences[s];
                (pos + len <= span.end).then_some((s, span.start))
            }
            Window::Chars(n) => {
                let k = pos / n;
                ((pos + len - 1) / n == k).then_some((k, k * n))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollocationSeries {
    pub members: Vec<String>,
    pub window: Window,
    pub series: TimeSeries,
    /// Pairs of surfaces from different members where one contains the other.
    pub overlapping_surfaces: Vec<(String, String)>,
}

fn check_members(members: &[KeywordSet]) -> Result<Vec<(String, String)>> {
    if !(2..=3).contains(&members.len()) {
        return Err(invalid("collocations take two or three keyword sets"));
    }
    let mut flags = Vec::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            for a in members[i].surfaces() {
                for b in members[j].surfaces() {
                    if a == b {
                        return Err(invalid(format!(
                            "members {} and {} share the surface {a}",
                            members[i].label(),
                            members[j].label()
                        )));
                    }
                    if a.contains(b.as_str()) || b.contains(a.as_str()) {
                        flags.push((a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    Ok(flags)
}

/// Windows (doc index, window id) -> window start, where a member occurs.
fn member_windows(
    corpus: &Corpus,
    docs: &ScopedDocs<'_>,
    kw: &KeywordSet,
    window: Window,
) -> HashMap<(usize, usize), usize> {
    let mut out = HashMap::new();
    for surface in kw.surface_chars() {
        for (d, pos) in corpus.index().locate(&surface) {
            if !docs.in_scope[d] {
                continue;
            }
            if let Some((w, start)) = window.locate(&corpus.docs()[d], pos, surface.len()) {
                out.insert((d, w), start);
            }
        }
    }
    out
}

/// Counts windows in which every member occurs at least once.
pub fn collocation_timeseries(
    corpus: &Corpus,
    scope: Scope<'_>,
    members: &[KeywordSet],
    window: Window,
    bucketing: &Bucketing,
) -> Result<CollocationSeries> {
    let window = window.validated()?;
    let overlapping_surfaces = check_members(members)?;
    let docs = ScopedDocs::new(corpus, scope)?;
    let assigner = Assigner::new(bucketing, &docs.refs)?;

    let mut sets: Vec<HashMap<(usize, usize), usize>> = members
        .iter()
        .map(|m| member_windows(corpus, &docs, m, window))
        .collect();
    sets.sort_by_key(|s| s.len());
    let (first, rest) = sets.split_first().expect("two or more members");
    let mut points = BTreeMap::new();
    for (&(d, w), &start) in first {
        if rest.iter().all(|s| s.contains_key(&(d, w))) {
            if let Some(b) = assigner.bucket(&corpus.docs()[d], start, 1) {
                *points.entry(b).or_insert(0) += 1;
            }
        }
    }
    let total = points.values().sum();
    let labels: Vec<String> = members.iter().map(|m| m.label().to_string()).collect();
    Ok(CollocationSeries {
        series: TimeSeries {
            label: labels.join("+"),
            bucketing: bucketing.clone(),
            points,
            total,
            excluded_docs: docs.excluded(&assigner),
        },
        members: labels,
        window,
        overlapping_surfaces,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollocationRow {
    pub collocate: String,
    pub counts: Vec<usize>,
}

impl CollocationRow {
    pub fn peak(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Per-period sentence co-occurrence counts of frequent collocates of an anchor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollocationTable {
    pub anchor: String,
    pub periods: Vec<(i32, i32)>,
    pub window: Window,
    pub arity: usize,
    /// Sentences containing the anchor, per period.
    pub anchor_sentences: Vec<usize>,
    pub rows: Vec<CollocationRow>,
}

impl CollocationTable {
    pub fn row(&self, collocate: &str) -> Option<&CollocationRow> {
        self.rows.iter().find(|r| r.collocate == collocate)
    }

    pub fn write_tsv(&self, mut w: impl Write) -> std::io::Result<()> {
        write!(w, "collocate")?;
        for (s, e) in &self.periods {
            write!(w, "\t{s}-{e}")?;
        }
        writeln!(w)?;
        for r in &self.rows {
            write!(w, "{}", r.collocate)?;
            for c in &r.counts {
                write!(w, "\t{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RankBy {
    /// Highest count in any period.
    #[default]
    Peak,
    /// Count in the given period (0-based).
    Period(usize),
}

/// Collocates are pseudo-words extracted from the anchor's sentences (pruned
/// of subsumed strings, anchor surfaces and their substrings). Each cell is
/// the number of anchor sentences in that period that also contain the
/// collocate.
pub fn period_collocation_table(
    corpus: &Corpus,
    anchor: &KeywordSet,
    periods: &[(i32, i32)],
    top_k: usize,
    extract: &ExtractConfig,
    rank_by: RankBy,
) -> Result<CollocationTable> {
    validate_periods(periods)?;
    extract.validate()?;
    if top_k == 0 {
        return Err(invalid("top_k must be at least 1"));
    }
    if let RankBy::Period(p) = rank_by {
        if p >= periods.len() {
            return Err(invalid(format!("rank period {p} out of range")));
        }
    }
    let period_of = |doc: &CorpusDoc| {
        let y = doc.date.get_year()?;
        periods.iter().position(|&(s, e)| s <= y && y <= e)
    };

    // anchor sentences -> period
    let mut anchor_sents: HashMap<(usize, usize), usize> = HashMap::new();
    for surface in anchor.surface_chars() {
        for (d, pos) in corpus.index().locate(&surface) {
            let doc = &corpus.docs()[d];
            let Some(p) = period_of(doc) else { continue };
            if let Some((s, _)) = Window::Sentence.locate(doc, pos, surface.len()) {
                anchor_sents.insert((d, s), p);
            }
        }
    }
    let mut anchor_sentences = vec![0; periods.len()];
    for &p in anchor_sents.values() {
        anchor_sentences[p] += 1;
    }

    let mut keys: Vec<&(usize, usize)> = anchor_sents.keys().collect();
    keys.sort();
    let pieces = keys.iter().map(|&&(d, s)| {
        let span = corpus.docs()[d].sentences[s];
        (d, &corpus.docs()[d].text[span.start..span.end])
    });
    let candidates = prune_subsumed(&count_substrings(
        pieces,
        extract.min_len,
        extract.max_len,
        extract.min_freq,
    ));
    let anchor_surfaces: HashSet<&str> = anchor.surfaces().iter().map(String::as_str).collect();

    let mut rows = Vec::new();
    for cand in candidates {
        if anchor_surfaces
            .iter()
            .any(|a| a.contains(cand.surface.as_str()))
        {
            continue;
        }
        let chars: Vec<char> = cand.surface.chars().collect();
        let mut seen = HashSet::new();
        let mut counts = vec![0; periods.len()];
        for (d, pos) in corpus.index().locate(&chars) {
            let Some((s, _)) = Window::Sentence.locate(&corpus.docs()[d], pos, chars.len()) else {
                continue;
            };
            if let Some(&p) = anchor_sents.get(&(d, s)) {
                if seen.insert((d, s)) {
                    counts[p] += 1;
                }
            }
        }
        rows.push(CollocationRow {
            collocate: cand.surface,
            counts,
        });
    }
    let key = |r: &CollocationRow| match rank_by {
        RankBy::Peak => r.peak(),
        RankBy::Period(p) => r.counts[p],
    };
    rows.sort_by(|a, b| key(b).cmp(&key(a)).then_with(|| a.collocate.cmp(&b.collocate)));
    rows.truncate(top_k);
    Ok(CollocationTable {
        anchor: anchor.label().to_string(),
        periods: periods.to_vec(),
        window: Window::Sentence,
        arity: 2,
        anchor_sentences,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, DocMeta, PartialDate};

    fn dated(texts: &[(i32, &str)]) -> Corpus {
        let mut b = CorpusBuilder::default();
        for (i, (y, t)) in texts.iter().enumerate() {
            b.ingest_str(t, DocMeta::new(format!("d{i}")).with_date(PartialDate::year(*y)))
                .unwrap();
        }
        b.build()
    }

    fn kw(s: &str) -> KeywordSet {
        KeywordSet::single(s).unwrap()
    }

    #[test]
    fn single_sentence_pair() {
        let c = dated(&[(1900, "平等與強權")]);
        let s = collocation_timeseries(&c, Scope::Corpus, &[kw("平等"), kw("強權")], Window::Sentence, &Bucketing::Year).unwrap();
        assert_eq!(s.series.total, 1);
    }

    #[test]
    fn at_most_once_per_sentence() {
        let c = dated(&[(1900, "平等強權平等強權。平等。強權")]);
        let s = collocation_timeseries(&c, Scope::Corpus, &[kw("平等"), kw("強權")], Window::Sentence, &Bucketing::Year).unwrap();
        assert_eq!(s.series.total, 1);
    }

    #[test]
    fn char_windows() {
        let c = dated(&[(1900, "平等ＡＡ強權平等")]);
        let members = [kw("平等"), kw("強權")];
        let w4 = collocation_timeseries(&c, Scope::Corpus, &members, Window::Chars(4), &Bucketing::Year).unwrap();
        // windows: [平等ＡＡ] [強權平等]
        assert_eq!(w4.series.total, 1);
        let w3 = collocation_timeseries(&c, Scope::Corpus, &members, Window::Chars(3), &Bucketing::Year).unwrap();
        assert_eq!(w3.series.total, 0);
        assert!(Window::parse("chars:0").is_err());
        assert_eq!(Window::parse("chars:5").unwrap(), Window::Chars(5));
    }

    #[test]
    fn member_validation() {
        let c = dated(&[(1900, "平等")]);
        assert!(collocation_timeseries(&c, Scope::Corpus, &[kw("平等")], Window::Sentence, &Bucketing::Year).is_err());
        let dup = KeywordSet::new("x", ["平等", "強權"]).unwrap();
        assert!(collocation_timeseries(&c, Scope::Corpus, &[dup, kw("平等")], Window::Sentence, &Bucketing::Year).is_err());
        let s = collocation_timeseries(&c, Scope::Corpus, &[kw("平等之"), kw("平等")], Window::Sentence, &Bucketing::Year).unwrap();
        assert_eq!(s.overlapping_surfaces, vec![("平等之".to_string(), "平等".to_string())]);
    }

    #[test]
    fn planted_period_table() {
        let c = dated(&[
            (1899, "西人言平等。西人亦平等。西人平等。強權平等。"),
            (1905, "權力平等。權力與平等。西人平等。"),
            (1920, "權力平等。無關。"),
        ]);
        let periods = [(1898, 1900), (1901, 1914), (1915, 1924)];
        let t = period_collocation_table(&c, &kw("平等"), &periods, 10, &ExtractConfig::default(), RankBy::Peak).unwrap();
        assert_eq!(t.anchor_sentences, vec![4, 3, 1]);
        assert_eq!(t.row("西人").unwrap().counts, vec![3, 1, 0]);
        assert_eq!(t.row("權力").unwrap().counts, vec![0, 2, 1]);
        assert_eq!(t.rows[0].collocate, "西人");
        // 強權 occurs in a single anchor sentence: below min_freq
        assert!(t.row("強權").is_none());
    }
}
