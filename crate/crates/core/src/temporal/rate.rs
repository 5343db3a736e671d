use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::bucket::{Assigner, Bucket, Bucketing};
use super::keyword::KeywordSet;
use super::series::ScopedDocs;
use crate::corpus::{Corpus, Scope};
use crate::error::{invalid, Result};

pub const MAX_EVENT_GAP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub bucket: Bucket,
    pub numerator: usize,
    pub denominator: usize,
    /// `None` when the subject does not appear in the bucket.
    pub rate: Option<f64>,
}

/// Event counts normalized by subject appearances.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSeries {
    pub subject: String,
    pub event: String,
    pub gap: usize,
    pub points: Vec<RatePoint>,
}

impl RateSeries {
    pub fn point(&self, bucket: &Bucket) -> Option<&RatePoint> {
        self.points.iter().find(|p| p.bucket == *bucket)
    }

    pub fn numerator_total(&self) -> usize {
        self.points.iter().map(|p| p.numerator).sum()
    }
}

/// Long-format export shared by several rate series:
/// `bucket	series	numerator	denominator	rate` (empty rate when undefined).
pub fn write_rates_tsv(series: &[RateSeries], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "bucket\tseries\tnumerator\tdenominator\trate")?;
    for s in series {
        for p in &s.points {
            let rate = p.rate.map(|r| format!("{r:.6}")).unwrap_or_default();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                p.bucket, s.subject, p.numerator, p.denominator, rate
            )?;
        }
    }
    Ok(())
}

/// Denominator: subject occurrences per bucket. Numerator: those subject
/// occurrences followed, within `gap` characters and inside the same
/// sentence, by any event surface. Each subject occurrence counts at most once.
pub fn normalized_event_rate(
    corpus: &Corpus,
    scope: Scope<'_>,
    subject: &KeywordSet,
    events: &KeywordSet,
    gap: usize,
    bucketing: &Bucketing,
) -> Result<RateSeries> {
    if gap > MAX_EVENT_GAP {
        return Err(invalid(format!("event gap {gap} exceeds {MAX_EVENT_GAP}")));
    }
    let docs = ScopedDocs::new(corpus, scope)?;
    let assigner = Assigner::new(bucketing, &docs.refs)?;
    let event_chars = events.surface_chars();

    let mut counts: BTreeMap<Bucket, (usize, usize)> = assigner
        .universe(&docs.refs)
        .into_iter()
        .map(|b| (b, (0, 0)))
        .collect();
    for surface in subject.surface_chars() {
        for (d, pos) in corpus.index().locate(&surface) {
            if !docs.in_scope[d] {
                continue;
            }
            let doc = &corpus.docs()[d];
            let Some(b) = assigner.bucket(doc, pos, surface.len()) else {
                continue;
            };
            let end = pos + surface.len();
            let limit = doc
                .sentence_of(pos)
                .map(|s| doc.sentences[s].end)
                .unwrap_or(doc.len());
            let hit = (end..=end + gap).any(|q| {
                event_chars.iter().any(|e| {
                    q + e.len() <= limit && doc.text[q..q + e.len()] == e[..]
                })
            });
            let entry = counts.entry(b).or_insert((0, 0));
            entry.1 += 1;
            if hit {
                entry.0 += 1;
            }
        }
    }
    let points = counts
        .into_iter()
        .map(|(bucket, (numerator, denominator))| RatePoint {
            bucket,
            numerator,
            denominator,
            rate: (denominator > 0).then(|| numerator as f64 / denominator as f64),
        })
        .collect();
    Ok(RateSeries {
        subject: subject.label().to_string(),
        event: events.label().to_string(),
        gap,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ChapterMarkers, CorpusBuilder, DocMeta};

    fn novel(text: &str) -> Corpus {
        let mut b = CorpusBuilder::default();
        b.ingest_str(text, DocMeta::new("drc").with_chapters(ChapterMarkers::Pattern("第.回".into())))
            .unwrap();
        b.build()
    }

    fn kw(s: &str) -> KeywordSet {
        KeywordSet::single(s).unwrap()
    }

    #[test]
    fn one_in_three() {
        let c = novel("第一回寶玉來了。寶玉笑道：好。見寶玉。第二回黛玉笑道：是。");
        let r = normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 0, &Bucketing::Chapter).unwrap();
        let p1 = r.point(&Bucket::Chapter(1)).unwrap();
        assert_eq!((p1.numerator, p1.denominator), (1, 3));
        assert!((p1.rate.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // absent subject: undefined, not zero
        let p2 = r.point(&Bucket::Chapter(2)).unwrap();
        assert_eq!(p2.denominator, 0);
        assert_eq!(p2.rate, None);
    }

    #[test]
    fn gap_and_sentence_limit() {
        let c = novel("第一回寶玉便笑道。寶玉。笑道");
        let g0 = normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 0, &Bucketing::Chapter).unwrap();
        assert_eq!(g0.numerator_total(), 0);
        let g1 = normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 1, &Bucketing::Chapter).unwrap();
        assert_eq!(g1.numerator_total(), 1);
        let g5 = normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 5, &Bucketing::Chapter).unwrap();
        // the second 寶玉 is followed by 笑道 only across a sentence boundary
        assert_eq!(g5.numerator_total(), 1);
        assert!(normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 6, &Bucketing::Chapter).is_err());
    }

    #[test]
    fn tsv_null_rate_is_empty() {
        let c = novel("第一回寶玉笑道。第二回無");
        let r = normalized_event_rate(&c, Scope::Corpus, &kw("寶玉"), &kw("笑道"), 0, &Bucketing::Chapter).unwrap();
        let mut buf = Vec::new();
        write_rates_tsv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bucket\tseries\tnumerator\tdenominator\trate\nd001\t寶玉\t1\t1\t1.000000\nd002\t寶玉\t0\t0\t\n"
        );
    }
}
