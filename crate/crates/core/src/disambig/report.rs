use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::record::NameRecord;
use super::score::{compare_pair, DisambigConfig, PairScore, Verdict};
use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;

/// Index pairs `(i, j)`, `i < j`, of records sharing an identical name,
/// grouped by name in first-appearance order.
pub fn block_pairs(records: &[NameRecord]) -> Vec<(usize, usize)> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<&str, usize> = HashMap::new();
    for (i, r) in records.iter().enumerate() {
        let g = *slot.entry(r.name.as_str()).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    let mut out = Vec::new();
    for g in &groups {
        for (k, &i) in g.iter().enumerate() {
            for &j in &g[k + 1..] {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub pair_id: String,
    pub a: String,
    pub b: String,
    pub total: f64,
    /// Distance from the middle of the review band; smaller is more ambiguous.
    pub ambiguity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisambigReport {
    pub records: usize,
    pub names: usize,
    pub pairs: Vec<PairScore>,
    pub verdicts: BTreeMap<Verdict, usize>,
    /// Pairs with a weighted total above zero.
    pub nonzero_total: usize,
    /// Pairs where at least one present factoid agrees at all (weight aside).
    pub nonzero_agreement: usize,
    pub review_queue: Vec<ReviewItem>,
}

impl DisambigReport {
    pub fn pair(&self, a: &str, b: &str) -> Option<&PairScore> {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.pairs.iter().find(|p| p.a == a && p.b == b)
    }
}

pub fn run_disambiguation(records: &[NameRecord], gaz: Option<&Gazetteer>, cfg: &DisambigConfig) -> Result<DisambigReport> {
    cfg.validate()?;
    let mut seen = HashMap::new();
    for r in records {
        r.validate()?;
        if seen.insert(r.record_id.as_str(), ()).is_some() {
            return Err(Error::Schema(format!("duplicate record id {}", r.record_id)));
        }
    }
    let mut pairs = block_pairs(records)
        .into_iter()
        .map(|(i, j)| compare_pair(&records[i], &records[j], gaz, cfg))
        .collect::<Result<Vec<_>>>()?;
    pairs.sort_by(|x, y| x.a.cmp(&y.a).then_with(|| x.b.cmp(&y.b)));

    let mut verdicts: BTreeMap<Verdict, usize> = [Verdict::Same, Verdict::Different, Verdict::Review, Verdict::NonComparable]
        .into_iter()
        .map(|v| (v, 0))
        .collect();
    for p in &pairs {
        *verdicts.entry(p.verdict).or_insert(0) += 1;
    }
    let mid = cfg.midpoint();
    let mut review_queue: Vec<ReviewItem> = pairs
        .iter()
        .filter(|p| p.verdict == Verdict::Review)
        .map(|p| {
            let total = p.total.unwrap_or(mid);
            ReviewItem {
                pair_id: p.pair_id(),
                a: p.a.clone(),
                b: p.b.clone(),
                total,
                ambiguity: (total - mid).abs(),
            }
        })
        .collect();
    review_queue.sort_by(|x, y| x.ambiguity.total_cmp(&y.ambiguity).then_with(|| x.pair_id.cmp(&y.pair_id)));
    let names = records
        .iter()
        .map(|r| r.name.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .len();
    Ok(DisambigReport {
        records: records.len(),
        names,
        nonzero_total: pairs.iter().filter(|p| p.total.is_some_and(|t| t > 0.0)).count(),
        nonzero_agreement: pairs.iter().filter(|p| p.has_agreement()).count(),
        pairs,
        verdicts,
        review_queue,
    })
}

/// `pair_id	a	b	total	ambiguity`
pub fn write_review_queue(queue: &[ReviewItem], w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    for item in queue {
        wtr.serialize(item)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HumanVerdict {
    Same,
    Different,
    Unsure,
}

/// An expert's decision on a pair, round-tripped through a TSV file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub pair_id: String,
    pub verdict: HumanVerdict,
    #[serde(default)]
    pub note: String,
}

pub fn read_judgments(r: impl Read) -> Result<Vec<Judgment>> {
    let mut rdr = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(r);
    rdr.deserialize()
        .enumerate()
        .map(|(i, j)| j.map_err(|e| Error::Schema(format!("judgment row {}: {e}", i + 1))))
        .collect()
}

/// `pair_id	verdict	note`
pub fn write_judgments(js: &[Judgment], w: impl Write) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().delimiter(b'\t').from_writer(w);
    for j in js {
        wtr.serialize(j)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Pairwise scores against a known clustering (`record_id -> cluster`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseMetrics {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

/// Same-person decisions after expert judgments: a `Same`/`Different`
/// judgment overrides the verdict, anything else keeps it (Review is not Same).
pub fn decided_same<'a>(report: &'a DisambigReport, judgments: &[Judgment]) -> Vec<&'a PairScore> {
    let judged: HashMap<&str, HumanVerdict> = judgments.iter().map(|j| (j.pair_id.as_str(), j.verdict)).collect();
    report
        .pairs
        .iter()
        .filter(|p| match judged.get(p.pair_id().as_str()) {
            Some(HumanVerdict::Same) => true,
            Some(HumanVerdict::Different) => false,
            _ => p.verdict == Verdict::Same,
        })
        .collect()
}

/// Precision/recall of the decided-same pairs over all same-name pairs whose
/// records share a cluster. Records missing from `truth` are singletons.
pub fn pairwise_metrics(
    records: &[NameRecord],
    report: &DisambigReport,
    judgments: &[Judgment],
    truth: &HashMap<String, String>,
) -> PairwiseMetrics {
    let same = |a: &str, b: &str| matches!((truth.get(a), truth.get(b)), (Some(x), Some(y)) if x == y);
    let predicted = decided_same(report, judgments);
    let tp = predicted.iter().filter(|p| same(&p.a, &p.b)).count();
    let fp = predicted.len() - tp;
    let actual = block_pairs(records)
        .into_iter()
        .filter(|&(i, j)| same(&records[i].record_id, &records[j].record_id))
        .count();
    let fn_ = actual.saturating_sub(tp);
    let ratio = |n: usize, d: usize| (d > 0).then(|| n as f64 / d as f64);
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, actual);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    };
    PairwiseMetrics {
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
        precision,
        recall,
        f1,
    }
}
