use serde::{Deserialize, Serialize};

use super::record::NameRecord;
use crate::error::{invalid, Result};
use crate::gazetteer::{Gazetteer, PlaceRelation, DEFAULT_NEAR_KM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factoid {
    AlternateNames,
    BirthPlace,
    ServicePeriod,
    OfficePosting,
    EntryIntoOffice,
    ServiceLocation,
    SourcePlace,
}

impl Factoid {
    pub const ALL: [Factoid; 7] = [
        Factoid::AlternateNames,
        Factoid::BirthPlace,
        Factoid::ServicePeriod,
        Factoid::OfficePosting,
        Factoid::EntryIntoOffice,
        Factoid::ServiceLocation,
        Factoid::SourcePlace,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FactoidWeights {
    pub alternate_names: f64,
    pub birth_place: f64,
    pub service_period: f64,
    pub office_posting: f64,
    pub entry_into_office: f64,
    pub service_location: f64,
    /// The source book's publication place; a weak prior, off by default.
    pub source_place: f64,
}

impl Default for FactoidWeights {
    fn default() -> Self {
        FactoidWeights {
            alternate_names: 3.0,
            birth_place: 2.0,
            service_period: 2.0,
            office_posting: 1.0,
            entry_into_office: 1.0,
            service_location: 2.0,
            source_place: 0.0,
        }
    }
}

impl FactoidWeights {
    pub fn get(&self, f: Factoid) -> f64 {
        match f {
            Factoid::AlternateNames => self.alternate_names,
            Factoid::BirthPlace => self.birth_place,
            Factoid::ServicePeriod => self.service_period,
            Factoid::OfficePosting => self.office_posting,
            Factoid::EntryIntoOffice => self.entry_into_office,
            Factoid::ServiceLocation => self.service_location,
            Factoid::SourcePlace => self.source_place,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DisambigConfig {
    pub weights: FactoidWeights,
    pub t_same: f64,
    pub t_diff: f64,
    /// Service-period score falls linearly to 0 at this gap.
    pub decay_years: f64,
    /// Gaps beyond this veto the pair.
    pub veto_gap_years: i32,
    pub near_km: f64,
    /// Containment scores 0.75, times this for each level beyond the first.
    pub containment_decay: f64,
    /// Treat two records from the same book as different people.
    pub same_book_is_different: bool,
}

impl Default for DisambigConfig {
    fn default() -> Self {
        DisambigConfig {
            weights: FactoidWeights::default(),
            t_same: 0.7,
            t_diff: 0.35,
            decay_years: 30.0,
            veto_gap_years: 120,
            near_km: DEFAULT_NEAR_KM,
            containment_decay: 0.8,
            same_book_is_different: false,
        }
    }
}

impl DisambigConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.t_diff && self.t_diff < self.t_same && self.t_same <= 1.0) {
            return Err(invalid("thresholds need 0 ≤ t_diff < t_same ≤ 1"));
        }
        let ws: Vec<f64> = Factoid::ALL.iter().map(|&f| self.weights.get(f)).collect();
        if ws.iter().any(|w| !(*w >= 0.0)) || !ws.iter().any(|w| *w > 0.0) {
            return Err(invalid("factoid weights must be ≥ 0 with at least one positive"));
        }
        if !(self.decay_years > 0.0) || self.veto_gap_years < 0 || !(self.near_km >= 0.0) {
            return Err(invalid("decay span must be positive; veto gap and near threshold non-negative"));
        }
        if !(0.0..=1.0).contains(&self.containment_decay) {
            return Err(invalid("containment decay must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Midpoint of the review band.
    pub fn midpoint(&self) -> f64 {
        (self.t_same + self.t_diff) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactoidScore {
    pub factoid: Factoid,
    /// `None` when either record lacks the factoid.
    pub score: Option<f64>,
    pub evidence: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Same,
    Different,
    Review,
    NonComparable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    /// Record ids in ascending order.
    pub a: String,
    pub b: String,
    pub factoids: Vec<FactoidScore>,
    /// Weighted mean over present, positively weighted factoids.
    pub total: Option<f64>,
    pub veto: Option<String>,
    pub verdict: Verdict,
}

impl PairScore {
    pub fn pair_id(&self) -> String {
        format!("{}|{}", self.a, self.b)
    }

    pub fn factoid(&self, f: Factoid) -> Option<&FactoidScore> {
        self.factoids.iter().find(|s| s.factoid == f)
    }

    /// Any present factoid agrees to some degree.
    pub fn has_agreement(&self) -> bool {
        self.factoids.iter().any(|f| f.score.is_some_and(|s| s > 0.0))
    }
}

fn relation_score(r: PlaceRelation, cfg: &DisambigConfig) -> f64 {
    match r {
        PlaceRelation::Identical => 1.0,
        PlaceRelation::Contains { levels } | PlaceRelation::ContainedBy { levels } => {
            0.75 * cfg.containment_decay.powi(levels.saturating_sub(1) as i32)
        }
        PlaceRelation::Sibling | PlaceRelation::Near { .. } => 0.5,
        PlaceRelation::Unrelated => 0.0,
    }
}

fn relation_label(r: PlaceRelation) -> String {
    match r {
        PlaceRelation::Identical => "identical".into(),
        PlaceRelation::Contains { levels } => format!("contains({levels})"),
        PlaceRelation::ContainedBy { levels } => format!("contained_by({levels})"),
        PlaceRelation::Sibling => "sibling".into(),
        PlaceRelation::Near { km } => format!("near({km:.1} km)"),
        PlaceRelation::Unrelated => "unrelated".into(),
    }
}

/// Best relation over all resolutions of both names (optimistic matching).
/// Names the gazetteer does not know fall back to string equality.
fn place_score(
    gaz: Option<&Gazetteer>,
    a: &str,
    b: &str,
    asof: (Option<i32>, Option<i32>),
    cfg: &DisambigConfig,
) -> (f64, String) {
    if let Some(g) = gaz {
        let pa = g.resolve_name(a, asof.0);
        let pb = g.resolve_name(b, asof.1);
        if !pa.is_empty() && !pb.is_empty() {
            let mut best: Option<(f64, String)> = None;
            for x in &pa {
                for y in &pb {
                    let r = g.classify_relation(x, y, cfg.near_km);
                    let s = relation_score(r, cfg);
                    if best.as_ref().map_or(true, |(bs, _)| s > *bs) {
                        best = Some((s, format!("{}~{}: {}", x.place_id, y.place_id, relation_label(r))));
                    }
                }
            }
            let (s, ev) = best.expect("non-empty pairings");
            let ev = if pa.len() * pb.len() > 1 {
                format!("{ev} (best of {} pairings)", pa.len() * pb.len())
            } else {
                ev
            };
            return (s, ev);
        }
    }
    if a == b {
        (1.0, format!("same name {a} (not in gazetteer)"))
    } else {
        (0.0, format!("{a} vs {b} (not in gazetteer)"))
    }
}

fn period_gap(a: (i32, i32), b: (i32, i32)) -> i32 {
    (a.0.max(b.0) - a.1.min(b.1)).max(0)
}

fn exact(factoid: Factoid, a: &Option<String>, b: &Option<String>) -> FactoidScore {
    match (a, b) {
        (Some(x), Some(y)) => FactoidScore {
            factoid,
            score: Some(if x == y { 1.0 } else { 0.0 }),
            evidence: if x == y { format!("both {x}") } else { format!("{x} vs {y}") },
        },
        _ => missing(factoid),
    }
}

fn missing(factoid: Factoid) -> FactoidScore {
    FactoidScore {
        factoid,
        score: None,
        evidence: "missing".into(),
    }
}

/// Scores a same-name pair. The result does not depend on argument order.
pub fn compare_pair(a: &NameRecord, b: &NameRecord, gaz: Option<&Gazetteer>, cfg: &DisambigConfig) -> Result<PairScore> {
    if a.name != b.name {
        return Err(invalid(format!("cannot compare {} with {}", a.name, b.name)));
    }
    let (a, b) = if a.record_id <= b.record_id { (a, b) } else { (b, a) };
    let start = |r: &NameRecord| r.service_period.map(|p| p.0);
    let mut veto = None;

    let mut factoids = Vec::with_capacity(Factoid::ALL.len());
    for f in Factoid::ALL {
        let s = match f {
            Factoid::AlternateNames => {
                if a.alternate_names.is_empty() || b.alternate_names.is_empty() {
                    missing(f)
                } else {
                    let mut shared: Vec<&String> = a
                        .alternate_names
                        .iter()
                        .filter(|n| b.alternate_names.contains(n))
                        .collect();
                    shared.sort();
                    shared.dedup();
                    FactoidScore {
                        factoid: f,
                        score: Some(if shared.is_empty() { 0.0 } else { 1.0 }),
                        evidence: if shared.is_empty() {
                            "no shared alternate name".into()
                        } else {
                            format!("shared {}", shared.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", "))
                        },
                    }
                }
            }
            Factoid::BirthPlace | Factoid::ServiceLocation | Factoid::SourcePlace => {
                let (x, y, asof) = match f {
                    Factoid::BirthPlace => (&a.birth_place, &b.birth_place, (None, None)),
                    Factoid::ServiceLocation => (&a.service_location, &b.service_location, (start(a), start(b))),
                    _ => (&a.source.pub_place, &b.source.pub_place, (a.source.book_date, b.source.book_date)),
                };
                match (x, y) {
                    (Some(x), Some(y)) => {
                        let (score, evidence) = place_score(gaz, x, y, asof, cfg);
                        FactoidScore {
                            factoid: f,
                            score: Some(score),
                            evidence,
                        }
                    }
                    _ => missing(f),
                }
            }
            Factoid::ServicePeriod => match (a.service_period, b.service_period) {
                (Some(p), Some(q)) => {
                    let gap = period_gap(p, q);
                    if gap > cfg.veto_gap_years {
                        veto = Some(format!("service periods {gap} years apart"));
                    }
                    FactoidScore {
                        factoid: f,
                        score: Some((1.0 - gap as f64 / cfg.decay_years).max(0.0)),
                        evidence: if gap == 0 {
                            "periods overlap".into()
                        } else {
                            format!("{gap} years apart")
                        },
                    }
                }
                _ => missing(f),
            },
            Factoid::OfficePosting => exact(f, &a.office_posting, &b.office_posting),
            Factoid::EntryIntoOffice => exact(f, &a.entry_into_office, &b.entry_into_office),
        };
        factoids.push(s);
    }
    if veto.is_none() && cfg.same_book_is_different && !a.source.book_id.is_empty() && a.source.book_id == b.source.book_id {
        veto = Some(format!("both listed in {}", a.source.book_id));
    }

    let (mut num, mut den) = (0.0, 0.0);
    for s in &factoids {
        let w = cfg.weights.get(s.factoid);
        if let (Some(x), true) = (s.score, w > 0.0) {
            num += w * x;
            den += w;
        }
    }
    let total = (den > 0.0).then(|| num / den);
    let mut score = PairScore {
        a: a.record_id.clone(),
        b: b.record_id.clone(),
        factoids,
        total,
        veto,
        verdict: Verdict::NonComparable,
    };
    score.verdict = verdict(&score, cfg);
    Ok(score)
}

pub fn verdict(score: &PairScore, cfg: &DisambigConfig) -> Verdict {
    if score.veto.is_some() {
        return Verdict::Different;
    }
    match score.total {
        None => Verdict::NonComparable,
        Some(t) if t >= cfg.t_same => Verdict::Same,
        Some(t) if t <= cfg.t_diff => Verdict::Different,
        Some(_) => Verdict::Review,
    }
}
