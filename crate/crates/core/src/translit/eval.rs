use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::candidate::Candidate;
use crate::error::{invalid, Result};

pub const DEFAULT_KS: [usize; 3] = [50, 100, 500];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub survivors: usize,
    pub gold: usize,
    pub recall: f64,
    pub precision_at: BTreeMap<usize, f64>,
    /// k values larger than the survivor count; their precision is over the
    /// whole (shorter) ranked list.
    pub short_prefix: Vec<usize>,
}

pub fn evaluate(ranked: &[Candidate], survivors: &[Candidate], gold: &BTreeSet<String>, ks: &[usize]) -> Result<EvalReport> {
    if gold.is_empty() {
        return Err(invalid("evaluation needs a non-empty gold set"));
    }
    if ks.iter().any(|&k| k == 0) {
        return Err(invalid("precision cut-offs must be ≥ 1"));
    }
    let surviving: BTreeSet<&str> = survivors.iter().map(|c| c.surface.as_str()).collect();
    let found = gold.iter().filter(|g| surviving.contains(g.as_str())).count();
    let mut precision_at = BTreeMap::new();
    let mut short_prefix = Vec::new();
    for &k in ks {
        let prefix = &ranked[..k.min(ranked.len())];
        if k > ranked.len() {
            short_prefix.push(k);
        }
        let hits = prefix.iter().filter(|c| gold.contains(&c.surface)).count();
        let p = if prefix.is_empty() { 0.0 } else { hits as f64 / prefix.len() as f64 };
        precision_at.insert(k, p);
    }
    Ok(EvalReport {
        survivors: survivors.len(),
        gold: gold.len(),
        recall: found as f64 / gold.len() as f64,
        precision_at,
        short_prefix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translit::candidate::FilterState;

    fn c(s: &str) -> Candidate {
        Candidate {
            surface: s.into(),
            total_freq: 2,
            doc_freq: 1,
            filter_state: FilterState::Survived,
            rank_score: Some(0.0),
        }
    }

    fn gold(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn direct_computation() {
        let ranked = vec![c("A"), c("C"), c("B")];
        let r = evaluate(&ranked, &ranked, &gold(&["A", "B"]), &[2, 5]).unwrap();
        assert_eq!(r.precision_at[&2], 0.5);
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.short_prefix, vec![5]);
        assert!((r.precision_at[&5] - 2.0 / 3.0).abs() < 1e-12);
        assert!(evaluate(&ranked, &ranked, &gold(&[]), &[2]).is_err());
        let partial = evaluate(&ranked, &ranked, &gold(&["A", "Z"]), &[1]).unwrap();
        assert_eq!(partial.recall, 0.5);
    }
}
