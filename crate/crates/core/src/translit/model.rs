use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::candidate::Candidate;
use super::inventory::PhonoInventory;
use crate::corpus::Corpus;
use crate::error::{invalid, Error, Result};
use crate::text::is_break_char;

pub const CONTEXT_WINDOW: usize = 2;

/// Sparse feature vector keyed by feature name.
pub type Features = BTreeMap<String, f64>;

/// Context features of a surface, averaged over its occurrences:
/// `L1=c`, `L2=c`, `R1=c`, `R2=c` (`#` at a boundary), plus one-hot
/// `len=`, `inv=` (inventory fraction in quarters) and `logf=` (log2 frequency).
pub fn featurize(corpus: &Corpus, surface: &str, inventory: &PhonoInventory) -> Features {
    let q: Vec<char> = surface.chars().collect();
    let hits = corpus.index().locate(&q);
    let mut f = Features::new();
    let n = hits.len().max(1) as f64;
    for &(d, pos) in &hits {
        let text = &corpus.docs()[d].text;
        let end = pos + q.len();
        // context stops at the first break character
        let mut left_open = true;
        for k in 1..=CONTEXT_WINDOW {
            let c = pos.checked_sub(k).map(|i| text[i]).filter(|&c| left_open && !is_break_char(c));
            left_open &= c.is_some();
            *f.entry(format!("L{k}={}", c.unwrap_or('#'))).or_insert(0.0) += 1.0 / n;
        }
        let mut right_open = true;
        for k in 1..=CONTEXT_WINDOW {
            let c = text.get(end + k - 1).copied().filter(|&c| right_open && !is_break_char(c));
            right_open &= c.is_some();
            *f.entry(format!("R{k}={}", c.unwrap_or('#'))).or_insert(0.0) += 1.0 / n;
        }
    }
    f.insert(format!("len={}", q.len()), 1.0);
    let band = (inventory.fraction(surface) * 4.0).floor() as i64;
    f.insert(format!("inv={band}"), 1.0);
    let logf = (hits.len().max(1) as f64).log2().floor().min(10.0) as i64;
    f.insert(format!("logf={logf}"), 1.0);
    f
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 7,
            epochs: 40,
            learning_rate: 0.3,
            l2: 1e-4,
        }
    }
}

/// Linear scorer over categorical context features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextModel {
    pub bias: f64,
    /// Weight for feature values never seen in training.
    pub default_weight: f64,
    pub weights: BTreeMap<String, f64>,
}

impl ContextModel {
    pub fn score(&self, f: &Features) -> f64 {
        self.bias
            + f.iter()
                .map(|(k, v)| v * self.weights.get(k).copied().unwrap_or(self.default_weight))
                .sum::<f64>()
    }

    /// The `n` features with the largest weight magnitude.
    pub fn top_features(&self, n: usize) -> Vec<(String, f64)> {
        let mut w: Vec<(String, f64)> = self.weights.iter().map(|(k, v)| (k.clone(), *v)).collect();
        w.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
        w.truncate(n);
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub surface: String,
    pub features: Features,
    pub positive: bool,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Class-balanced logistic regression by SGD. Examples are put in canonical
/// order before the seeded shuffle, so input order never matters.
pub fn fit(examples: &[Example], cfg: &TrainConfig) -> Result<ContextModel> {
    let pos = examples.iter().filter(|e| e.positive).count();
    let neg = examples.len() - pos;
    if pos == 0 {
        return Err(Error::DegenerateTraining("no positive examples".into()));
    }
    if neg == 0 {
        return Err(Error::DegenerateTraining("no negative examples".into()));
    }
    if cfg.epochs == 0 || !(cfg.learning_rate > 0.0) {
        return Err(invalid("training needs epochs ≥ 1 and a positive learning rate"));
    }
    let mut order: Vec<&Example> = examples.iter().collect();
    order.sort_by(|a, b| a.surface.cmp(&b.surface).then(a.positive.cmp(&b.positive)));
    let n = examples.len() as f64;
    let w_pos = n / (2.0 * pos as f64);
    let w_neg = n / (2.0 * neg as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = ContextModel {
        bias: 0.0,
        default_weight: 0.0,
        weights: BTreeMap::new(),
    };
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate / (1.0 + epoch as f64 * 0.1);
        order.shuffle(&mut rng);
        for e in &order {
            let y = if e.positive { 1.0 } else { 0.0 };
            let g = (sigmoid(model.score(&e.features)) - y) * if e.positive { w_pos } else { w_neg };
            model.bias -= lr * g;
            for (k, v) in &e.features {
                let w = model.weights.entry(k.clone()).or_insert(0.0);
                *w -= lr * (g * v + cfg.l2 * *w);
            }
        }
    }
    Ok(model)
}

/// Positives are the gold surfaces; negatives every surviving non-gold candidate.
pub fn train_context_model(
    corpus: &Corpus,
    gold: &BTreeSet<String>,
    survivors: &[Candidate],
    inventory: &PhonoInventory,
    cfg: &TrainConfig,
) -> Result<ContextModel> {
    if gold.is_empty() {
        return Err(Error::DegenerateTraining("no gold spans".into()));
    }
    let mut examples: Vec<Example> = gold
        .iter()
        .map(|g| Example {
            surface: g.clone(),
            features: featurize(corpus, g, inventory),
            positive: true,
        })
        .collect();
    examples.extend(
        survivors
            .iter()
            .filter(|c| !gold.contains(&c.surface))
            .map(|c| Example {
                surface: c.surface.clone(),
                features: featurize(corpus, &c.surface, inventory),
                positive: false,
            }),
    );
    fit(&examples, cfg)
}

/// Scores survivors and sorts by score descending, then frequency
/// descending, then codepoint order.
pub fn rank_candidates(
    model: &ContextModel,
    corpus: &Corpus,
    survivors: Vec<Candidate>,
    inventory: &PhonoInventory,
) -> Vec<Candidate> {
    let mut ranked: Vec<Candidate> = survivors
        .into_iter()
        .map(|mut c| {
            c.rank_score = Some(model.score(&featurize(corpus, &c.surface, inventory)));
            c.filter_state = super::candidate::FilterState::Survived;
            c
        })
        .collect();
    sort_ranked(&mut ranked);
    ranked
}

pub(crate) fn sort_ranked(ranked: &mut [Candidate]) {
    ranked.sort_by(|a, b| {
        let (sa, sb) = (a.rank_score.unwrap_or(f64::NEG_INFINITY), b.rank_score.unwrap_or(f64::NEG_INFINITY));
        sb.total_cmp(&sa)
            .then(b.total_freq.cmp(&a.total_freq))
            .then_with(|| a.surface.cmp(&b.surface))
    });
}
