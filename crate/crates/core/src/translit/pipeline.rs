use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::candidate::{filter_contrast, filter_phonotactic, generate_candidates, Candidate, FilterState};
use super::eval::{evaluate, EvalReport, DEFAULT_KS};
use super::gold::GoldSpans;
use super::inventory::PhonoInventory;
use super::model::{rank_candidates, sort_ranked, train_context_model, ContextModel, TrainConfig};
use crate::corpus::Corpus;
use crate::error::{invalid, Result};
use crate::ngram::ExtractConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TranslitConfig {
    pub extract: ExtractConfig,
    pub contrast_threshold: f64,
    pub min_fraction: f64,
    /// Falls back to the builtin inventory.
    pub inventory_path: Option<PathBuf>,
    pub ks: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for TranslitConfig {
    fn default() -> Self {
        TranslitConfig {
            extract: ExtractConfig::default(),
            contrast_threshold: 1.0,
            min_fraction: 0.5,
            inventory_path: None,
            ks: DEFAULT_KS.to_vec(),
            train: TrainConfig::default(),
        }
    }
}

impl TranslitConfig {
    pub fn inventory(&self) -> Result<PhonoInventory> {
        match &self.inventory_path {
            Some(p) => PhonoInventory::load(p),
            None => Ok(PhonoInventory::builtin()),
        }
    }
}

/// A corpus with marked transliterations, disjoint from the evaluation corpus.
#[derive(Debug, Clone, Copy)]
pub struct TrainingSet<'a> {
    pub corpus: &'a Corpus,
    pub gold: &'a GoldSpans,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageSummary {
    pub stage: String,
    pub count: usize,
    /// Gold recall at this stage, when a gold set is given.
    pub recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineRun {
    pub stages: Vec<StageSummary>,
    /// Every generated candidate with its final state, in generation order.
    pub candidates: Vec<Candidate>,
    pub ranked: Vec<Candidate>,
    pub model: Option<ContextModel>,
    pub report: Option<EvalReport>,
    pub warnings: Vec<String>,
}

/// Candidates that pass both filters.
pub fn filtered_survivors(
    corpus: &Corpus,
    contrast: Option<&Corpus>,
    inventory: &PhonoInventory,
    cfg: &TranslitConfig,
) -> Result<(Vec<Candidate>, Vec<Candidate>, Vec<Candidate>, Vec<String>)> {
    let generated = generate_candidates(corpus, &cfg.extract)?;
    let mut warnings = Vec::new();
    let after_contrast = match contrast {
        Some(cc) => {
            let out = filter_contrast(generated.clone(), corpus, cc, cfg.contrast_threshold)?;
            warnings.extend(out.warnings);
            out.kept
        }
        None => {
            warnings.push("no contrast corpus given; contrast filter skipped".into());
            generated.clone()
        }
    };
    let after_phono = filter_phonotactic(after_contrast.clone(), inventory, cfg.min_fraction)?.kept;
    Ok((generated, after_contrast, after_phono, warnings))
}

fn recall(stage: &[Candidate], gold: Option<&BTreeSet<String>>) -> Option<f64> {
    let g = gold.filter(|g| !g.is_empty())?;
    let have: BTreeSet<&str> = stage.iter().map(|c| c.surface.as_str()).collect();
    Some(g.iter().filter(|s| have.contains(s.as_str())).count() as f64 / g.len() as f64)
}

pub fn run_pipeline(
    target: &Corpus,
    contrast: Option<&Corpus>,
    training: Option<TrainingSet<'_>>,
    eval_gold: Option<&BTreeSet<String>>,
    cfg: &TranslitConfig,
) -> Result<PipelineRun> {
    let inventory = cfg.inventory()?;
    let (generated, after_contrast, survivors, mut warnings) =
        filtered_survivors(target, contrast, &inventory, cfg)?;

    let model = match training {
        Some(t) => {
            let target_ids: BTreeSet<&str> = target.docs().iter().map(|d| d.doc_id.as_str()).collect();
            if t.corpus.docs().iter().any(|d| target_ids.contains(d.doc_id.as_str())) {
                return Err(invalid("training and evaluation corpora share documents"));
            }
            t.gold.validate(t.corpus)?;
            let (_, _, train_survivors, _) = filtered_survivors(t.corpus, contrast, &inventory, cfg)?;
            Some(train_context_model(
                t.corpus,
                &t.gold.surfaces(),
                &train_survivors,
                &inventory,
                &cfg.train,
            )?)
        }
        None => {
            warnings.push("no training data; survivors ranked by frequency".into());
            None
        }
    };
    let ranked = match &model {
        Some(m) => rank_candidates(m, target, survivors.clone(), &inventory),
        None => {
            let mut r: Vec<Candidate> = survivors
                .iter()
                .cloned()
                .map(|mut c| {
                    c.filter_state = FilterState::Survived;
                    c.rank_score = Some(0.0);
                    c
                })
                .collect();
            sort_ranked(&mut r);
            r
        }
    };

    let stages = vec![
        StageSummary {
            stage: "generated".into(),
            count: generated.len(),
            recall: recall(&generated, eval_gold),
        },
        StageSummary {
            stage: "contrast".into(),
            count: after_contrast.len(),
            recall: recall(&after_contrast, eval_gold),
        },
        StageSummary {
            stage: "phonotactic".into(),
            count: survivors.len(),
            recall: recall(&survivors, eval_gold),
        },
    ];
    let report = match eval_gold {
        Some(g) if !g.is_empty() => Some(evaluate(&ranked, &survivors, g, &cfg.ks)?),
        _ => None,
    };

    let contrast_kept: BTreeSet<&str> = after_contrast.iter().map(|c| c.surface.as_str()).collect();
    let scored: std::collections::HashMap<&str, &Candidate> =
        ranked.iter().map(|c| (c.surface.as_str(), c)).collect();
    let candidates = generated
        .iter()
        .map(|c| {
            if let Some(r) = scored.get(c.surface.as_str()) {
                (*r).clone()
            } else {
                let mut d = c.clone();
                d.filter_state = FilterState::DroppedBy(if contrast_kept.contains(c.surface.as_str()) {
                    super::candidate::FilterId::Phonotactic
                } else {
                    super::candidate::FilterId::Contrast
                });
                d
            }
        })
        .collect();

    Ok(PipelineRun {
        stages,
        candidates,
        ranked,
        model,
        report,
        warnings,
    })
}

/// `rank	surface	score	total_freq	doc_freq`
pub fn write_ranked_tsv(ranked: &[Candidate], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "rank\tsurface\tscore\ttotal_freq\tdoc_freq")?;
    for (i, c) in ranked.iter().enumerate() {
        writeln!(
            w,
            "{}\t{}\t{:.6}\t{}\t{}",
            i + 1,
            c.surface,
            c.rank_score.unwrap_or(0.0),
            c.total_freq,
            c.doc_freq
        )?;
    }
    Ok(())
}
