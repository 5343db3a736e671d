//! Transliteration discovery: candidates, filters, a learned context ranker
//! and evaluation against marked spans.

mod candidate;
mod eval;
mod gold;
mod inventory;
mod model;
mod pipeline;

pub use candidate::{
    completeness_gaps, filter_contrast, filter_phonotactic, generate_candidates, Candidate,
    FilterId, FilterOutcome, FilterState,
};
pub use eval::{evaluate, EvalReport, DEFAULT_KS};
pub use gold::{GoldSpan, GoldSpans};
pub use inventory::PhonoInventory;
pub use model::{
    featurize, fit, rank_candidates, train_context_model, ContextModel, Example, Features,
    TrainConfig, CONTEXT_WINDOW,
};
pub use pipeline::{
    filtered_survivors, run_pipeline, write_ranked_tsv, PipelineRun, StageSummary,
    TrainingSet, TranslitConfig,
};
