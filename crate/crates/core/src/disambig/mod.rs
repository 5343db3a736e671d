//! Same-name record disambiguation: blocking, factoid comparison, vetoes
//! and verdicts with a human-review band.

mod record;
mod report;
mod score;

pub use record::{read_records_jsonl, read_records_tsv, write_records_tsv, NameRecord, Source};
pub use report::{
    block_pairs, decided_same, pairwise_metrics, read_judgments, run_disambiguation, write_judgments, write_review_queue,
    DisambigReport, HumanVerdict, Judgment, PairwiseMetrics, ReviewItem,
};
pub use score::{
    compare_pair, verdict, DisambigConfig, Factoid, FactoidScore, FactoidWeights, PairScore,
    Verdict,
};
