use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::DATA_DIR_ENV;

#[derive(Debug, Parser)]
#[command(name = "wenxian", version, about = "Corpus analytics for historical Chinese texts")]
pub struct Cli {
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Data directory for sessions, judgments and relative inputs.
    #[arg(long, global = true, env = DATA_DIR_ENV)]
    pub data_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,

    /// Overwrite an existing output file.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize and segment inputs into a stored generation file.
    Ingest(IngestArgs),
    /// Corpus statistics.
    Stats(StatsArgs),
    /// Keyword frequency per time bucket.
    Freq(FreqArgs),
    /// Collocation series, or a per-period collocate table with --anchor.
    Colloc(CollocArgs),
    /// Repeated strings ("pseudo-words").
    Pseudowords(PseudowordsArgs),
    /// Keyword-in-context listing.
    Kwic(KwicArgs),
    /// Appearance-normalized event rates.
    Rate(RateArgs),
    /// Per-chapter presence matrix, with an optional power ranking.
    Presence(PresenceArgs),
    /// Transliteration candidates: generate, filter, rank, evaluate.
    Translit(TranslitArgs),
    /// Same-name record disambiguation.
    Disambig(DisambigArgs),
    /// Run the HTTP/JSON service.
    Serve(ServeArgs),
    /// Chart-ready data for a named analysis.
    ChartData(ChartDataArgs),
    /// Inspect persisted research sessions.
    #[command(subcommand)]
    Sessions(SessionsCommand),
    /// Write a seeded synthetic fixture.
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `.jsonl`, sidecar `.tsv`, plain text, or stored `.json` inputs.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Chunk length for unpunctuated text.
    #[arg(long)]
    pub chunk_len: Option<usize>,
    /// Chapter heading regex for plain-text inputs, e.g. `第[一二三四五六七八九十百零〇]+回`.
    #[arg(long)]
    pub chapter_pattern: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub corpus: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ScopeArgs {
    /// Restrict to these document ids (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub docs: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    pub corpus: PathBuf,
    /// Keyword set: `a|b` or `label=a|b`.
    #[arg(long)]
    pub kw: String,
    /// `year`, `month`, `chapter` or `1898-1900,1901-1914`.
    #[arg(long, default_value = "year")]
    pub bucket: String,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CollocArgs {
    pub corpus: PathBuf,
    /// Member keyword set (repeat, at least two) for a series.
    #[arg(long = "member", conflicts_with = "anchor")]
    pub members: Vec<String>,
    /// Anchor keyword set for a period table.
    #[arg(long, requires = "periods")]
    pub anchor: Option<String>,
    #[arg(long)]
    pub periods: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    /// `peak` or a zero-based period index.
    #[arg(long, default_value = "peak")]
    pub rank_by: String,
    #[arg(long, default_value_t = 2)]
    pub min_len: usize,
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,
    #[arg(long, default_value_t = 2)]
    pub min_freq: usize,
    /// `sentence` or `chars:N`.
    #[arg(long, default_value = "sentence")]
    pub window: String,
    #[arg(long, default_value = "year")]
    pub bucket: String,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PseudowordsArgs {
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub min_len: usize,
    #[arg(long, default_value_t = 8)]
    pub max_len: usize,
    #[arg(long, default_value_t = 2)]
    pub min_freq: usize,
    /// Drop strings subsumed by an equally frequent longer string.
    #[arg(long)]
    pub prune: bool,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct KwicArgs {
    pub corpus: PathBuf,
    #[arg(long)]
    pub kw: String,
    #[arg(long, default_value_t = wenxian_core::concordance::DEFAULT_CONTEXT_WIDTH)]
    pub width: usize,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    pub corpus: PathBuf,
    /// Subject keyword set (repeatable).
    #[arg(long = "subject", required = true)]
    pub subjects: Vec<String>,
    #[arg(long)]
    pub event: String,
    /// Characters allowed between subject and event.
    #[arg(long, default_value_t = 0)]
    pub gap: usize,
    #[arg(long, default_value = "chapter")]
    pub bucket: String,
    #[command(flatten)]
    pub scope: ScopeArgs,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PresenceArgs {
    pub corpus: PathBuf,
    #[arg(long)]
    pub doc: String,
    /// Entity keyword set (repeatable).
    #[arg(long = "entity", required = true)]
    pub entities: Vec<String>,
    /// Master with rank, `label=a|b@9` (repeatable); entities are then ranked.
    #[arg(long = "master")]
    pub masters: Vec<String>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct TranslitArgs {
    /// Target corpus.
    pub corpus: PathBuf,
    /// Contrast corpus of ordinary text.
    #[arg(long)]
    pub contrast: Option<PathBuf>,
    /// Training corpus with marked transliterations.
    #[arg(long, requires = "train_gold")]
    pub train: Option<PathBuf>,
    /// Gold spans TSV for the training corpus.
    #[arg(long)]
    pub train_gold: Option<PathBuf>,
    /// Gold spans TSV for the target corpus, for evaluation.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Phonotactic inventory TSV (`char<TAB>weight`).
    #[arg(long)]
    pub inventory: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the run summary (stages, evaluation) as JSON here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DisambigArgs {
    /// Records as `.tsv` or `.jsonl`.
    pub records: PathBuf,
    #[arg(long)]
    pub gazetteer: Option<PathBuf>,
    /// Also write the review queue TSV here.
    #[arg(long)]
    pub review_queue: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Listen address; overrides the config file.
    #[arg(long)]
    pub addr: Option<String>,
    /// Serve a corpus as `name=path` (repeatable); adds to the config file's.
    #[arg(long = "corpus")]
    pub corpora: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Per-chapter 笑道 counts and rates for 寶玉, 黛玉, 寶釵.
    DrcSmiles,
}

#[derive(Debug, Args)]
pub struct ChartDataArgs {
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub preset: Preset,
    /// Document to chart; the only document when omitted.
    #[arg(long)]
    pub doc: Option<String>,
    #[arg(long, value_enum, default_value = "tsv")]
    pub format: Format,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Subcommand)]
pub enum SessionsCommand {
    /// Session ids in the data directory.
    List,
    /// A session as stored.
    Show { id: String },
    /// Precision/recall of a session's answers against a gold file.
    Report {
        id: String,
        #[arg(long)]
        gold: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixtureCommand {
    /// Chaptered novel-like text.
    Novel {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 120)]
        chapters: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Target/training/contrast corpora with planted transliterations.
    Translit {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Directory to write into.
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        force: bool,
    },
    /// Officer records with planted duplicates, plus their gazetteer.
    Disambig {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        records: usize,
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        force: bool,
    },
}
