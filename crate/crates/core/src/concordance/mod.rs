//! KWIC search and iterative research sessions.

mod kwic;
mod report;
mod session;
mod store;
mod suggest;

pub use kwic::{kwic_search, HitRef, KwicHit, DEFAULT_CONTEXT_WIDTH};
pub use report::{health_panel, session_report, GoldSet, HealthPanel, SessionReport, UnmarkedChapter};
pub use session::{
    validate_session_id, Action, KeywordEntry, KeywordList, LogEntry, MarkLabel, MarkedStatement,
    Provenance, Session, SESSION_SCHEMA_VERSION,
};
pub use store::SessionStore;
pub use suggest::{suggest_keywords, SuggestConfig, SuggestStatus, Suggestion, Suggestions, DEFAULT_STOPLIST};
