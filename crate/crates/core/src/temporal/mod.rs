//! Bucketed frequency, collocation, rate and presence analyses.

mod bucket;
mod colloc;
mod keyword;
mod presence;
mod rate;
mod series;

pub use bucket::{chapter_label, parse_periods, validate_periods, Bucket, Bucketing};
pub use colloc::{
    collocation_timeseries, period_collocation_table, CollocationRow, CollocationSeries,
    CollocationTable, RankBy, Window,
};
pub use keyword::KeywordSet;
pub use presence::{power_proxy, presence_matrix, PowerRank, PresenceMatrix};
pub use rate::{normalized_event_rate, write_rates_tsv, RatePoint, RateSeries, MAX_EVENT_GAP};
pub use series::{keyword_timeseries, TimeSeries};
pub(crate) use series::scope_docs as scope_doc_indices;
