//! The HTTP/JSON service. Every success body is `{"generation": .., "data": ..}`,
//! every failure `{"generation": .., "error": {"kind": .., "message": ..}}`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use wenxian_core::concordance::{
    health_panel, kwic_search, session_report, suggest_keywords, Action, GoldSet, HitRef, MarkLabel, MarkedStatement,
    Provenance, Session, SessionStore, DEFAULT_CONTEXT_WIDTH,
};
use wenxian_core::corpus::Corpus;
use wenxian_core::disambig::{
    pairwise_metrics, read_judgments, run_disambiguation, write_judgments, DisambigConfig, DisambigReport, HumanVerdict,
    Judgment, NameRecord, Verdict,
};
use wenxian_core::gazetteer::Gazetteer;
use wenxian_core::ngram::{extract_repeated_strings, prune_subsumed, sort_words, ExtractConfig};
use wenxian_core::temporal::{
    collocation_timeseries, keyword_timeseries, normalized_event_rate, period_collocation_table, parse_periods,
    power_proxy, presence_matrix, Bucketing, KeywordSet, Window,
};
use wenxian_core::translit::{run_pipeline, FilterState, GoldSpan, GoldSpans, PipelineRun, TrainingSet, TranslitConfig};
use wenxian_core::Error as CoreError;

use crate::analytics::{self, drc_smiles};
use crate::config::{resolve_input, Config};
use crate::error::{core_kind, CliError};
use crate::jobs::{parse_rank_by, read_records};

pub const DEFAULT_LIMIT: usize = 100;
pub const MAX_LIMIT: usize = 1000;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    generation: Option<String>,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            kind,
            message: message.into(),
            generation: None,
        }
    }

    fn not_found(what: impl Into<String>) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", what)
    }

    fn at(mut self, generation: &str) -> Self {
        self.generation.get_or_insert_with(|| generation.to_string());
        self
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let kind = core_kind(&e);
        let status = match kind {
            "unknown_document" | "missing_input" => StatusCode::NOT_FOUND,
            "stale_generation" => StatusCode::CONFLICT,
            "io" => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, kind, e.to_string())
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Core(c) => c.into(),
            CliError::MissingInput(_) => ApiError::new(StatusCode::NOT_FOUND, "missing_input", e.to_string()),
            other => ApiError::new(StatusCode::BAD_REQUEST, other.kind(), other.to_string()),
        }
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e).into()
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_query", e.body_text())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "invalid_body", e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "generation": self.generation,
            "error": { "kind": self.kind, "message": self.message },
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn reply<T: Serialize>(generation: Option<&str>, data: T) -> ApiResult {
    Ok(Json(json!({ "generation": generation, "data": data })).into_response())
}

fn q<T>(r: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    Ok(r?.0)
}

fn body<T>(r: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    Ok(r?.0)
}

/// `{total, offset, limit, items}` over a slice of the full result.
fn page<T: Serialize>(items: &[T], offset: Option<usize>, limit: Option<usize>) -> Value {
    let offset = offset.unwrap_or(0);
    let limit = limit.unwrap_or(DEFAULT_LIMIT).clamp(1, MAX_LIMIT);
    let end = offset.saturating_add(limit).min(items.len());
    let slice = items.get(offset.min(items.len())..end).unwrap_or(&[]);
    json!({ "total": items.len(), "offset": offset, "limit": limit, "items": slice })
}

fn docs_list(docs: &Option<String>) -> Vec<String> {
    docs.as_deref()
        .map(|d| d.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
        .unwrap_or_default()
}

fn run_id(prefix: &str, v: &Value) -> String {
    let digest = Sha256::digest(v.to_string().as_bytes());
    format!("{prefix}{}", hex::encode(&digest[..6]))
}

pub struct TranslitRun {
    pub id: String,
    pub target: String,
    pub generation: String,
    pub run: PipelineRun,
}

pub struct DisambigRun {
    pub id: String,
    pub records: Vec<NameRecord>,
    pub report: DisambigReport,
    pub judgments: RwLock<BTreeMap<String, Judgment>>,
    path: PathBuf,
}

impl DisambigRun {
    fn persist(&self, js: &BTreeMap<String, Judgment>) -> Result<(), ApiError> {
        let list: Vec<Judgment> = js.values().cloned().collect();
        let mut buf = Vec::new();
        write_judgments(&list, &mut buf)?;
        let tmp = self.path.with_extension("tsv.tmp");
        fs::write(&tmp, buf)?;
        fs::rename(&tmp, &self.path)?;
        Ok(())
    }

    fn pair_ids(&self) -> BTreeSet<String> {
        self.report.pairs.iter().map(|p| p.pair_id()).collect()
    }
}

pub struct AppState {
    cfg: Config,
    data_dir: PathBuf,
    corpora: BTreeMap<String, Arc<Corpus>>,
    sessions: SessionStore,
    /// One lock per session: writers build the next state aside and swap it in,
    /// so readers only ever see whole actions.
    session_cells: Mutex<HashMap<String, Arc<RwLock<Session>>>>,
    judgments_dir: PathBuf,
    translit_runs: RwLock<BTreeMap<String, Arc<TranslitRun>>>,
    disambig_runs: RwLock<BTreeMap<String, Arc<DisambigRun>>>,
}

impl AppState {
    pub fn new(cfg: Config, corpora: Vec<(String, Corpus)>, data_dir: &Path) -> Result<Self, CliError> {
        let judgments_dir = data_dir.join("judgments");
        fs::create_dir_all(&judgments_dir)?;
        Ok(AppState {
            cfg,
            data_dir: data_dir.to_path_buf(),
            corpora: corpora.into_iter().map(|(n, c)| (n, Arc::new(c))).collect(),
            sessions: SessionStore::open(data_dir.join("sessions"))?,
            session_cells: Mutex::new(HashMap::new()),
            judgments_dir,
            translit_runs: RwLock::new(BTreeMap::new()),
            disambig_runs: RwLock::new(BTreeMap::new()),
        })
    }

    fn corpus(&self, name: &str) -> Result<Arc<Corpus>, ApiError> {
        self.corpora
            .get(name)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no corpus {name}")))
    }

    fn corpus_for(&self, s: &Session) -> Result<Arc<Corpus>, ApiError> {
        self.corpora
            .values()
            .find(|c| c.generation() == s.generation)
            .cloned()
            .ok_or_else(|| {
                let loaded: Vec<&str> = self.corpora.values().map(|c| c.generation()).collect();
                ApiError::from(CoreError::StaleGeneration {
                    session: s.generation.clone(),
                    corpus: loaded.join(","),
                })
                .at(&s.generation)
            })
    }

    fn session_cell(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        let mut cells = self.session_cells.lock().unwrap();
        if let Some(c) = cells.get(id) {
            return Ok(c.clone());
        }
        if !self.sessions.exists(id) {
            return Err(ApiError::not_found(format!("no session {id}")));
        }
        let cell = Arc::new(RwLock::new(self.sessions.load(id)?));
        cells.insert(id.to_string(), cell.clone());
        Ok(cell)
    }

    fn read_session<R>(&self, id: &str, f: impl FnOnce(&Session) -> Result<R, ApiError>) -> Result<R, ApiError> {
        let cell = self.session_cell(id)?;
        let s = cell.read().unwrap();
        f(&s).map_err(|e| e.at(&s.generation))
    }

    fn write_session<R>(&self, id: &str, f: impl FnOnce(&mut Session, &Corpus) -> Result<R, ApiError>) -> Result<(R, String), ApiError> {
        let cell = self.session_cell(id)?;
        let mut guard = cell.write().unwrap();
        let corpus = self.corpus_for(&guard)?;
        let mut next = guard.clone();
        let r = f(&mut next, &corpus).map_err(|e| e.at(&next.generation))?;
        self.sessions.save(&next)?;
        let generation = next.generation.clone();
        *guard = next;
        Ok((r, generation))
    }

    fn translit_run(&self, id: &str) -> Result<Arc<TranslitRun>, ApiError> {
        self.translit_runs
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no transliteration run {id}")))
    }

    fn disambig_run(&self, id: &str) -> Result<Arc<DisambigRun>, ApiError> {
        self.disambig_runs
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no disambiguation run {id}")))
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(|| async { Json(json!({ "generation": null, "data": { "status": "ok" } })) }))
        .route("/api/corpora", get(corpora_list))
        .route("/api/corpora/{name}", get(corpus_stats))
        .route("/api/corpora/{name}/docs", get(corpus_docs))
        .route("/api/corpora/{name}/kwic", get(kwic))
        .route("/api/corpora/{name}/timeseries", get(timeseries))
        .route("/api/corpora/{name}/collocations", get(collocations))
        .route("/api/corpora/{name}/period-table", get(period_table))
        .route("/api/corpora/{name}/rates", get(rates))
        .route("/api/corpora/{name}/presence", get(presence))
        .route("/api/corpora/{name}/pseudowords", get(pseudowords))
        .route("/api/corpora/{name}/chart-data/{preset}", get(chart_data))
        .route("/api/sessions", get(sessions_list).post(session_create))
        .route("/api/sessions/{id}", get(session_get).delete(session_delete))
        .route("/api/sessions/{id}/log", get(session_log))
        .route("/api/sessions/{id}/lists", post(session_list_create))
        .route("/api/sessions/{id}/keywords", post(session_keyword_add))
        .route("/api/sessions/{id}/search", post(session_search))
        .route("/api/sessions/{id}/marks", get(session_marks).post(session_mark))
        .route("/api/sessions/{id}/unmark", post(session_unmark))
        .route("/api/sessions/{id}/suggestions", get(session_suggestions))
        .route("/api/sessions/{id}/report", get(session_report_get).post(session_report_post))
        .route("/api/sessions/{id}/health", get(session_health))
        .route("/api/translit/runs", get(translit_list).post(translit_create))
        .route("/api/translit/runs/{id}", get(translit_get))
        .route("/api/translit/runs/{id}/ranked", get(translit_ranked))
        .route("/api/translit/runs/{id}/candidates", get(translit_candidates))
        .route("/api/disambig/runs", get(disambig_list).post(disambig_create))
        .route("/api/disambig/runs/{id}", get(disambig_get))
        .route("/api/disambig/runs/{id}/pairs", get(disambig_pairs))
        .route("/api/disambig/runs/{id}/pairs/{pair_id}", get(disambig_pair))
        .route("/api/disambig/runs/{id}/review-queue", get(disambig_queue))
        .route("/api/disambig/runs/{id}/judgments", get(judgments_list).post(judgment_submit))
        .route("/api/disambig/runs/{id}/judgments/export", get(judgments_export))
        .route("/api/disambig/runs/{id}/judgments/import", post(judgments_import))
        .route("/api/disambig/runs/{id}/metrics", post(disambig_metrics))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state)
}

// ---- corpora ----

#[derive(Deserialize)]
struct PageQ {
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn corpora_list(State(st): State<Arc<AppState>>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let all: Vec<Value> = st
        .corpora
        .iter()
        .map(|(n, c)| json!({ "name": n, "stats": c.stats() }))
        .collect();
    let generations: BTreeMap<&str, &str> = st.corpora.iter().map(|(n, c)| (n.as_str(), c.generation())).collect();
    Ok(Json(json!({ "generation": null, "generations": generations, "data": page(&all, p.offset, p.limit) })).into_response())
}

async fn corpus_stats(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>) -> ApiResult {
    let c = st.corpus(&name)?;
    reply(Some(c.generation()), c.stats())
}

async fn corpus_docs(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let c = st.corpus(&name)?;
    let docs: Vec<Value> = c
        .docs()
        .iter()
        .map(|d| {
            json!({
                "doc_id": d.doc_id, "title": d.title, "collection": d.collection, "date": d.date,
                "chars": d.len(), "sentences": d.sentences.len(), "chapters": d.chapters.len(),
            })
        })
        .collect();
    reply(Some(c.generation()), page(&docs, p.offset, p.limit))
}

#[derive(Deserialize)]
struct KwicQ {
    kw: String,
    width: Option<usize>,
    docs: Option<String>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn kwic(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<KwicQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let p = q(p).map_err(|e| e.at(g))?;
    let docs = docs_list(&p.docs);
    let hits = kwic_search(&c, analytics::scope(&docs), &KeywordSet::parse(&p.kw)?, p.width.unwrap_or(DEFAULT_CONTEXT_WIDTH))
        .map_err(|e| ApiError::from(e).at(g))?;
    reply(Some(g), page(&hits, p.offset, p.limit))
}

#[derive(Deserialize)]
struct SeriesQ {
    kw: String,
    bucket: Option<String>,
    docs: Option<String>,
}

async fn timeseries(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<SeriesQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let docs = docs_list(&p.docs);
        let bucketing = Bucketing::parse(p.bucket.as_deref().unwrap_or("year"))?;
        Ok(keyword_timeseries(&c, analytics::scope(&docs), &KeywordSet::parse(&p.kw)?, &bucketing)?)
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct CollocQ {
    members: String,
    window: Option<String>,
    bucket: Option<String>,
    docs: Option<String>,
}

async fn collocations(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<CollocQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let docs = docs_list(&p.docs);
        let members = analytics::parse_sets(&p.members)?;
        let window = Window::parse(p.window.as_deref().unwrap_or("sentence"))?;
        let bucketing = Bucketing::parse(p.bucket.as_deref().unwrap_or("year"))?;
        Ok(collocation_timeseries(&c, analytics::scope(&docs), &members, window, &bucketing)?)
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct TableQ {
    anchor: String,
    periods: String,
    top_k: Option<usize>,
    min_len: Option<usize>,
    max_len: Option<usize>,
    min_freq: Option<usize>,
    rank_by: Option<String>,
}

async fn period_table(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<TableQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let extract = ExtractConfig::band(p.min_len.unwrap_or(2), p.max_len.unwrap_or(4), p.min_freq.unwrap_or(2));
        Ok(period_collocation_table(
            &c,
            &KeywordSet::parse(&p.anchor)?,
            &parse_periods(&p.periods)?,
            p.top_k.unwrap_or(20),
            &extract,
            parse_rank_by(p.rank_by.as_deref().unwrap_or("peak"))?,
        )?)
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct RateQ {
    subjects: String,
    event: String,
    gap: Option<usize>,
    bucket: Option<String>,
    docs: Option<String>,
}

async fn rates(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<RateQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let docs = docs_list(&p.docs);
        let event = KeywordSet::parse(&p.event)?;
        let bucketing = Bucketing::parse(p.bucket.as_deref().unwrap_or("chapter"))?;
        let series = analytics::parse_sets(&p.subjects)?
            .iter()
            .map(|s| normalized_event_rate(&c, analytics::scope(&docs), s, &event, p.gap.unwrap_or(0), &bucketing))
            .collect::<wenxian_core::Result<Vec<_>>>()?;
        Ok(series)
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct PresenceQ {
    doc: String,
    entities: String,
    masters: Option<String>,
}

async fn presence(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<PresenceQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let m = presence_matrix(&c, &p.doc, &analytics::parse_sets(&p.entities)?)?;
        let Some(spec) = p.masters.filter(|s| !s.trim().is_empty()) else {
            return Ok(json!({ "matrix": m }));
        };
        let specs: Vec<String> = spec.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect();
        let (sets, ranks) = analytics::masters(&specs)?;
        let mm = presence_matrix(&c, &p.doc, &sets)?;
        let power = power_proxy(&m, &mm, &ranks)?;
        Ok(json!({ "matrix": m, "masters": mm, "power": power }))
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct PseudoQ {
    min_len: Option<usize>,
    max_len: Option<usize>,
    min_freq: Option<usize>,
    prune: Option<bool>,
    docs: Option<String>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn pseudowords(State(st): State<Arc<AppState>>, UrlPath(name): UrlPath<String>, p: Result<Query<PseudoQ>, QueryRejection>) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let run = || -> Result<_, ApiError> {
        let p = q(p)?;
        let docs = docs_list(&p.docs);
        let cfg = ExtractConfig::band(p.min_len.unwrap_or(2), p.max_len.unwrap_or(8), p.min_freq.unwrap_or(2));
        let mut words = extract_repeated_strings(&c, analytics::scope(&docs), &cfg)?;
        if p.prune.unwrap_or(false) {
            words = prune_subsumed(&words);
            sort_words(&mut words);
        }
        Ok(page(&words, p.offset, p.limit))
    };
    reply(Some(g), run().map_err(|e| e.at(g))?)
}

#[derive(Deserialize)]
struct ChartQ {
    doc: Option<String>,
}

async fn chart_data(
    State(st): State<Arc<AppState>>,
    UrlPath((name, preset)): UrlPath<(String, String)>,
    p: Result<Query<ChartQ>, QueryRejection>,
) -> ApiResult {
    let c = st.corpus(&name)?;
    let g = c.generation();
    let p = q(p).map_err(|e| e.at(g))?;
    match preset.as_str() {
        "drc-smiles" => reply(Some(g), drc_smiles(&c, p.doc.as_deref()).map_err(|e| ApiError::from(e).at(g))?),
        other => Err(ApiError::not_found(format!("no chart preset {other}")).at(g)),
    }
}

// ---- sessions ----

async fn sessions_list(State(st): State<Arc<AppState>>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    reply(None, page(&st.sessions.list()?, p.offset, p.limit))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    session_id: String,
    corpus: String,
}

fn session_view(s: &Session, st: &AppState) -> Value {
    let stale = st.corpus_for(s).is_err();
    json!({ "session": s, "stale": stale })
}

async fn session_create(State(st): State<Arc<AppState>>, b: Result<Json<CreateSession>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let c = st.corpus(&b.corpus)?;
    let mut cells = st.session_cells.lock().unwrap();
    if cells.contains_key(&b.session_id) || st.sessions.exists(&b.session_id) {
        return Err(ApiError::new(StatusCode::CONFLICT, "exists", format!("session {} exists", b.session_id)).at(c.generation()));
    }
    let s = Session::new(&b.session_id, &c).map_err(|e| ApiError::from(e).at(c.generation()))?;
    st.sessions.save(&s)?;
    let view = session_view(&s, &st);
    cells.insert(b.session_id, Arc::new(RwLock::new(s)));
    Ok((StatusCode::CREATED, Json(json!({ "generation": c.generation(), "data": view }))).into_response())
}

async fn session_get(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let (view, g) = st.read_session(&id, |s| Ok((session_view(s, &st), s.generation.clone())))?;
    reply(Some(&g), view)
}

async fn session_delete(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let mut cells = st.session_cells.lock().unwrap();
    if !cells.contains_key(&id) && !st.sessions.exists(&id) {
        return Err(ApiError::not_found(format!("no session {id}")));
    }
    let g = match cells.remove(&id) {
        Some(cell) => {
            let s = cell.write().unwrap();
            st.sessions.delete(&id)?;
            s.generation.clone()
        }
        None => {
            let g = st.sessions.load(&id)?.generation;
            st.sessions.delete(&id)?;
            g
        }
    };
    reply(Some(&g), json!({ "deleted": id }))
}

async fn session_log(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let (v, g) = st.read_session(&id, |s| Ok((page(&s.log, p.offset, p.limit), s.generation.clone())))?;
    reply(Some(&g), v)
}

async fn session_marks(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let (v, g) = st.read_session(&id, |s| Ok((page(&s.marks, p.offset, p.limit), s.generation.clone())))?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ListBody {
    name: String,
}

async fn session_list_create(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<ListBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (v, g) = st.write_session(&id, |s, c| {
        s.create_list(c, &b.name)?;
        Ok(session_view(s, &st))
    })?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KeywordBody {
    list: String,
    surface: String,
    provenance: Provenance,
}

async fn session_keyword_add(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<KeywordBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (v, g) = st.write_session(&id, |s, c| {
        s.add_keyword(c, &b.list, &b.surface, b.provenance)?;
        Ok(session_view(s, &st))
    })?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchBody {
    list: String,
    width: Option<usize>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn session_search(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<SearchBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (v, g) = st.write_session(&id, |s, c| {
        let hits = s.search(c, &b.list, b.width.unwrap_or(DEFAULT_CONTEXT_WIDTH))?;
        let rows: Vec<Value> = hits
            .iter()
            .map(|h| json!({ "hit": h, "mark": s.mark_for(&h.hit_ref()) }))
            .collect();
        Ok(json!({ "counts": s.last_hits, "hits": page(&rows, b.offset, b.limit) }))
    })?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkBody {
    hit: HitRef,
    label: MarkLabel,
    #[serde(default)]
    note: String,
    #[serde(default)]
    answer_surface: Option<String>,
}

async fn session_mark(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<MarkBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (v, g) = st.write_session(&id, |s, c| {
        s.mark(
            c,
            MarkedStatement {
                hit: b.hit,
                label: b.label,
                note: b.note,
                answer_surface: b.answer_surface,
            },
        )?;
        Ok(json!({ "marks": s.marks.len(), "seq": s.log.last().map(|e| e.seq) }))
    })?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UnmarkBody {
    hit: HitRef,
}

async fn session_unmark(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<UnmarkBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let (v, g) = st.write_session(&id, |s, c| {
        s.apply(c, Action::Unmark { hit: b.hit })?;
        Ok(json!({ "marks": s.marks.len(), "seq": s.log.last().map(|e| e.seq) }))
    })?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
struct SuggestQ {
    top_k: Option<usize>,
    min_len: Option<usize>,
    max_len: Option<usize>,
}

async fn session_suggestions(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<SuggestQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let mut cfg = st.cfg.suggest.clone();
    cfg.top_k = p.top_k.unwrap_or(cfg.top_k);
    cfg.min_len = p.min_len.unwrap_or(cfg.min_len);
    cfg.max_len = p.max_len.unwrap_or(cfg.max_len);
    let (v, g) = st.read_session(&id, |s| {
        let c = st.corpus_for(s)?;
        Ok((suggest_keywords(s, &c, &cfg)?, s.generation.clone()))
    })?;
    reply(Some(&g), v)
}

async fn session_report_get(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let (v, g) = st.read_session(&id, |s| Ok((session_report(s, None), s.generation.clone())))?;
    reply(Some(&g), v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportBody {
    gold: Vec<String>,
}

async fn session_report_post(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<ReportBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let gold = GoldSet::parse(&b.gold.join("\n"))?;
    let (v, g) = st.read_session(&id, |s| Ok((session_report(s, Some(&gold)), s.generation.clone())))?;
    reply(Some(&g), v)
}

async fn session_health(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let (v, g) = st.read_session(&id, |s| {
        let c = st.corpus_for(s)?;
        Ok((health_panel(s, &c)?, s.generation.clone()))
    })?;
    reply(Some(&g), v)
}

// ---- transliteration ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslitBody {
    target: String,
    contrast: Option<String>,
    train: Option<String>,
    #[serde(default)]
    train_gold: Vec<GoldSpan>,
    eval_gold: Option<Vec<String>>,
    config: Option<TranslitConfig>,
}

fn translit_summary(r: &TranslitRun) -> Value {
    json!({
        "run_id": r.id,
        "target": r.target,
        "stages": r.run.stages,
        "report": r.run.report,
        "warnings": r.run.warnings,
        "ranked": r.run.ranked.len(),
        "top_features": r.run.model.as_ref().map(|m| m.top_features(20)),
    })
}

async fn translit_create(State(st): State<Arc<AppState>>, b: Result<Json<TranslitBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let target = st.corpus(&b.target)?;
    let g = target.generation().to_string();
    let contrast = b.contrast.as_deref().map(|n| st.corpus(n)).transpose()?;
    let train = b.train.as_deref().map(|n| st.corpus(n)).transpose()?;
    let cfg = b.config.unwrap_or_else(|| st.cfg.translit.clone());
    let id = run_id(
        "t",
        &json!({
            "target": g,
            "contrast": contrast.as_ref().map(|c| c.generation()),
            "train": train.as_ref().map(|c| c.generation()),
            "train_gold": b.train_gold,
            "eval_gold": b.eval_gold,
            "config": cfg,
        }),
    );
    if let Ok(existing) = st.translit_run(&id) {
        return reply(Some(&g), translit_summary(&existing));
    }
    let gold = GoldSpans { spans: b.train_gold };
    let training = match &train {
        Some(corpus) if !gold.spans.is_empty() => Some(TrainingSet { corpus, gold: &gold }),
        Some(_) => return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_argument", "train needs train_gold").at(&g)),
        None => None,
    };
    let eval: Option<BTreeSet<String>> = b.eval_gold.map(|v| v.into_iter().collect());
    let run = run_pipeline(&target, contrast.as_deref(), training, eval.as_ref(), &cfg).map_err(|e| ApiError::from(e).at(&g))?;
    let r = Arc::new(TranslitRun {
        id: id.clone(),
        target: b.target,
        generation: g.clone(),
        run,
    });
    st.translit_runs.write().unwrap().entry(id).or_insert_with(|| r.clone());
    Ok((StatusCode::CREATED, Json(json!({ "generation": g, "data": translit_summary(&r) }))).into_response())
}

async fn translit_list(State(st): State<Arc<AppState>>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let all: Vec<Value> = st
        .translit_runs
        .read()
        .unwrap()
        .values()
        .map(|r| json!({ "run_id": r.id, "target": r.target, "generation": r.generation }))
        .collect();
    reply(None, page(&all, p.offset, p.limit))
}

async fn translit_get(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let r = st.translit_run(&id)?;
    reply(Some(&r.generation), translit_summary(&r))
}

async fn translit_ranked(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let r = st.translit_run(&id)?;
    reply(Some(&r.generation), page(&r.run.ranked, p.offset, p.limit))
}

#[derive(Deserialize)]
struct CandQ {
    /// `generated`, `dropped` or `survived`.
    state: Option<String>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn translit_candidates(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<CandQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let r = st.translit_run(&id)?;
    let keep = |s: &FilterState| match p.state.as_deref() {
        None => true,
        Some("generated") => matches!(s, FilterState::Generated),
        Some("dropped") => matches!(s, FilterState::DroppedBy(_)),
        Some("survived") => matches!(s, FilterState::Survived),
        Some(_) => false,
    };
    if let Some(s) = p.state.as_deref().filter(|s| !matches!(*s, "generated" | "dropped" | "survived")) {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_argument", format!("unknown state {s}")).at(&r.generation));
    }
    let cands: Vec<_> = r.run.candidates.iter().filter(|c| keep(&c.filter_state)).collect();
    reply(Some(&r.generation), page(&cands, p.offset, p.limit))
}

// ---- disambiguation ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DisambigBody {
    records: Option<Vec<NameRecord>>,
    records_path: Option<PathBuf>,
    /// A configured gazetteer name, or a path.
    gazetteer: Option<String>,
    config: Option<DisambigConfig>,
}

fn disambig_summary(r: &DisambigRun) -> Value {
    let judged = r.judgments.read().unwrap().len();
    json!({
        "run_id": r.id,
        "records": r.report.records,
        "names": r.report.names,
        "pairs": r.report.pairs.len(),
        "verdicts": r.report.verdicts,
        "nonzero_total": r.report.nonzero_total,
        "nonzero_agreement": r.report.nonzero_agreement,
        "review_queue": r.report.review_queue.len(),
        "judged": judged,
    })
}

async fn disambig_create(State(st): State<Arc<AppState>>, b: Result<Json<DisambigBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let dd = Some(st.data_dir.as_path());
    let records = match (b.records, b.records_path) {
        (Some(r), None) => r,
        (None, Some(p)) => read_records(&resolve_input(dd, &p)?)?,
        _ => return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_argument", "give exactly one of records, records_path")),
    };
    let gaz = match &b.gazetteer {
        Some(g) => {
            let path = match st.cfg.gazetteers.get(g) {
                Some(p) => p.clone(),
                None => resolve_input(dd, Path::new(g))?,
            };
            Some(Gazetteer::load_tsv(fs::File::open(path)?)?)
        }
        None => None,
    };
    let cfg = b.config.unwrap_or_else(|| st.cfg.disambig.clone());
    let id = run_id("d", &json!({ "records": records, "gazetteer": gaz.as_ref().map(|g| g.places()), "config": cfg }));
    if let Ok(existing) = st.disambig_run(&id) {
        return reply(None, disambig_summary(&existing));
    }
    let report = run_disambiguation(&records, gaz.as_ref(), &cfg)?;
    let path = st.judgments_dir.join(format!("{id}.tsv"));
    let mut judgments = BTreeMap::new();
    if path.exists() {
        for j in read_judgments(fs::File::open(&path)?)? {
            judgments.insert(j.pair_id.clone(), j);
        }
    }
    let run = Arc::new(DisambigRun {
        id: id.clone(),
        records,
        report,
        judgments: RwLock::new(judgments),
        path,
    });
    let run = st.disambig_runs.write().unwrap().entry(id).or_insert(run).clone();
    Ok((StatusCode::CREATED, Json(json!({ "generation": null, "data": disambig_summary(&run) }))).into_response())
}

async fn disambig_list(State(st): State<Arc<AppState>>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let all: Vec<Value> = st.disambig_runs.read().unwrap().values().map(|r| disambig_summary(r)).collect();
    reply(None, page(&all, p.offset, p.limit))
}

async fn disambig_get(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let r = st.disambig_run(&id)?;
    reply(None, disambig_summary(&r))
}

#[derive(Deserialize)]
struct PairsQ {
    verdict: Option<Verdict>,
    offset: Option<usize>,
    limit: Option<usize>,
}

async fn disambig_pairs(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PairsQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let r = st.disambig_run(&id)?;
    let pairs: Vec<_> = r.report.pairs.iter().filter(|s| p.verdict.map_or(true, |v| s.verdict == v)).collect();
    reply(None, page(&pairs, p.offset, p.limit))
}

async fn disambig_pair(State(st): State<Arc<AppState>>, UrlPath((id, pair_id)): UrlPath<(String, String)>) -> ApiResult {
    let r = st.disambig_run(&id)?;
    let score = r
        .report
        .pairs
        .iter()
        .find(|s| s.pair_id() == pair_id)
        .ok_or_else(|| ApiError::not_found(format!("no pair {pair_id}")))?;
    let rec = |rid: &str| r.records.iter().find(|x| x.record_id == rid);
    let judgment = r.judgments.read().unwrap().get(&pair_id).cloned();
    reply(None, json!({ "score": score, "a": rec(&score.a), "b": rec(&score.b), "judgment": judgment }))
}

async fn disambig_queue(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let r = st.disambig_run(&id)?;
    let judged = r.judgments.read().unwrap();
    let open: Vec<_> = r.report.review_queue.iter().filter(|i| !judged.contains_key(&i.pair_id)).collect();
    reply(None, page(&open, p.offset, p.limit))
}

async fn judgments_list(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, p: Result<Query<PageQ>, QueryRejection>) -> ApiResult {
    let p = q(p)?;
    let r = st.disambig_run(&id)?;
    let all: Vec<Judgment> = r.judgments.read().unwrap().values().cloned().collect();
    reply(None, page(&all, p.offset, p.limit))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JudgmentBody {
    pair_id: String,
    verdict: HumanVerdict,
    #[serde(default)]
    note: String,
}

async fn judgment_submit(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<JudgmentBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let r = st.disambig_run(&id)?;
    if !r.report.pairs.iter().any(|p| p.pair_id() == b.pair_id) {
        return Err(ApiError::not_found(format!("no pair {}", b.pair_id)));
    }
    let j = Judgment {
        pair_id: b.pair_id,
        verdict: b.verdict,
        note: b.note,
    };
    let mut js = r.judgments.write().unwrap();
    let changed = js.get(&j.pair_id) != Some(&j);
    if changed {
        let mut next = js.clone();
        next.insert(j.pair_id.clone(), j.clone());
        r.persist(&next)?;
        *js = next;
    }
    reply(None, json!({ "judgment": j, "changed": changed, "judged": js.len() }))
}

async fn judgments_export(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let r = st.disambig_run(&id)?;
    let list: Vec<Judgment> = r.judgments.read().unwrap().values().cloned().collect();
    let mut buf = Vec::new();
    write_judgments(&list, &mut buf)?;
    reply(None, json!({ "tsv": String::from_utf8_lossy(&buf) }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ImportBody {
    tsv: String,
}

/// Replaces the judged set with the file's contents.
async fn judgments_import(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<ImportBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let r = st.disambig_run(&id)?;
    let list = read_judgments(b.tsv.as_bytes())?;
    let known = r.pair_ids();
    if let Some(j) = list.iter().find(|j| !known.contains(&j.pair_id)) {
        return Err(ApiError::not_found(format!("no pair {}", j.pair_id)));
    }
    let next: BTreeMap<String, Judgment> = list.into_iter().map(|j| (j.pair_id.clone(), j)).collect();
    let mut js = r.judgments.write().unwrap();
    r.persist(&next)?;
    *js = next;
    reply(None, json!({ "judged": js.len() }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricsBody {
    /// record_id → cluster id
    truth: HashMap<String, String>,
    #[serde(default = "yes")]
    with_judgments: bool,
}

fn yes() -> bool {
    true
}

async fn disambig_metrics(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>, b: Result<Json<MetricsBody>, JsonRejection>) -> ApiResult {
    let b = body(b)?;
    let r = st.disambig_run(&id)?;
    let js: Vec<Judgment> = if b.with_judgments {
        r.judgments.read().unwrap().values().cloned().collect()
    } else {
        Vec::new()
    };
    reply(None, pairwise_metrics(&r.records, &r.report, &js, &b.truth))
}

