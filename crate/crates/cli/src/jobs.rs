//! The batch subcommands.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use wenxian_core::concordance::{kwic_search, session_report, GoldSet, SessionStore};
use wenxian_core::corpus::io::{load_path, save_generation};
use wenxian_core::corpus::{ChapterMarkers, Corpus, CorpusBuilder, DocMeta, IngestConfig};
use wenxian_core::disambig::{read_records_jsonl, read_records_tsv, run_disambiguation, write_records_tsv, write_review_queue, NameRecord};
use wenxian_core::gazetteer::Gazetteer;
use wenxian_core::ngram::{extract_repeated_strings, prune_subsumed, sort_words, write_tsv, ExtractConfig};
use wenxian_core::synth;
use wenxian_core::temporal::{
    collocation_timeseries, keyword_timeseries, normalized_event_rate, period_collocation_table, parse_periods,
    power_proxy, presence_matrix, write_rates_tsv, Bucketing, KeywordSet, RankBy, Window,
};
use wenxian_core::translit::{run_pipeline, write_ranked_tsv, GoldSpans, TrainingSet};

use crate::analytics::{self, drc_smiles, write_chart_tsv, write_kwic_tsv};
use crate::args::*;
use crate::config::{resolve_input, Config};
use crate::error::{CliError, Result};
use crate::service::{self, AppState};

pub struct Ctx {
    pub cfg: Config,
    pub data_dir: Option<PathBuf>,
}

impl Ctx {
    pub fn from_cli(cli: &Cli) -> Result<Self> {
        let cfg = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        let data_dir = cli.data_dir.clone().or_else(|| cfg.data_dir.clone());
        Ok(Ctx { cfg, data_dir })
    }

    pub fn input(&self, p: &Path) -> Result<PathBuf> {
        resolve_input(self.data_dir.as_deref(), p)
    }

    pub fn corpus(&self, p: &Path) -> Result<Corpus> {
        Ok(load_path(&self.input(p)?, IngestConfig::default())?.0)
    }

    fn data_dir(&self) -> Result<&Path> {
        self.data_dir
            .as_deref()
            .ok_or_else(|| CliError::Usage("no data directory: pass --data-dir or set WENXIAN_DATA_DIR".into()))
    }

    pub fn sessions(&self) -> Result<SessionStore> {
        Ok(SessionStore::open(self.data_dir()?.join("sessions"))?)
    }
}

/// Writes via a temporary file and a rename; refuses to clobber without `force`.
pub fn write_file(path: &Path, force: bool, bytes: &[u8]) -> Result<()> {
    if path.exists() && !force {
        return Err(CliError::OutputExists(path.to_path_buf()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn emit(out: &OutArgs, bytes: &[u8]) -> Result<()> {
    match &out.out {
        Some(p) => write_file(p, out.force, bytes),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            so.flush()?;
            Ok(())
        }
    }
}

fn json_bytes<T: Serialize + ?Sized>(v: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v).map_err(wenxian_core::Error::from)?;
    b.push(b'\n');
    Ok(b)
}

fn tsv<F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(f: F) -> Result<Vec<u8>> {
    let mut b = Vec::new();
    f(&mut b)?;
    Ok(b)
}

fn render<T: Serialize, F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>>(format: Format, value: &T, f: F) -> Result<Vec<u8>> {
    match format {
        Format::Json => json_bytes(value),
        Format::Tsv => tsv(f),
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::from_cli(&cli)?;
    match cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Stats(a) => {
            let c = ctx.corpus(&a.corpus)?;
            emit(&a.out, &json_bytes(&c.stats())?)
        }
        Command::Freq(a) => {
            let c = ctx.corpus(&a.corpus)?;
            let ts = keyword_timeseries(&c, analytics::scope(&a.scope.docs), &KeywordSet::parse(&a.kw)?, &Bucketing::parse(&a.bucket)?)?;
            emit(&a.out, &render(a.format, &ts, |w| ts.write_tsv(w))?)
        }
        Command::Colloc(a) => colloc(&ctx, a),
        Command::Pseudowords(a) => {
            let c = ctx.corpus(&a.corpus)?;
            let mut words = extract_repeated_strings(&c, analytics::scope(&a.scope.docs), &ExtractConfig::band(a.min_len, a.max_len, a.min_freq))?;
            if a.prune {
                words = prune_subsumed(&words);
                sort_words(&mut words);
            }
            emit(&a.out, &render(a.format, &words, |w| write_tsv(&words, w))?)
        }
        Command::Kwic(a) => {
            let c = ctx.corpus(&a.corpus)?;
            let hits = kwic_search(&c, analytics::scope(&a.scope.docs), &KeywordSet::parse(&a.kw)?, a.width)?;
            emit(&a.out, &render(a.format, &hits, |w| write_kwic_tsv(&hits, w))?)
        }
        Command::Rate(a) => {
            let c = ctx.corpus(&a.corpus)?;
            let event = KeywordSet::parse(&a.event)?;
            let bucketing = Bucketing::parse(&a.bucket)?;
            let series = a
                .subjects
                .iter()
                .map(|s| normalized_event_rate(&c, analytics::scope(&a.scope.docs), &KeywordSet::parse(s)?, &event, a.gap, &bucketing))
                .collect::<wenxian_core::Result<Vec<_>>>()?;
            emit(&a.out, &render(a.format, &series, |w| write_rates_tsv(&series, w))?)
        }
        Command::Presence(a) => presence(&ctx, a),
        Command::Translit(a) => translit(&ctx, a),
        Command::Disambig(a) => disambig(&ctx, a),
        Command::Serve(a) => serve(ctx, a),
        Command::ChartData(a) => {
            let c = ctx.corpus(&a.corpus)?;
            let rows = match a.preset {
                Preset::DrcSmiles => drc_smiles(&c, a.doc.as_deref())?,
            };
            emit(&a.out, &render(a.format, &rows, |w| write_chart_tsv(&rows, w))?)
        }
        Command::Sessions(s) => sessions(&ctx, s),
        Command::Fixture(f) => fixture(f),
    }
}

fn ingest(ctx: &Ctx, a: IngestArgs) -> Result<()> {
    let mut config = IngestConfig::default();
    if let Some(n) = a.chunk_len {
        config.chunk_len = n;
    }
    let mut b = CorpusBuilder::new(config);
    let mut reports = Vec::new();
    for input in &a.inputs {
        let p = ctx.input(input)?;
        let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
        if matches!(ext, "json" | "jsonl" | "tsv") {
            let (c, _) = load_path(&p, config)?;
            for d in c.docs() {
                reports.push(b.push(d.clone())?);
            }
        } else {
            let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or("doc").to_string();
            let mut meta = DocMeta::new(id);
            if let Some(pat) = &a.chapter_pattern {
                meta = meta.with_chapters(ChapterMarkers::Pattern(pat.clone()));
            }
            reports.push(b.ingest(&fs::read(&p)?, meta)?);
        }
    }
    let corpus = b.build();
    let mut buf = Vec::new();
    save_generation(&corpus, &mut buf)?;
    emit(&a.out, &buf)?;
    if a.out.out.is_some() {
        let summary = json!({ "generation": corpus.generation(), "documents": reports });
        eprintln!("{summary}");
    }
    Ok(())
}

fn colloc(ctx: &Ctx, a: CollocArgs) -> Result<()> {
    let c = ctx.corpus(&a.corpus)?;
    if let Some(anchor) = &a.anchor {
        let periods = parse_periods(a.periods.as_deref().unwrap_or_default())?;
        let rank_by = parse_rank_by(&a.rank_by)?;
        let table = period_collocation_table(
            &c,
            &KeywordSet::parse(anchor)?,
            &periods,
            a.top_k,
            &ExtractConfig::band(a.min_len, a.max_len, a.min_freq),
            rank_by,
        )?;
        return emit(&a.out, &render(a.format, &table, |w| table.write_tsv(w))?);
    }
    if a.members.len() < 2 {
        return Err(CliError::Usage("colloc needs --anchor or at least two --member sets".into()));
    }
    let members = a.members.iter().map(|m| KeywordSet::parse(m)).collect::<wenxian_core::Result<Vec<_>>>()?;
    let s = collocation_timeseries(&c, analytics::scope(&a.scope.docs), &members, Window::parse(&a.window)?, &Bucketing::parse(&a.bucket)?)?;
    emit(&a.out, &render(a.format, &s, |w| s.series.write_tsv(w))?)
}

pub fn parse_rank_by(spec: &str) -> wenxian_core::Result<RankBy> {
    match spec {
        "peak" => Ok(RankBy::Peak),
        n => n
            .parse()
            .map(RankBy::Period)
            .map_err(|_| wenxian_core::Error::InvalidArgument(format!("rank_by must be peak or a period index, not {n}"))),
    }
}

fn presence(ctx: &Ctx, a: PresenceArgs) -> Result<()> {
    let c = ctx.corpus(&a.corpus)?;
    let entities = a.entities.iter().map(|e| KeywordSet::parse(e)).collect::<wenxian_core::Result<Vec<_>>>()?;
    let m = presence_matrix(&c, &a.doc, &entities)?;
    if a.masters.is_empty() {
        return emit(&a.out, &render(a.format, &m, |w| m.write_tsv(w))?);
    }
    let (sets, ranks) = analytics::masters(&a.masters)?;
    let mm = presence_matrix(&c, &a.doc, &sets)?;
    let ranked = power_proxy(&m, &mm, &ranks)?;
    let value = json!({ "entities": m, "masters": mm, "power": ranked });
    emit(
        &a.out,
        &render(a.format, &value, |w| {
            writeln!(w, "entity\tproxy\tco_present_masters\tsupporting_chapters")?;
            for r in &ranked {
                let chs: Vec<String> = r.supporting_chapters.iter().map(|c| c.to_string()).collect();
                writeln!(w, "{}\t{}\t{}\t{}", r.monster, r.proxy, r.co_present_masters.join("|"), chs.join(","))?;
            }
            Ok(())
        })?,
    )
}

fn read_gold(ctx: &Ctx, p: &Path) -> Result<GoldSpans> {
    Ok(GoldSpans::read_tsv(fs::File::open(ctx.input(p)?)?)?)
}

fn translit(ctx: &Ctx, a: TranslitArgs) -> Result<()> {
    let mut cfg = ctx.cfg.translit.clone();
    if let Some(inv) = &a.inventory {
        cfg.inventory_path = Some(ctx.input(inv)?);
    }
    if let Some(seed) = a.seed {
        cfg.train.seed = seed;
    }
    let target = ctx.corpus(&a.corpus)?;
    let contrast = a.contrast.as_deref().map(|p| ctx.corpus(p)).transpose()?;
    let train = a.train.as_deref().map(|p| ctx.corpus(p)).transpose()?;
    let train_gold = a.train_gold.as_deref().map(|p| read_gold(ctx, p)).transpose()?;
    let eval_gold: Option<BTreeSet<String>> = a.gold.as_deref().map(|p| read_gold(ctx, p)).transpose()?.map(|g| g.surfaces());
    if a.report.as_ref().is_some_and(|r| r.exists() && !a.out.force) {
        return Err(CliError::OutputExists(a.report.clone().unwrap()));
    }
    let training = match (&train, &train_gold) {
        (Some(corpus), Some(gold)) => Some(TrainingSet { corpus, gold }),
        _ => None,
    };
    let run = run_pipeline(&target, contrast.as_ref(), training, eval_gold.as_ref(), &cfg)?;
    emit(&a.out, &tsv(|w| write_ranked_tsv(&run.ranked, w))?)?;
    if let Some(r) = &a.report {
        let summary = json!({
            "generation": target.generation(),
            "stages": run.stages,
            "report": run.report,
            "warnings": run.warnings,
            "top_features": run.model.as_ref().map(|m| m.top_features(20)),
        });
        write_file(r, a.out.force, &json_bytes(&summary)?)?;
    }
    Ok(())
}

pub fn read_records(path: &Path) -> Result<Vec<NameRecord>> {
    let f = fs::File::open(path)?;
    Ok(match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") | Some("json") => read_records_jsonl(std::io::BufReader::new(f))?,
        _ => read_records_tsv(f)?,
    })
}

fn disambig(ctx: &Ctx, a: DisambigArgs) -> Result<()> {
    let records = read_records(&ctx.input(&a.records)?)?;
    let gaz = a
        .gazetteer
        .as_deref()
        .map(|p| -> Result<Gazetteer> { Ok(Gazetteer::load_tsv(fs::File::open(ctx.input(p)?)?)?) })
        .transpose()?;
    if a.review_queue.as_ref().is_some_and(|r| r.exists() && !a.out.force) {
        return Err(CliError::OutputExists(a.review_queue.clone().unwrap()));
    }
    let report = run_disambiguation(&records, gaz.as_ref(), &ctx.cfg.disambig)?;
    emit(&a.out, &json_bytes(&report)?)?;
    if let Some(q) = &a.review_queue {
        let mut buf = Vec::new();
        write_review_queue(&report.review_queue, &mut buf)?;
        write_file(q, a.out.force, &buf)?;
    }
    Ok(())
}

fn sessions(ctx: &Ctx, cmd: SessionsCommand) -> Result<()> {
    let store = ctx.sessions()?;
    let stdout = OutArgs { out: None, force: false };
    match cmd {
        SessionsCommand::List => emit(&stdout, &json_bytes(&store.list()?)?),
        SessionsCommand::Show { id } => emit(&stdout, &json_bytes(&store.load(&id)?)?),
        SessionsCommand::Report { id, gold, out } => {
            let s = store.load(&id)?;
            let gold = gold.as_deref().map(|p| -> Result<GoldSet> { Ok(GoldSet::load(&ctx.input(p)?)?) }).transpose()?;
            emit(&out, &json_bytes(&session_report(&s, gold.as_ref()))?)
        }
    }
}

fn ensure_dir(dir: &Path, force: bool, files: &[&str]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for f in files {
        let p = dir.join(f);
        if p.exists() && !force {
            return Err(CliError::OutputExists(p));
        }
    }
    Ok(())
}

fn generation_bytes(c: &Corpus) -> Result<Vec<u8>> {
    let mut b = Vec::new();
    save_generation(c, &mut b)?;
    Ok(b)
}

fn fixture(cmd: FixtureCommand) -> Result<()> {
    match cmd {
        FixtureCommand::Novel { seed, chapters, out } => {
            let text = synth::novel_like(seed, chapters, &analytics::DRC_SMILE_CHARACTERS, &[analytics::DRC_SMILE_EVENT]);
            let line = json!({ "id": format!("novel{seed}"), "text": text, "chapter_pattern": synth::CHAPTER_PATTERN });
            emit(&out, format!("{line}\n").as_bytes())
        }
        FixtureCommand::Translit { seed, dir, force } => {
            let files = ["target.json", "train.json", "contrast.json", "train_gold.tsv", "gold.tsv"];
            ensure_dir(&dir, force, &files)?;
            let f = synth::translit_fixture(seed, synth::TranslitFixtureParams::default())?;
            let gold = |g: &GoldSpans| -> Result<Vec<u8>> {
                let mut b = Vec::new();
                g.write_tsv(&mut b)?;
                Ok(b)
            };
            let bytes = [
                generation_bytes(&f.eval.corpus)?,
                generation_bytes(&f.train.corpus)?,
                generation_bytes(&f.contrast)?,
                gold(&f.train.gold)?,
                gold(&f.eval.gold)?,
            ];
            for (name, b) in files.iter().zip(bytes) {
                write_file(&dir.join(name), true, &b)?;
            }
            Ok(())
        }
        FixtureCommand::Disambig { seed, records, dir, force } => {
            let files = ["records.tsv", "gazetteer.tsv", "truth.tsv"];
            ensure_dir(&dir, force, &files)?;
            let f = synth::disambig_fixture(
                seed,
                synth::DisambigFixtureParams {
                    records,
                    ..Default::default()
                },
            )?;
            let mut rec = Vec::new();
            write_records_tsv(&f.records, &mut rec)?;
            let mut gaz = Vec::new();
            f.gazetteer.write_tsv(&mut gaz)?;
            let mut truth = String::from("record_id\tperson_id\n");
            let mut ids: Vec<_> = f.truth.iter().collect();
            ids.sort();
            for (r, p) in ids {
                truth.push_str(&format!("{r}\t{p}\n"));
            }
            for (name, b) in files.iter().zip([rec, gaz, truth.into_bytes()]) {
                write_file(&dir.join(name), true, &b)?;
            }
            Ok(())
        }
    }
}

fn serve(ctx: Ctx, a: ServeArgs) -> Result<()> {
    let mut corpora = Vec::new();
    let mut named = ctx.cfg.corpora.clone();
    for spec in &a.corpora {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--corpus {spec}: expected name=path")))?;
        named.insert(name.to_string(), PathBuf::from(path));
    }
    for (name, path) in &named {
        corpora.push((name.clone(), ctx.corpus(path)?));
    }
    let data_dir = ctx.data_dir()?.to_path_buf();
    let addr = a.addr.unwrap_or_else(|| ctx.cfg.service.addr.clone());
    let state = Arc::new(AppState::new(ctx.cfg.clone(), corpora, &data_dir)?);
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&addr).await?;
        eprintln!("{}", json!({ "listening": listener.local_addr()?.to_string() }));
        axum::serve(listener, service::router(state)).await
    })?;
    Ok(())
}

