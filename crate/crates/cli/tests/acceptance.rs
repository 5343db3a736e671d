//! Acceptance suite: one PASS/FAIL line per criterion, every value checked
//! against an oracle written here rather than taken from the library.
//!
//! The two public-domain novels are not bundled. Point `WENXIAN_JTTW` and
//! `WENXIAN_DRC` at plain UTF-8 texts (or `.jsonl` / stored `.json`) to run
//! those criteria for real; without them the line reads FAIL and the same
//! checks run on a synthetic stand-in so the machinery is still exercised.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;

use wenxian_core::concordance::{session_report, GoldSet, MarkLabel, MarkedStatement, Provenance, Session};
use wenxian_core::corpus::io::load_path;
use wenxian_core::corpus::{ChapterMarkers, Corpus, CorpusBuilder, DocMeta, IngestConfig, PartialDate, Scope};
use wenxian_core::disambig::{block_pairs, compare_pair, run_disambiguation, verdict, DisambigConfig, NameRecord, Source, Verdict};
use wenxian_core::gazetteer::{haversine_km, Coordinates, Gazetteer, Place, PlaceRelation, DEFAULT_NEAR_KM};
use wenxian_core::ngram::{extract_repeated_strings, ExtractConfig};
use wenxian_core::synth::{self, DisambigFixtureParams, TranslitFixtureParams, CHAPTER_PATTERN};
use wenxian_core::temporal::{collocation_timeseries, normalized_event_rate, presence_matrix, Bucket, Bucketing, KeywordSet, Window};
use wenxian_core::translit::{filtered_survivors, run_pipeline, TrainingSet, TranslitConfig};

// Pinned budgets and tolerances.
const COUNT_BUDGET: Duration = Duration::from_secs(60);
const TRANSLIT_BUDGET: Duration = Duration::from_secs(30);
const JTTW_INGEST_BUDGET: Duration = Duration::from_secs(10);
const JTTW_CJK_TARGET: f64 = 713_000.0;
const JTTW_CJK_TOL: f64 = 0.05;
const ANTIPODAL_KM: f64 = 20015.1;
const ANTIPODAL_TOL_KM: f64 = 0.1;
const BJ_SH_KM: f64 = 1067.0;
const BJ_SH_REL_TOL: f64 = 0.01;
const ORACLE_AGREEMENT_KM: f64 = 1e-6;
const MIN_RECALL: f64 = 0.90;
const MIN_P_AT_50: f64 = 0.80;
const MIN_PAIRWISE: f64 = 0.90;

enum Failure {
    /// The check ran and the property does not hold.
    Broken(String),
    /// Required input is not present; stand-in results are in the message.
    Unavailable(String),
}

type Check = Result<String, Failure>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(Failure::Broken(format!($($msg)+)));
        }
    };
}

fn broken<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Broken(e.to_string())
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

/// Overlapping occurrences of `q` in `text`.
fn naive_count(text: &[char], q: &[char]) -> usize {
    if q.is_empty() || q.len() > text.len() {
        return 0;
    }
    text.windows(q.len()).filter(|w| *w == q).count()
}

// ---- counting ----

fn counting_oracle() -> Check {
    let texts = synth::random_cjk_docs(101, 1000, 400, 30);
    let docs: Vec<Vec<char>> = texts.iter().map(|t| chars(t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let queries: Vec<String> = (0..10_000)
        .map(|i| {
            let d = &docs[rng.gen_range(0..docs.len())];
            let len = rng.gen_range(1..=6);
            if i % 4 == 0 || d.len() < len {
                (0..len).map(|_| char::from_u32(0x4e00 + rng.gen_range(0..34)).unwrap()).collect()
            } else {
                let s = rng.gen_range(0..=d.len() - len);
                d[s..s + len].iter().collect()
            }
        })
        .collect();

    let t0 = Instant::now();
    let corpus = synth::corpus_from_texts(&texts).map_err(broken)?;
    let got: Vec<usize> = queries
        .iter()
        .map(|q| corpus.count_occurrences(q, Scope::Corpus))
        .collect::<Result<_, _>>()
        .map_err(broken)?;
    let elapsed = t0.elapsed();

    let mut nonzero = 0;
    for (q, g) in queries.iter().zip(&got) {
        let qc = chars(q);
        let want: usize = docs.iter().map(|d| naive_count(d, &qc)).sum();
        ensure!(*g == want, "query {q}: index {g}, scan {want}");
        nonzero += (want > 0) as usize;
    }
    ensure!(elapsed < COUNT_BUDGET, "took {elapsed:?}");
    Ok(format!("10000 queries ({nonzero} with hits) exact over 1000 docs in {:.2}s", elapsed.as_secs_f64()))
}

// ---- pseudo-words ----

/// Substring → (total, doc_freq) over runs free of sentence punctuation.
fn brute_force_repeats(texts: &[Vec<char>], cfg: &ExtractConfig) -> BTreeMap<String, (usize, usize)> {
    let mut total: HashMap<String, usize> = HashMap::new();
    let mut docs: HashMap<String, BTreeSet<usize>> = HashMap::new();
    for (d, t) in texts.iter().enumerate() {
        for run in t.split(|&c| c == '。') {
            for len in cfg.min_len..=cfg.max_len.min(run.len()) {
                for w in run.windows(len) {
                    let s: String = w.iter().collect();
                    *total.entry(s.clone()).or_default() += 1;
                    docs.entry(s).or_default().insert(d);
                }
            }
        }
    }
    total
        .into_iter()
        .filter(|(_, n)| *n >= cfg.min_freq)
        .map(|(s, n)| {
            let df = docs[&s].len();
            (s, (n, df))
        })
        .collect()
}

fn pseudo_word_oracle() -> Check {
    let texts = synth::random_cjk_docs(202, 200, 500, 12);
    let cfg = ExtractConfig::default();
    let mut words = 0;
    for (i, t) in texts.iter().enumerate() {
        let corpus = synth::corpus_from_texts(std::slice::from_ref(t)).map_err(broken)?;
        let got: BTreeMap<String, (usize, usize)> = extract_repeated_strings(&corpus, Scope::Corpus, &cfg)
            .map_err(broken)?
            .into_iter()
            .map(|w| (w.surface, (w.total_freq, w.doc_freq)))
            .collect();
        let want = brute_force_repeats(&[chars(t)], &cfg);
        ensure!(got == want, "text {i}: {} extracted vs {} enumerated", got.len(), want.len());
        words += want.len();
    }
    // and all 200 at once, where document frequency matters
    let corpus = synth::corpus_from_texts(&texts).map_err(broken)?;
    let got: BTreeMap<String, (usize, usize)> = extract_repeated_strings(&corpus, Scope::Corpus, &cfg)
        .map_err(broken)?
        .into_iter()
        .map(|w| (w.surface, (w.total_freq, w.doc_freq)))
        .collect();
    let all: Vec<Vec<char>> = texts.iter().map(|t| chars(t)).collect();
    let want = brute_force_repeats(&all, &cfg);
    ensure!(got == want, "joint corpus: {} extracted vs {} enumerated", got.len(), want.len());
    Ok(format!("200 texts exact ({words} words singly, {} jointly)", want.len()))
}

// ---- collocations ----

fn dated_random_corpus(seed: u64) -> (Corpus, Vec<(i32, Vec<char>)>) {
    let texts = synth::random_cjk_docs(seed, 120, 300, 10);
    let mut b = CorpusBuilder::new(IngestConfig::default());
    let mut raw = Vec::new();
    for (i, t) in texts.iter().enumerate() {
        let year = 1900 + (i % 10) as i32;
        b.ingest_str(t, DocMeta::new(format!("d{i:03}")).with_date(PartialDate::year(year))).unwrap();
        raw.push((year, chars(t)));
    }
    (b.build(), raw)
}

/// Sentences (split on 。) containing every member, per year.
fn naive_colloc(raw: &[(i32, Vec<char>)], members: &[&str]) -> BTreeMap<i32, usize> {
    let ms: Vec<Vec<char>> = members.iter().map(|m| chars(m)).collect();
    let mut out = BTreeMap::new();
    for (y, t) in raw {
        for s in t.split(|&c| c == '。') {
            if ms.iter().all(|m| naive_count(s, m) > 0) {
                *out.entry(*y).or_insert(0) += 1;
            }
        }
    }
    out
}

fn collocation_properties() -> Check {
    let mut checked = 0;
    for seed in [301, 302, 303] {
        let (corpus, raw) = dated_random_corpus(seed);
        for members in [vec!["一", "丁"], vec!["七", "丈三"], vec!["一", "上", "丂"]] {
            let sets: Vec<KeywordSet> = members.iter().map(|m| KeywordSet::single(*m).unwrap()).collect();
            let fwd = collocation_timeseries(&corpus, Scope::Corpus, &sets, Window::Sentence, &Bucketing::Year).map_err(broken)?;
            let mut rev_sets = sets.clone();
            rev_sets.reverse();
            let rev = collocation_timeseries(&corpus, Scope::Corpus, &rev_sets, Window::Sentence, &Bucketing::Year).map_err(broken)?;
            ensure!(fwd.series.points == rev.series.points, "{members:?}: order changes the series");

            let want = naive_colloc(&raw, &members);
            let got: BTreeMap<i32, usize> = fwd
                .series
                .points
                .iter()
                .filter(|(_, n)| **n > 0)
                .map(|(b, n)| match b {
                    Bucket::Year(y) => (*y, *n),
                    other => panic!("unexpected bucket {other}"),
                })
                .collect();
            ensure!(got == want, "{members:?}: {got:?} vs one-per-sentence scan {want:?}");

            let sum: usize = fwd.series.points.values().sum();
            ensure!(sum == fwd.series.total, "{members:?}: buckets sum {sum} != total {}", fwd.series.total);
            let halves = Bucketing::periods(vec![(1900, 1904), (1905, 1909)]).unwrap();
            let coarse = collocation_timeseries(&corpus, Scope::Corpus, &sets, Window::Sentence, &halves).map_err(broken)?;
            ensure!(coarse.series.total == fwd.series.total, "{members:?}: totals differ across bucketings");
            checked += 1;
        }
    }
    Ok(format!("{checked} member sets: symmetric, one count per sentence, buckets conserve totals"))
}

// ---- public-domain novels ----

fn load_text(path: &Path) -> Result<(Corpus, Duration), Failure> {
    let t0 = Instant::now();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let corpus = if matches!(ext, "json" | "jsonl" | "tsv") {
        load_path(path, IngestConfig::default()).map_err(broken)?.0
    } else {
        let raw = std::fs::read(path).map_err(broken)?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("novel").to_string();
        let mut b = CorpusBuilder::new(IngestConfig::default());
        b.ingest(&raw, DocMeta::new(stem).with_chapters(ChapterMarkers::Pattern(CHAPTER_PATTERN.into())))
            .map_err(broken)?;
        b.build()
    };
    Ok((corpus, t0.elapsed()))
}

fn env_path(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from).filter(|p| p.exists())
}

/// Chapter bodies found by scanning the text for headings directly.
fn naive_chapters(text: &str) -> Vec<Vec<char>> {
    let re = Regex::new(CHAPTER_PATTERN).unwrap();
    let starts: Vec<usize> = re.find_iter(text).map(|m| m.start()).collect();
    starts
        .iter()
        .enumerate()
        .map(|(i, &s)| chars(&text[s..starts.get(i + 1).copied().unwrap_or(text.len())]))
        .collect()
}

fn only_doc(corpus: &Corpus) -> Result<(String, String), Failure> {
    match corpus.docs() {
        [d] => Ok((d.doc_id.clone(), d.body())),
        _ => Err(Failure::Broken(format!("expected one document, found {}", corpus.docs().len()))),
    }
}

fn presence_matches_scan(corpus: &Corpus, entities: &[&str]) -> Check {
    let (doc_id, body) = only_doc(corpus)?;
    let sets: Vec<KeywordSet> = entities.iter().map(|e| KeywordSet::parse(e).unwrap()).collect();
    let m = presence_matrix(corpus, &doc_id, &sets).map_err(broken)?;
    let chapters = naive_chapters(&body);
    ensure!(m.chapters() == chapters.len(), "{} chapters vs {} headings", m.chapters(), chapters.len());
    for (row, e) in sets.iter().enumerate() {
        for (c, text) in chapters.iter().enumerate() {
            let want: usize = e.surfaces().iter().map(|s| naive_count(text, &chars(s))).sum();
            ensure!(m.counts[row][c] == want, "{} in chapter {}: {} vs scan {want}", e.label(), c + 1, m.counts[row][c]);
        }
    }
    Ok(format!("{}×{} presence matrix exact", entities.len(), chapters.len()))
}

const JTTW_ENTITIES: [&str; 5] = ["悟空|行者", "八戒", "沙僧", "唐僧|三藏", "觀音|观音"];

fn jttw() -> Check {
    match env_path("WENXIAN_JTTW") {
        Some(p) => {
            let (corpus, took) = load_text(&p)?;
            let cjk = corpus.stats().cjk_chars as f64;
            ensure!(took < JTTW_INGEST_BUDGET, "ingest took {took:?}");
            ensure!(
                (cjk - JTTW_CJK_TARGET).abs() <= JTTW_CJK_TOL * JTTW_CJK_TARGET,
                "{cjk} CJK characters, outside ±5% of 713000"
            );
            let pres = presence_matches_scan(&corpus, &JTTW_ENTITIES)?;
            Ok(format!("ingest {:.2}s, {cjk} CJK chars, {pres}", took.as_secs_f64()))
        }
        None => {
            let names = ["悟空", "八戒", "沙僧", "三藏", "觀音"];
            let text = synth::novel_like(401, 999, &names, &["笑道", "道"]);
            let t0 = Instant::now();
            let corpus = synth::novel_corpus("jttw", &text).map_err(broken)?;
            let took = t0.elapsed();
            ensure!(took < JTTW_INGEST_BUDGET, "stand-in ingest took {took:?}");
            let pres = presence_matches_scan(&corpus, &names)?;
            Err(Failure::Unavailable(format!(
                "WENXIAN_JTTW not set; stand-in ({} CJK chars) ingest {:.2}s, {pres}",
                corpus.stats().cjk_chars,
                took.as_secs_f64()
            )))
        }
    }
}

fn drc_checks(corpus: &Corpus, chars_sets: &[&str; 3], want_chapters: Option<usize>) -> Check {
    let (doc_id, body) = only_doc(corpus)?;
    let chapters = naive_chapters(&body);
    if let Some(n) = want_chapters {
        ensure!(chapters.len() == n, "{} chapters, expected {n}", chapters.len());
    }
    let ids = [doc_id];
    let event = KeywordSet::single("笑道").unwrap();
    let mut series = Vec::new();
    for c in chars_sets {
        let subj = KeywordSet::parse(c).unwrap();
        let s = normalized_event_rate(corpus, Scope::Docs(&ids), &subj, &event, 0, &Bucketing::Chapter).map_err(broken)?;
        ensure!(s.points.len() == chapters.len(), "{c}: {} buckets", s.points.len());
        for (i, (p, text)) in s.points.iter().zip(&chapters).enumerate() {
            ensure!(p.numerator <= p.denominator, "{c} chapter {}: {} > {}", i + 1, p.numerator, p.denominator);
            let want: usize = subj.surfaces().iter().map(|n| naive_count(text, &chars(&format!("{n}笑道")))).sum();
            ensure!(p.numerator == want, "{c} chapter {}: {} vs concatenated scan {want}", i + 1, p.numerator);
        }
        series.push(s);
    }
    // chapters where the unique raw leader differs from the unique normalized leader
    let argmax = |vals: Vec<f64>| -> Option<usize> {
        let best = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let at: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] == best).collect();
        (at.len() == 1 && best > 0.0).then(|| at[0])
    };
    let disagree = (0..chapters.len())
        .filter(|&ch| {
            let raw = argmax(series.iter().map(|s| s.points[ch].numerator as f64).collect());
            let norm = argmax(series.iter().map(|s| s.points[ch].rate.unwrap_or(0.0)).collect());
            matches!((raw, norm), (Some(a), Some(b)) if a != b)
        })
        .count();
    ensure!(disagree >= 1, "raw and normalized leaders agree in every chapter");
    Ok(format!("{} chapters: numerator ≤ denominator, numerators exact, leaders disagree in {disagree}", chapters.len()))
}

fn drc() -> Check {
    match env_path("WENXIAN_DRC") {
        Some(p) => {
            let (corpus, _) = load_text(&p)?;
            drc_checks(&corpus, &["寶玉|宝玉", "黛玉", "寶釵|宝钗"], Some(120))
        }
        None => {
            let text = synth::novel_like(501, 120, &["寶玉", "黛玉", "寶釵"], &["笑道"]);
            let corpus = synth::novel_corpus("drc", &text).map_err(broken)?;
            let r = drc_checks(&corpus, &["寶玉", "黛玉", "寶釵"], Some(120))?;
            Err(Failure::Unavailable(format!("WENXIAN_DRC not set; stand-in {r}")))
        }
    }
}

// ---- session report ----

const OFFICIALS: [&str; 23] = [
    "王守仁", "李東陽", "張居正", "海瑞", "徐階", "高拱", "申時行", "楊廷和", "夏言", "嚴嵩", "于謙", "商輅",
    "劉健", "謝遷", "楊一清", "費宏", "蔣冕", "毛紀", "楊慎", "唐順之", "戚繼光", "俞大猷", "袁崇煥",
];

fn session_metrics() -> Check {
    let mut b = CorpusBuilder::new(IngestConfig::default());
    for (i, n) in OFFICIALS.iter().enumerate() {
        b.ingest_str(&format!("是歲{n}中舉，授知縣。"), DocMeta::new(format!("r{i:02}"))).unwrap();
    }
    let corpus = b.build();
    let mut s = Session::new("acceptance", &corpus).map_err(broken)?;
    s.create_list(&corpus, "exam").map_err(broken)?;
    s.add_keyword(&corpus, "exam", "中舉", Provenance::Seed).map_err(broken)?;
    let hits = s.search(&corpus, "exam", 10).map_err(broken)?;
    ensure!(hits.len() == 23, "{} hits", hits.len());
    // 21 of the 22 gold officials answered; the 23rd official is not gold
    for h in hits.iter().take(21) {
        let i: usize = h.doc_id[1..].parse().unwrap();
        s.mark(
            &corpus,
            MarkedStatement {
                hit: h.hit_ref(),
                label: MarkLabel::Answer,
                note: String::new(),
                answer_surface: Some(OFFICIALS[i].to_string()),
            },
        )
        .map_err(broken)?;
    }
    let gold = GoldSet::parse(&OFFICIALS[..22].join("\n")).map_err(broken)?;
    let r = session_report(&s, Some(&gold));
    ensure!(r.gold_size == Some(22) && r.correct == Some(21), "{:?}/{:?}", r.correct, r.gold_size);
    ensure!(r.precision == Some(1.0), "precision {:?}", r.precision);
    ensure!(r.recall == Some(21.0 / 22.0), "recall {:?}", r.recall);
    Ok(format!("precision 1.0, recall 21/22 = {:.6}", 21.0 / 22.0))
}

// ---- transliteration ----

fn translit_fixture() -> Check {
    let fx = synth::translit_fixture(601, TranslitFixtureParams::default()).map_err(broken)?;
    let gold = fx.eval.gold.surfaces();
    ensure!(gold.len() == 50, "{} planted", gold.len());
    for g in &gold {
        let n = fx.eval.corpus.count_occurrences(g, Scope::Corpus).map_err(broken)?;
        ensure!(n >= 2, "planted {g} occurs {n} times");
    }
    let cfg = TranslitConfig::default();
    let t0 = Instant::now();
    let training = TrainingSet { corpus: &fx.train.corpus, gold: &fx.train.gold };
    let run = run_pipeline(&fx.eval.corpus, Some(&fx.contrast), Some(training), Some(&gold), &cfg).map_err(broken)?;
    let took = t0.elapsed();

    let inv = cfg.inventory().map_err(broken)?;
    let (generated, contrast, phono, _) = filtered_survivors(&fx.eval.corpus, Some(&fx.contrast), &inv, &cfg).map_err(broken)?;
    let set = |v: &[wenxian_core::translit::Candidate]| -> BTreeSet<String> { v.iter().map(|c| c.surface.clone()).collect() };
    let (g, c, p, r) = (set(&generated), set(&contrast), set(&phono), set(&run.ranked));
    ensure!(c.is_subset(&g) && p.is_subset(&c) && r == p, "stage sets are not nested");
    let counts: Vec<usize> = run.stages.iter().map(|s| s.count).collect();
    ensure!(counts == vec![g.len(), c.len(), p.len()], "stage counts {counts:?}");

    let recall = gold.iter().filter(|s| p.contains(*s)).count() as f64 / gold.len() as f64;
    let p50 = run.ranked.iter().take(50).filter(|c| gold.contains(&c.surface)).count() as f64 / 50.0;
    ensure!(recall >= MIN_RECALL, "post-filter recall {recall}");
    ensure!(p50 >= MIN_P_AT_50, "precision@50 {p50}");
    ensure!(took < TRANSLIT_BUDGET, "took {took:?}");
    Ok(format!(
        "stages {} ⊇ {} ⊇ {}, recall {recall:.3}, P@50 {p50:.2}, {:.2}s",
        g.len(),
        c.len(),
        p.len(),
        took.as_secs_f64()
    ))
}

// ---- gazetteer ----

/// Great-circle distance from unit vectors, independent of the haversine form.
fn chord_angle_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let v = |(lat, lon): (f64, f64)| {
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
    };
    let (p, q) = (v(a), v(b));
    let cross = [p[1] * q[2] - p[2] * q[1], p[2] * q[0] - p[0] * q[2], p[0] * q[1] - p[1] * q[0]];
    let sin = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    let cos = p[0] * q[0] + p[1] * q[1] + p[2] * q[2];
    6371.0088 * sin.atan2(cos)
}

fn gazetteer() -> Check {
    let g = Gazetteer::new(vec![
        Place::new("hz", "惠州府"),
        Place::new("lc", "龍川縣").with_parent("hz"),
        Place::new("hc", "惠川縣").with_parent("hz"),
        Place::new("cz", "處州府"),
        Place::new("yn", "宜寧縣").with_parent("cz"),
    ])
    .map_err(broken)?;
    let p = |id: &str| g.get(id).unwrap();
    let sib = g.classify_relation(p("lc"), p("hc"), DEFAULT_NEAR_KM);
    let sib_rev = g.classify_relation(p("hc"), p("lc"), DEFAULT_NEAR_KM);
    ensure!(sib == PlaceRelation::Sibling && sib_rev == sib, "龍川縣/惠川縣: {sib:?}");
    let inside = g.classify_relation(p("yn"), p("cz"), DEFAULT_NEAR_KM);
    ensure!(inside == PlaceRelation::ContainedBy { levels: 1 }, "宜寧縣/處州府: {inside:?}");
    ensure!(g.classify_relation(p("cz"), p("yn"), DEFAULT_NEAR_KM) == PlaceRelation::Contains { levels: 1 }, "inverse");

    let c = |lat, lon| Coordinates::new(lat, lon).unwrap();
    let anti = haversine_km(c(0.0, 0.0), c(0.0, 180.0));
    ensure!((anti - ANTIPODAL_KM).abs() <= ANTIPODAL_TOL_KM, "antipodal {anti}");
    let (bj, sh) = ((39.9042, 116.4074), (31.2304, 121.4737));
    let d = haversine_km(c(bj.0, bj.1), c(sh.0, sh.1));
    let oracle = chord_angle_km(bj, sh);
    ensure!((d - oracle).abs() <= ORACLE_AGREEMENT_KM, "haversine {d} vs oracle {oracle}");
    ensure!((d - BJ_SH_KM).abs() <= BJ_SH_REL_TOL * BJ_SH_KM, "Beijing–Shanghai {d}");
    Ok(format!("Sibling, ContainedBy(1); antipodal {anti:.3} km; Beijing–Shanghai {d:.2} km (oracle {oracle:.2})"))
}

// ---- disambiguation ----

fn random_record(rng: &mut ChaCha8Rng, id: String, start: i32) -> NameRecord {
    let pick = |rng: &mut ChaCha8Rng, xs: &[&str]| rng.gen_bool(0.7).then(|| xs[rng.gen_range(0..xs.len())].to_string());
    let places = ["龍川縣", "惠州府", "宜寧縣", "處州府", "長沙府"];
    NameRecord {
        record_id: id,
        name: "王臣".into(),
        birth_place: pick(rng, &places),
        entry_into_office: pick(rng, &["進士", "舉人", "貢生"]),
        office_posting: pick(rng, &["知縣", "知府", "教諭"]),
        alternate_names: if rng.gen_bool(0.5) { vec![["子忠", "彥臣", "伯良"][rng.gen_range(0..3)].into()] } else { vec![] },
        service_location: pick(rng, &places),
        service_period: Some((start, start + rng.gen_range(0..10))),
        source: Source {
            book_id: format!("b{}", rng.gen_range(0..5)),
            pub_place: pick(rng, &places),
            book_date: Some(start + 40),
        },
    }
}

fn disambiguation() -> Check {
    let cfg = DisambigConfig::default();
    let fx = synth::disambig_fixture(701, DisambigFixtureParams::default()).map_err(broken)?;
    ensure!(fx.records.len() == 200, "{} records", fx.records.len());
    let report = run_disambiguation(&fx.records, Some(&fx.gazetteer), &cfg).map_err(broken)?;

    // independent blocking: every same-name pair
    let mut by_name: BTreeMap<&str, Vec<&NameRecord>> = BTreeMap::new();
    for r in &fx.records {
        by_name.entry(&r.name).or_default().push(r);
    }
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    let mut seen = 0;
    for group in by_name.values() {
        for i in 0..group.len() {
            for j in i + 1..group.len() {
                let (a, b) = (group[i], group[j]);
                let s = report.pair(&a.record_id, &b.record_id).ok_or_else(|| broken("pair missing from report"))?;
                seen += 1;
                let same = fx.truth[&a.record_id] == fx.truth[&b.record_id];
                match (s.verdict == Verdict::Same, same) {
                    (true, true) => tp += 1,
                    (true, false) => fp += 1,
                    (false, true) => fn_ += 1,
                    _ => {}
                }
            }
        }
    }
    ensure!(seen == report.pairs.len(), "report has {} pairs, blocking gives {seen}", report.pairs.len());
    let precision = tp as f64 / (tp + fp).max(1) as f64;
    let recall = tp as f64 / (tp + fn_).max(1) as f64;
    ensure!(precision >= MIN_PAIRWISE && recall >= MIN_PAIRWISE, "precision {precision:.3}, recall {recall:.3}");

    let mut rng = ChaCha8Rng::seed_from_u64(702);
    for k in 0..10_000 {
        let s1 = rng.gen_range(1300..1700);
        let a = random_record(&mut rng, format!("a{k}"), s1);
        let end = a.service_period.unwrap().1;
        let s2 = end + cfg.veto_gap_years + 1 + rng.gen_range(0..200);
        let b = random_record(&mut rng, format!("b{k}"), s2);
        let (a, b) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let s = compare_pair(&a, &b, None, &cfg).map_err(broken)?;
        ensure!(verdict(&s, &cfg) == Verdict::Different && s.veto.is_some(), "pair {k} escaped the veto");
    }

    for k in 0..2_000 {
        let (sa, sb) = (rng.gen_range(1300..1700), rng.gen_range(1300..1700));
        let a = random_record(&mut rng, format!("x{k}"), sa);
        let b = random_record(&mut rng, format!("y{k}"), sb);
        let ab = compare_pair(&a, &b, Some(&fx.gazetteer), &cfg).map_err(broken)?;
        let ba = compare_pair(&b, &a, Some(&fx.gazetteer), &cfg).map_err(broken)?;
        ensure!(ab == ba, "pair {k} is not symmetric");
        let aa = compare_pair(&a, &a, Some(&fx.gazetteer), &cfg).map_err(broken)?;
        ensure!(aa.total == Some(1.0) && aa.veto.is_none(), "self-similarity of {k}: {:?}", aa.total);
    }

    let mut same_name: Vec<NameRecord> = (0..29).map(|i| random_record(&mut rng, format!("s{i:02}"), 1500)).collect();
    same_name.extend((0..7).map(|i| NameRecord { name: "李忠".into(), ..random_record(&mut rng, format!("o{i}"), 1500) }));
    let blocked = block_pairs(&same_name);
    let in_29 = blocked.iter().filter(|(i, j)| same_name[*i].name == "王臣" && same_name[*j].name == "王臣").count();
    ensure!(in_29 == 406 && blocked.len() == 406 + 21, "{in_29} blocked pairs among 29");
    let r = run_disambiguation(&same_name[..29], None, &cfg).map_err(broken)?;
    ensure!(r.pairs.len() == 406, "{} scored pairs", r.pairs.len());

    Ok(format!(
        "precision {precision:.3}, recall {recall:.3} over {seen} pairs; 10000 vetoes; symmetry and self-similarity on 2000; 406 pairs"
    ))
}

// ---- determinism ----

fn determinism() -> Check {
    let (a, b) = (tempfile::tempdir().map_err(broken)?, tempfile::tempdir().map_err(broken)?);
    common::all_jobs(a.path());
    common::all_jobs(b.path());
    let (fa, fb) = (common::files(a.path()), common::files(b.path()));
    ensure!(fa.len() == fb.len(), "{} vs {} outputs", fa.len(), fb.len());
    for ((na, x), (nb, y)) in fa.iter().zip(&fb) {
        ensure!(na == nb && x == y, "{na} differs between runs");
    }
    Ok(format!("{} output files byte-identical across two runs", fa.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("counting oracle", counting_oracle),
        ("pseudo-word oracle", pseudo_word_oracle),
        ("collocation properties", collocation_properties),
        ("JTTW ingest and presence", jttw),
        ("DRC smile rates", drc),
        ("session report metrics", session_metrics),
        ("transliteration fixture", translit_fixture),
        ("gazetteer relations and distances", gazetteer),
        ("disambiguation fixture and invariants", disambiguation),
        ("CLI determinism", determinism),
    ];
    let mut broken = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(Failure::Unavailable(why)) => println!("FAIL  {name}: {why}"),
            Err(Failure::Broken(why)) => {
                println!("FAIL  {name}: {why}");
                broken.push(name);
            }
        }
    }
    // Missing public-domain inputs are reported above but do not fail the
    // build; a property that does not hold does.
    assert!(broken.is_empty(), "criteria failed: {broken:?}");
}
