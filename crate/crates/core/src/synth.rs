//! Seeded synthetic corpora for tests, benches and demos.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ChapterMarkers, Corpus, CorpusBuilder, DocMeta, IngestConfig};
use crate::disambig::{NameRecord, Source};
use crate::error::Result;
use crate::gazetteer::{Gazetteer, Place};
use crate::translit::{GoldSpan, GoldSpans, PhonoInventory};

/// Everyday characters with no transliteration flavour.
const FILLER: &str = "天地人日月山水火木金土風雨雲雪春夏秋冬東南北上下左右前後中大小多少長短高低遠近來去出入開關生死老幼男女父母兄弟子孫君臣民官兵將軍國家城市村鄉田園河海江湖橋路車船馬牛羊犬雞魚鳥花草樹林竹石玉米麥茶酒飯肉衣食住行讀書寫字學問道理事物心性情意思想言語聲音光明黑白紅黃青綠紫年時刻早晚今昨明朝夜半";
/// Final characters of the context markers, which the fixture uses to
/// introduce transliterations.
const MARKERS: [&str; 8] = ["國曰", "地名", "人稱", "所謂", "自號", "譯為", "即指", "近於"];
const RIGHT: &str = "者也之等人氏諸輩";

fn filler_chars(inv: &PhonoInventory) -> Vec<char> {
    let reserved: BTreeSet<char> = MARKERS.iter().flat_map(|m| m.chars()).chain(RIGHT.chars()).collect();
    FILLER
        .chars()
        .filter(|&c| inv.weight(c) == 0.0 && !reserved.contains(&c))
        .collect()
}

fn filler(rng: &mut ChaCha8Rng, pool: &[char], len: usize) -> String {
    (0..len).map(|_| *pool.choose(rng).expect("non-empty pool")).collect()
}

fn filler_in(rng: &mut ChaCha8Rng, pool: &[char], lens: std::ops::Range<usize>) -> String {
    let len = rng.gen_range(lens);
    filler(rng, pool, len)
}

/// Random documents over the first `alphabet` characters of the CJK block.
/// A small alphabet makes repeats (and so real work for the index) common.
pub fn random_cjk_docs(seed: u64, n_docs: usize, max_len: usize, alphabet: u32) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len)
                .map(|_| {
                    if rng.gen_ratio(1, 12) {
                        '。'
                    } else {
                        char::from_u32(0x4e00 + rng.gen_range(0..alphabet)).expect("valid CJK")
                    }
                })
                .collect()
        })
        .collect()
}

pub fn corpus_from_texts(texts: &[String]) -> Result<Corpus> {
    let mut b = CorpusBuilder::new(IngestConfig::default());
    for (i, t) in texts.iter().enumerate() {
        b.ingest_str(t, DocMeta::new(format!("doc{i:05}")))?;
    }
    Ok(b.build())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslitFixtureParams {
    pub n_gold: usize,
    /// Inventory-flavoured strings in ordinary contexts (hard negatives).
    pub n_decoys: usize,
    /// Strings common in the contrast corpus that also occur in the target.
    pub n_common: usize,
    pub docs: usize,
}

impl Default for TranslitFixtureParams {
    fn default() -> Self {
        TranslitFixtureParams {
            n_gold: 50,
            n_decoys: 60,
            n_common: 30,
            docs: 40,
        }
    }
}

/// One split of the transliteration fixture.
#[derive(Debug, Clone)]
pub struct TranslitSplit {
    pub corpus: Corpus,
    pub gold: GoldSpans,
    pub decoys: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TranslitFixture {
    pub train: TranslitSplit,
    pub eval: TranslitSplit,
    pub contrast: Corpus,
    pub common: Vec<String>,
}

/// Distinct strings over `alphabet`, none a substring of another or of `taken`.
fn unique_strings(rng: &mut ChaCha8Rng, alphabet: &[char], n: usize, lens: (usize, usize), taken: &mut Vec<String>) -> Vec<String> {
    let mut out = Vec::new();
    while out.len() < n {
        let len = rng.gen_range(lens.0..=lens.1);
        let s: String = (0..len).map(|_| *alphabet.choose(rng).expect("alphabet")).collect();
        if taken.iter().any(|t| t.contains(&s) || s.contains(t.as_str())) {
            continue;
        }
        taken.push(s.clone());
        out.push(s);
    }
    out
}

/// Target corpora with planted, context-regular transliterations: each
/// occurrence is introduced by a marker and followed by a suffix, both
/// differing between occurrences so the planted string is a maximal repeat.
pub fn translit_fixture(seed: u64, p: TranslitFixtureParams) -> Result<TranslitFixture> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv = PhonoInventory::builtin();
    let strong: Vec<char> = inv.chars().filter(|&(_, w)| w >= 1.0).map(|(c, _)| c).collect();
    let pool = filler_chars(&inv);
    let right: Vec<char> = RIGHT.chars().collect();

    let mut taken = Vec::new();
    let common = unique_strings(&mut rng, &strong, p.n_common, (2, 4), &mut taken);
    let split = |rng: &mut ChaCha8Rng, prefix: &str, taken: &mut Vec<String>| -> Result<TranslitSplit> {
        let golds = unique_strings(rng, &strong, p.n_gold, (3, 6), taken);
        let decoys = unique_strings(rng, &strong, p.n_decoys, (3, 5), taken);
        // (text, gold index or none)
        let mut pieces: Vec<(String, Option<usize>)> = Vec::new();
        for (g, s) in golds.iter().enumerate() {
            let f = rng.gen_range(2..=5);
            let mut markers = MARKERS.to_vec();
            markers.shuffle(rng);
            let mut rights = right.clone();
            rights.shuffle(rng);
            for k in 0..f {
                let lead = filler_in(rng, &pool, 2..6);
                let tail = filler_in(rng, &pool, 2..6);
                pieces.push((format!("{lead}{}\u{0}{s}\u{0}{}{tail}。", markers[k], rights[k]), Some(g)));
            }
        }
        for d in &decoys {
            for _ in 0..rng.gen_range(2..=4) {
                let lead = filler_in(rng, &pool, 3..8);
                let tail = filler_in(rng, &pool, 3..8);
                pieces.push((format!("{lead}{d}{tail}。"), None));
            }
        }
        for c in &common {
            for _ in 0..2 {
                let lead = filler_in(rng, &pool, 3..8);
                pieces.push((format!("{lead}{c}{}。", filler(rng, &pool, 3)), None));
            }
        }
        for _ in 0..p.docs * 10 {
            let len = rng.gen_range(6..20);
            pieces.push((format!("{}。", filler(rng, &pool, len)), None));
        }
        pieces.shuffle(rng);

        let mut b = CorpusBuilder::new(IngestConfig::default());
        let mut spans = Vec::new();
        let per_doc = pieces.len().div_ceil(p.docs.max(1));
        for (di, chunk) in pieces.chunks(per_doc.max(1)).enumerate() {
            let doc_id = format!("{prefix}{di:03}");
            let mut text = String::new();
            let mut pos = 0usize;
            for (piece, g) in chunk {
                for (k, part) in piece.split('\u{0}').enumerate() {
                    let n = part.chars().count();
                    if k == 1 {
                        if let Some(g) = g {
                            spans.push(GoldSpan {
                                surface: golds[*g].clone(),
                                doc_id: doc_id.clone(),
                                start: pos,
                                end: pos + n,
                            });
                        }
                    }
                    text.push_str(part);
                    pos += n;
                }
            }
            b.ingest_str(&text, DocMeta::new(doc_id))?;
        }
        Ok(TranslitSplit {
            corpus: b.build(),
            gold: GoldSpans { spans },
            decoys,
        })
    };
    let train = split(&mut rng, "train", &mut taken)?;
    let eval = split(&mut rng, "eval", &mut taken)?;

    let mut cb = CorpusBuilder::new(IngestConfig::default());
    for di in 0..p.docs {
        let mut text = String::new();
        for _ in 0..12 {
            let len = rng.gen_range(6..20);
            text.push_str(&filler(&mut rng, &pool, len));
            if let Some(c) = common.choose(&mut rng) {
                text.push_str(c);
            }
            text.push('。');
        }
        cb.ingest_str(&text, DocMeta::new(format!("contrast{di:03}")))?;
    }
    Ok(TranslitFixture {
        train,
        eval,
        contrast: cb.build(),
        common,
    })
}

/// A chaptered story whose chapters mention `names` with known counts.
/// Returns the raw text; chapters start with `第N回` in Chinese numerals.
pub fn novel_like(seed: u64, chapters: usize, names: &[&str], events: &[&str]) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = filler_chars(&PhonoInventory::builtin());
    let mut text = String::new();
    for ch in 1..=chapters {
        text.push_str(&format!("第{}回\n", chinese_numeral(ch)));
        for _ in 0..rng.gen_range(20..40) {
            text.push_str(&filler_in(&mut rng, &pool, 2..8));
            if rng.gen_ratio(2, 3) {
                if let Some(n) = names.choose(&mut rng) {
                    text.push_str(n);
                    if rng.gen_ratio(1, 3) {
                        if rng.gen_ratio(1, 4) {
                            text.push_str(&filler(&mut rng, &pool, 1));
                        }
                        if let Some(e) = events.choose(&mut rng) {
                            text.push_str(e);
                        }
                    }
                }
            }
            text.push_str(&filler_in(&mut rng, &pool, 1..6));
            text.push_str(if rng.gen_ratio(1, 5) { "！" } else { "。" });
        }
        text.push('\n');
    }
    text
}

pub fn novel_corpus(doc_id: &str, text: &str) -> Result<Corpus> {
    let mut b = CorpusBuilder::new(IngestConfig::default());
    b.ingest_str(
        text,
        DocMeta::new(doc_id).with_chapters(ChapterMarkers::Pattern(CHAPTER_PATTERN.into())),
    )?;
    Ok(b.build())
}

/// Chapter headings of classical novels: 第一回, 第二十三回, 第一百二十回.
pub const CHAPTER_PATTERN: &str = "第[一二三四五六七八九十百零〇]+回";

/// 1 → 一, 23 → 二十三, 120 → 一百二十 (up to 999).
pub fn chinese_numeral(n: usize) -> String {
    const D: [char; 10] = ['零', '一', '二', '三', '四', '五', '六', '七', '八', '九'];
    assert!((1..1000).contains(&n));
    let (h, t, u) = (n / 100, n / 10 % 10, n % 10);
    let mut s = String::new();
    if h > 0 {
        s.push(D[h]);
        s.push('百');
        if t == 0 && u > 0 {
            s.push('零');
        }
    }
    if t > 0 {
        if !(t == 1 && h == 0) {
            s.push(D[t]);
        }
        s.push('十');
    }
    if u > 0 {
        s.push(D[u]);
    }
    s
}

const PLACE_CHARS: &str = "安平清河永寧昌樂新城宜興長泰德化仙遊南康廬陵吉水豐城臨川建德桐鄉海鹽嘉善崇明華亭上元江寧句容溧陽金壇武進無錫宜春萍鄉";
const SURNAMES: &str = "王李張劉陳楊黃趙周吳";
const GIVEN: &str = "臣忠良賢德仁義禮智信文武";
const COURTESY: &str = "子伯仲叔季彥元";
const ENTRIES: [&str; 5] = ["進士", "舉人", "貢生", "監生", "蔭生"];
const OFFICES: [&str; 8] = ["知縣", "知府", "教諭", "訓導", "縣丞", "主簿", "同知", "通判"];

/// Provinces → prefectures → counties with coordinates, all valid 1368–1911.
/// Counties of one prefecture lie within a few tens of kilometres of each other.
pub fn hierarchy_gazetteer(seed: u64, provinces: usize, prefectures: usize, counties: usize) -> Result<Gazetteer> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chars: Vec<char> = PLACE_CHARS.chars().collect();
    let mut used = BTreeSet::new();
    let mut fresh = |rng: &mut ChaCha8Rng, suffix: char| loop {
        let name: String = [*chars.choose(rng).unwrap(), *chars.choose(rng).unwrap(), suffix].iter().collect();
        if used.insert(name.clone()) {
            break name;
        }
    };
    let mut places = Vec::new();
    for p in 0..provinces {
        let (plat, plon) = (24.0 + 3.0 * p as f64, 108.0 + 3.5 * p as f64);
        let pid = format!("p{p}");
        places.push(Place::new(&pid, fresh(&mut rng, '省')).with_coords(plat, plon));
        for f in 0..prefectures {
            let (flat, flon) = (plat + rng.gen_range(-1.2..1.2), plon + rng.gen_range(-1.2..1.2));
            let fid = format!("{pid}f{f}");
            places.push(
                Place::new(&fid, fresh(&mut rng, '府'))
                    .with_parent(&pid)
                    .with_period(1368, 1911)
                    .with_coords(flat, flon),
            );
            for c in 0..counties {
                places.push(
                    Place::new(format!("{fid}c{c}"), fresh(&mut rng, '縣'))
                        .with_parent(&fid)
                        .with_period(1368, 1911)
                        .with_coords(flat + rng.gen_range(-0.15..0.15), flon + rng.gen_range(-0.15..0.15)),
                );
            }
        }
    }
    Gazetteer::new(places)
}

#[derive(Debug, Clone, Copy)]
pub struct DisambigFixtureParams {
    pub records: usize,
    /// Distinct name strings shared among persons.
    pub names: usize,
    /// Chance a record keeps each optional factoid.
    pub keep: f64,
}

impl Default for DisambigFixtureParams {
    fn default() -> Self {
        DisambigFixtureParams {
            records: 200,
            names: 30,
            keep: 0.75,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DisambigFixture {
    pub gazetteer: Gazetteer,
    pub records: Vec<NameRecord>,
    /// record_id → person id
    pub truth: HashMap<String, String>,
}

struct Person {
    name: String,
    alts: Vec<String>,
    birth: usize,
    entry: &'static str,
    office: &'static str,
    posting: usize,
    period: (i32, i32),
}

/// Officer records with planted duplicate clusters: each person appears in
/// one to four books, each copy dropping factoids at random and adding small
/// noise (a county recorded as its prefecture, a shifted period, a different
/// office). Names are drawn from a small pool, so same-name strangers abound;
/// some are contemporaries.
pub fn disambig_fixture(seed: u64, p: DisambigFixtureParams) -> Result<DisambigFixture> {
    let gazetteer = hierarchy_gazetteer(seed, 3, 4, 5)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd15a);
    let counties: Vec<&Place> = gazetteer.places().iter().filter(|pl| pl.name.ends_with('縣')).collect();
    let (sur, given, courtesy): (Vec<char>, Vec<char>, Vec<char>) =
        (SURNAMES.chars().collect(), GIVEN.chars().collect(), COURTESY.chars().collect());
    let mut names = BTreeSet::new();
    while names.len() < p.names {
        names.insert(format!("{}{}", sur.choose(&mut rng).unwrap(), given.choose(&mut rng).unwrap()));
    }
    let names: Vec<String> = names.into_iter().collect();

    let mut records = Vec::new();
    let mut truth = HashMap::new();
    let mut pid = 0;
    while records.len() < p.records {
        let name = names.choose(&mut rng).unwrap().clone();
        // courtesy names are unique per person
        let alts = (0..rng.gen_range(1..=2))
            .map(|k| format!("{}{}{}", courtesy[(pid + k) % courtesy.len()], given[pid % given.len()], pid / given.len()))
            .collect();
        let start = rng.gen_range(1400..1880);
        let person = Person {
            name,
            alts,
            birth: rng.gen_range(0..counties.len()),
            entry: ENTRIES.choose(&mut rng).unwrap(),
            office: OFFICES.choose(&mut rng).unwrap(),
            posting: rng.gen_range(0..counties.len()),
            period: (start, start + rng.gen_range(1..10)),
        };
        let copies = rng.gen_range(1..=4).min(p.records - records.len());
        for _ in 0..copies {
            let id = format!("r{:04}", records.len());
            truth.insert(id.clone(), format!("p{pid:03}"));
            records.push(copy_of(&mut rng, &person, id, &counties, &gazetteer, p.keep));
        }
        pid += 1;
    }
    records.shuffle(&mut rng);
    Ok(DisambigFixture {
        gazetteer,
        records,
        truth,
    })
}

fn copy_of(rng: &mut ChaCha8Rng, who: &Person, id: String, counties: &[&Place], g: &Gazetteer, keep: f64) -> NameRecord {
    let mut r = NameRecord {
        record_id: id.clone(),
        name: who.name.clone(),
        ..Default::default()
    };
    let parent_name = |c: &Place| g.get(c.parent.as_deref().unwrap()).unwrap().name.clone();
    // at least two factoids survive
    while [r.birth_place.is_some(), r.entry_into_office.is_some(), r.office_posting.is_some(), !r.alternate_names.is_empty(), r.service_location.is_some(), r.service_period.is_some()]
        .iter()
        .filter(|&&x| x)
        .count()
        < 2
    {
        if rng.gen_bool(keep) {
            let c = counties[who.birth];
            r.birth_place = Some(if rng.gen_bool(0.15) { parent_name(c) } else { c.name.clone() });
        }
        if rng.gen_bool(keep) {
            r.entry_into_office = Some(who.entry.to_string());
        }
        if rng.gen_bool(keep) {
            r.office_posting = Some(if rng.gen_bool(0.1) { OFFICES.choose(rng).unwrap() } else { who.office }.to_string());
        }
        if rng.gen_bool(keep) {
            r.alternate_names = who.alts.clone();
        }
        if rng.gen_bool(keep) {
            r.service_location = Some(counties[who.posting].name.clone());
        }
        if rng.gen_bool(keep) {
            let d = if rng.gen_bool(0.3) { rng.gen_range(-3..=3) } else { 0 };
            r.service_period = Some((who.period.0 + d, who.period.1 + d));
        }
    }
    let c = counties[who.posting];
    r.source = Source {
        book_id: format!("志{}", &id[1..]),
        pub_place: Some(parent_name(c)),
        book_date: Some(who.period.1 + rng.gen_range(10..80)),
    };
    r
}
