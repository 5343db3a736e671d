//! Shared harness: drive the built binary over seeded fixtures.
#![allow(dead_code)]

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_wenxian");

pub fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .env_remove("WENXIAN_DATA_DIR")
        .output()
        .unwrap()
}

pub fn ok(dir: &Path, args: &[&str]) -> Vec<u8> {
    let o = run(dir, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

pub const DATED: &str = r#"{"id":"n0","text":"變法維新。立憲之議。變法圖強，維新自立。","date":"1898"}
{"id":"n1","text":"變法之後，維新未成。立憲可期。","date":"1899-03"}
{"id":"n2","text":"立憲預備。變法與立憲並論。革命之說興。","date":"1905"}
{"id":"n3","text":"革命成功。立憲已遲。變法舊事。","date":"1911"}
"#;

/// Every batch job over seeded fixtures, writing into `dir`.
pub fn all_jobs(dir: &Path) {
    fs::write(dir.join("news.jsonl"), DATED).unwrap();
    ok(dir, &["fixture", "novel", "--seed", "3", "--chapters", "15", "-o", "novel.jsonl"]);
    ok(dir, &["fixture", "translit", "--seed", "5", "--dir", "tr"]);
    ok(dir, &["fixture", "disambig", "--seed", "7", "--dir", "da"]);
    ok(dir, &["ingest", "novel.jsonl", "-o", "novel.json"]);
    ok(dir, &["ingest", "news.jsonl", "-o", "news.json"]);
    ok(dir, &["stats", "novel.json", "-o", "stats.json"]);
    ok(dir, &["freq", "news.json", "--kw", "變法|維新", "-o", "freq.tsv"]);
    ok(dir, &["freq", "news.json", "--kw", "立憲", "--bucket", "1898-1900,1901-1914", "--format", "json", "-o", "freq.json"]);
    ok(dir, &["colloc", "news.json", "--member", "變法", "--member", "立憲", "-o", "colloc.tsv"]);
    ok(dir, &["colloc", "news.json", "--anchor", "立憲", "--periods", "1898-1900,1901-1914", "--format", "json", "-o", "table.json"]);
    ok(dir, &["pseudowords", "novel.json", "--min-len", "3", "--prune", "-o", "pw.tsv"]);
    ok(dir, &["kwic", "novel.json", "--kw", "笑道", "-o", "kwic.tsv"]);
    ok(dir, &["rate", "novel.json", "--subject", "寶玉", "--subject", "黛玉", "--event", "笑道", "-o", "rate.tsv"]);
    ok(dir, &["presence", "novel.json", "--doc", "novel3", "--entity", "寶玉", "--entity", "黛玉", "--master", "寶釵@2", "-o", "presence.json"]);
    ok(dir, &["chart-data", "novel.json", "--preset", "drc-smiles", "-o", "chart.tsv"]);
    ok(
        dir,
        &[
            "translit", "tr/target.json", "--contrast", "tr/contrast.json", "--train", "tr/train.json", "--train-gold",
            "tr/train_gold.tsv", "--gold", "tr/gold.tsv", "--report", "tr_report.json", "-o", "ranked.tsv",
        ],
    );
    ok(dir, &["disambig", "da/records.tsv", "--gazetteer", "da/gazetteer.tsv", "--review-queue", "queue.tsv", "-o", "disambig.json"]);
}

pub fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

