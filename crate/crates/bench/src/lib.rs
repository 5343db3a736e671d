//! Fixed-seed inputs for the criterion benches.

use wenxian_core::corpus::Corpus;
use wenxian_core::synth;

pub const SEED: u64 = 17;

/// Random documents over a small alphabet, so repeats are plentiful.
pub fn random_texts(docs: usize, max_len: usize) -> Vec<String> {
    synth::random_cjk_docs(SEED, docs, max_len, 40)
}

pub fn random_corpus(docs: usize, max_len: usize) -> Corpus {
    synth::corpus_from_texts(&random_texts(docs, max_len)).expect("synthetic corpus")
}

/// Queries drawn from the corpus itself, 1–6 characters.
pub fn queries(corpus: &Corpus, n: usize) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    let docs = corpus.docs();
    let mut k = 0usize;
    while out.len() < n {
        let d = &docs[k % docs.len()];
        let len = 1 + k % 6;
        if d.len() >= len {
            let s = (k * 7919) % (d.len() - len + 1);
            out.push(d.text[s..s + len].iter().collect());
        }
        k += 1;
    }
    out
}
