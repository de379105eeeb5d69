//! Fixtures and brute-force oracles shared by the integration tests. Nothing
//! here calls into the code paths it is used to check.

#![allow(dead_code)]

use std::path::PathBuf;

use causeffect::bio::{BioLabel, NUM_LABELS};
use causeffect::corpus::{read_corpus, Corpus, Mode};
use causeffect::lexer::Lexeme;
use causeffect::pos::PosTag;
use rand::Rng;

pub fn fixture_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixture_corpus.csv")
}

pub fn fixture() -> Corpus {
    read_corpus(&fixture_path(), Mode::Training, b';').expect("fixture parses")
}

pub fn random_labels<R: Rng>(rng: &mut R, n: usize) -> Vec<BioLabel> {
    (0..n)
        .map(|_| BioLabel::from_id(rng.gen_range(0..NUM_LABELS)).unwrap())
        .collect()
}

/// Counts every label at one position by scanning the member list once per
/// label; ties on the top count defer to the priority member.
pub fn oracle_vote(column: &[BioLabel], priority: usize) -> BioLabel {
    let mut best_count = 0;
    let mut best: Vec<BioLabel> = Vec::new();
    for candidate in BioLabel::ALL {
        let count = column.iter().filter(|&&l| l == candidate).count();
        if count > best_count {
            best_count = count;
            best = vec![candidate];
        } else if count == best_count {
            best.push(candidate);
        }
    }
    if best.len() == 1 {
        best[0]
    } else {
        column[priority]
    }
}

/// Weighted (precision, recall, f1) from an explicitly enumerated 5x5
/// confusion matrix.
#[allow(clippy::needless_range_loop)]
pub fn oracle_prf(pairs: &[(BioLabel, BioLabel)]) -> (f64, f64, f64) {
    let mut m = [[0u64; 5]; 5];
    for (g, p) in pairs {
        m[g.id()][p.id()] += 1;
    }
    let total: u64 = pairs.len() as u64;
    let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
    for k in 0..5 {
        let tp = m[k][k] as f64;
        let mut gold = 0u64;
        let mut pred = 0u64;
        for j in 0..5 {
            gold += m[k][j];
            pred += m[j][k];
        }
        let p = if pred == 0 { 0.0 } else { tp / pred as f64 };
        let r = if gold == 0 { 0.0 } else { tp / gold as f64 };
        let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
        let w = gold as f64 / total as f64;
        wp += w * p;
        wr += w * r;
        wf += w * f;
    }
    (wp, wr, wf)
}

/// A token whose POS tag is set directly rather than by the rule tagger.
#[derive(Debug, Clone)]
pub struct SynthToken {
    pub word: String,
    pub tag: PosTag,
}

impl Lexeme for SynthToken {
    fn surface(&self) -> &str {
        &self.word
    }

    fn pos(&self) -> PosTag {
        self.tag
    }
}

pub const SYNTH_TAGS: [&str; 10] = ["DT", "NN", "VBD", "JJ", "IN", "RB", "CD", "PRP", "NNS", "CC"];

/// Label determined by the POS tag alone.
pub fn synth_label(tag: PosTag) -> BioLabel {
    let i = SYNTH_TAGS.iter().position(|t| *t == tag.name()).unwrap();
    BioLabel::from_id(i % NUM_LABELS).unwrap()
}

/// Sequences of random lowercase words carrying random POS tags, so word
/// identity and shape say nothing about the label.
pub fn synthetic_pos_corpus<R: Rng>(rng: &mut R, sequences: usize) -> Vec<(Vec<SynthToken>, Vec<BioLabel>)> {
    let words: Vec<String> = (0..300)
        .map(|_| (0..6).map(|_| rng.gen_range(b'a'..=b'z') as char).collect())
        .collect();
    (0..sequences)
        .map(|_| {
            let len = rng.gen_range(8..20);
            let toks: Vec<SynthToken> = (0..len)
                .map(|_| SynthToken {
                    word: words[rng.gen_range(0..words.len())].clone(),
                    tag: PosTag::from_name(SYNTH_TAGS[rng.gen_range(0..SYNTH_TAGS.len())]).unwrap(),
                })
                .collect();
            let labels = toks.iter().map(|t| synth_label(t.tag)).collect();
            (toks, labels)
        })
        .collect()
}
