//! An instance together with its tagged tokens, plus the alignment audit.

use crate::bio::{encode_instance, Alignment, TagSequence};
use crate::corpus::{Corpus, Instance};
use crate::error::{Error, Result};
use crate::lexer::{analyze, Token};
use crate::preprocessed::Block;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub instance: Instance,
    pub tokens: Vec<Token>,
}

impl Document {
    pub fn new(instance: Instance) -> Document {
        let tokens = analyze(&instance.text);
        Document { instance, tokens }
    }

    pub fn id(&self) -> &str {
        &self.instance.id
    }

    pub fn gold_tags(&self, alignment: Alignment) -> Result<TagSequence> {
        encode_instance(&self.instance, &self.tokens, alignment)
    }

    pub fn block(&self, tags: &TagSequence) -> Result<Block> {
        Block::from_tokens(&self.tokens, tags)
    }
}

pub fn analyze_corpus(corpus: &Corpus) -> Vec<Document> {
    corpus.instances.iter().cloned().map(Document::new).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub total: usize,
    pub aligned: usize,
    /// `(instance id, reason)` for every instance whose spans split a token.
    pub failures: Vec<(String, String)>,
}

impl AuditReport {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.aligned as f64 / self.total as f64
        }
    }
}

/// Counts labeled instances whose gold spans fall on token boundaries.
pub fn audit_alignment(docs: &[Document]) -> AuditReport {
    let mut report = AuditReport {
        total: 0,
        aligned: 0,
        failures: Vec::new(),
    };
    for doc in docs {
        if doc.instance.cause.is_none() || doc.instance.effect.is_none() {
            continue;
        }
        report.total += 1;
        match doc.gold_tags(Alignment::Strict) {
            Ok(_) => report.aligned += 1,
            Err(Error::Alignment { message, .. }) => report.failures.push((doc.id().to_string(), message)),
            Err(e) => report.failures.push((doc.id().to_string(), e.to_string())),
        }
    }
    report
}
