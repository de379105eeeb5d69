//! Prediction sets: one classifier's labels for every instance of a corpus.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use crate::bio::TagSequence;
use crate::document::Document;
use crate::error::{Error, Result};
use crate::preprocessed::{self, Block};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub model_name: String,
    pub sequences: BTreeMap<String, TagSequence>,
}

impl PredictionSet {
    pub fn get(&self, id: &str) -> Option<&TagSequence> {
        self.sequences.get(id)
    }

    /// Blocks checked against `docs`: every document must appear exactly once
    /// with the same token surfaces.
    pub fn from_blocks(model_name: &str, blocks: Vec<Block>, docs: &[Document]) -> Result<PredictionSet> {
        let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.id(), d)).collect();
        let mut seen = HashSet::new();
        let mut sequences = BTreeMap::new();
        for block in blocks {
            let doc = by_id
                .get(block.id.as_str())
                .ok_or_else(|| Error::alignment(&block.id, format!("{model_name}: unknown instance id")))?;
            if !seen.insert(block.id.clone()) {
                return Err(Error::alignment(
                    &block.id,
                    format!("{model_name}: instance appears twice"),
                ));
            }
            if block.rows.len() != doc.tokens.len() {
                return Err(Error::alignment(
                    &block.id,
                    format!(
                        "{model_name}: {} predicted tokens, corpus has {}",
                        block.rows.len(),
                        doc.tokens.len()
                    ),
                ));
            }
            for (i, (row, tok)) in block.rows.iter().zip(&doc.tokens).enumerate() {
                if row.surface != tok.surface {
                    return Err(Error::alignment(
                        &block.id,
                        format!(
                            "{model_name}: token {i} is {:?}, corpus has {:?}",
                            row.surface, tok.surface
                        ),
                    ));
                }
            }
            sequences.insert(block.id.clone(), block.tags());
        }
        let missing: Vec<&str> = docs
            .iter()
            .map(Document::id)
            .filter(|id| !seen.contains(*id))
            .collect();
        if !missing.is_empty() {
            return Err(Error::alignment(
                missing.join(","),
                format!(
                    "{model_name}: {} instance(s) missing from predictions",
                    missing.len()
                ),
            ));
        }
        Ok(PredictionSet {
            model_name: model_name.to_string(),
            sequences,
        })
    }
}

pub fn import_predictions(path: &Path, model_name: &str, docs: &[Document]) -> Result<PredictionSet> {
    PredictionSet::from_blocks(model_name, preprocessed::read_file(path)?, docs)
}
