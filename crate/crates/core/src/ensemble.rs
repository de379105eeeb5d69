//! Mode voting across classifiers, gap merging and longest-pair selection.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::bio::{decode_spans, runs, BioLabel, SpanCandidate, TagSequence, NUM_LABELS};
use crate::document::Document;
use crate::error::{Error, Result};
use crate::fsio;
use crate::predictions::PredictionSet;

pub const DEFAULT_MERGE_THRESHOLD: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleConfig {
    members: Vec<String>,
    priority: usize,
    pub merge_threshold: usize,
}

impl EnsembleConfig {
    pub fn new(members: Vec<String>, priority_model: &str, merge_threshold: usize) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidArgument(
                "ensemble needs at least one member".into(),
            ));
        }
        for (i, m) in members.iter().enumerate() {
            if members[..i].contains(m) {
                return Err(Error::InvalidArgument(format!("duplicate member name {m:?}")));
            }
        }
        let priority = members.iter().position(|m| m == priority_model).ok_or_else(|| {
            Error::InvalidArgument(format!("priority model {priority_model:?} is not a member"))
        })?;
        Ok(EnsembleConfig {
            members,
            priority,
            merge_threshold,
        })
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn priority_model(&self) -> &str {
        &self.members[self.priority]
    }

    pub fn priority_index(&self) -> usize {
        self.priority
    }
}

/// Per position, the strictly most frequent label; on a tie for the top
/// count, the priority member's label.
pub fn vote(predictions: &[&TagSequence], config: &EnsembleConfig) -> Result<TagSequence> {
    let first = predictions
        .first()
        .ok_or_else(|| Error::InvalidArgument("no member predictions to vote on".into()))?;
    if predictions.len() != config.members.len() {
        return Err(Error::InvalidArgument(format!(
            "{} predictions for {} members",
            predictions.len(),
            config.members.len()
        )));
    }
    let len = first.len();
    if let Some((i, p)) = predictions.iter().enumerate().find(|(_, p)| p.len() != len) {
        return Err(Error::alignment(
            &first.instance_id,
            format!(
                "member {} has {} labels, member {} has {len}",
                config.members[i],
                p.len(),
                config.members[0]
            ),
        ));
    }
    let priority = predictions[config.priority];
    let labels = (0..len)
        .map(|pos| {
            let mut counts = [0usize; NUM_LABELS];
            for p in predictions {
                counts[p.labels[pos].id()] += 1;
            }
            let top = *counts.iter().max().expect("five labels");
            let mut winners = BioLabel::ALL.iter().filter(|l| counts[l.id()] == top);
            match (winners.next(), winners.next()) {
                (Some(&only), None) => only,
                _ => priority.labels[pos],
            }
        })
        .collect();
    Ok(TagSequence::new(&first.instance_id, labels))
}

/// Joins consecutive same-kind runs separated by fewer than `threshold`
/// padding tokens: the gap and the second run's head become inside labels.
pub fn merge_gapped_spans(tags: &TagSequence, threshold: usize) -> TagSequence {
    let mut labels = tags.labels.clone();
    loop {
        let spans = runs(&labels);
        let mut changed = false;
        for pair in spans.windows(2) {
            let ((k1, _, end1), (k2, start2, _)) = (pair[0], pair[1]);
            if k1 == k2 && start2 - end1 < threshold {
                for l in &mut labels[end1..=start2] {
                    *l = BioLabel::inside(k1);
                }
                changed = true;
                break;
            }
        }
        if !changed {
            return TagSequence::new(&tags.instance_id, labels);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalPair {
    pub cause_text: String,
    pub effect_text: String,
    /// Token ranges, half-open.
    pub cause_tokens: (usize, usize),
    pub effect_tokens: (usize, usize),
}

fn longest(candidates: &[SpanCandidate]) -> Option<&SpanCandidate> {
    // min_by_key keeps the first of equals, so ties go to the earliest start
    candidates
        .iter()
        .min_by_key(|c| (std::cmp::Reverse(c.token_len()), c.token_start))
}

/// Longest cause and longest effect, chosen independently.
pub fn select_pair(causes: &[SpanCandidate], effects: &[SpanCandidate]) -> Option<CausalPair> {
    let (c, e) = (longest(causes)?, longest(effects)?);
    Some(CausalPair {
        cause_text: c.text.clone(),
        effect_text: e.text.clone(),
        cause_tokens: (c.token_start, c.token_end),
        effect_tokens: (e.token_start, e.token_end),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOutput {
    pub tags: TagSequence,
    pub pair: Option<CausalPair>,
}

/// Merge, decode and select for one already-fused sequence.
pub fn post_process(doc: &Document, fused: &TagSequence, merge_threshold: usize) -> Result<PipelineOutput> {
    let tags = merge_gapped_spans(fused, merge_threshold);
    let (causes, effects) = decode_spans(&doc.tokens, &tags, &doc.instance.text)?;
    let pair = select_pair(&causes, &effects);
    Ok(PipelineOutput { tags, pair })
}

pub fn run_pipeline(
    prediction_sets: &[PredictionSet],
    docs: &[Document],
    config: &EnsembleConfig,
) -> Result<BTreeMap<String, PipelineOutput>> {
    let ordered: Vec<&PredictionSet> = config
        .members
        .iter()
        .map(|name| {
            prediction_sets
                .iter()
                .find(|p| &p.model_name == name)
                .ok_or_else(|| Error::InvalidArgument(format!("no predictions for member {name:?}")))
        })
        .collect::<Result<_>>()?;

    let mut out = BTreeMap::new();
    for doc in docs {
        let id = doc.id();
        let member_tags: Vec<&TagSequence> = ordered
            .iter()
            .map(|set| {
                set.get(id)
                    .ok_or_else(|| Error::alignment(id, format!("missing from member {}", set.model_name)))
            })
            .collect::<Result<_>>()?;
        let fused = vote(&member_tags, config).map_err(|e| e.in_instance(id))?;
        if fused.len() != doc.tokens.len() {
            return Err(Error::alignment(
                id,
                format!("{} labels for {} tokens", fused.len(), doc.tokens.len()),
            ));
        }
        out.insert(id.to_string(), post_process(doc, &fused, config.merge_threshold)?);
    }
    Ok(out)
}

/// Answer rows `Index;Text;Cause;Effect`, ordered by instance id. Unextracted
/// instances get empty cause and effect.
pub fn write_answers<W: Write>(
    out: W,
    docs: &[Document],
    results: &BTreeMap<String, PipelineOutput>,
) -> Result<()> {
    let texts: BTreeMap<&str, &str> = docs.iter().map(|d| (d.id(), d.instance.text.as_str())).collect();
    let mut w = csv::WriterBuilder::new().delimiter(b';').from_writer(out);
    let io = |e: csv::Error| Error::Model(format!("writing answers: {e}"));
    w.write_record(["Index", "Text", "Cause", "Effect"]).map_err(io)?;
    for (id, res) in results {
        let text = texts
            .get(id.as_str())
            .ok_or_else(|| Error::alignment(id, "result for unknown instance"))?;
        let (cause, effect) = res
            .pair
            .as_ref()
            .map(|p| (p.cause_text.as_str(), p.effect_text.as_str()))
            .unwrap_or(("", ""));
        w.write_record([id.as_str(), text, cause, effect]).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Model(format!("writing answers: {e}")))?;
    Ok(())
}

pub fn write_answers_file(
    path: &Path,
    docs: &[Document],
    results: &BTreeMap<String, PipelineOutput>,
    force: bool,
) -> Result<()> {
    let mut buf = Vec::new();
    write_answers(&mut buf, docs, results)?;
    fsio::write_atomic(path, force, |w| w.write_all(&buf))
}

/// Reads an answers file back as `id -> (cause, effect)`; empty pairs map to
/// `None`.
pub fn read_answers(raw: &str) -> Result<BTreeMap<String, Option<(String, String)>>> {
    let mut r = csv::ReaderBuilder::new()
        .delimiter(b';')
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());
    let mut out = BTreeMap::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| {
            Error::format(
                e.position().map(|p| p.line() as usize).unwrap_or(0),
                e.to_string(),
            )
        })?;
        if rec.len() < 4 {
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
            return Err(Error::format(line, "expected Index;Text;Cause;Effect"));
        }
        let pair =
            (!rec[2].is_empty() || !rec[3].is_empty()).then(|| (rec[2].to_string(), rec[3].to_string()));
        out.insert(rec[0].to_string(), pair);
    }
    Ok(out)
}
