//! Token-level precision/recall/F1 over the five BIO classes, weighted by
//! gold support, and instance-level exact match of the extracted strings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::bio::{BioLabel, TagSequence, NUM_LABELS};
use crate::ensemble::CausalPair;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub exact_match: Option<f64>,
    pub per_label: BTreeMap<BioLabel, LabelScore>,
    pub instances: usize,
}

/// `confusion[gold][pred]` counts pooled over all instances.
pub type Confusion = [[usize; NUM_LABELS]; NUM_LABELS];

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn confusion(gold: &[TagSequence], pred: &[TagSequence]) -> Result<Confusion> {
    let by_id: BTreeMap<&str, &TagSequence> = pred.iter().map(|p| (p.instance_id.as_str(), p)).collect();
    if by_id.len() != pred.len() {
        return Err(Error::InvalidArgument("duplicate instance in predictions".into()));
    }
    if gold.len() != pred.len() {
        let gold_ids: std::collections::BTreeSet<&str> =
            gold.iter().map(|g| g.instance_id.as_str()).collect();
        if let Some(extra) = pred.iter().find(|p| !gold_ids.contains(p.instance_id.as_str())) {
            return Err(Error::alignment(
                &extra.instance_id,
                "predicted instance has no gold",
            ));
        }
    }
    let mut m = [[0usize; NUM_LABELS]; NUM_LABELS];
    for g in gold {
        let p = by_id
            .get(g.instance_id.as_str())
            .ok_or_else(|| Error::alignment(&g.instance_id, "no prediction for instance"))?;
        if p.len() != g.len() {
            return Err(Error::alignment(
                &g.instance_id,
                format!("gold has {} labels, prediction {}", g.len(), p.len()),
            ));
        }
        for (gl, pl) in g.labels.iter().zip(&p.labels) {
            m[gl.id()][pl.id()] += 1;
        }
    }
    Ok(m)
}

/// Per-label scores from a confusion matrix plus support-weighted averages.
pub fn scores_from_confusion(m: &Confusion) -> (BTreeMap<BioLabel, LabelScore>, f64, f64, f64) {
    let mut per_label = BTreeMap::new();
    let total: usize = m.iter().flatten().sum();
    let (mut wp, mut wr, mut wf) = (0.0, 0.0, 0.0);
    for label in BioLabel::ALL {
        let k = label.id();
        let tp = m[k][k];
        let support: usize = m[k].iter().sum();
        let predicted: usize = m.iter().map(|row| row[k]).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = harmonic(precision, recall);
        per_label.insert(
            label,
            LabelScore {
                precision,
                recall,
                f1,
                support,
            },
        );
        let w = support as f64;
        wp += w * precision;
        wr += w * recall;
        wf += w * f1;
    }
    let total = total.max(1) as f64;
    (per_label, wp / total, wr / total, wf / total)
}

/// Pooled token scores; `exact_match` is left unset.
pub fn token_prf(gold: &[TagSequence], pred: &[TagSequence]) -> Result<ScoreReport> {
    let m = confusion(gold, pred)?;
    if m.iter().flatten().sum::<usize>() == 0 {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    let (per_label, precision, recall, f1) = scores_from_confusion(&m);
    Ok(ScoreReport {
        precision,
        recall,
        f1,
        exact_match: None,
        per_label,
        instances: gold.len(),
    })
}

/// Fraction of gold instances whose predicted cause and effect strings are
/// byte-identical to the gold ones. Missing or `None` predictions are misses.
pub fn exact_match(
    gold: &BTreeMap<String, (String, String)>,
    pred: &BTreeMap<String, Option<CausalPair>>,
) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    if let Some(id) = pred.keys().find(|id| !gold.contains_key(*id)) {
        return Err(Error::alignment(id, "predicted instance has no gold"));
    }
    let hits = gold
        .iter()
        .filter(|(id, (cause, effect))| {
            matches!(pred.get(*id), Some(Some(p)) if &p.cause_text == cause && &p.effect_text == effect)
        })
        .count();
    Ok(hits as f64 / gold.len() as f64)
}

pub fn score_report(
    gold_tags: &[TagSequence],
    pred_tags: &[TagSequence],
    gold_pairs: &BTreeMap<String, (String, String)>,
    pred_pairs: &BTreeMap<String, Option<CausalPair>>,
) -> Result<ScoreReport> {
    let mut report = token_prf(gold_tags, pred_tags)?;
    report.exact_match = Some(exact_match(gold_pairs, pred_pairs)?);
    Ok(report)
}

impl ScoreReport {
    /// Aligned plain-text table.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "instances    {}", self.instances);
        let _ = writeln!(s, "f1           {:.4}", self.f1);
        let _ = writeln!(s, "recall       {:.4}", self.recall);
        let _ = writeln!(s, "precision    {:.4}", self.precision);
        match self.exact_match {
            Some(em) => {
                let _ = writeln!(s, "exact_match  {em:.4}");
            }
            None => {
                let _ = writeln!(s, "exact_match  n/a");
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<6} {:>9} {:>9} {:>9} {:>9}",
            "label", "precision", "recall", "f1", "support"
        );
        for (label, ls) in &self.per_label {
            let _ = writeln!(
                s,
                "{:<6} {:>9.4} {:>9.4} {:>9.4} {:>9}",
                label.name(),
                ls.precision,
                ls.recall,
                ls.f1,
                ls.support
            );
        }
        s
    }

    /// Flat `key=value` lines with full-precision numbers.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "instances={}", self.instances);
        let _ = writeln!(s, "precision={}", self.precision);
        let _ = writeln!(s, "recall={}", self.recall);
        let _ = writeln!(s, "f1={}", self.f1);
        if let Some(em) = self.exact_match {
            let _ = writeln!(s, "exact_match={em}");
        }
        for (label, ls) in &self.per_label {
            let n = label.name();
            let _ = writeln!(s, "label.{n}.precision={}", ls.precision);
            let _ = writeln!(s, "label.{n}.recall={}", ls.recall);
            let _ = writeln!(s, "label.{n}.f1={}", ls.f1);
            let _ = writeln!(s, "label.{n}.support={}", ls.support);
        }
        s
    }
}
