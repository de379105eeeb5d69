//! Baseline token classifier: multinomial logistic regression over window
//! features, with the token's POS one-hot fused in as `pos[d]=TAG` features.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bio::{BioLabel, TagSequence, NUM_LABELS};
use crate::error::{Error, Result};
use crate::fsio;
use crate::lexer::Lexeme;
use crate::pos::{pos_one_hot, TAGSET_SIZE};

pub const MODEL_FORMAT_VERSION: u32 = 1;
pub const BATCH_SIZE: usize = 64;
pub const LEARNING_RATE: f64 = 0.1;
pub const L2: f64 = 1e-4;
pub const DEFAULT_WINDOW: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub window: usize,
    pub use_pos: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            window: DEFAULT_WINDOW,
            use_pos: true,
        }
    }
}

/// Active feature names for one position, sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector(pub Vec<String>);

impl FeatureVector {
    pub fn contains(&self, name: &str) -> bool {
        self.0.binary_search_by(|f| f.as_str().cmp(name)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

fn offset_label(d: isize) -> String {
    if d > 0 {
        format!("+{d}")
    } else {
        d.to_string()
    }
}

/// Collapses runs in a capitalization/digit pattern: `Sunshine` -> `Xx`,
/// `$0.03` -> `$d.d`.
pub fn word_shape(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        let m = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if !out.ends_with(m) {
            out.push(m);
        }
    }
    out
}

pub fn featurize<L: Lexeme>(tokens: &[L], position: usize, config: &FeatureConfig) -> Result<FeatureVector> {
    if position >= tokens.len() {
        return Err(Error::InvalidArgument(format!(
            "position {position} out of range for {} tokens",
            tokens.len()
        )));
    }
    let w = config.window as isize;
    let mut feats = vec!["bias".to_string()];
    for d in -w..=w {
        let at = offset_label(d);
        let j = position as isize + d;
        if j < 0 {
            feats.push(format!("w[{at}]=<BOS>"));
            continue;
        }
        let Some(tok) = tokens.get(j as usize) else {
            feats.push(format!("w[{at}]=<EOS>"));
            continue;
        };
        feats.push(format!("w[{at}]={}", tok.surface().to_lowercase()));
        feats.push(format!("shape[{at}]={}", word_shape(tok.surface())));
        if config.use_pos {
            let one_hot = pos_one_hot(tok.pos(), TAGSET_SIZE)?;
            for (id, _) in one_hot.iter().enumerate().filter(|(_, &bit)| bit == 1) {
                feats.push(format!("pos[{at}]={}", crate::pos::TAGSET[id]));
            }
        }
    }
    feats.sort();
    feats.dedup();
    Ok(FeatureVector(feats))
}

/// One training sequence. Positions whose `mask` is false are excluded from
/// the loss; their labels are never read.
#[derive(Debug, Clone)]
pub struct TrainingExample<L> {
    pub tokens: Vec<L>,
    pub labels: Vec<BioLabel>,
    pub mask: Vec<bool>,
}

impl<L: Lexeme> TrainingExample<L> {
    pub fn new(tokens: Vec<L>, labels: Vec<BioLabel>) -> Result<Self> {
        if tokens.len() != labels.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} tokens",
                labels.len(),
                tokens.len()
            )));
        }
        let mask = vec![true; tokens.len()];
        Ok(TrainingExample { tokens, labels, mask })
    }

    /// Masks the positions whose loss id is `-100` after padding to
    /// `max_seq_len` with `bracketing`, i.e. tokens truncated off the tail.
    pub fn with_loss_ids(
        tokens: Vec<L>,
        labels: Vec<BioLabel>,
        max_seq_len: usize,
        bracketing: crate::bio::Bracketing,
    ) -> Result<Self> {
        let padded = crate::bio::to_loss_ids(&labels, max_seq_len, bracketing)?;
        let mut ex = TrainingExample::new(tokens, labels)?;
        for (i, m) in ex.mask.iter_mut().enumerate() {
            *m = i < padded.kept && padded.ids[padded.offset + i] != crate::bio::IGNORE_INDEX;
        }
        Ok(ex)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub features: FeatureConfig,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            seed: 42,
            features: FeatureConfig::default(),
            learning_rate: LEARNING_RATE,
            l2: L2,
            batch_size: BATCH_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub epochs: usize,
    pub seed: u64,
    pub learning_rate: f64,
    pub l2: f64,
    pub batch_size: usize,
    pub trainable_positions: usize,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerModel {
    pub version: u32,
    pub tagset: Vec<String>,
    pub labels: Vec<String>,
    pub features: FeatureConfig,
    pub metadata: TrainingMetadata,
    /// Feature names in id order.
    pub vocabulary: Vec<String>,
    pub weights: Vec<[f64; NUM_LABELS]>,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

fn build_index(vocabulary: &[String]) -> HashMap<String, u32> {
    vocabulary
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i as u32))
        .collect()
}

fn scores(weights: &[[f64; NUM_LABELS]], active: &[u32]) -> [f64; NUM_LABELS] {
    let mut s = [0.0; NUM_LABELS];
    for &f in active {
        for (acc, w) in s.iter_mut().zip(&weights[f as usize]) {
            *acc += w;
        }
    }
    s
}

/// First index of the maximum, so ties go to the lowest label id.
fn argmax(s: &[f64; NUM_LABELS]) -> usize {
    let mut best = 0;
    for k in 1..NUM_LABELS {
        if s[k] > s[best] {
            best = k;
        }
    }
    best
}

fn softmax(s: &[f64; NUM_LABELS]) -> [f64; NUM_LABELS] {
    let max = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p = s.map(|x| (x - max).exp());
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= z);
    p
}

/// Mini-batch gradient descent on the cross-entropy of the unmasked
/// positions. L2 decay is applied to the weights of features active in the
/// batch.
pub fn train<L: Lexeme>(data: &[TrainingExample<L>], config: &TrainConfig) -> Result<TaggerModel> {
    if config.epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be at least 1".into()));
    }
    if config.batch_size == 0 {
        return Err(Error::InvalidArgument("batch size must be at least 1".into()));
    }
    if data.is_empty() {
        return Err(Error::InvalidArgument("empty training data".into()));
    }

    let mut names: Vec<Vec<String>> = Vec::new();
    let mut targets: Vec<Option<usize>> = Vec::new();
    for ex in data {
        if ex.tokens.len() != ex.labels.len() || ex.mask.len() != ex.labels.len() {
            return Err(Error::InvalidArgument("ragged training example".into()));
        }
        for i in 0..ex.tokens.len() {
            names.push(featurize(&ex.tokens, i, &config.features)?.0);
            targets.push(ex.mask[i].then(|| ex.labels[i].id()));
        }
    }
    let vocabulary: Vec<String> = names
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = build_index(&vocabulary);
    let encoded: Vec<Vec<u32>> = names
        .iter()
        .map(|fs| fs.iter().map(|f| index[f]).collect())
        .collect();

    let mut trainable: Vec<usize> = (0..targets.len()).filter(|&i| targets[i].is_some()).collect();
    if trainable.is_empty() {
        return Err(Error::NoTrainablePositions);
    }

    let mut weights = vec![[0.0; NUM_LABELS]; vocabulary.len()];
    let mut grad = vec![[0.0; NUM_LABELS]; vocabulary.len()];
    let mut touched: Vec<u32> = Vec::new();
    let mut seen = vec![false; vocabulary.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    for _ in 0..config.epochs {
        trainable.shuffle(&mut rng);
        for batch in trainable.chunks(config.batch_size) {
            for &pos in batch {
                let gold = targets[pos].expect("trainable");
                let p = softmax(&scores(&weights, &encoded[pos]));
                for &f in &encoded[pos] {
                    let g = &mut grad[f as usize];
                    for k in 0..NUM_LABELS {
                        g[k] += p[k] - if k == gold { 1.0 } else { 0.0 };
                    }
                    if !seen[f as usize] {
                        seen[f as usize] = true;
                        touched.push(f);
                    }
                }
            }
            let n = batch.len() as f64;
            for &f in &touched {
                let (w, g) = (&mut weights[f as usize], &mut grad[f as usize]);
                for k in 0..NUM_LABELS {
                    w[k] -= config.learning_rate * (g[k] / n + config.l2 * w[k]);
                    g[k] = 0.0;
                }
                seen[f as usize] = false;
            }
            touched.clear();
        }
    }

    let correct = trainable
        .iter()
        .filter(|&&i| argmax(&scores(&weights, &encoded[i])) == targets[i].unwrap())
        .count();

    Ok(TaggerModel {
        version: MODEL_FORMAT_VERSION,
        tagset: crate::pos::TAGSET.iter().map(|s| s.to_string()).collect(),
        labels: BioLabel::ALL.iter().map(|l| l.name().to_string()).collect(),
        features: config.features,
        metadata: TrainingMetadata {
            epochs: config.epochs,
            seed: config.seed,
            learning_rate: config.learning_rate,
            l2: config.l2,
            batch_size: config.batch_size,
            trainable_positions: trainable.len(),
            train_accuracy: correct as f64 / trainable.len() as f64,
        },
        vocabulary,
        weights,
        index,
    })
}

impl TaggerModel {
    fn active(&self, fv: &FeatureVector) -> Vec<u32> {
        fv.iter().filter_map(|f| self.index.get(f).copied()).collect()
    }

    pub fn predict_labels<L: Lexeme>(&self, tokens: &[L]) -> Vec<BioLabel> {
        (0..tokens.len())
            .map(|i| {
                let fv = featurize(tokens, i, &self.features).expect("position in range");
                let k = argmax(&scores(&self.weights, &self.active(&fv)));
                BioLabel::from_id(k).expect("five classes")
            })
            .collect()
    }

    pub fn predict<L: Lexeme>(&self, instance_id: &str, tokens: &[L]) -> TagSequence {
        TagSequence::new(instance_id, self.predict_labels(tokens))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    pub fn from_json(raw: &str) -> Result<TaggerModel> {
        let mut model: TaggerModel = serde_json::from_str(raw).map_err(|e| Error::Model(e.to_string()))?;
        if model.version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!(
                "unsupported model version {} (expected {MODEL_FORMAT_VERSION})",
                model.version
            )));
        }
        let tagset_matches = model.tagset.iter().map(String::as_str).eq(crate::pos::TAGSET);
        if !tagset_matches {
            return Err(Error::Model(
                "model was trained with a different POS tagset".into(),
            ));
        }
        if model.weights.len() != model.vocabulary.len() {
            return Err(Error::Model("weights and vocabulary differ in length".into()));
        }
        model.index = build_index(&model.vocabulary);
        Ok(model)
    }

    pub fn save(&self, path: &Path, force: bool) -> Result<()> {
        let json = self.to_json();
        fsio::write_atomic(path, force, |w| w.write_all(json.as_bytes()))
    }

    pub fn load(path: &Path) -> Result<TaggerModel> {
        TaggerModel::from_json(&fsio::read_to_string(path)?)
    }
}

/// Fraction of unmasked positions where `model` predicts the gold label.
pub fn token_accuracy<L: Lexeme>(model: &TaggerModel, data: &[TrainingExample<L>]) -> f64 {
    let mut total = 0usize;
    let mut correct = 0usize;
    for ex in data {
        let pred = model.predict_labels(&ex.tokens);
        for ((p, gold), &live) in pred.iter().zip(&ex.labels).zip(&ex.mask) {
            if live {
                total += 1;
                correct += usize::from(p == gold);
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}
