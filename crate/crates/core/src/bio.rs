//! BIO labels for cause/effect phrases and conversions between character
//! spans, per-token label sequences and loss-id sequences.

use std::fmt;
use std::str::FromStr;

use crate::corpus::{CharSpan, Instance};
use crate::error::{Error, Result};
use crate::lexer::Token;

/// Outside tokens are written as padding (`-`), id 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BioLabel {
    Pad = 0,
    BeginCause = 1,
    InsideCause = 2,
    BeginEffect = 3,
    InsideEffect = 4,
}

pub const NUM_LABELS: usize = 5;

/// Loss id for positions excluded from training (bracketing and sequence
/// padding).
pub const IGNORE_INDEX: i32 = -100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhraseKind {
    Cause,
    Effect,
}

impl BioLabel {
    pub const ALL: [BioLabel; NUM_LABELS] = [
        BioLabel::Pad,
        BioLabel::BeginCause,
        BioLabel::InsideCause,
        BioLabel::BeginEffect,
        BioLabel::InsideEffect,
    ];

    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<BioLabel> {
        BioLabel::ALL.get(id).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BioLabel::Pad => "-",
            BioLabel::BeginCause => "B-C",
            BioLabel::InsideCause => "I-C",
            BioLabel::BeginEffect => "B-E",
            BioLabel::InsideEffect => "I-E",
        }
    }

    pub fn kind(self) -> Option<PhraseKind> {
        match self {
            BioLabel::Pad => None,
            BioLabel::BeginCause | BioLabel::InsideCause => Some(PhraseKind::Cause),
            BioLabel::BeginEffect | BioLabel::InsideEffect => Some(PhraseKind::Effect),
        }
    }

    pub fn is_begin(self) -> bool {
        matches!(self, BioLabel::BeginCause | BioLabel::BeginEffect)
    }

    pub fn begin(kind: PhraseKind) -> BioLabel {
        match kind {
            PhraseKind::Cause => BioLabel::BeginCause,
            PhraseKind::Effect => BioLabel::BeginEffect,
        }
    }

    pub fn inside(kind: PhraseKind) -> BioLabel {
        match kind {
            PhraseKind::Cause => BioLabel::InsideCause,
            PhraseKind::Effect => BioLabel::InsideEffect,
        }
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BioLabel {
    type Err = Error;

    /// Accepts the five scheme names and `O` as an alias for padding.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "-" | "O" => Ok(BioLabel::Pad),
            "B-C" => Ok(BioLabel::BeginCause),
            "I-C" => Ok(BioLabel::InsideCause),
            "B-E" => Ok(BioLabel::BeginEffect),
            "I-E" => Ok(BioLabel::InsideEffect),
            other => Err(Error::InvalidArgument(format!("unknown BIO tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TagSequence {
    pub instance_id: String,
    pub labels: Vec<BioLabel>,
}

impl TagSequence {
    pub fn new(instance_id: impl Into<String>, labels: Vec<BioLabel>) -> TagSequence {
        TagSequence {
            instance_id: instance_id.into(),
            labels,
        }
    }

    pub fn padding(instance_id: impl Into<String>, len: usize) -> TagSequence {
        TagSequence::new(instance_id, vec![BioLabel::Pad; len])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// How span boundaries that fall inside a token are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Alignment {
    /// Report an alignment error.
    #[default]
    Strict,
    /// Widen the span to the boundaries of the tokens it touches.
    Loose,
}

/// Token index range `[first, last]` covered by `span`.
fn covering_tokens(
    tokens: &[Token],
    span: &CharSpan,
    alignment: Alignment,
    what: &str,
) -> Result<(usize, usize)> {
    let touched: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.start < span.end && span.start < t.end)
        .map(|(i, _)| i)
        .collect();
    let (first, last) = match (touched.first(), touched.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => {
            return Err(Error::alignment(
                "",
                format!("{what} {:?} covers no token", span.surface),
            ))
        }
    };
    if alignment == Alignment::Strict {
        let (ft, lt) = (&tokens[first], &tokens[last]);
        if ft.start != span.start {
            return Err(Error::alignment(
                "",
                format!(
                    "{what} {:?} starts at byte {} inside or before token {:?} ({}..{})",
                    span.surface, span.start, ft.surface, ft.start, ft.end
                ),
            ));
        }
        if lt.end != span.end {
            return Err(Error::alignment(
                "",
                format!(
                    "{what} {:?} ends at byte {} inside or after token {:?} ({}..{})",
                    span.surface, span.end, lt.surface, lt.start, lt.end
                ),
            ));
        }
    }
    Ok((first, last))
}

/// Labels tokens inside `cause` as `B-C I-C*`, inside `effect` as `B-E I-E*`,
/// everything else as padding.
pub fn encode_bio(
    instance_id: &str,
    tokens: &[Token],
    cause: &CharSpan,
    effect: &CharSpan,
    alignment: Alignment,
) -> Result<TagSequence> {
    let wrap = |e: Error| e.in_instance(instance_id);
    if cause.overlaps(effect) {
        return Err(Error::alignment(instance_id, "cause and effect overlap"));
    }
    let (c0, c1) = covering_tokens(tokens, cause, alignment, "cause").map_err(wrap)?;
    let (e0, e1) = covering_tokens(tokens, effect, alignment, "effect").map_err(wrap)?;
    if c0 <= e1 && e0 <= c1 {
        return Err(Error::alignment(instance_id, "cause and effect share a token"));
    }
    let mut labels = vec![BioLabel::Pad; tokens.len()];
    for (lo, hi, kind) in [(c0, c1, PhraseKind::Cause), (e0, e1, PhraseKind::Effect)] {
        labels[lo] = BioLabel::begin(kind);
        for l in &mut labels[lo + 1..=hi] {
            *l = BioLabel::inside(kind);
        }
    }
    Ok(TagSequence::new(instance_id, labels))
}

/// Gold tags for a labeled instance; unlabeled instances get all padding.
pub fn encode_instance(inst: &Instance, tokens: &[Token], alignment: Alignment) -> Result<TagSequence> {
    match (&inst.cause, &inst.effect) {
        (Some(c), Some(e)) => encode_bio(&inst.id, tokens, c, e, alignment),
        _ => Ok(TagSequence::padding(&inst.id, tokens.len())),
    }
}

/// A decoded phrase: token range `[token_start, token_end)` and the original
/// text between its first and last token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpanCandidate {
    pub kind: PhraseKind,
    pub token_start: usize,
    pub token_end: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
}

impl SpanCandidate {
    pub fn token_len(&self) -> usize {
        self.token_end - self.token_start
    }
}

/// Maximal same-kind runs as `(kind, first, end_exclusive)`. A `B` always
/// opens a new run; an `I` not continuing a run of its kind opens one too.
pub fn runs(labels: &[BioLabel]) -> Vec<(PhraseKind, usize, usize)> {
    let mut out: Vec<(PhraseKind, usize, usize)> = Vec::new();
    let mut open: Option<(PhraseKind, usize)> = None;
    for (i, &label) in labels.iter().enumerate() {
        let continues =
            matches!((open, label.kind()), (Some((k, _)), Some(lk)) if k == lk && !label.is_begin());
        if continues {
            continue;
        }
        if let Some((k, s)) = open.take() {
            out.push((k, s, i));
        }
        if let Some(k) = label.kind() {
            open = Some((k, i));
        }
    }
    if let Some((k, s)) = open {
        out.push((k, s, labels.len()));
    }
    out
}

/// Cause and effect candidates, each sliced from `text`.
pub fn decode_spans(
    tokens: &[Token],
    tags: &TagSequence,
    text: &str,
) -> Result<(Vec<SpanCandidate>, Vec<SpanCandidate>)> {
    if tokens.len() != tags.len() {
        return Err(Error::alignment(
            &tags.instance_id,
            format!("{} tags for {} tokens", tags.len(), tokens.len()),
        ));
    }
    let mut causes = Vec::new();
    let mut effects = Vec::new();
    for (kind, lo, hi) in runs(&tags.labels) {
        let (start, end) = (tokens[lo].start, tokens[hi - 1].end);
        let candidate = SpanCandidate {
            kind,
            token_start: lo,
            token_end: hi,
            start,
            end,
            text: text[start..end].to_string(),
        };
        match kind {
            PhraseKind::Cause => causes.push(candidate),
            PhraseKind::Effect => effects.push(candidate),
        }
    }
    Ok((causes, effects))
}

/// Special-token layout of the downstream encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bracketing {
    None,
    /// `[CLS] tokens [SEP]`
    #[default]
    StartEnd,
    /// `tokens [CLS]`
    EndOnly,
}

impl Bracketing {
    fn overhead(self) -> (usize, usize) {
        match self {
            Bracketing::None => (0, 0),
            Bracketing::StartEnd => (1, 1),
            Bracketing::EndOnly => (0, 1),
        }
    }
}

impl FromStr for Bracketing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Bracketing::None),
            "start_end" => Ok(Bracketing::StartEnd),
            "end_only" => Ok(Bracketing::EndOnly),
            other => Err(Error::InvalidArgument(format!("unknown bracketing {other:?}"))),
        }
    }
}

/// A fixed-length id sequence plus how many real tokens were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedIds {
    pub ids: Vec<i32>,
    /// Index in `ids` of the first real token.
    pub offset: usize,
    pub kept: usize,
    pub truncated: usize,
}

fn pad_ids(
    real: &[i32],
    max_seq_len: usize,
    bracketing: Bracketing,
    special: i32,
    fill: i32,
) -> Result<PaddedIds> {
    if max_seq_len < 1 {
        return Err(Error::InvalidArgument("max_seq_len must be at least 1".into()));
    }
    let (head, tail) = bracketing.overhead();
    let kept = real.len().min(max_seq_len.saturating_sub(head + tail));
    let mut ids = Vec::with_capacity(max_seq_len);
    ids.extend(std::iter::repeat_n(special, head));
    ids.extend_from_slice(&real[..kept]);
    ids.extend(std::iter::repeat_n(special, tail));
    ids.resize(max_seq_len, fill);
    ids.truncate(max_seq_len);
    Ok(PaddedIds {
        ids,
        offset: head.min(max_seq_len),
        kept,
        truncated: real.len() - kept,
    })
}

/// Label ids with `-100` at bracketing and tail-padding positions.
pub fn to_loss_ids(labels: &[BioLabel], max_seq_len: usize, bracketing: Bracketing) -> Result<PaddedIds> {
    let real: Vec<i32> = labels.iter().map(|l| l.id() as i32).collect();
    pad_ids(&real, max_seq_len, bracketing, IGNORE_INDEX, IGNORE_INDEX)
}

/// POS ids with the padding pseudo-tag `0` at bracketing and padding positions.
pub fn to_pos_ids(
    tags: &[crate::pos::PosTag],
    max_seq_len: usize,
    bracketing: Bracketing,
) -> Result<PaddedIds> {
    let real: Vec<i32> = tags.iter().map(|t| t.id() as i32).collect();
    pad_ids(&real, max_seq_len, bracketing, 0, 0)
}
