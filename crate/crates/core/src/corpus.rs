//! Shared-task corpus: semicolon-delimited `Index; Text; Cause; Effect` rows.
//!
//! Span offsets are byte offsets into the UTF-8 text. Corpus files may carry
//! optional `Cause_Start`/`Cause_End`/`Effect_Start`/`Effect_End` columns in
//! character units; those are converted on load and take precedence over
//! substring search.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Training,
    Test,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "training" | "train" => Ok(Mode::Training),
            "test" => Ok(Mode::Test),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

/// A half-open byte range of an instance text together with its surface.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

impl CharSpan {
    /// Builds the span `text[start..end]`, checking bounds and char boundaries.
    pub fn from_text(text: &str, start: usize, end: usize) -> Option<CharSpan> {
        if start >= end {
            return None;
        }
        text.get(start..end).map(|s| CharSpan {
            start,
            end,
            surface: s.to_string(),
        })
    }

    pub fn overlaps(&self, other: &CharSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    pub text: String,
    pub cause: Option<CharSpan>,
    pub effect: Option<CharSpan>,
}

impl Instance {
    /// Locates `cause` and `effect` by first occurrence in `text`.
    pub fn from_strings(id: &str, text: &str, cause: &str, effect: &str) -> Result<Instance> {
        let cause = locate(id, text, cause, "cause")?;
        let effect = locate(id, text, effect, "effect")?;
        let inst = Instance {
            id: id.to_string(),
            text: text.to_string(),
            cause: Some(cause),
            effect: Some(effect),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn unlabeled(id: &str, text: &str) -> Instance {
        Instance {
            id: id.to_string(),
            text: text.to_string(),
            cause: None,
            effect: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.text.is_empty() {
            return Err(Error::alignment(&self.id, "empty text"));
        }
        for (name, span) in [("cause", &self.cause), ("effect", &self.effect)] {
            if let Some(span) = span {
                let ok = span.start < span.end
                    && self.text.get(span.start..span.end) == Some(span.surface.as_str());
                if !ok {
                    return Err(Error::alignment(
                        &self.id,
                        format!(
                            "{name} span {}..{} does not match its surface",
                            span.start, span.end
                        ),
                    ));
                }
            }
        }
        if let (Some(c), Some(e)) = (&self.cause, &self.effect) {
            if c.overlaps(e) {
                return Err(Error::alignment(
                    &self.id,
                    format!(
                        "cause {}..{} overlaps effect {}..{}",
                        c.start, c.end, e.start, e.end
                    ),
                ));
            }
        }
        Ok(())
    }
}

fn locate(id: &str, text: &str, needle: &str, what: &str) -> Result<CharSpan> {
    if needle.is_empty() {
        return Err(Error::alignment(id, format!("empty {what}")));
    }
    match text.find(needle) {
        Some(start) => Ok(CharSpan {
            start,
            end: start + needle.len(),
            surface: needle.to_string(),
        }),
        None => Err(Error::alignment(
            id,
            format!("{what} {needle:?} not found in text"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub instances: Vec<Instance>,
    pub mode: Mode,
    /// Rows whose supplied offsets disagreed with their cause/effect strings.
    pub warnings: Vec<String>,
}

impl Corpus {
    pub fn new(instances: Vec<Instance>, mode: Mode) -> Corpus {
        Corpus {
            instances,
            mode,
            warnings: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.id == id)
    }
}

struct Columns {
    index: usize,
    text: usize,
    cause: Option<usize>,
    effect: Option<usize>,
    offsets: Option<[usize; 4]>,
}

impl Columns {
    fn from_header(header: &csv::StringRecord) -> Result<Columns> {
        let find = |name: &str| header.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
        let text = find("text").ok_or_else(|| Error::format(1, "missing Text column"))?;
        let index = find("index").ok_or_else(|| Error::format(1, "missing Index column"))?;
        let offsets = match (
            find("cause_start"),
            find("cause_end"),
            find("effect_start"),
            find("effect_end"),
        ) {
            (Some(a), Some(b), Some(c), Some(d)) => Some([a, b, c, d]),
            _ => None,
        };
        Ok(Columns {
            index,
            text,
            cause: find("cause"),
            effect: find("effect"),
            offsets,
        })
    }
}

/// Parses a corpus table. `delimiter` defaults to `;` at the call sites.
pub fn parse_corpus(raw: &str, mode: Mode, delimiter: u8) -> Result<Corpus> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(raw.as_bytes());

    let header = reader
        .headers()
        .map_err(|e| Error::format(1, e.to_string()))?
        .clone();
    let cols = Columns::from_header(&header)?;
    if mode == Mode::Training && (cols.cause.is_none() || cols.effect.is_none()) {
        return Err(Error::format(1, "training mode needs Cause and Effect columns"));
    }

    let mut instances = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::format(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let id = record[cols.index].to_string();
        let text = record[cols.text].to_string();
        if id.is_empty() {
            return Err(Error::format(line, "empty Index"));
        }
        if text.is_empty() {
            return Err(Error::format(line, format!("empty Text in row {id}")));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::format(line, format!("duplicate Index {id}")));
        }

        let inst = match mode {
            Mode::Test => Instance::unlabeled(&id, &text),
            Mode::Training => {
                let cause = &record[cols.cause.expect("checked above")];
                let effect = &record[cols.effect.expect("checked above")];
                match cols.offsets.map(|o| read_offsets(&record, o, line)).transpose()? {
                    Some(offsets) => {
                        let inst = from_offsets(&id, &text, offsets, line)?;
                        for (name, given, span) in
                            [("cause", cause, &inst.cause), ("effect", effect, &inst.effect)]
                        {
                            let surface = span.as_ref().map(|s| s.surface.as_str());
                            if surface != Some(given) {
                                warnings.push(format!(
                                    "row {id} (line {line}): {name} offsets select {surface:?}, column says {given:?}; using offsets"
                                ));
                            }
                        }
                        inst
                    }
                    None => Instance::from_strings(&id, &text, cause, effect)?,
                }
            }
        };
        instances.push(inst);
    }
    Ok(Corpus {
        instances,
        mode,
        warnings,
    })
}

fn read_offsets(record: &csv::StringRecord, cols: [usize; 4], line: usize) -> Result<[usize; 4]> {
    let mut out = [0usize; 4];
    for (slot, col) in out.iter_mut().zip(cols) {
        *slot = record[col]
            .parse()
            .map_err(|_| Error::format(line, format!("bad offset {:?}", &record[col])))?;
    }
    Ok(out)
}

/// Character offsets to a validated instance.
fn from_offsets(id: &str, text: &str, offsets: [usize; 4], line: usize) -> Result<Instance> {
    let byte_at = |char_idx: usize| -> Result<usize> {
        if char_idx == text.chars().count() {
            return Ok(text.len());
        }
        text.char_indices()
            .nth(char_idx)
            .map(|(b, _)| b)
            .ok_or_else(|| Error::format(line, format!("offset {char_idx} beyond text in row {id}")))
    };
    let span = |s: usize, e: usize, what: &str| -> Result<CharSpan> {
        let (bs, be) = (byte_at(s)?, byte_at(e)?);
        CharSpan::from_text(text, bs, be)
            .ok_or_else(|| Error::alignment(id, format!("empty or inverted {what} offsets {s}..{e}")))
    };
    let inst = Instance {
        id: id.to_string(),
        text: text.to_string(),
        cause: Some(span(offsets[0], offsets[1], "cause")?),
        effect: Some(span(offsets[2], offsets[3], "effect")?),
    };
    inst.validate()?;
    Ok(inst)
}

pub fn read_corpus(path: &Path, mode: Mode, delimiter: u8) -> Result<Corpus> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(&raw, mode, delimiter)
}

/// Seeded shuffle, then `round(train_fraction * n)` instances to the first part.
pub fn split_corpus(corpus: &Corpus, train_fraction: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie in (0, 1), got {train_fraction}"
        )));
    }
    if corpus.mode != Mode::Training {
        return Err(Error::InvalidArgument(
            "only training corpora can be split".into(),
        ));
    }
    let n = corpus.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 instances to split, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let cut = (train_fraction * n as f64).round() as usize;
    let pick = |idx: &[usize]| {
        Corpus::new(
            idx.iter().map(|&i| corpus.instances[i].clone()).collect(),
            corpus.mode,
        )
    };
    Ok((pick(&order[..cut]), pick(&order[cut..])))
}
