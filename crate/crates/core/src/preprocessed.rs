//! The token/POS/BIO text format.
//!
//! ```text
//! # id=0001.00001
//! The<TAB>DT<TAB>B-E
//! Sunshine<TAB>NNP<TAB>I-E
//!
//! # id=0001.00002
//! ...
//! ```
//!
//! One `surface<TAB>pos<TAB>bio` line per token, a `# id=` header before each
//! instance and a blank line between instances. Other lines starting with `#`
//! and holding no TAB are comments and are skipped. Prediction files use the
//! same layout with predicted labels in the third column.

use std::io::Write;
use std::path::Path;

use crate::bio::{BioLabel, TagSequence};
use crate::error::{Error, Result};
use crate::fsio;
use crate::lexer::{Lexeme, Token};
use crate::pos::PosTag;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub surface: String,
    pub pos: PosTag,
    pub label: BioLabel,
}

impl Lexeme for Row {
    fn surface(&self) -> &str {
        &self.surface
    }

    fn pos(&self) -> PosTag {
        self.pos
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub id: String,
    pub rows: Vec<Row>,
}

impl Block {
    pub fn from_tokens(tokens: &[Token], tags: &TagSequence) -> Result<Block> {
        if tokens.len() != tags.len() {
            return Err(Error::alignment(
                &tags.instance_id,
                format!("{} tags for {} tokens", tags.len(), tokens.len()),
            ));
        }
        Ok(Block {
            id: tags.instance_id.clone(),
            rows: tokens
                .iter()
                .zip(&tags.labels)
                .map(|(t, &label)| Row {
                    surface: t.surface.clone(),
                    pos: t.pos,
                    label,
                })
                .collect(),
        })
    }

    pub fn tags(&self) -> TagSequence {
        TagSequence::new(&self.id, self.rows.iter().map(|r| r.label).collect())
    }

    /// Same tokens, different labels.
    pub fn relabeled(&self, tags: &TagSequence) -> Result<Block> {
        if tags.len() != self.rows.len() {
            return Err(Error::alignment(
                &self.id,
                format!("{} tags for {} tokens", tags.len(), self.rows.len()),
            ));
        }
        Ok(Block {
            id: self.id.clone(),
            rows: self
                .rows
                .iter()
                .zip(&tags.labels)
                .map(|(r, &label)| Row { label, ..r.clone() })
                .collect(),
        })
    }
}

pub fn write_preprocessed<W: Write + ?Sized>(out: &mut W, blocks: &[Block]) -> std::io::Result<()> {
    for (n, block) in blocks.iter().enumerate() {
        if n > 0 {
            writeln!(out)?;
        }
        writeln!(out, "# id={}", block.id)?;
        for row in &block.rows {
            writeln!(out, "{}\t{}\t{}", row.surface, row.pos, row.label)?;
        }
    }
    Ok(())
}

pub fn to_string(blocks: &[Block]) -> String {
    let mut buf = Vec::new();
    write_preprocessed(&mut buf, blocks).expect("writing to memory");
    String::from_utf8(buf).expect("rows are UTF-8")
}

pub fn write_file(path: &Path, blocks: &[Block], force: bool) -> Result<()> {
    fsio::write_atomic(path, force, |w| write_preprocessed(w, blocks))
}

pub fn parse_preprocessed(raw: &str) -> Result<Vec<Block>> {
    let mut blocks: Vec<Block> = Vec::new();
    for (n, line) in raw.lines().enumerate() {
        let line_no = n + 1;
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') && !line.contains('\t') {
            if let Some(id) = line.strip_prefix("# id=") {
                blocks.push(Block {
                    id: id.to_string(),
                    rows: Vec::new(),
                });
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::format(
                line_no,
                format!("expected 3 TAB-separated columns, found {}", cols.len()),
            ));
        }
        let pos = PosTag::from_name(cols[1])
            .ok_or_else(|| Error::format(line_no, format!("unknown POS tag {:?}", cols[1])))?;
        let label: BioLabel = cols[2]
            .parse()
            .map_err(|_| Error::format(line_no, format!("unknown BIO tag {:?}", cols[2])))?;
        let block = blocks
            .last_mut()
            .ok_or_else(|| Error::format(line_no, "token line before any '# id=' header"))?;
        block.rows.push(Row {
            surface: cols[0].to_string(),
            pos,
            label,
        });
    }
    Ok(blocks)
}

pub fn read_file(path: &Path) -> Result<Vec<Block>> {
    parse_preprocessed(&fsio::read_to_string(path)?)
}
