//! Part-of-speech tagset: the 36 Penn Treebank tags behind a padding
//! pseudo-tag at id 0.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub const PAD_NAME: &str = "<PAD>";

pub const TAGSET: [&str; 37] = [
    PAD_NAME, "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS",
    "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN",
    "VBP", "VBZ", "WDT", "WP", "WP$", "WRB",
];

pub const TAGSET_SIZE: usize = TAGSET.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PosTag(u8);

impl PosTag {
    pub const PAD: PosTag = PosTag(0);

    pub fn from_id(id: usize) -> Option<PosTag> {
        (id < TAGSET_SIZE).then_some(PosTag(id as u8))
    }

    pub fn from_name(name: &str) -> Option<PosTag> {
        TAGSET.iter().position(|t| *t == name).map(|i| PosTag(i as u8))
    }

    /// Panics on names outside the tagset; for use with literals.
    pub(crate) fn named(name: &str) -> PosTag {
        PosTag::from_name(name).unwrap_or_else(|| panic!("{name} is not in the tagset"))
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> &'static str {
        TAGSET[self.id()]
    }

    pub fn is_pad(self) -> bool {
        self.0 == 0
    }

    pub fn all() -> impl Iterator<Item = PosTag> {
        (0..TAGSET_SIZE).map(|i| PosTag(i as u8))
    }
}

impl fmt::Display for PosTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One-hot encoding of `tag` in a vector of `size` slots. The padding tag
/// encodes to all zeros.
pub fn pos_one_hot(tag: PosTag, size: usize) -> Result<Vec<u8>> {
    pos_one_hot_id(tag.id(), size)
}

pub fn pos_one_hot_id(id: usize, size: usize) -> Result<Vec<u8>> {
    if id >= size {
        return Err(Error::InvalidArgument(format!(
            "tag id {id} out of range for one-hot size {size}"
        )));
    }
    let mut v = vec![0u8; size];
    if id != 0 {
        v[id] = 1;
    }
    Ok(v)
}

/// Writes the `id<TAB>name` sidecar describing the one-hot layout.
pub fn write_tagset<W: Write>(mut out: W) -> std::io::Result<()> {
    for tag in PosTag::all() {
        writeln!(out, "{}\t{}", tag.id(), tag.name())?;
    }
    Ok(())
}

pub fn read_tagset<R: BufRead>(input: R) -> Result<Vec<(usize, String)>> {
    let mut rows = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::format(n + 1, e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let (id, name) = line
            .split_once('\t')
            .ok_or_else(|| Error::format(n + 1, "expected id<TAB>name"))?;
        let id = id
            .parse()
            .map_err(|_| Error::format(n + 1, format!("bad id {id:?}")))?;
        rows.push((id, name.to_string()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tagset_is_penn_plus_padding() {
        assert_eq!(TAGSET_SIZE, 37);
        assert_eq!(PosTag::PAD.id(), 0);
        let mut names: Vec<_> = TAGSET.to_vec();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), TAGSET_SIZE);
        for tag in PosTag::all() {
            assert_eq!(PosTag::from_name(tag.name()), Some(tag));
            assert_eq!(PosTag::from_id(tag.id()), Some(tag));
        }
        assert_eq!(PosTag::from_id(TAGSET_SIZE), None);
    }

    #[test]
    fn one_hot_examples() {
        assert_eq!(pos_one_hot_id(3, 5).unwrap(), vec![0, 0, 0, 1, 0]);
        assert_eq!(pos_one_hot(PosTag::PAD, 5).unwrap(), vec![0; 5]);
        assert!(pos_one_hot_id(5, 5).is_err());
        for tag in PosTag::all().skip(1) {
            let v = pos_one_hot(tag, TAGSET_SIZE).unwrap();
            assert_eq!(v.iter().map(|&x| x as usize).sum::<usize>(), 1);
            assert_eq!(v[tag.id()], 1);
        }
    }

    #[test]
    fn tagset_sidecar_round_trips() {
        let mut buf = Vec::new();
        write_tagset(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("0\t<PAD>\n1\tCC\n"));
        let rows = read_tagset(&buf[..]).unwrap();
        assert_eq!(rows.len(), TAGSET_SIZE);
        for (id, name) in rows {
            assert_eq!(PosTag::from_name(&name).unwrap().id(), id);
        }
    }
}
