use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite bit-word. Ordered shortlex: shorter words first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<bool>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_bits(bits: impl Into<Vec<bool>>) -> Self {
        Word(bits.into())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn child(&self, bit: bool) -> Word {
        let mut w = self.clone();
        w.push(bit);
        w
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        Word(bits)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// True when one word is a prefix of the other, i.e. their cylinders intersect.
    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Every word of length `n`, in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = Word> {
        assert!(n < usize::BITS as usize, "word length {n} too large to enumerate");
        (0..1usize << n).map(move |x| Word((0..n).map(|i| (x >> (n - 1 - i)) & 1 == 1).collect()))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_bits(s, 0, "word").map(Word)
    }
}

impl From<Vec<bool>> for Word {
    fn from(bits: Vec<bool>) -> Self {
        Word(bits)
    }
}

pub(crate) fn parse_bits(s: &str, offset: usize, what: &'static str) -> Result<Vec<bool>> {
    s.char_indices()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::syntax(what, offset + i, format!("expected bit, found {other:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortlex_order() {
        let mut ws: Vec<Word> = ["10", "", "1", "00", "0"].iter().map(|s| s.parse().unwrap()).collect();
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["", "0", "1", "00", "10"]);
    }

    #[test]
    fn rejects_non_bits() {
        assert!(matches!("01x".parse::<Word>(), Err(Error::Syntax { pos: 2, .. })));
    }

    #[test]
    fn enumerates_lexicographically() {
        let ws: Vec<String> = Word::all_of_length(2).map(|w| w.to_string()).collect();
        assert_eq!(ws, ["00", "01", "10", "11"]);
    }
}
