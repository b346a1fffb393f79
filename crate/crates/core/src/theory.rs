//! Complete theories of the desk-scale language, as ultimately periodic bit sequences.
//!
//! Bit `i` records whether the predicate `Q_i` is complete (`1`) or empty (`0`), so a
//! complete theory is a point of Cantor space. Every point the automaton algorithms produce
//! is ultimately periodic and is stored as `prefix · period^ω` in a unique canonical form.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::word::{parse_bits, Word};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Theory {
    prefix: Vec<bool>,
    period: Vec<bool>,
}

impl Theory {
    /// Builds `prefix · period^ω` and canonicalizes it.
    pub fn new(prefix: impl Into<Vec<bool>>, period: impl Into<Vec<bool>>) -> Result<Self> {
        let period = period.into();
        if period.is_empty() {
            return Err(Error::syntax("theory", 0, "period must be nonempty"));
        }
        Ok(Self::canonical(prefix.into(), period))
    }

    /// The constant sequence `bit^ω`.
    pub fn constant(bit: bool) -> Self {
        Theory { prefix: Vec::new(), period: vec![bit] }
    }

    pub(crate) fn canonical(mut prefix: Vec<bool>, period: Vec<bool>) -> Self {
        let mut period = primitive_root(period);
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Theory { prefix, period }
    }

    pub fn prefix(&self) -> &[bool] {
        &self.prefix
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn bit(&self, i: usize) -> bool {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The first `n` bits.
    pub fn take(&self, n: usize) -> Word {
        Word::from_bits((0..n).map(|i| self.bit(i)).collect::<Vec<_>>())
    }

    /// `word · self`.
    pub fn prepend(&self, word: &[bool]) -> Theory {
        let mut prefix = word.to_vec();
        prefix.extend_from_slice(&self.prefix);
        Self::canonical(prefix, self.period.clone())
    }

    /// Length of a prefix after which two theories agree forever if they agree up to it.
    pub(crate) fn agreement_bound(&self, other: &Theory) -> usize {
        let a = self.period.len();
        let b = other.period.len();
        self.prefix.len().max(other.prefix.len()) + a / gcd(a, b) * b
    }

    /// Length of the longest common prefix; `None` when equal.
    pub fn common_prefix_len(&self, other: &Theory) -> Option<usize> {
        (0..self.agreement_bound(other)).find(|&i| self.bit(i) != other.bit(i))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn primitive_root(period: Vec<bool>) -> Vec<bool> {
    let n = period.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d]) {
            return period[..d].to_vec();
        }
    }
    period
}

/// Lexicographic order of the infinite sequences.
impl Ord for Theory {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.common_prefix_len(other) {
            None => Ordering::Equal,
            Some(i) => self.bit(i).cmp(&other.bit(i)),
        }
    }
}

impl PartialOrd for Theory {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", Word::from_bits(self.prefix.clone()), Word::from_bits(self.period.clone()))
    }
}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// Literal syntax `<prefix bits>(<period bits>)`, e.g. `110(0)`.
impl FromStr for Theory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let open = s.find('(').ok_or_else(|| Error::syntax("theory", s.len(), "expected '('"))?;
        if !s.ends_with(')') {
            return Err(Error::syntax("theory", s.len(), "expected closing ')'"));
        }
        let prefix = parse_bits(&s[..open], 0, "theory")?;
        let period = parse_bits(&s[open + 1..s.len() - 1], open + 1, "theory")?;
        if period.is_empty() {
            return Err(Error::syntax("theory", open + 1, "period must be nonempty"));
        }
        Ok(Self::canonical(prefix, period))
    }
}

impl serde::Serialize for Theory {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Theory {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
