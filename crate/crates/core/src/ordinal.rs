//! Ordinals below `ω^ω` in Cantor normal form, written `w^k*m + ... + c`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `ω^{k_1}·m_1 + … + ω^{k_r}·m_r` with `k_1 > … > k_r` and every `m_i > 0`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal::default()
    }

    pub fn finite(n: u64) -> Self {
        Ordinal { terms: if n == 0 { Vec::new() } else { vec![(0, n)] } }
    }

    /// `ω^k`.
    pub fn omega_pow(k: u32) -> Self {
        Ordinal { terms: vec![(k, 1)] }
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self.terms.last(), Some((k, _)) if *k > 0)
    }

    pub fn succ(&self) -> Self {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, n)) => *n += 1,
            _ => terms.push((0, 1)),
        }
        Ordinal { terms }
    }

    /// The predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Self> {
        let mut terms = self.terms.clone();
        match terms.last_mut() {
            Some((0, n)) => {
                *n -= 1;
                if *n == 0 {
                    terms.pop();
                }
                Some(Ordinal { terms })
            }
            _ => None,
        }
    }

    /// The `j`-th element `γ + ω^{k-1}·j` of the standard sequence converging to a limit
    /// `λ = γ + ω^k`.
    pub fn fundamental(&self, j: u64) -> Option<Self> {
        if !self.is_limit() {
            return None;
        }
        let mut terms = self.terms.clone();
        let (k, m) = terms.pop().expect("limit ordinals are nonzero");
        if m > 1 {
            terms.push((k, m - 1));
        }
        if j > 0 {
            terms.push((k - 1, j));
        }
        Some(Ordinal { terms })
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|&(k, m)| {
                let base = match k {
                    0 => return m.to_string(),
                    1 => "w".to_string(),
                    k => format!("w^{k}"),
                };
                if m == 1 {
                    base
                } else {
                    format!("{base}*{m}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = |pos: usize, msg: &str| Error::syntax("ordinal", pos, msg);
        let compact: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_ascii_whitespace()).collect();
        if compact.is_empty() {
            return Err(err(0, "empty ordinal"));
        }
        let mut terms: Vec<(u32, u64)> = Vec::new();
        let mut i = 0;
        let number = |i: &mut usize| -> Result<u64> {
            let start = *i;
            let mut v: u64 = 0;
            while *i < compact.len() && compact[*i].1.is_ascii_digit() {
                let d = u64::from(compact[*i].1 as u8 - b'0');
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d))
                    .ok_or_else(|| err(compact[start].0, "number too large"))?;
                *i += 1;
            }
            if *i == start {
                let pos = compact.get(start).map_or(s.len(), |c| c.0);
                return Err(err(pos, "expected digits"));
            }
            Ok(v)
        };
        loop {
            let term_pos = compact.get(i).map_or(s.len(), |c| c.0);
            let (k, m) = if compact.get(i).map(|c| c.1) == Some('w') {
                i += 1;
                let mut k = 1u64;
                if compact.get(i).map(|c| c.1) == Some('^') {
                    i += 1;
                    k = number(&mut i)?;
                }
                let mut m = 1u64;
                if compact.get(i).map(|c| c.1) == Some('*') {
                    i += 1;
                    m = number(&mut i)?;
                }
                (k, m)
            } else {
                (0, number(&mut i)?)
            };
            let k = u32::try_from(k).map_err(|_| err(term_pos, "exponent too large"))?;
            if m == 0 {
                if !(terms.is_empty() && k == 0 && i == compact.len()) {
                    return Err(err(term_pos, "zero coefficient"));
                }
            } else {
                if let Some(&(prev, _)) = terms.last() {
                    if k >= prev {
                        return Err(err(term_pos, "exponents must strictly decrease"));
                    }
                }
                terms.push((k, m));
            }
            match compact.get(i) {
                None => break,
                Some((_, '+')) => i += 1,
                Some(&(pos, c)) => return Err(err(pos, &format!("unexpected character {c:?}"))),
            }
        }
        Ok(Ordinal { terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!(o("w*2+3").to_string(), "w*2 + 3");
        assert_eq!(o("w^3*2 + w + 1"), Ordinal { terms: vec![(3, 2), (1, 1), (0, 1)] });
        assert_eq!(o("0"), Ordinal::zero());
        assert_eq!(o("7").as_finite(), Some(7));
        assert!("w + w^2".parse::<Ordinal>().is_err());
        assert!("w*0".parse::<Ordinal>().is_err());
        assert!(matches!("w + x".parse::<Ordinal>(), Err(Error::Syntax { pos: 4, .. })));
        assert!("w^".parse::<Ordinal>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert!(o("w*2") > o("w+5"));
        assert!(o("w^2") > o("w*100"));
        assert!(o("3") < o("w"));
        assert_eq!(o("w+1").pred(), Some(o("w")));
        assert_eq!(o("w").pred(), None);
        assert_eq!(o("w").fundamental(4), Some(o("4")));
        assert_eq!(o("w^2*2").fundamental(3), Some(o("w^2 + w*3")));
        assert!(o("w^2").is_limit() && !o("w+2").is_limit());
        assert_eq!(o("w+1").succ(), o("w+2"));
    }
}
