//! Cantor–Bendixson analysis: derivatives, rank and degree, point ranks, kernels, and
//! α-minimal decompositions.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::sentence::{cylinder_sentence, Sentence};
use crate::theory::Theory;
use crate::word::Word;

/// The pair `(RS, ds)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RankResult {
    /// The empty family: rank −1, degree 0.
    Empty,
    Finite {
        rank: u32,
        degree: u64,
    },
    /// A nonempty perfect kernel; no degree is defined.
    Infinite,
}

impl RankResult {
    /// The rank as an integer, `-1` for the empty family and `None` when infinite.
    pub fn rank_value(&self) -> Option<i64> {
        match self {
            RankResult::Empty => Some(-1),
            RankResult::Finite { rank, .. } => Some(i64::from(*rank)),
            RankResult::Infinite => None,
        }
    }

    pub fn degree(&self) -> Option<u64> {
        match self {
            RankResult::Empty => Some(0),
            RankResult::Finite { degree, .. } => Some(*degree),
            RankResult::Infinite => None,
        }
    }

    /// Compares the rank component only; degrees are ignored.
    pub fn cmp_rank(&self, other: &RankResult) -> Ordering {
        let key = |r: &RankResult| r.rank_value().unwrap_or(i64::MAX);
        key(self).cmp(&key(other))
    }
}

impl fmt::Display for RankResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankResult::Empty => f.write_str("RS=-1 ds=0"),
            RankResult::Finite { rank, degree } => write!(f, "RS={rank} ds={degree}"),
            RankResult::Infinite => f.write_str("RS=inf"),
        }
    }
}

/// The Cantor–Bendixson rank of a single theory.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PointRank {
    Finite(u32),
    Infinite,
}

impl fmt::Display for PointRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PointRank::Finite(r) => write!(f, "{r}"),
            PointRank::Infinite => f.write_str("inf"),
        }
    }
}

/// The distinct nonempty derivative levels `C⁽⁰⁾ ⊋ C⁽¹⁾ ⊋ …` of the closure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivativeTower {
    pub levels: Vec<Family>,
    /// The last level when it is its own derivative, otherwise empty.
    pub kernel: Family,
}

pub fn derivative(f: &Family) -> Family {
    Family::closed(f.carrier().derivative())
}

pub fn tower(f: &Family) -> DerivativeTower {
    let mut cur = f.closure();
    let states = f.carrier().num_states();
    let mut levels = Vec::new();
    let mut kernel = Family::empty();
    while !cur.is_empty() {
        let next = derivative(&cur);
        levels.push(cur);
        if next == levels[levels.len() - 1] {
            kernel = next;
            break;
        }
        cur = next;
    }
    assert!(levels.len() <= states + 1, "derivative tower longer than the state count allows");
    DerivativeTower { levels, kernel }
}

pub fn rank(f: &Family) -> RankResult {
    let t = tower(f);
    match t.levels.last() {
        None => RankResult::Empty,
        Some(_) if !t.kernel.is_empty() => RankResult::Infinite,
        Some(top) => RankResult::Finite {
            rank: (t.levels.len() - 1) as u32,
            degree: top.cardinality().expect("top level of a scattered tower is finite") as u64,
        },
    }
}

pub fn perfect_kernel(f: &Family) -> Family {
    tower(f).kernel
}

pub fn point_rank(f: &Family, t: &Theory) -> Result<PointRank> {
    let tw = tower(f);
    if !tw.kernel.is_empty() && tw.kernel.member(t) {
        return Ok(PointRank::Infinite);
    }
    match tw.levels.iter().rposition(|level| level.member(t)) {
        Some(j) => Ok(PointRank::Finite(j as u32)),
        None => Err(Error::NotInClosure(t.clone())),
    }
}

/// Rank exactly `α` and degree 1.
pub fn is_alpha_minimal(f: &Family, alpha: u32) -> bool {
    rank(f) == RankResult::Finite { rank: alpha, degree: 1 }
}

/// Splits the family into `ds` pairwise inconsistent neighbourhoods, each α-minimal.
pub fn decompose(f: &Family) -> Result<Vec<(Sentence, Family)>> {
    let tw = tower(f);
    if !tw.kernel.is_empty() {
        return Err(Error::Unsupported("decompose needs a family of ordinal rank".into()));
    }
    let Some(top) = tw.levels.last() else {
        return Err(Error::Precondition("decompose needs a nonempty family".into()));
    };
    let points: Vec<Theory> = top.explicit_points().expect("top level is finite").iter().cloned().collect();
    let mut prefixes: Vec<Word> = points
        .iter()
        .map(|t| {
            let len = points
                .iter()
                .filter(|o| *o != t)
                .map(|o| t.common_prefix_len(o).expect("distinct points") + 1)
                .max()
                .unwrap_or(0);
            t.take(len)
        })
        .collect();
    prefixes.sort();
    let mut sentences = vec![Sentence::not(Sentence::disjunction(prefixes[1..].iter().map(cylinder_sentence)))];
    if prefixes.len() == 1 {
        sentences[0] = Sentence::True;
    }
    sentences.extend(prefixes[1..].iter().map(cylinder_sentence));
    Ok(sentences
        .into_iter()
        .map(|s| {
            let block = f.restrict(&s);
            (s, block)
        })
        .collect())
}

pub fn is_irreducible(f: &Family) -> Result<bool> {
    if !f.is_e_closed() {
        return Err(Error::Precondition("irreducibility is defined for E-closed families".into()));
    }
    Ok(matches!(rank(f), RankResult::Empty | RankResult::Finite { degree: 1, .. }))
}
