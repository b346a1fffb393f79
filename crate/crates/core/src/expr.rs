//! Compositional recipes for closed families of prescribed rank and degree.

use std::fmt;

use crate::automaton::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::ordinal::Ordinal;
use crate::theory::Theory;
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum FamilyExpr {
    Point(Theory),
    /// `⋃ u·F` over pairwise incomparable prefixes `u`.
    PrefixedUnion(Vec<(Word, FamilyExpr)>),
    /// `⋃_k b^k·b̄·body ∪ {b^ω}`.
    LimitStack {
        body: Box<FamilyExpr>,
        bit: bool,
    },
    /// `⋃_k b^k·b̄·F_k ∪ {b^ω}` where `F_k` is the standard tower of rank `λ[k+1]` for a limit
    /// ordinal `λ`. Infinite as a recipe; it has no finite automaton.
    OmegaLimit {
        rank: Ordinal,
        bit: bool,
    },
}

/// Recipe rank and degree; `rank` is `None` for the empty family.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RecipeRank {
    pub rank: Option<Ordinal>,
    pub degree: u64,
}

impl fmt::Display for RecipeRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rank {
            None => write!(f, "(-1,{})", self.degree),
            Some(r) => write!(f, "({r},{})", self.degree),
        }
    }
}

impl FamilyExpr {
    pub fn point(t: Theory) -> Self {
        FamilyExpr::Point(t)
    }

    /// Checks that the prefixes are pairwise incomparable.
    pub fn prefixed_union(children: Vec<(Word, FamilyExpr)>) -> Result<Self> {
        for (i, (u, _)) in children.iter().enumerate() {
            for (v, _) in &children[i + 1..] {
                if u.comparable(v) {
                    return Err(Error::Precondition(format!("union prefixes \"{u}\" and \"{v}\" are comparable")));
                }
            }
        }
        Ok(FamilyExpr::PrefixedUnion(children))
    }

    pub fn limit_stack(body: FamilyExpr, bit: bool) -> Self {
        FamilyExpr::LimitStack { body: Box::new(body), bit }
    }

    /// The standard degree-one tower of rank `α`: `0^ω` for 0, a limit stack over the
    /// predecessor for successors, and a symbolic limit otherwise.
    pub fn tower(alpha: &Ordinal) -> Self {
        if alpha.is_zero() {
            FamilyExpr::Point(Theory::constant(false))
        } else if let Some(beta) = alpha.pred() {
            FamilyExpr::limit_stack(FamilyExpr::tower(&beta), true)
        } else {
            FamilyExpr::OmegaLimit { rank: alpha.clone(), bit: true }
        }
    }

    pub fn is_finite_recipe(&self) -> bool {
        match self {
            FamilyExpr::Point(_) => true,
            FamilyExpr::PrefixedUnion(children) => children.iter().all(|(_, c)| c.is_finite_recipe()),
            FamilyExpr::LimitStack { body, .. } => body.is_finite_recipe(),
            FamilyExpr::OmegaLimit { .. } => false,
        }
    }

    pub fn recipe_rank(&self) -> RecipeRank {
        match self {
            FamilyExpr::Point(_) => RecipeRank { rank: Some(Ordinal::zero()), degree: 1 },
            FamilyExpr::PrefixedUnion(children) => {
                let ranks: Vec<RecipeRank> = children.iter().map(|(_, c)| c.recipe_rank()).collect();
                let top = ranks.iter().map(|r| r.rank.clone()).max().flatten();
                let degree = ranks.iter().filter(|r| r.rank == top).map(|r| r.degree).sum();
                RecipeRank { degree: if top.is_none() { 0 } else { degree }, rank: top }
            }
            FamilyExpr::LimitStack { body, .. } => {
                RecipeRank { rank: Some(body.recipe_rank().rank.map_or(Ordinal::zero(), |r| r.succ())), degree: 1 }
            }
            FamilyExpr::OmegaLimit { rank, .. } => RecipeRank { rank: Some(rank.clone()), degree: 1 },
        }
    }

    /// Compiles a finite recipe to the automaton of the closed set it denotes.
    pub fn compile(&self) -> Result<SafetyAutomaton> {
        let mut raw = Vec::new();
        let init = self.build(&mut raw)?;
        Ok(match init {
            Some(q) => SafetyAutomaton::from_raw(&raw, q),
            None => SafetyAutomaton::empty(),
        })
    }

    fn build(&self, raw: &mut Vec<[Option<u32>; 2]>) -> Result<Option<u32>> {
        let fresh = |raw: &mut Vec<[Option<u32>; 2]>| {
            raw.push([None; 2]);
            (raw.len() - 1) as u32
        };
        match self {
            FamilyExpr::Point(t) => {
                let bits: Vec<bool> = t.prefix().iter().chain(t.period()).copied().collect();
                let first = raw.len() as u32;
                for _ in &bits {
                    fresh(raw);
                }
                let loop_to = first + t.prefix().len() as u32;
                for (i, &b) in bits.iter().enumerate() {
                    let next = if i + 1 == bits.len() { loop_to } else { first + i as u32 + 1 };
                    raw[(first as usize) + i][usize::from(b)] = Some(next);
                }
                Ok(Some(first))
            }
            FamilyExpr::PrefixedUnion(children) => {
                let checked = FamilyExpr::prefixed_union(children.clone())?;
                let FamilyExpr::PrefixedUnion(children) = checked else { unreachable!() };
                if let [(u, only)] = children.as_slice() {
                    if u.is_empty() {
                        return only.build(raw);
                    }
                }
                let root = fresh(raw);
                for (u, child) in &children {
                    let Some(target) = child.build(raw)? else { continue };
                    let bits = u.bits();
                    let mut q = root;
                    for (i, &b) in bits.iter().enumerate() {
                        let slot = usize::from(b);
                        if i + 1 == bits.len() {
                            raw[q as usize][slot] = Some(target);
                        } else {
                            q = match raw[q as usize][slot] {
                                Some(next) => next,
                                None => {
                                    let next = fresh(raw);
                                    raw[q as usize][slot] = Some(next);
                                    next
                                }
                            };
                        }
                    }
                }
                Ok(Some(root))
            }
            FamilyExpr::LimitStack { body, bit } => {
                let s = fresh(raw);
                raw[s as usize][usize::from(*bit)] = Some(s);
                raw[s as usize][usize::from(!*bit)] = body.build(raw)?;
                Ok(Some(s))
            }
            FamilyExpr::OmegaLimit { rank, .. } => Err(Error::Transfinite(rank.to_string())),
        }
    }
}

impl fmt::Display for FamilyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyExpr::Point(t) => write!(f, "Point({t})"),
            FamilyExpr::PrefixedUnion(children) => {
                f.write_str("Union[")?;
                for (i, (u, c)) in children.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "\"{u}\": {c}")?;
                }
                f.write_str("]")
            }
            FamilyExpr::LimitStack { body, bit } => write!(f, "LimitStack({body}, {})", u8::from(*bit)),
            FamilyExpr::OmegaLimit { rank, bit } => write!(f, "OmegaLimit({rank}, {})", u8::from(*bit)),
        }
    }
}
