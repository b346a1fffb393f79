//! Sentences over the atoms `Q_i` ("predicate `Q_i` is complete") and their clopen denotations.

use std::fmt;
use std::str::FromStr;

use crate::automaton::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::theory::Theory;
use crate::word::Word;

/// Default guard on atom indices accepted by the parser.
pub const DEFAULT_MAX_ATOM: u32 = 1_000_000;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Sentence {
    True,
    False,
    Atom(u32),
    Not(Box<Sentence>),
    And(Box<Sentence>, Box<Sentence>),
    Or(Box<Sentence>, Box<Sentence>),
    Implies(Box<Sentence>, Box<Sentence>),
    Iff(Box<Sentence>, Box<Sentence>),
}

impl Sentence {
    pub fn atom(i: u32) -> Self {
        Sentence::Atom(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Sentence) -> Self {
        Sentence::Not(Box::new(s))
    }

    pub fn and(a: Sentence, b: Sentence) -> Self {
        Sentence::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Sentence, b: Sentence) -> Self {
        Sentence::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Sentence, b: Sentence) -> Self {
        Sentence::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Sentence, b: Sentence) -> Self {
        Sentence::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `T` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Sentence>) -> Self {
        parts.into_iter().reduce(Sentence::and).unwrap_or(Sentence::True)
    }

    /// Left-nested disjunction; `F` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Sentence>) -> Self {
        parts.into_iter().reduce(Sentence::or).unwrap_or(Sentence::False)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_max_atom(text, DEFAULT_MAX_ATOM)
    }

    pub fn parse_with_max_atom(text: &str, max_atom: u32) -> Result<Self> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, max_atom };
        let s = p.iff()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(s)
    }

    pub fn max_atom(&self) -> Option<u32> {
        match self {
            Sentence::True | Sentence::False => None,
            Sentence::Atom(i) => Some(*i),
            Sentence::Not(a) => a.max_atom(),
            Sentence::And(a, b) | Sentence::Or(a, b) | Sentence::Implies(a, b) | Sentence::Iff(a, b) => {
                a.max_atom().max(b.max_atom())
            }
        }
    }

    /// One more than the largest atom index, or 0 for atom-free sentences.
    pub fn depth(&self) -> u32 {
        self.max_atom().map_or(0, |m| m + 1)
    }

    pub fn eval(&self, t: &Theory) -> bool {
        self.eval_with(&|i| t.bit(i as usize))
    }

    pub(crate) fn eval_with(&self, bit: &dyn Fn(u32) -> bool) -> bool {
        match self {
            Sentence::True => true,
            Sentence::False => false,
            Sentence::Atom(i) => bit(*i),
            Sentence::Not(a) => !a.eval_with(bit),
            Sentence::And(a, b) => a.eval_with(bit) && b.eval_with(bit),
            Sentence::Or(a, b) => a.eval_with(bit) || b.eval_with(bit),
            Sentence::Implies(a, b) => !a.eval_with(bit) || b.eval_with(bit),
            Sentence::Iff(a, b) => a.eval_with(bit) == b.eval_with(bit),
        }
    }

    /// Substitutes a truth value for atom `i` and folds constants.
    pub(crate) fn assign(&self, i: u32, value: bool) -> Sentence {
        self.substitute(Some((i, value)))
    }

    /// Folds constants without substituting anything.
    pub(crate) fn folded(&self) -> Sentence {
        self.substitute(None)
    }

    fn substitute(&self, with: Option<(u32, bool)>) -> Sentence {
        match self {
            Sentence::True | Sentence::False => self.clone(),
            Sentence::Atom(j) => match with {
                Some((i, value)) if i == *j => constant(value),
                _ => self.clone(),
            },
            Sentence::Not(a) => not_s(a.substitute(with)),
            Sentence::And(a, b) => and_s(a.substitute(with), b.substitute(with)),
            Sentence::Or(a, b) => or_s(a.substitute(with), b.substitute(with)),
            Sentence::Implies(a, b) => implies_s(a.substitute(with), b.substitute(with)),
            Sentence::Iff(a, b) => iff_s(a.substitute(with), b.substitute(with)),
        }
    }

    pub fn to_clopen(&self) -> Result<Clopen> {
        Clopen::from_automaton(&SafetyAutomaton::from_sentence(self))
    }

    fn level(&self) -> u8 {
        match self {
            Sentence::Iff(..) => 1,
            Sentence::Implies(..) => 2,
            Sentence::Or(..) => 3,
            Sentence::And(..) => 4,
            Sentence::Not(_) => 5,
            _ => 6,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let paren = self.level() < min_level;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Sentence::True => f.write_str("T")?,
            Sentence::False => f.write_str("F")?,
            Sentence::Atom(i) => write!(f, "Q{i}")?,
            Sentence::Not(a) => {
                f.write_str("!")?;
                a.fmt_at(f, 5)?;
            }
            Sentence::And(a, b) => binary(f, a, b, " & ", 4, 5)?,
            Sentence::Or(a, b) => binary(f, a, b, " | ", 3, 4)?,
            Sentence::Implies(a, b) => binary(f, a, b, " -> ", 3, 2)?,
            Sentence::Iff(a, b) => binary(f, a, b, " <-> ", 1, 2)?,
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn binary(f: &mut fmt::Formatter<'_>, a: &Sentence, b: &Sentence, op: &str, left: u8, right: u8) -> fmt::Result {
    a.fmt_at(f, left)?;
    f.write_str(op)?;
    b.fmt_at(f, right)
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl FromStr for Sentence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Sentence::parse(s)
    }
}

fn constant(value: bool) -> Sentence {
    if value {
        Sentence::True
    } else {
        Sentence::False
    }
}

fn not_s(a: Sentence) -> Sentence {
    match a {
        Sentence::True => Sentence::False,
        Sentence::False => Sentence::True,
        Sentence::Not(inner) => *inner,
        a => Sentence::not(a),
    }
}

fn and_s(a: Sentence, b: Sentence) -> Sentence {
    match (a, b) {
        (Sentence::False, _) | (_, Sentence::False) => Sentence::False,
        (Sentence::True, x) | (x, Sentence::True) => x,
        (a, b) => Sentence::and(a, b),
    }
}

fn or_s(a: Sentence, b: Sentence) -> Sentence {
    match (a, b) {
        (Sentence::True, _) | (_, Sentence::True) => Sentence::True,
        (Sentence::False, x) | (x, Sentence::False) => x,
        (a, b) => Sentence::or(a, b),
    }
}

fn implies_s(a: Sentence, b: Sentence) -> Sentence {
    match (a, b) {
        (Sentence::False, _) | (_, Sentence::True) => Sentence::True,
        (Sentence::True, x) => x,
        (x, Sentence::False) => not_s(x),
        (a, b) => Sentence::implies(a, b),
    }
}

fn iff_s(a: Sentence, b: Sentence) -> Sentence {
    match (a, b) {
        (Sentence::True, x) | (x, Sentence::True) => x,
        (Sentence::False, x) | (x, Sentence::False) => not_s(x),
        (a, b) => Sentence::iff(a, b),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    max_atom: u32,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> Error {
        Error::syntax("sentence", self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(token.as_bytes()) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Sentence> {
        let mut lhs = self.implies()?;
        while self.eat("<->") {
            lhs = Sentence::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Sentence> {
        let lhs = self.or()?;
        if self.eat("->") {
            return Ok(Sentence::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Sentence> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            lhs = Sentence::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Sentence> {
        let mut lhs = self.unary()?;
        while self.eat("&") {
            lhs = Sentence::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Sentence> {
        if self.eat("!") {
            return Ok(Sentence::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Sentence> {
        self.skip_ws();
        let Some(&c) = self.src.get(self.pos) else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            b'T' => {
                self.pos += 1;
                Ok(Sentence::True)
            }
            b'F' => {
                self.pos += 1;
                Ok(Sentence::False)
            }
            b'(' => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(")") {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            b'Q' => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.src[self.pos..].iter().take_while(|b| b.is_ascii_digit()).count();
                if digits == 0 {
                    return Err(self.error("expected digits after 'Q'"));
                }
                let index = self.src[self.pos..self.pos + digits]
                    .iter()
                    .try_fold(0u64, |acc, &d| acc.checked_mul(10)?.checked_add(u64::from(d - b'0')))
                    .unwrap_or(u64::MAX);
                self.pos += digits;
                if index > u64::from(self.max_atom) {
                    return Err(Error::AtomOverflow { index, max: self.max_atom, pos: start });
                }
                Ok(Sentence::Atom(index as u32))
            }
            _ => Err(self.error(format!("unexpected character {:?}", c as char))),
        }
    }
}

/// The sentence `χ_u` pinning the bits of `prefix`.
pub fn cylinder_sentence(prefix: &Word) -> Sentence {
    Sentence::conjunction(prefix.bits().iter().enumerate().map(|(i, &b)| {
        let a = Sentence::atom(i as u32);
        if b {
            a
        } else {
            Sentence::not(a)
        }
    }))
}

pub fn semantically_equal(s1: &Sentence, s2: &Sentence) -> bool {
    SafetyAutomaton::from_sentence(s1) == SafetyAutomaton::from_sentence(s2)
}

/// Semantic entailment `s1 ⊨ s2`.
pub fn entails(s1: &Sentence, s2: &Sentence) -> bool {
    SafetyAutomaton::from_sentence(s1).is_subset(&SafetyAutomaton::from_sentence(s2))
}

/// Largest clopen depth materialized as an explicit table.
pub const MAX_CLOPEN_DEPTH: u32 = 20;

/// A clopen subset of Cantor space: all sequences whose `depth`-prefix is allowed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clopen {
    depth: u32,
    // Indexed by the prefix read as a binary number, bit 0 most significant.
    table: Vec<bool>,
}

impl Clopen {
    pub fn from_table(depth: u32, table: Vec<bool>) -> Result<Self> {
        if depth > MAX_CLOPEN_DEPTH {
            return Err(Error::ClopenTooDeep { depth, limit: MAX_CLOPEN_DEPTH });
        }
        assert_eq!(table.len(), 1usize << depth, "table length must be 2^depth");
        let mut c = Clopen { depth, table };
        c.shrink();
        Ok(c)
    }

    pub fn from_words(depth: u32, words: &[Word]) -> Result<Self> {
        if depth > MAX_CLOPEN_DEPTH {
            return Err(Error::ClopenTooDeep { depth, limit: MAX_CLOPEN_DEPTH });
        }
        let mut table = vec![false; 1usize << depth];
        for w in words {
            assert_eq!(w.len(), depth as usize, "word {w} does not have length {depth}");
            table[index_of(w.bits())] = true;
        }
        Self::from_table(depth, table)
    }

    /// Reads the clopen off an automaton whose only cycles sit on the universal state.
    pub fn from_automaton(a: &SafetyAutomaton) -> Result<Self> {
        let depth =
            a.clopen_depth().ok_or_else(|| Error::Unsupported("automaton does not denote a clopen set".into()))?;
        if depth > MAX_CLOPEN_DEPTH {
            return Err(Error::ClopenTooDeep { depth, limit: MAX_CLOPEN_DEPTH });
        }
        let table = Word::all_of_length(depth as usize).map(|w| a.run(w.bits()).is_some()).collect();
        Self::from_table(depth, table)
    }

    fn shrink(&mut self) {
        while self.depth > 0 && self.table.chunks(2).all(|p| p[0] == p[1]) {
            self.table = self.table.iter().step_by(2).copied().collect();
            self.depth -= 1;
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub(crate) fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn is_empty(&self) -> bool {
        !self.table.iter().any(|&b| b)
    }

    pub fn is_full(&self) -> bool {
        self.table.iter().all(|&b| b)
    }

    /// The allowed prefixes of length `depth`, in lexicographic order.
    pub fn allowed(&self) -> Vec<Word> {
        Word::all_of_length(self.depth as usize).zip(&self.table).filter(|(_, &b)| b).map(|(w, _)| w).collect()
    }

    pub fn contains(&self, t: &Theory) -> bool {
        self.table[index_of(t.take(self.depth as usize).bits())]
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        assert!(w.len() >= self.depth as usize);
        self.table[index_of(&w.bits()[..self.depth as usize])]
    }

    fn at_depth(&self, d: u32) -> Vec<bool> {
        let shift = d - self.depth;
        (0..1usize << d).map(|i| self.table[i >> shift]).collect()
    }

    fn zip_with(&self, other: &Clopen, op: impl Fn(bool, bool) -> bool) -> Clopen {
        let d = self.depth.max(other.depth);
        let table = self.at_depth(d).into_iter().zip(other.at_depth(d)).map(|(a, b)| op(a, b)).collect();
        Clopen::from_table(d, table).expect("depth bounded by operands")
    }

    pub fn intersect(&self, other: &Clopen) -> Clopen {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Clopen) -> Clopen {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn complement(&self) -> Clopen {
        Clopen { depth: self.depth, table: self.table.iter().map(|b| !b).collect() }
    }

    /// Minimal prefix-free set of words whose cylinders partition the set.
    pub fn cover(&self) -> Vec<Word> {
        let mut out = Vec::new();
        self.cover_from(Word::empty(), 0, self.table.len(), &mut out);
        out
    }

    fn cover_from(&self, prefix: Word, lo: usize, hi: usize, out: &mut Vec<Word>) {
        let block = &self.table[lo..hi];
        if block.iter().all(|&b| b) {
            out.push(prefix);
        } else if block.iter().any(|&b| b) {
            let mid = (lo + hi) / 2;
            self.cover_from(prefix.child(false), lo, mid, out);
            self.cover_from(prefix.child(true), mid, hi, out);
        }
    }

    /// Disjunction of the cylinder sentences of the cover.
    pub fn to_sentence(&self) -> Sentence {
        Sentence::disjunction(self.cover().iter().map(cylinder_sentence))
    }
}

fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str) -> Sentence {
        text.parse().unwrap()
    }

    fn t(text: &str) -> Theory {
        text.parse().unwrap()
    }

    #[test]
    fn parses_grammar() {
        assert_eq!(s("Q0 & !Q1"), Sentence::and(Sentence::atom(0), Sentence::not(Sentence::atom(1))));
        assert_eq!(s("T"), Sentence::True);
        assert_eq!(
            s("Q2 -> (Q0 | Q1)"),
            Sentence::implies(Sentence::atom(2), Sentence::or(Sentence::atom(0), Sentence::atom(1)))
        );
        assert_eq!(
            s("Q0 -> Q1 -> Q2"),
            Sentence::implies(Sentence::atom(0), Sentence::implies(Sentence::atom(1), Sentence::atom(2)))
        );
        assert_eq!(
            s("Q0 <-> Q1 <-> Q2"),
            Sentence::iff(Sentence::iff(Sentence::atom(0), Sentence::atom(1)), Sentence::atom(2))
        );
        assert_eq!(s(" !!Q3\t|F "), Sentence::or(Sentence::not(Sentence::not(Sentence::atom(3))), Sentence::False));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(Sentence::parse("Q0 &"), Err(Error::Syntax { pos: 4, .. })));
        assert!(matches!(Sentence::parse("(Q0"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(Sentence::parse("Q"), Err(Error::Syntax { pos: 1, .. })));
        assert!(matches!(Sentence::parse("Q0 Q1"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(Sentence::parse("Q0 # Q1"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(Sentence::parse("Q1 | Q1000001"), Err(Error::AtomOverflow { index: 1_000_001, pos: 5, .. })));
        assert!(matches!(
            Sentence::parse("Q99999999999999999999999"),
            Err(Error::AtomOverflow { index: u64::MAX, .. })
        ));
        assert!(Sentence::parse_with_max_atom("Q5", 4).is_err());
    }

    #[test]
    fn prints_minimal_parentheses() {
        for text in [
            "Q0 & !Q1",
            "Q2 -> Q0 | Q1",
            "(Q0 -> Q1) -> Q2",
            "Q0 -> Q1 -> Q2",
            "Q0 <-> Q1 <-> Q2",
            "Q0 <-> (Q1 <-> Q2)",
            "!(Q0 & Q1)",
            "(Q0 | Q1) & Q2",
            "Q0 & (Q1 & Q2)",
            "(Q0 <-> Q1) -> Q2",
        ] {
            assert_eq!(s(text).to_string(), text);
        }
    }

    #[test]
    fn evaluates() {
        assert!(s("Q0").eval(&t("1(0)")));
        assert!(s("!Q5").eval(&t("11(0)")));
        assert!(!s("Q0 <-> Q1").eval(&t("10(0)")));
    }

    #[test]
    fn clopen_examples() {
        let c = s("Q0").to_clopen().unwrap();
        assert_eq!((c.depth(), c.allowed()), (1, vec![Word::from_bits(vec![true])]));
        let c = s("Q0 | !Q0").to_clopen().unwrap();
        assert_eq!((c.depth(), c.allowed()), (0, vec![Word::empty()]));
        let c = s("Q1 & !Q0").to_clopen().unwrap();
        assert_eq!((c.depth(), c.allowed()), (2, vec!["01".parse().unwrap()]));
        let c = s("Q30 | !Q30").to_clopen().unwrap();
        assert!(c.is_full());
        assert!(matches!(s("Q30").to_clopen(), Err(Error::ClopenTooDeep { depth: 31, .. })));
    }

    #[test]
    fn semantic_equality() {
        assert!(semantically_equal(&s("Q0 -> Q1"), &s("!Q0 | Q1")));
        assert!(!semantically_equal(&s("Q0"), &s("Q1")));
        assert!(semantically_equal(&s("Q0 & !Q0"), &s("F")));
    }

    #[test]
    fn cylinder_sentences() {
        let w = |x: &str| x.parse::<Word>().unwrap();
        assert_eq!(cylinder_sentence(&w("10")).to_string(), "Q0 & !Q1");
        assert_eq!(cylinder_sentence(&w("")).to_string(), "T");
        assert_eq!(cylinder_sentence(&w("011")).to_string(), "!Q0 & Q1 & Q2");
        let c = cylinder_sentence(&w("011")).to_clopen().unwrap();
        assert_eq!(c.allowed(), vec![w("011")]);
    }

    #[test]
    fn cover_round_trips() {
        let c = s("Q0 | Q1 & Q2").to_clopen().unwrap();
        let cover: Vec<String> = c.cover().iter().map(|w| w.to_string()).collect();
        assert_eq!(cover, ["011", "1"]);
        assert!(semantically_equal(&c.to_sentence(), &s("Q0 | Q1 & Q2")));
        assert_eq!(s("F").to_clopen().unwrap().to_sentence(), Sentence::False);
        assert_eq!(s("T").to_clopen().unwrap().to_sentence(), Sentence::True);
    }
}
