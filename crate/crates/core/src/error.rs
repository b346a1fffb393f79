use thiserror::Error;

use crate::theory::Theory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} syntax error at position {pos}: {msg}")]
    Syntax { what: &'static str, pos: usize, msg: String },

    #[error("atom index Q{index} at position {pos} exceeds the configured maximum {max}")]
    AtomOverflow { index: u64, max: u32, pos: usize },

    #[error("clopen of depth {depth} exceeds the materialization limit {limit}")]
    ClopenTooDeep { depth: u32, limit: u32 },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("excluded theory {0} does not belong to the carrier")]
    ExcludedNotInCarrier(Theory),

    #[error("theory {0} is not in the E-closure of the family")]
    NotInClosure(Theory),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("family cannot be represented as a closed carrier minus finitely many points: {0}")]
    Unrepresentable(String),

    #[error("sentence is (-1)-ranking: its restriction is empty")]
    EmptyRestriction,

    #[error("sentence is not 0-ranking: its restriction is infinite")]
    NotZeroRanking,

    #[error("subfamily is not E-closed in the family; {counterexample} is in its closure but not in it")]
    NotRelativelyClosed { counterexample: Theory },

    #[error("requested rank {requested} exceeds the family rank {available}")]
    RankOutOfRange { requested: u32, available: String },

    #[error("every d-definable subfamily of a finite family is s-definable")]
    FiniteFamily,

    #[error("transfinite recipe of rank {0} has no finite automaton")]
    Transfinite(String),

    #[error("oracle inconclusive: {0}")]
    Inconclusive(String),

    #[error("family file: {0}")]
    File(String),
}

impl Error {
    pub(crate) fn syntax(what: &'static str, pos: usize, msg: impl Into<String>) -> Self {
        Error::Syntax { what, pos, msg: msg.into() }
    }
}
