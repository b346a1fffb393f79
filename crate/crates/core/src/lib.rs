//! Families of complete theories as subsets of Cantor space: E-closure, forcing,
//! Cantor–Bendixson rank and degree, and the constructions around them.

pub mod automaton;
pub mod calculus;
pub mod check;
pub mod construct;
pub mod error;
pub mod expr;
pub mod family;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod ordinal;
pub mod rank;
pub mod sentence;
pub mod theory;
pub mod word;

pub use automaton::SafetyAutomaton;
pub use construct::{RankingReport, Verification};
pub use error::{Error, Result};
pub use expr::{FamilyExpr, RecipeRank};
pub use family::{Family, Scheme};
pub use ordinal::Ordinal;
pub use rank::{PointRank, RankResult};
pub use sentence::{cylinder_sentence, semantically_equal, Clopen, Sentence};
pub use theory::Theory;
pub use word::Word;
