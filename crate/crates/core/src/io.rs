//! The `.fam.json` family file format.
//!
//! ```json
//! {"kind":"explicit","points":["(0)","1(0)"]}
//! {"kind":"automaton","states":2,"initial":0,"edges":[[0,1,0],[0,0,1],[1,0,1]],"exclude":["(1)"]}
//! {"kind":"expr","expr":{"limit":{"body":{"point":"(0)"},"bit":1}}}
//! ```
//!
//! Expressions nest as `{"point":"t"}`, `{"union":[["u",expr],...]}`,
//! `{"limit":{"body":expr,"bit":b}}` and `{"omega_limit":{"rank":"w^2","bit":b}}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::expr::FamilyExpr;
use crate::family::Family;
use crate::ordinal::Ordinal;
use crate::theory::Theory;
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawFile")]
pub enum FamilyFile {
    Explicit {
        points: Vec<Theory>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exclude: Vec<Theory>,
    },
    Automaton {
        states: usize,
        initial: usize,
        edges: Vec<[usize; 3]>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exclude: Vec<Theory>,
    },
    Expr {
        expr: ExprFile,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        exclude: Vec<Theory>,
    },
}

/// Flat form read directly from the document, so syntax errors keep their line and column.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    kind: String,
    points: Option<Vec<Theory>>,
    states: Option<usize>,
    initial: Option<usize>,
    edges: Option<Vec<[usize; 3]>>,
    expr: Option<ExprFile>,
    #[serde(default)]
    exclude: Vec<Theory>,
}

impl TryFrom<RawFile> for FamilyFile {
    type Error = String;

    fn try_from(raw: RawFile) -> std::result::Result<Self, String> {
        let need = |field: &str| format!("kind \"{}\" needs field \"{field}\"", raw.kind);
        let stray = |fields: &[(&str, bool)]| match fields.iter().find(|f| f.1) {
            Some((name, _)) => Err(format!("field \"{name}\" does not belong to kind \"{}\"", raw.kind)),
            None => Ok(()),
        };
        match raw.kind.as_str() {
            "explicit" => {
                stray(&[
                    ("states", raw.states.is_some()),
                    ("initial", raw.initial.is_some()),
                    ("edges", raw.edges.is_some()),
                    ("expr", raw.expr.is_some()),
                ])?;
                Ok(FamilyFile::Explicit { points: raw.points.ok_or_else(|| need("points"))?, exclude: raw.exclude })
            }
            "automaton" => {
                stray(&[("points", raw.points.is_some()), ("expr", raw.expr.is_some())])?;
                Ok(FamilyFile::Automaton {
                    states: raw.states.ok_or_else(|| need("states"))?,
                    initial: raw.initial.unwrap_or(0),
                    edges: raw.edges.ok_or_else(|| need("edges"))?,
                    exclude: raw.exclude,
                })
            }
            "expr" => {
                stray(&[
                    ("points", raw.points.is_some()),
                    ("states", raw.states.is_some()),
                    ("initial", raw.initial.is_some()),
                    ("edges", raw.edges.is_some()),
                ])?;
                Ok(FamilyFile::Expr { expr: raw.expr.ok_or_else(|| need("expr"))?, exclude: raw.exclude })
            }
            other => Err(format!("unknown kind \"{other}\"; expected explicit, automaton or expr")),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ExprFile {
    Point(Theory),
    Union(Vec<(String, ExprFile)>),
    Limit { body: Box<ExprFile>, bit: u8 },
    OmegaLimit { rank: String, bit: u8 },
}

fn bit(b: u8) -> Result<bool> {
    match b {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(Error::File(format!("bit must be 0 or 1, got {b}"))),
    }
}

impl ExprFile {
    pub fn from_expr(e: &FamilyExpr) -> Self {
        match e {
            FamilyExpr::Point(t) => ExprFile::Point(t.clone()),
            FamilyExpr::PrefixedUnion(children) => {
                ExprFile::Union(children.iter().map(|(u, c)| (u.to_string(), ExprFile::from_expr(c))).collect())
            }
            FamilyExpr::LimitStack { body, bit } => {
                ExprFile::Limit { body: Box::new(ExprFile::from_expr(body)), bit: u8::from(*bit) }
            }
            FamilyExpr::OmegaLimit { rank, bit } => {
                ExprFile::OmegaLimit { rank: rank.to_string(), bit: u8::from(*bit) }
            }
        }
    }

    pub fn to_expr(&self) -> Result<FamilyExpr> {
        Ok(match self {
            ExprFile::Point(t) => FamilyExpr::Point(t.clone()),
            ExprFile::Union(children) => FamilyExpr::prefixed_union(
                children.iter().map(|(u, c)| Ok((u.parse::<Word>()?, c.to_expr()?))).collect::<Result<_>>()?,
            )?,
            ExprFile::Limit { body, bit: b } => FamilyExpr::limit_stack(body.to_expr()?, bit(*b)?),
            ExprFile::OmegaLimit { rank, bit: b } => {
                let rank: Ordinal = rank.parse()?;
                if !rank.is_limit() {
                    return Err(Error::File(format!("omega_limit rank {rank} is not a limit ordinal")));
                }
                FamilyExpr::OmegaLimit { rank, bit: bit(*b)? }
            }
        })
    }
}

impl FamilyFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::File(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("family files serialize")
    }

    pub fn from_family(f: &Family) -> Self {
        if let Some(points) = f.explicit_points() {
            return FamilyFile::Explicit { points: points.iter().cloned().collect(), exclude: Vec::new() };
        }
        let carrier = f.carrier();
        FamilyFile::Automaton {
            states: carrier.num_states(),
            initial: 0,
            edges: carrier.transitions().into_iter().map(|(s, b, t)| [s, usize::from(b), t]).collect(),
            exclude: f.excluded().into_iter().collect(),
        }
    }

    pub fn from_expr(e: &FamilyExpr) -> Self {
        FamilyFile::Expr { expr: ExprFile::from_expr(e), exclude: Vec::new() }
    }

    /// The recipe, for expression files.
    pub fn expr(&self) -> Result<Option<FamilyExpr>> {
        match self {
            FamilyFile::Expr { expr, .. } => expr.to_expr().map(Some),
            _ => Ok(None),
        }
    }

    pub fn to_family(&self) -> Result<Family> {
        match self {
            FamilyFile::Explicit { points, exclude } => {
                let all = Family::explicit(points.iter().cloned());
                if let Some(t) = exclude.iter().find(|t| !all.member(t)) {
                    return Err(Error::ExcludedNotInCarrier(t.clone()));
                }
                Ok(Family::explicit(points.iter().filter(|t| !exclude.contains(t)).cloned()))
            }
            FamilyFile::Automaton { states, initial, edges, exclude } => {
                let transitions = edges
                    .iter()
                    .map(|&[s, b, t]| Ok((s, bit(u8::try_from(b).unwrap_or(u8::MAX))?, t)))
                    .collect::<Result<Vec<_>>>()?;
                let carrier = SafetyAutomaton::new(*states, *initial, &transitions)?;
                Family::regular(carrier, exclude.iter().cloned())
            }
            FamilyFile::Expr { expr, exclude } => Family::regular(expr.to_expr()?.compile()?, exclude.iter().cloned()),
        }
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<FamilyFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::File(format!("{}: {e}", path.display())))?;
    FamilyFile::parse(&text).map_err(|e| match e {
        Error::File(msg) => Error::File(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn load_family(path: impl AsRef<Path>) -> Result<Family> {
    load(path)?.to_family()
}

pub fn save(path: impl AsRef<Path>, file: &FamilyFile) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, file.to_json() + "\n").map_err(|e| Error::File(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Theory {
        s.parse().unwrap()
    }

    #[test]
    fn reads_all_kinds() {
        let comb = FamilyFile::parse(
            r#"{"kind":"automaton","states":2,"initial":0,"edges":[[0,1,0],[0,0,1],[1,0,1]],"exclude":["(1)"]}"#,
        )
        .unwrap()
        .to_family()
        .unwrap();
        assert!(!comb.member(&t("(1)")) && comb.member(&t("10(0)")));
        let expr = FamilyFile::parse(r#"{"kind":"expr","expr":{"limit":{"body":{"point":"(0)"},"bit":1}}}"#).unwrap();
        assert_eq!(expr.to_family().unwrap(), comb.closure());
        let pts = FamilyFile::parse(r#"{"kind":"explicit","points":["(0)","1(0)"],"exclude":["(0)"]}"#).unwrap();
        assert_eq!(pts.to_family().unwrap(), Family::explicit([t("1(0)")]));
        let u = FamilyFile::parse(r#"{"kind":"expr","expr":{"union":[["0",{"point":"(1)"}],["1",{"point":"(0)"}]]}}"#)
            .unwrap();
        assert_eq!(u.to_family().unwrap(), Family::explicit([t("0(1)"), t("1(0)")]));
    }

    #[test]
    fn reports_problems() {
        assert!(matches!(FamilyFile::parse(r#"{"kind":"blob"}"#), Err(Error::File(_))));
        let msg = FamilyFile::parse("{\"kind\":\"explicit\",\n\"points\":[\"1(\"]}").unwrap_err().to_string();
        assert!(msg.contains("line 2"), "{msg}");
        let bad_bit = FamilyFile::parse(r#"{"kind":"automaton","states":1,"initial":0,"edges":[[0,2,0]]}"#).unwrap();
        assert!(bad_bit.to_family().is_err());
        let outside = FamilyFile::parse(r#"{"kind":"explicit","points":["(0)"],"exclude":["(1)"]}"#).unwrap();
        assert!(matches!(outside.to_family(), Err(Error::ExcludedNotInCarrier(_))));
    }

    #[test]
    fn round_trips() {
        let a1 = SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap();
        for f in [
            Family::regular(a1.clone(), [t("(1)"), t("10(0)")]).unwrap(),
            Family::closed(a1),
            Family::explicit([t("(01)"), t("1(0)")]),
            Family::empty(),
            Family::full_space(),
        ] {
            let file = FamilyFile::from_family(&f);
            assert_eq!(FamilyFile::parse(&file.to_json()).unwrap().to_family().unwrap(), f);
        }
        let e = FamilyExpr::tower(&"w^2".parse().unwrap());
        let file = FamilyFile::from_expr(&e);
        assert_eq!(FamilyFile::parse(&file.to_json()).unwrap().expr().unwrap(), Some(e));
    }
}
