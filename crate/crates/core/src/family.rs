//! Families of complete theories and definable subfamilies.
//!
//! A family is a closed regular carrier minus finitely many excluded points, or an explicit
//! finite set. The representation is normalized so that the carrier is the E-closure of the
//! family and every excluded point is an accumulation point; equal values denote equal sets.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::automaton::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::sentence::{cylinder_sentence, Sentence};
use crate::theory::Theory;
use crate::word::Word;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Family {
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum Repr {
    Explicit(BTreeSet<Theory>),
    Regular { carrier: SafetyAutomaton, excluded: BTreeSet<Theory> },
}

/// A set of sentences `Φ` given finitely.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Scheme {
    Finite(Vec<Sentence>),
    /// Every sentence true in the theory.
    Diagram(Theory),
    /// `{ ¬χ_u : [u] misses the target }`.
    ClosedTarget(SafetyAutomaton),
}

impl Family {
    pub fn empty() -> Self {
        Family { repr: Repr::Explicit(BTreeSet::new()) }
    }

    pub fn explicit(points: impl IntoIterator<Item = Theory>) -> Self {
        Family { repr: Repr::Explicit(points.into_iter().collect()) }
    }

    /// All theories of the language.
    pub fn full_space() -> Self {
        Self::closed(SafetyAutomaton::universal())
    }

    /// The closed family accepted by `carrier`.
    pub fn closed(carrier: SafetyAutomaton) -> Self {
        Self::normalize(carrier, BTreeSet::new())
    }

    /// `carrier` minus `excluded`; every excluded point must be accepted by the carrier.
    pub fn regular(carrier: SafetyAutomaton, excluded: impl IntoIterator<Item = Theory>) -> Result<Self> {
        let excluded: BTreeSet<Theory> = excluded.into_iter().collect();
        if let Some(t) = excluded.iter().find(|t| !carrier.accepts(t)) {
            return Err(Error::ExcludedNotInCarrier(t.clone()));
        }
        Ok(Self::normalize(carrier, excluded))
    }

    fn normalize(mut carrier: SafetyAutomaton, excluded: BTreeSet<Theory>) -> Self {
        let mut excluded: BTreeSet<Theory> = excluded.into_iter().filter(|t| carrier.accepts(t)).collect();
        loop {
            if let Some(points) = carrier.points() {
                return Self::explicit(points.into_iter().filter(|t| !excluded.contains(t)));
            }
            let isolated: Vec<(Theory, Word)> =
                excluded.iter().filter_map(|t| carrier.isolating_prefix(t).map(|u| (t.clone(), u))).collect();
            if isolated.is_empty() {
                return Family { repr: Repr::Regular { carrier, excluded } };
            }
            for (t, u) in isolated {
                carrier = carrier.remove_cylinder(&u);
                excluded.remove(&t);
            }
        }
    }

    /// The explicit point list, when the family is stored as a finite set.
    pub fn explicit_points(&self) -> Option<&BTreeSet<Theory>> {
        match &self.repr {
            Repr::Explicit(p) => Some(p),
            Repr::Regular { .. } => None,
        }
    }

    /// The automaton accepting the E-closure.
    pub fn carrier(&self) -> SafetyAutomaton {
        match &self.repr {
            Repr::Explicit(p) => SafetyAutomaton::from_points(p),
            Repr::Regular { carrier, .. } => carrier.clone(),
        }
    }

    /// Points of the carrier missing from the family.
    pub fn excluded(&self) -> BTreeSet<Theory> {
        match &self.repr {
            Repr::Explicit(_) => BTreeSet::new(),
            Repr::Regular { excluded, .. } => excluded.clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(&self.repr, Repr::Explicit(p) if p.is_empty())
    }

    /// Number of theories, or `None` when infinite.
    pub fn cardinality(&self) -> Option<usize> {
        self.explicit_points().map(BTreeSet::len)
    }

    pub fn member(&self, t: &Theory) -> bool {
        match &self.repr {
            Repr::Explicit(p) => p.contains(t),
            Repr::Regular { carrier, excluded } => !excluded.contains(t) && carrier.accepts(t),
        }
    }

    /// The neighbourhood `𝒯_φ`.
    pub fn restrict(&self, s: &Sentence) -> Family {
        match &self.repr {
            Repr::Explicit(p) => Self::explicit(p.iter().filter(|t| s.eval(t)).cloned()),
            Repr::Regular { carrier, excluded } => Self::normalize(
                carrier.intersect(&SafetyAutomaton::from_sentence(s)),
                excluded.iter().filter(|t| s.eval(t)).cloned().collect(),
            ),
        }
    }

    /// The d-definable subfamily `𝒯_Φ`.
    pub fn restrict_scheme(&self, phi: &Scheme) -> Family {
        match phi {
            Scheme::Finite(list) => self.restrict(&Sentence::conjunction(list.iter().cloned())),
            Scheme::Diagram(t) if self.member(t) => Self::explicit([t.clone()]),
            Scheme::Diagram(_) => Self::empty(),
            Scheme::ClosedTarget(a) => match &self.repr {
                Repr::Explicit(p) => Self::explicit(p.iter().filter(|t| a.accepts(t)).cloned()),
                Repr::Regular { carrier, excluded } => Self::normalize(carrier.intersect(a), excluded.clone()),
            },
        }
    }

    /// The E-closure.
    pub fn closure(&self) -> Family {
        match &self.repr {
            Repr::Explicit(_) => self.clone(),
            Repr::Regular { carrier, .. } => {
                Family { repr: Repr::Regular { carrier: carrier.clone(), excluded: BTreeSet::new() } }
            }
        }
    }

    pub fn is_e_closed(&self) -> bool {
        self.excluded().is_empty()
    }

    /// Whether every neighbourhood of `t` meets the family in infinitely many theories.
    pub fn is_accumulation_point(&self, t: &Theory) -> bool {
        match &self.repr {
            Repr::Explicit(_) => false,
            Repr::Regular { carrier, .. } => carrier.accepts(t) && carrier.isolating_prefix(t).is_none(),
        }
    }

    pub fn union(&self, other: &Family) -> Family {
        if let (Repr::Explicit(a), Repr::Explicit(b)) = (&self.repr, &other.repr) {
            return Self::explicit(a.union(b).cloned());
        }
        let excluded = self
            .excluded()
            .into_iter()
            .filter(|t| !other.member(t))
            .chain(other.excluded().into_iter().filter(|t| !self.member(t)))
            .collect();
        Self::normalize(self.carrier().union(&other.carrier()), excluded)
    }

    pub fn intersect(&self, other: &Family) -> Family {
        match (&self.repr, &other.repr) {
            (Repr::Explicit(a), _) => Self::explicit(a.iter().filter(|t| other.member(t)).cloned()),
            (_, Repr::Explicit(b)) => Self::explicit(b.iter().filter(|t| self.member(t)).cloned()),
            _ => Self::normalize(
                self.carrier().intersect(&other.carrier()),
                self.excluded().union(&other.excluded()).cloned().collect(),
            ),
        }
    }

    pub fn is_subset(&self, other: &Family) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Explicit(a), _) => a.iter().all(|t| other.member(t)),
            (Repr::Regular { .. }, Repr::Explicit(_)) => false,
            (Repr::Regular { carrier: x1, excluded: e1 }, Repr::Regular { carrier: x2, excluded: e2 }) => {
                x1.is_subset(x2) && e2.iter().all(|t| e1.contains(t) || !x1.accepts(t))
            }
        }
    }

    /// The theories isolated in the family.
    pub fn isolated_points(&self) -> Result<Family> {
        match &self.repr {
            Repr::Explicit(_) => Ok(self.clone()),
            Repr::Regular { carrier, .. } => {
                let closure = carrier.isolated_closure();
                let limits = closure.intersect(&carrier.derivative());
                let excluded = limits.points().ok_or_else(|| {
                    Error::Unrepresentable(
                        "the isolated points accumulate on infinitely many non-isolated theories".into(),
                    )
                })?;
                Ok(Self::normalize(closure, excluded.into_iter().collect()))
            }
        }
    }

    /// The least subfamily generating the family, if one exists.
    pub fn least_generating_set(&self) -> Result<Option<Family>> {
        if !self.is_e_closed() {
            return Err(Error::Precondition("least_generating_set needs an E-closed family".into()));
        }
        let iso = self.isolated_points()?;
        Ok((iso.closure() == *self).then_some(iso))
    }

    pub fn consistent(&self, phi: &Scheme) -> bool {
        !self.restrict_scheme(phi).is_empty()
    }

    /// Whether every finite part of `Φ` has a nonempty restriction.
    pub fn locally_consistent(&self, phi: &Scheme) -> bool {
        match phi {
            Scheme::Finite(_) => self.consistent(phi),
            Scheme::Diagram(t) => self.carrier().accepts(t),
            Scheme::ClosedTarget(a) => !self.carrier().intersect(a).is_empty(),
        }
    }

    /// A finite inconsistent part of `Φ` when `Φ` is locally inconsistent.
    pub fn refutation_certificate(&self, phi: &Scheme) -> Option<Vec<Sentence>> {
        if self.locally_consistent(phi) {
            return None;
        }
        match phi {
            Scheme::Finite(list) => {
                let mut core = list.clone();
                let mut i = 0;
                while i < core.len() {
                    let mut without = core.clone();
                    without.remove(i);
                    if self.consistent(&Scheme::Finite(without.clone())) {
                        i += 1;
                    } else {
                        core = without;
                    }
                }
                Some(core)
            }
            Scheme::Diagram(t) => {
                let x = self.carrier();
                let k = (0..).find(|&k| x.run(t.take(k).bits()).is_none()).expect("t is rejected");
                Some(vec![cylinder_sentence(&t.take(k))])
            }
            Scheme::ClosedTarget(a) => {
                let x = self.carrier();
                let bound = x.num_states() * a.num_states();
                let mut out = Vec::new();
                let mut seen = HashSet::new();
                let mut stack = vec![(Word::empty(), 0u32, 0u32)];
                while let Some((u, p, q)) = stack.pop() {
                    assert!(u.len() <= bound, "product of disjoint closed sets exceeded its depth bound");
                    for b in [false, true] {
                        let Some(p2) = x.edge(p, b) else { continue };
                        let v = u.child(b);
                        match a.edge(q, b) {
                            None => {
                                if seen.insert(v.clone()) {
                                    out.push(Sentence::not(cylinder_sentence(&v)));
                                }
                            }
                            Some(q2) => stack.push((v, p2, q2)),
                        }
                    }
                }
                Some(out)
            }
        }
    }

    /// Some theory of the family, preferring lexicographically small ones near the root.
    pub fn some_point(&self) -> Option<Theory> {
        match &self.repr {
            Repr::Explicit(p) => p.iter().next().cloned(),
            Repr::Regular { carrier, excluded } => {
                let mut queue = std::collections::VecDeque::from([Word::empty()]);
                while let Some(u) = queue.pop_front() {
                    let Some(t) = carrier.least_point_extending(&u) else { continue };
                    if !excluded.contains(&t) {
                        return Some(t);
                    }
                    queue.push_back(u.child(false));
                    queue.push_back(u.child(true));
                }
                unreachable!("an infinite family has a point outside its finite exclusion set")
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Explicit(p) => {
                let pts: Vec<String> = p.iter().map(Theory::to_string).collect();
                write!(f, "{{{}}}", pts.join(", "))
            }
            Repr::Regular { carrier, excluded } => {
                write!(f, "closed set with {} states", carrier.num_states())?;
                if !excluded.is_empty() {
                    let pts: Vec<String> = excluded.iter().map(Theory::to_string).collect();
                    write!(f, " minus {{{}}}", pts.join(", "))?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Finite(list) => {
                let parts: Vec<String> = list.iter().map(Sentence::to_string).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            Scheme::Diagram(t) => write!(f, "diag({t})"),
            Scheme::ClosedTarget(a) => write!(f, "target({} states)", a.num_states()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Theory {
        s.parse().unwrap()
    }

    fn s(text: &str) -> Sentence {
        text.parse().unwrap()
    }

    fn a1() -> SafetyAutomaton {
        SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap()
    }

    fn comb_minus_limit() -> Family {
        Family::regular(a1(), [t("(1)")]).unwrap()
    }

    #[test]
    fn membership() {
        assert!(Family::explicit([t("(0)"), t("1(0)")]).member(&t("1(0)")));
        assert!(Family::closed(a1()).member(&t("(1)")));
        assert!(!comb_minus_limit().member(&t("(1)")));
        assert!(comb_minus_limit().member(&t("1110(0)")));
        assert!(matches!(Family::regular(a1(), [t("(01)")]), Err(Error::ExcludedNotInCarrier(_))));
    }

    #[test]
    fn restriction() {
        let r = Family::closed(a1()).restrict(&s("Q0"));
        let expected = SafetyAutomaton::new(3, 0, &[(0, true, 1), (1, true, 1), (1, false, 2), (2, false, 2)]).unwrap();
        assert_eq!(r, Family::closed(expected));
        assert_eq!(Family::explicit([t("(0)"), t("1(0)")]).restrict(&s("Q0")), Family::explicit([t("1(0)")]));
        assert_eq!(comb_minus_limit().restrict(&s("T")), comb_minus_limit());
    }

    #[test]
    fn schemes() {
        let f = Family::closed(a1());
        assert_eq!(f.restrict_scheme(&Scheme::Diagram(t("(1)"))), Family::explicit([t("(1)")]));
        assert_eq!(f.restrict_scheme(&Scheme::Finite(vec![])), f);
        assert_eq!(f.restrict_scheme(&Scheme::ClosedTarget(a1())), f);
    }

    #[test]
    fn closure_readmits_accumulation_points_only() {
        assert_eq!(comb_minus_limit().closure(), Family::closed(a1()));
        assert!(!comb_minus_limit().is_e_closed());
        let without_tooth = Family::regular(a1(), [t("110(0)")]).unwrap();
        assert!(without_tooth.is_e_closed());
        assert!(!without_tooth.member(&t("110(0)")));
        assert_eq!(without_tooth.closure(), without_tooth);
        assert_eq!(Family::explicit([t("(0)")]).closure(), Family::explicit([t("(0)")]));
    }

    #[test]
    fn accumulation_points() {
        assert!(comb_minus_limit().is_accumulation_point(&t("(1)")));
        assert!(!comb_minus_limit().is_accumulation_point(&t("10(0)")));
        assert!(!Family::explicit([t("(0)")]).is_accumulation_point(&t("(0)")));
    }

    #[test]
    fn set_algebra() {
        let f = comb_minus_limit();
        assert_eq!(f.union(&f), f);
        assert!(f.restrict(&s("Q0")).is_subset(&f));
        let zero = Family::closed(SafetyAutomaton::cylinder(&"0".parse().unwrap()));
        assert_eq!(Family::closed(a1()).intersect(&zero), Family::explicit([t("(0)")]));
        assert_eq!(f.union(&Family::explicit([t("(1)")])), Family::closed(a1()));
        assert!(f.is_subset(&Family::closed(a1())));
        assert!(!Family::closed(a1()).is_subset(&f));
    }

    #[test]
    fn isolated_points_and_generators() {
        let f = Family::closed(a1());
        assert_eq!(f.isolated_points().unwrap(), comb_minus_limit());
        assert!(Family::full_space().isolated_points().unwrap().is_empty());
        let pair = Family::explicit([t("(0)"), t("(1)")]);
        assert_eq!(pair.isolated_points().unwrap(), pair);
        assert_eq!(f.least_generating_set().unwrap(), Some(comb_minus_limit()));
        assert_eq!(Family::full_space().least_generating_set().unwrap(), None);
        assert!(matches!(comb_minus_limit().least_generating_set(), Err(Error::Precondition(_))));
    }

    #[test]
    fn consistency() {
        let diag = Scheme::Diagram(t("(1)"));
        assert!(comb_minus_limit().locally_consistent(&diag));
        assert!(!comb_minus_limit().consistent(&diag));
        assert_eq!(comb_minus_limit().refutation_certificate(&diag), None);
        assert!(Family::closed(a1()).consistent(&diag));
        let contra = Scheme::Finite(vec![s("Q0 & !Q0")]);
        assert_eq!(Family::closed(a1()).refutation_certificate(&contra), Some(vec![s("Q0 & !Q0")]));
        let cert = Family::closed(a1()).refutation_certificate(&Scheme::Diagram(t("01(0)"))).unwrap();
        assert_eq!(cert, vec![s("!Q0 & Q1")]);
    }

    #[test]
    fn closed_target_certificates_refute() {
        let f = Family::closed(a1());
        let target = SafetyAutomaton::cylinder(&"01".parse().unwrap());
        let cert = f.refutation_certificate(&Scheme::ClosedTarget(target.clone())).unwrap();
        assert!(f.restrict(&Sentence::conjunction(cert.iter().cloned())).is_empty());
        for phi in &cert {
            assert!(SafetyAutomaton::from_sentence(phi).intersect(&target) == target);
        }
    }

    #[test]
    fn some_point_avoids_exclusions() {
        let p = comb_minus_limit().some_point().unwrap();
        assert!(comb_minus_limit().member(&p));
    }
}
