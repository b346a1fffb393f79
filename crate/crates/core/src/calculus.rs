//! The forcing calculus of a family, decided by inclusion of restrictions.

use crate::family::{Family, Scheme};
use crate::sentence::Sentence;

/// `φ ⊢_𝒯 ψ`.
pub fn forces(f: &Family, phi: &Sentence, psi: &Sentence) -> bool {
    f.restrict(phi).is_subset(&f.restrict(psi))
}

/// `Φ ⊢_𝒯 Ψ`.
pub fn forces_scheme(f: &Family, phi: &Scheme, psi: &Scheme) -> bool {
    f.restrict_scheme(phi).is_subset(&f.restrict_scheme(psi))
}

pub fn provable(f: &Family, psi: &Sentence) -> bool {
    f.restrict(psi) == *f
}

pub fn inconsistent(f: &Family, phi: &Sentence) -> bool {
    f.restrict(phi).is_empty()
}

/// `Φ ≡_𝒯 Ψ`.
pub fn equivalent_mod(f: &Family, phi: &Scheme, psi: &Scheme) -> bool {
    f.restrict_scheme(phi) == f.restrict_scheme(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::SafetyAutomaton;
    use crate::theory::Theory;

    fn s(text: &str) -> Sentence {
        text.parse().unwrap()
    }

    fn fin(texts: &[&str]) -> Scheme {
        Scheme::Finite(texts.iter().map(|x| s(x)).collect())
    }

    fn a1() -> Family {
        Family::closed(SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap())
    }

    #[test]
    fn forcing() {
        assert!(forces(&Family::empty(), &s("T"), &s("F")));
        assert!(forces(&a1(), &s("Q0 & Q1"), &s("Q0")));
        assert!(forces(&a1(), &s("!Q0"), &s("!Q1")));
        assert!(!forces(&Family::full_space(), &s("!Q0"), &s("!Q1")));
    }

    #[test]
    fn scheme_forcing() {
        let f = a1();
        let diag = Scheme::Diagram("(1)".parse::<Theory>().unwrap());
        assert!(forces_scheme(&f, &diag, &diag));
        assert!(forces_scheme(&f, &diag, &fin(&["Q0"])));
        assert!(forces_scheme(&f, &fin(&["F"]), &fin(&["Q3 & !Q3"])));
    }

    #[test]
    fn provability() {
        let upper = a1().restrict(&s("Q0"));
        assert!(provable(&upper, &s("Q0")));
        assert!(inconsistent(&a1(), &s("!Q0 & Q1")));
        assert!(provable(&a1(), &s("T")));
    }

    #[test]
    fn equivalence() {
        assert!(equivalent_mod(&a1(), &fin(&["Q0", "Q1"]), &fin(&["Q0 & Q1"])));
        assert!(equivalent_mod(&a1(), &fin(&["Q1"]), &fin(&["Q0 & Q1"])));
        assert!(!equivalent_mod(&Family::full_space(), &fin(&["Q0"]), &fin(&["Q1"])));
    }
}
