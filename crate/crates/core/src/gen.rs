//! Seeded random instances for the property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::SafetyAutomaton;
use crate::expr::FamilyExpr;
use crate::family::{Family, Scheme};
use crate::sentence::Sentence;
use crate::theory::Theory;
use crate::word::Word;

pub type SuiteRng = ChaCha8Rng;

/// Independent streams per suite, all derived from one seed.
pub fn rng(seed: u64, stream: u64) -> SuiteRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn bits(rng: &mut SuiteRng, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

pub fn word(rng: &mut SuiteRng, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_bits(bits(rng, len))
}

pub fn theory(rng: &mut SuiteRng) -> Theory {
    let p = rng.gen_range(0..=3);
    let c = rng.gen_range(1..=3);
    Theory::new(bits(rng, p), bits(rng, c)).expect("nonempty period")
}

/// A raw edge table on `states` states; each edge is present with probability 3/4.
pub fn raw_edges(rng: &mut SuiteRng, states: usize) -> Vec<(usize, bool, usize)> {
    let mut edges = Vec::new();
    for s in 0..states {
        for b in [false, true] {
            if rng.gen_bool(0.75) {
                edges.push((s, b, rng.gen_range(0..states)));
            }
        }
    }
    edges
}

/// A nonempty canonical automaton with at most `max_states` raw states.
pub fn automaton(rng: &mut SuiteRng, max_states: usize) -> SafetyAutomaton {
    for _ in 0..32 {
        let n = rng.gen_range(1..=max_states);
        let a = SafetyAutomaton::new(n, 0, &raw_edges(rng, n)).expect("valid edges");
        if !a.is_empty() {
            return a;
        }
    }
    SafetyAutomaton::universal()
}

/// Up to `k` distinct members of a closed set.
pub fn members(rng: &mut SuiteRng, carrier: &SafetyAutomaton, k: usize) -> Vec<Theory> {
    let mut out: Vec<Theory> = Vec::new();
    for _ in 0..4 * k {
        if out.len() >= k {
            break;
        }
        let u = word(rng, 5);
        if let Some(t) = carrier.least_point_extending(&u) {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// A recipe of height at most `height`.
pub fn expr(rng: &mut SuiteRng, height: u32) -> FamilyExpr {
    if height == 0 || rng.gen_bool(0.2) {
        return FamilyExpr::point(theory(rng));
    }
    if rng.gen_bool(0.5) {
        FamilyExpr::limit_stack(expr(rng, height - 1), rng.gen_bool(0.5))
    } else {
        let code = ["0", "1", "00", "01", "10", "11"];
        let pick: &[&str] = if rng.gen_bool(0.5) { &code[..2] } else { &code[2..] };
        let mut children = Vec::new();
        for u in pick {
            if rng.gen_bool(0.8) {
                children.push((u.parse().expect("word"), expr(rng, height - 1)));
            }
        }
        FamilyExpr::prefixed_union(children).expect("incomparable prefixes")
    }
}

/// Families of every representation: explicit, closed, closed minus finitely many points,
/// and compiled recipes minus some of their limits.
pub fn family(rng: &mut SuiteRng) -> Family {
    match rng.gen_range(0..5) {
        0 => {
            let n = rng.gen_range(0..=4);
            Family::explicit((0..n).map(|_| theory(rng)))
        }
        1 => Family::closed(automaton(rng, 4)),
        2 | 3 => {
            let carrier = automaton(rng, 5);
            let k = rng.gen_range(1..=3);
            let out = members(rng, &carrier, k);
            Family::regular(carrier, out).expect("members of the carrier")
        }
        _ => {
            let carrier = expr(rng, 3).compile().expect("finite recipe");
            let limits = carrier.derivative();
            let k = rng.gen_range(0..=2);
            let mut out = members(rng, &limits, k);
            out.extend(members(rng, &carrier, 1));
            Family::regular(carrier, out).expect("members of the carrier")
        }
    }
}

pub fn sentence(rng: &mut SuiteRng, atoms: u32, depth: u32) -> Sentence {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Sentence::True,
            1 => Sentence::False,
            _ => Sentence::atom(rng.gen_range(0..atoms.max(1))),
        };
    }
    let sub = |rng: &mut SuiteRng| sentence(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Sentence::not(sub(rng)),
        1 => Sentence::and(sub(rng), sub(rng)),
        2 => Sentence::or(sub(rng), sub(rng)),
        3 => Sentence::implies(sub(rng), sub(rng)),
        _ => Sentence::iff(sub(rng), sub(rng)),
    }
}

pub fn finite_scheme(rng: &mut SuiteRng) -> Scheme {
    let n = rng.gen_range(1..=3);
    Scheme::Finite((0..n).map(|_| sentence(rng, 4, 3)).collect())
}

/// A scheme of any kind. Diagrams are often centred on points of the family or of its
/// closure, so the infinite schemes actually touch the points closure adds.
pub fn scheme(rng: &mut SuiteRng, f: &Family) -> Scheme {
    match rng.gen_range(0..4) {
        0 | 1 => finite_scheme(rng),
        2 => {
            let mut near: Vec<Theory> = f.excluded().into_iter().collect();
            near.extend(members(rng, &f.carrier(), 2));
            match near.choose(rng) {
                Some(t) if rng.gen_bool(0.7) => Scheme::Diagram(t.clone()),
                _ => Scheme::Diagram(theory(rng)),
            }
        }
        _ => Scheme::ClosedTarget(automaton(rng, 3)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_streams() {
        let a: Vec<Family> = (0..20)
            .map({
                let mut r = rng(7, 1);
                move |_| family(&mut r)
            })
            .collect();
        let b: Vec<Family> = (0..20)
            .map({
                let mut r = rng(7, 1);
                move |_| family(&mut r)
            })
            .collect();
        assert_eq!(a, b);
        let mut r = rng(7, 2);
        assert!((0..50).map(|_| family(&mut r)).any(|f| !f.excluded().is_empty()));
    }
}
