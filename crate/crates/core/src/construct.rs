//! Constructions: complete decompositions, d-definability witnesses, ranking sentences,
//! rank-one subfamilies of perfect families, and families of prescribed rank and degree.

use std::collections::{HashMap, VecDeque};

use crate::automaton::SafetyAutomaton;
use crate::error::{Error, Result};
use crate::expr::FamilyExpr;
use crate::family::{Family, Scheme};
use crate::ordinal::Ordinal;
use crate::rank::{self, RankResult};
use crate::sentence::{cylinder_sentence, Sentence};
use crate::theory::Theory;
use crate::word::Word;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verification {
    RecipeOnly,
    AutomatonVerified,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankingReport {
    pub rank: Ordinal,
    pub degree: u64,
    pub recipe: Option<FamilyExpr>,
    /// The compiled family; absent for transfinite recipes.
    pub witness: Option<Family>,
    /// A scheme defining the witness inside the ambient family, when one was requested.
    pub scheme: Option<Scheme>,
    pub verification: Verification,
}

impl RankingReport {
    pub fn summary(&self) -> String {
        let status = match self.verification {
            Verification::AutomatonVerified => "verified",
            Verification::RecipeOnly => "recipe-only",
        };
        format!("{status} ({},{})", self.rank, self.degree)
    }
}

/// `n` pairwise inconsistent sentences, each isolating one theory of `𝒯_φ`, whose
/// disjunction is equivalent to `φ` over the family.
pub fn complete_decomposition(f: &Family, phi: &Sentence) -> Result<Vec<Sentence>> {
    let restricted = f.restrict(phi);
    if restricted.is_empty() {
        return Err(Error::EmptyRestriction);
    }
    let points: Vec<Theory> = restricted.explicit_points().ok_or(Error::NotZeroRanking)?.iter().cloned().collect();
    let n = points.len();
    let psi: Vec<Sentence> = points
        .iter()
        .map(|t| {
            let len = points
                .iter()
                .filter(|o| *o != t)
                .map(|o| t.common_prefix_len(o).expect("distinct points") + 1)
                .max()
                .unwrap_or(0);
            cylinder_sentence(&t.take(len))
        })
        .collect();
    Ok((0..n)
        .map(|i| {
            let mut parts = vec![phi.clone()];
            for (j, p) in psi.iter().enumerate() {
                if j == n - 1 && i == n - 1 {
                    break;
                }
                parts.push(if i == j { p.clone() } else { Sentence::not(p.clone()) });
            }
            simplify(Sentence::conjunction(parts))
        })
        .collect())
}

fn simplify(s: Sentence) -> Sentence {
    match s.to_clopen() {
        Ok(c) => c.to_sentence(),
        Err(_) => s,
    }
}

/// A scheme `Φ` with `𝒯_Φ = sub`, or the theory showing `sub` is not E-closed in `f`.
pub fn ddef_witness(f: &Family, sub: &Family) -> Result<Scheme> {
    if !sub.is_subset(f) {
        return Err(Error::Precondition("the subfamily is not contained in the family".into()));
    }
    if let Some(t) = sub.excluded().into_iter().find(|t| f.member(t)) {
        return Err(Error::NotRelativelyClosed { counterexample: t });
    }
    Ok(Scheme::ClosedTarget(sub.carrier()))
}

fn ranked_level(f: &Family, alpha: u32) -> Result<SafetyAutomaton> {
    let tw = rank::tower(f);
    match rank::rank(f) {
        RankResult::Infinite => {
            Err(Error::Unsupported("ranking sentences need a family of ordinal rank; use build_rank1_subfamily".into()))
        }
        r => {
            let beta = r.rank_value().expect("finite");
            if i64::from(alpha) > beta {
                return Err(Error::RankOutOfRange { requested: alpha, available: beta.to_string() });
            }
            Ok(tw.levels[alpha as usize].carrier())
        }
    }
}

/// The cylinder sentence of the shortlex-least word isolating a point of rank `α`.
pub fn alpha_ranking_sentence(f: &Family, alpha: u32) -> Result<Sentence> {
    let level = ranked_level(f, alpha)?;
    let singleton = level.singleton_states();
    let mut seen = vec![false; level.num_states()];
    let mut queue = VecDeque::from([(0u32, Word::empty())]);
    seen[0] = true;
    while let Some((q, u)) = queue.pop_front() {
        if singleton[q as usize] {
            return Ok(cylinder_sentence(&u));
        }
        for b in [false, true] {
            if let Some(t) = level.edge(q, b) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    queue.push_back((t, u.child(b)));
                }
            }
        }
    }
    unreachable!("a nonempty scattered level has isolated points")
}

/// Up to `count` pairwise inconsistent `α`-ranking cylinder sentences, in shortlex order of
/// their words, searching words of length at most `max_len`.
pub fn alpha_ranking_sentences(f: &Family, alpha: u32, count: usize, max_len: usize) -> Result<Vec<Sentence>> {
    let level = ranked_level(f, alpha)?;
    let singleton = level.singleton_states();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(0u32, Word::empty())]);
    while let Some((q, u)) = queue.pop_front() {
        if out.len() == count {
            break;
        }
        if singleton[q as usize] {
            out.push(cylinder_sentence(&u));
            continue;
        }
        if u.len() == max_len {
            continue;
        }
        for b in [false, true] {
            if let Some(t) = level.edge(q, b) {
                queue.push_back((t, u.child(b)));
            }
        }
    }
    Ok(out)
}

/// Shortlex-least path from `from` to a state satisfying `goal`.
fn shortest_path(a: &SafetyAutomaton, from: u32, goal: impl Fn(u32) -> bool) -> Option<(Vec<bool>, u32)> {
    let mut parent: HashMap<u32, Option<(u32, bool)>> = HashMap::from([(from, None)]);
    let mut queue = VecDeque::from([from]);
    while let Some(q) = queue.pop_front() {
        if goal(q) {
            let mut bits = Vec::new();
            let mut cur = q;
            while let Some(Some((p, b))) = parent.get(&cur) {
                bits.push(*b);
                cur = *p;
            }
            bits.reverse();
            return Some((bits, q));
        }
        for b in [false, true] {
            if let Some(t) = a.edge(q, b) {
                parent.entry(t).or_insert_with(|| {
                    queue.push_back(t);
                    Some((q, b))
                });
            }
        }
    }
    None
}

/// States lying in a bottom strongly connected component.
fn bottom_scc_states(a: &SafetyAutomaton) -> Vec<bool> {
    let n = a.num_states();
    let reach: Vec<Vec<bool>> = (0..n as u32)
        .map(|q| {
            let mut seen = vec![false; n];
            let mut stack = vec![q];
            seen[q as usize] = true;
            while let Some(p) = stack.pop() {
                for b in [false, true] {
                    if let Some(t) = a.edge(p, b) {
                        if !seen[t as usize] {
                            seen[t as usize] = true;
                            stack.push(t);
                        }
                    }
                }
            }
            seen
        })
        .collect();
    (0..n).map(|q| (0..n).all(|p| !reach[q][p] || reach[p][q])).collect()
}

type Table = Vec<[Option<u32>; 2]>;

/// Comb `{w·p·c^ω} ∪ {w·p·c^k·0·r·c^ω : k ≥ 0}` as an automaton.
fn comb_automaton(stem: &[bool], cycle: &[bool], ret: &[bool]) -> SafetyAutomaton {
    let mut raw: Table = Vec::new();
    let mut fresh = |raw: &mut Table| {
        raw.push([None; 2]);
        (raw.len() - 1) as u32
    };
    let chain = |raw: &mut Table, from: u32, bits: &[bool], to: u32, fresh: &mut dyn FnMut(&mut Table) -> u32| {
        let mut q = from;
        for (i, &b) in bits.iter().enumerate() {
            let next = if i + 1 == bits.len() { to } else { fresh(raw) };
            raw[q as usize][usize::from(b)] = Some(next);
            q = next;
        }
    };
    let start = fresh(&mut raw);
    let hub = if stem.is_empty() { start } else { fresh(&mut raw) };
    chain(&mut raw, start, stem, hub, &mut fresh);
    chain(&mut raw, hub, cycle, hub, &mut fresh);
    // Tooth: 0·r then a plain copy of the cycle.
    let tail = fresh(&mut raw);
    chain(&mut raw, tail, cycle, tail, &mut fresh);
    let mut tooth = vec![false];
    tooth.extend_from_slice(ret);
    chain(&mut raw, hub, &tooth, tail, &mut fresh);
    SafetyAutomaton::from_raw(&raw, start)
}

/// A d-definable subfamily of rank `(1, n)` inside a family with a nonempty perfect kernel.
pub fn build_rank1_subfamily(f: &Family, n: u64) -> Result<RankingReport> {
    if n == 0 {
        return Err(Error::Precondition("the degree must be positive".into()));
    }
    let kernel = rank::perfect_kernel(f);
    if kernel.is_empty() {
        return Err(Error::Precondition("the family has an empty perfect kernel".into()));
    }
    let k = kernel.carrier();
    let excluded = f.excluded();

    // n pairwise incomparable words meeting the kernel.
    let mut words = vec![Word::empty()];
    while (words.len() as u64) < n {
        let w = words.remove(0);
        let q = k.run(w.bits()).expect("frontier words meet the kernel");
        let (path, _) = shortest_path(&k, q, |p| k.out_degree(p) == 2).expect("perfect sets branch");
        let v = w.concat(&Word::from_bits(path));
        words.push(v.child(false));
        words.push(v.child(true));
    }
    words.sort();

    let bottom = bottom_scc_states(&k);
    let mut comb = SafetyAutomaton::empty();
    for w in &words {
        let start = k.run(w.bits()).expect("frontier words meet the kernel");
        let (x, q) = shortest_path(&k, start, |p| bottom[p as usize] && k.out_degree(p) == 2)
            .expect("a bottom component of a perfect set branches");
        let one = k.edge(q, true).expect("branching");
        let zero = k.edge(q, false).expect("branching");
        let mut cycle = vec![true];
        cycle.extend(shortest_path(&k, one, |p| p == q).expect("same component").0);
        let ret = shortest_path(&k, zero, |p| p == q).expect("same component").0;

        // Pump the stem until the limit avoids the excluded theories.
        let mut stem: Vec<bool> = w.bits().iter().chain(&x).copied().collect();
        let mut pumped = stem.clone();
        loop {
            let limit = Theory::canonical(pumped.clone(), cycle.clone());
            if !excluded.contains(&limit) {
                break;
            }
            pumped = stem.iter().copied().chain([false]).chain(ret.iter().copied()).collect();
            stem.extend_from_slice(&cycle);
        }
        comb = comb.union(&comb_automaton(&pumped, &cycle, &ret));
    }
    let witness = f.intersect(&Family::closed(comb));
    let got = rank::rank(&witness);
    assert_eq!(got, RankResult::Finite { rank: 1, degree: n }, "rank-one construction missed its target");
    let scheme = ddef_witness(f, &witness)?;
    Ok(RankingReport {
        rank: Ordinal::finite(1),
        degree: n,
        recipe: None,
        witness: Some(witness),
        scheme: Some(scheme),
        verification: Verification::AutomatonVerified,
    })
}

/// `n` pairwise incomparable words obtained by repeatedly splitting the shortest one.
pub fn prefix_code(n: u64) -> Vec<Word> {
    let mut words = vec![Word::empty()];
    while (words.len() as u64) < n {
        words.sort();
        let w = words.remove(0);
        words.push(w.child(false));
        words.push(w.child(true));
    }
    words.sort();
    words
}

/// A recipe of rank `α` and degree `n`: `n` standard towers under a prefix code.
pub fn build_recipe(alpha: &Ordinal, n: u64) -> Result<FamilyExpr> {
    if n == 0 {
        return Err(Error::Precondition("the degree must be positive".into()));
    }
    let tower = FamilyExpr::tower(alpha);
    if n == 1 {
        return Ok(tower);
    }
    FamilyExpr::prefixed_union(prefix_code(n).into_iter().map(|u| (u, tower.clone())).collect())
}

/// Recipe report without compilation; used for transfinite ranks.
pub fn recipe_report(alpha: &Ordinal, n: u64) -> Result<RankingReport> {
    if let Some(a) = alpha.as_finite() {
        let a = u32::try_from(a).map_err(|_| Error::Unsupported(format!("rank {a} is too large")))?;
        return build_family(a, n);
    }
    Ok(RankingReport {
        rank: alpha.clone(),
        degree: n,
        recipe: Some(build_recipe(alpha, n)?),
        witness: None,
        scheme: None,
        verification: Verification::RecipeOnly,
    })
}

/// A closed family of rank `α` and degree `n`, compiled and verified.
pub fn build_family(alpha: u32, n: u64) -> Result<RankingReport> {
    let recipe = build_recipe(&Ordinal::finite(u64::from(alpha)), n)?;
    let witness = Family::closed(recipe.compile()?);
    let got = rank::rank(&witness);
    assert_eq!(got, RankResult::Finite { rank: alpha, degree: n }, "compiled recipe {recipe} has the wrong rank");
    Ok(RankingReport {
        rank: Ordinal::finite(u64::from(alpha)),
        degree: n,
        recipe: Some(recipe),
        witness: Some(witness),
        scheme: None,
        verification: Verification::AutomatonVerified,
    })
}

/// A theory whose singleton is d-definable but not s-definable in `f`.
pub fn nonsdefinable_witness(f: &Family) -> Result<(Theory, Scheme)> {
    if !f.is_e_closed() {
        return Err(Error::Precondition("the family is not E-closed; d-definable singletons need not exist".into()));
    }
    if f.cardinality().is_some() {
        return Err(Error::FiniteFamily);
    }
    let t = f.carrier().derivative().least_point().expect("infinite closed sets have limit points");
    Ok((t.clone(), Scheme::Diagram(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus;

    fn t(s: &str) -> Theory {
        s.parse().unwrap()
    }

    fn s(text: &str) -> Sentence {
        text.parse().unwrap()
    }

    fn a1() -> SafetyAutomaton {
        SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap()
    }

    #[test]
    fn complete_decompositions() {
        let f = Family::explicit([t("(0)"), t("1(0)"), t("11(0)")]);
        let parts = complete_decomposition(&f, &s("T")).unwrap();
        let shown: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["!Q0", "Q0 & !Q1", "Q0 & Q1"]);
        let comb = Family::closed(a1());
        assert_eq!(complete_decomposition(&comb, &s("!Q0")).unwrap(), vec![s("!Q0")]);
        assert!(matches!(complete_decomposition(&comb, &s("Q0")), Err(Error::NotZeroRanking)));
        assert!(matches!(complete_decomposition(&comb, &s("!Q0 & Q1")), Err(Error::EmptyRestriction)));
        let single = complete_decomposition(&comb, &s("!Q0 | Q0 & !Q1")).unwrap();
        assert_eq!(single.len(), 2);
        assert!(calculus::equivalent_mod(
            &comb,
            &Scheme::Finite(vec![Sentence::disjunction(single)]),
            &Scheme::Finite(vec![s("!Q0 | Q0 & !Q1")])
        ));
    }

    #[test]
    fn ddef_witnesses() {
        let f = Family::closed(a1());
        let sub = f.restrict(&s("Q0"));
        let phi = ddef_witness(&f, &sub).unwrap();
        assert_eq!(f.restrict_scheme(&phi), sub);
        let single = Family::explicit([t("1(0)")]);
        assert_eq!(f.restrict_scheme(&ddef_witness(&f, &single).unwrap()), single);
        let comb = Family::regular(a1(), [t("(1)")]).unwrap();
        assert_eq!(ddef_witness(&f, &comb), Err(Error::NotRelativelyClosed { counterexample: t("(1)") }));
    }

    #[test]
    fn ranking_sentences() {
        let comb = Family::closed(a1());
        assert_eq!(alpha_ranking_sentence(&comb, 0).unwrap(), s("!Q0"));
        assert_eq!(alpha_ranking_sentence(&comb, 1).unwrap(), s("T"));
        assert!(matches!(alpha_ranking_sentence(&comb, 2), Err(Error::RankOutOfRange { .. })));
        let tower = build_family(2, 1).unwrap().witness.unwrap();
        let phi = alpha_ranking_sentence(&tower, 1).unwrap();
        assert_eq!(rank::rank(&tower.restrict(&phi)).rank_value(), Some(1));
        let many = alpha_ranking_sentences(&tower, 0, 3, 16).unwrap();
        assert_eq!(many.len(), 3);
    }

    #[test]
    fn rank_one_subfamilies() {
        let full = Family::full_space();
        let report = build_rank1_subfamily(&full, 2).unwrap();
        assert_eq!(report.summary(), "verified (1,2)");
        let w = report.witness.unwrap();
        assert_eq!(rank::rank(&w), RankResult::Finite { rank: 1, degree: 2 });
        assert!(rank::derivative(&w) == Family::explicit([t("0(1)"), t("(1)")]));
        let one = build_rank1_subfamily(&full, 1).unwrap();
        assert!(rank::is_alpha_minimal(one.witness.as_ref().unwrap(), 1));
        assert!(matches!(build_rank1_subfamily(&Family::closed(a1()), 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn rank_one_limit_avoids_exclusions() {
        let f = Family::regular(SafetyAutomaton::universal(), [t("(1)")]).unwrap();
        let report = build_rank1_subfamily(&f, 1).unwrap();
        let w = report.witness.unwrap();
        assert!(w.is_subset(&f));
        assert!(w.is_e_closed());
        assert_eq!(f.restrict_scheme(&report.scheme.unwrap()), w);
    }

    #[test]
    fn families_of_given_rank() {
        assert_eq!(prefix_code(3), vec![Word::from_bits(vec![true]), "00".parse().unwrap(), "01".parse().unwrap()]);
        let r = build_family(0, 3).unwrap();
        assert_eq!(r.witness.unwrap().cardinality(), Some(3));
        assert_eq!(build_family(3, 2).unwrap().summary(), "verified (3,2)");
        let rec = recipe_report(&"w*2+1".parse().unwrap(), 2).unwrap();
        assert_eq!(rec.summary(), "recipe-only (w*2 + 1,2)");
        assert_eq!(rec.recipe.unwrap().recipe_rank().degree, 2);
    }

    #[test]
    fn nonsdefinable() {
        let f = Family::closed(a1());
        assert_eq!(nonsdefinable_witness(&f).unwrap(), (t("(1)"), Scheme::Diagram(t("(1)"))));
        assert_eq!(nonsdefinable_witness(&Family::full_space()).unwrap().0, t("(0)"));
        assert_eq!(nonsdefinable_witness(&Family::explicit([t("(0)"), t("(1)")])), Err(Error::FiniteFamily));
        let comb = Family::regular(a1(), [t("(1)")]).unwrap();
        assert!(matches!(nonsdefinable_witness(&comb), Err(Error::Precondition(_))));
    }
}
