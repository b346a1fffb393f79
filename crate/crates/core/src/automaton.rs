//! Deterministic safety automata over `{0, 1}` denoting closed regular subsets of Cantor space.
//!
//! Values are kept canonical: trim, minimal, and numbered breadth-first from the initial
//! state `0` (edge `0` before edge `1`). Two automata are therefore equal as values exactly
//! when they accept the same set.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sentence::{Clopen, Sentence};
use crate::theory::Theory;
use crate::word::Word;

type Edges = [Option<u32>; 2];

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct SafetyAutomaton {
    edges: Vec<Edges>,
}

impl SafetyAutomaton {
    /// Builds an automaton from `(source, bit, target)` triples, trimming dead and
    /// unreachable states.
    pub fn new(states: usize, initial: usize, transitions: &[(usize, bool, usize)]) -> Result<Self> {
        if states == 0 {
            if transitions.is_empty() {
                return Ok(Self::empty());
            }
            return Err(Error::InvalidAutomaton("transitions given for an automaton with no states".into()));
        }
        if initial >= states {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range 0..{states}")));
        }
        if states > u32::MAX as usize {
            return Err(Error::InvalidAutomaton(format!("too many states: {states}")));
        }
        let mut raw = vec![[None; 2]; states];
        for &(src, bit, dst) in transitions {
            if src >= states || dst >= states {
                return Err(Error::InvalidAutomaton(format!(
                    "edge {src} -{}-> {dst} mentions a state outside 0..{states}",
                    u8::from(bit)
                )));
            }
            let slot = &mut raw[src][usize::from(bit)];
            match slot {
                Some(old) if *old as usize != dst => {
                    return Err(Error::InvalidAutomaton(format!(
                        "state {src} has two {}-edges (to {old} and {dst})",
                        u8::from(bit)
                    )))
                }
                _ => *slot = Some(dst as u32),
            }
        }
        Ok(Self::from_raw(&raw, initial as u32))
    }

    /// Canonicalizes an arbitrary partial edge table.
    pub(crate) fn from_raw(raw: &[Edges], initial: u32) -> Self {
        let n = raw.len();
        if n == 0 {
            return Self::empty();
        }
        // Greatest fixpoint of "has a live successor".
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut live_succ = vec![0u32; n];
        for (q, e) in raw.iter().enumerate() {
            for t in e.iter().flatten() {
                preds[*t as usize].push(q as u32);
                live_succ[q] += 1;
            }
        }
        let mut live = vec![true; n];
        let mut queue: Vec<u32> = (0..n as u32).filter(|&q| live_succ[q as usize] == 0).collect();
        for &q in &queue {
            live[q as usize] = false;
        }
        while let Some(q) = queue.pop() {
            for &p in &preds[q as usize] {
                live_succ[p as usize] -= 1;
                if live_succ[p as usize] == 0 && live[p as usize] {
                    live[p as usize] = false;
                    queue.push(p);
                }
            }
        }
        if !live[initial as usize] {
            return Self::empty();
        }
        let edge = |q: u32, b: usize| raw[q as usize][b].filter(|t| live[*t as usize]);

        // Reachable live states, then Moore refinement.
        let mut reach = vec![false; n];
        let mut order = vec![initial];
        reach[initial as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for b in 0..2 {
                if let Some(t) = edge(q, b) {
                    if !reach[t as usize] {
                        reach[t as usize] = true;
                        order.push(t);
                    }
                }
            }
        }
        let mut class = vec![0u32; n];
        let mut classes = 1usize;
        loop {
            let mut ids: HashMap<(u32, u32, u32), u32> = HashMap::with_capacity(order.len());
            let mut next = vec![0u32; n];
            for &q in &order {
                let sig = (
                    class[q as usize],
                    edge(q, 0).map_or(u32::MAX, |t| class[t as usize]),
                    edge(q, 1).map_or(u32::MAX, |t| class[t as usize]),
                );
                let fresh = ids.len() as u32;
                next[q as usize] = *ids.entry(sig).or_insert(fresh);
            }
            class = next;
            if ids.len() == classes {
                break;
            }
            classes = ids.len();
        }

        // Breadth-first renumbering of the quotient.
        let mut number: Vec<Option<u32>> = vec![None; classes];
        let mut rep: Vec<u32> = Vec::with_capacity(classes);
        number[class[initial as usize] as usize] = Some(0);
        rep.push(initial);
        let mut edges = Vec::with_capacity(classes);
        let mut i = 0;
        while i < rep.len() {
            let q = rep[i];
            i += 1;
            let mut e = [None; 2];
            for (b, slot) in e.iter_mut().enumerate() {
                if let Some(t) = edge(q, b) {
                    let c = class[t as usize] as usize;
                    let id = *number[c].get_or_insert_with(|| {
                        rep.push(t);
                        (rep.len() - 1) as u32
                    });
                    *slot = Some(id);
                }
            }
            edges.push(e);
        }
        SafetyAutomaton { edges }
    }

    pub fn empty() -> Self {
        SafetyAutomaton { edges: Vec::new() }
    }

    /// The whole of Cantor space.
    pub fn universal() -> Self {
        SafetyAutomaton { edges: vec![[Some(0), Some(0)]] }
    }

    /// The cylinder `[u]` of all sequences extending `u`.
    pub fn cylinder(u: &Word) -> Self {
        let n = u.len() as u32;
        let mut raw: Vec<Edges> = u
            .bits()
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let mut e = [None; 2];
                e[usize::from(b)] = Some(i as u32 + 1);
                e
            })
            .collect();
        raw.push([Some(n), Some(n)]);
        Self::from_raw(&raw, 0)
    }

    /// The singleton `{t}`.
    pub fn point(t: &Theory) -> Self {
        let bits: Vec<bool> = t.prefix().iter().chain(t.period()).copied().collect();
        let loop_to = t.prefix().len() as u32;
        let raw: Vec<Edges> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let mut e = [None; 2];
                let next = if i + 1 == bits.len() { loop_to } else { i as u32 + 1 };
                e[usize::from(b)] = Some(next);
                e
            })
            .collect();
        Self::from_raw(&raw, 0)
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Theory>) -> Self {
        points.into_iter().fold(Self::empty(), |acc, t| acc.union(&Self::point(t)))
    }

    pub fn from_clopen(c: &Clopen) -> Self {
        // Hash-consed decision tree over the truth table; node 0 is the universal state.
        fn build(table: &[bool], raw: &mut Vec<Edges>, memo: &mut HashMap<Edges, u32>) -> Option<u32> {
            if table.iter().all(|&b| b) {
                return Some(0);
            }
            if !table.iter().any(|&b| b) {
                return None;
            }
            let (lo, hi) = table.split_at(table.len() / 2);
            let e = [build(lo, raw, memo), build(hi, raw, memo)];
            Some(*memo.entry(e).or_insert_with(|| {
                raw.push(e);
                (raw.len() - 1) as u32
            }))
        }
        let mut raw = vec![[Some(0), Some(0)]];
        match build(c.table(), &mut raw, &mut HashMap::new()) {
            Some(init) => Self::from_raw(&raw, init),
            None => Self::empty(),
        }
    }

    /// The set of theories satisfying `s`, built by partial evaluation atom by atom.
    pub fn from_sentence(s: &Sentence) -> Self {
        let mut raw: Vec<Edges> = vec![[Some(0), Some(0)]];
        let mut ids: HashMap<(u32, Sentence), u32> = HashMap::new();
        let mut work: Vec<(u32, u32, Sentence)> = Vec::new();
        let mut state_of = |level: u32, s: Sentence, raw: &mut Vec<Edges>, work: &mut Vec<(u32, u32, Sentence)>| match s
        {
            Sentence::True => Some(0),
            Sentence::False => None,
            s => {
                let key = (level, s);
                if let Some(&id) = ids.get(&key) {
                    return Some(id);
                }
                let id = raw.len() as u32;
                raw.push([None; 2]);
                work.push((id, level, key.1.clone()));
                ids.insert(key, id);
                Some(id)
            }
        };
        let Some(init) = state_of(0, s.folded(), &mut raw, &mut work) else {
            return Self::empty();
        };
        while let Some((id, level, residual)) = work.pop() {
            for b in [false, true] {
                let next = residual.assign(level, b);
                raw[id as usize][usize::from(b)] = state_of(level + 1, next, &mut raw, &mut work);
            }
        }
        Self::from_raw(&raw, init)
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, q: u32, bit: bool) -> Option<u32> {
        self.edges[q as usize][usize::from(bit)]
    }

    pub fn out_degree(&self, q: u32) -> usize {
        self.edges[q as usize].iter().flatten().count()
    }

    /// All edges as `(source, bit, target)` triples in state order.
    pub fn transitions(&self) -> Vec<(usize, bool, usize)> {
        let mut out = Vec::new();
        for (q, e) in self.edges.iter().enumerate() {
            for b in [false, true] {
                if let Some(t) = e[usize::from(b)] {
                    out.push((q, b, t as usize));
                }
            }
        }
        out
    }

    pub fn run_from(&self, mut q: u32, bits: &[bool]) -> Option<u32> {
        for &b in bits {
            q = self.edge(q, b)?;
        }
        Some(q)
    }

    /// The state reached after reading `bits`, if the cylinder meets the set.
    pub fn run(&self, bits: &[bool]) -> Option<u32> {
        if self.is_empty() {
            return None;
        }
        self.run_from(0, bits)
    }

    /// The automaton started at `q`: the set of tails after any word leading to `q`.
    pub fn residual(&self, q: u32) -> Self {
        Self::from_raw(&self.edges, q)
    }

    pub fn accepts(&self, t: &Theory) -> bool {
        let Some(mut q) = self.run(t.prefix()) else {
            return false;
        };
        let mut seen = vec![false; self.edges.len()];
        while !seen[q as usize] {
            seen[q as usize] = true;
            match self.run_from(q, t.period()) {
                Some(next) => q = next,
                None => return false,
            }
        }
        true
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.is_empty() || other.is_empty() {
            return Self::empty();
        }
        let mut ids: HashMap<(u32, u32), u32> = HashMap::from([((0, 0), 0)]);
        let mut pairs = vec![(0u32, 0u32)];
        let mut raw: Vec<Edges> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            i += 1;
            let mut e = [None; 2];
            for bit in [false, true] {
                if let (Some(x), Some(y)) = (self.edge(a, bit), other.edge(b, bit)) {
                    let id = *ids.entry((x, y)).or_insert_with(|| {
                        pairs.push((x, y));
                        (pairs.len() - 1) as u32
                    });
                    e[usize::from(bit)] = Some(id);
                }
            }
            raw.push(e);
        }
        Self::from_raw(&raw, 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        type Pair = (Option<u32>, Option<u32>);
        let start: Pair = (Some(0), Some(0));
        let mut ids: HashMap<Pair, u32> = HashMap::from([(start, 0)]);
        let mut pairs = vec![start];
        let mut raw: Vec<Edges> = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (a, b) = pairs[i];
            i += 1;
            let mut e = [None; 2];
            for bit in [false, true] {
                let next = (a.and_then(|q| self.edge(q, bit)), b.and_then(|q| other.edge(q, bit)));
                if next == (None, None) {
                    continue;
                }
                let id = *ids.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    (pairs.len() - 1) as u32
                });
                e[usize::from(bit)] = Some(id);
            }
            raw.push(e);
        }
        Self::from_raw(&raw, 0)
    }

    /// Inclusion by searching the product for an edge `self` takes and `other` lacks.
    pub fn is_subset(&self, other: &Self) -> bool {
        if self.is_empty() {
            return true;
        }
        if other.is_empty() {
            return false;
        }
        let mut seen = std::collections::HashSet::from([(0u32, 0u32)]);
        let mut stack = vec![(0u32, 0u32)];
        while let Some((a, b)) = stack.pop() {
            for bit in [false, true] {
                match (self.edge(a, bit), other.edge(b, bit)) {
                    (Some(_), None) => return false,
                    (Some(x), Some(y)) if seen.insert((x, y)) => stack.push((x, y)),
                    _ => {}
                }
            }
        }
        true
    }

    fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut preds = vec![Vec::new(); self.edges.len()];
        for (q, e) in self.edges.iter().enumerate() {
            for t in e.iter().flatten() {
                preds[*t as usize].push(q as u32);
            }
        }
        preds
    }

    /// States from which some state in `targets` is reachable.
    fn co_reachable(&self, targets: impl Fn(u32) -> bool) -> Vec<bool> {
        let preds = self.predecessors();
        let mut mark = vec![false; self.edges.len()];
        let mut stack: Vec<u32> = (0..self.edges.len() as u32).filter(|&q| targets(q)).collect();
        for &q in &stack {
            mark[q as usize] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &preds[q as usize] {
                if !mark[p as usize] {
                    mark[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        mark
    }

    /// States admitting exactly one infinite run.
    pub fn singleton_states(&self) -> Vec<bool> {
        self.co_reachable(|q| self.out_degree(q) == 2).into_iter().map(|b| !b).collect()
    }

    fn keep_states(&self, keep: &[bool]) -> Self {
        if self.is_empty() || !keep[0] {
            return Self::empty();
        }
        let raw: Vec<Edges> = self.edges.iter().map(|e| e.map(|t| t.filter(|t| keep[*t as usize]))).collect();
        Self::from_raw(&raw, 0)
    }

    /// The Cantor–Bendixson derivative: the set minus its isolated points.
    pub fn derivative(&self) -> Self {
        let singleton = self.singleton_states();
        self.keep_states(&singleton.iter().map(|s| !s).collect::<Vec<_>>())
    }

    /// The closure of the set of isolated points.
    pub fn isolated_closure(&self) -> Self {
        let singleton = self.singleton_states();
        self.keep_states(&self.co_reachable(|q| singleton[q as usize]))
    }

    pub fn is_finite(&self) -> bool {
        self.derivative().is_empty()
    }

    /// Follows edge 0 whenever present until a state repeats.
    fn greedy_lasso(&self, mut q: u32, mut bits: Vec<bool>) -> Theory {
        let mut seen: HashMap<u32, usize> = HashMap::new();
        loop {
            if let Some(&start) = seen.get(&q) {
                let period = bits.split_off(start);
                return Theory::canonical(bits, period);
            }
            seen.insert(q, bits.len());
            let b = self.edge(q, false).is_none();
            bits.push(b);
            q = self.edge(q, b).expect("trim automaton has a live edge");
        }
    }

    /// The lexicographically least accepted sequence.
    pub fn least_point(&self) -> Option<Theory> {
        (!self.is_empty()).then(|| self.greedy_lasso(0, Vec::new()))
    }

    /// The lexicographically least sequence in `[u]`, if any.
    pub fn least_point_extending(&self, u: &Word) -> Option<Theory> {
        let q = self.run(u.bits())?;
        Some(self.greedy_lasso(q, u.bits().to_vec()))
    }

    /// Every accepted point in increasing order, or `None` if the set is infinite.
    pub fn points(&self) -> Option<Vec<Theory>> {
        if self.is_empty() {
            return Some(Vec::new());
        }
        if !self.is_finite() {
            return None;
        }
        let singleton = self.singleton_states();
        let mut out = Vec::new();
        let mut stack = vec![(0u32, Vec::new())];
        while let Some((q, bits)) = stack.pop() {
            if singleton[q as usize] {
                out.push(self.greedy_lasso(q, bits));
                continue;
            }
            for b in [true, false] {
                if let Some(t) = self.edge(q, b) {
                    let mut next = bits.clone();
                    next.push(b);
                    stack.push((t, next));
                }
            }
        }
        out.sort();
        Some(out)
    }

    /// The shortest prefix `u` of `t` with `[u]` meeting the set in `{t}` alone.
    pub fn isolating_prefix(&self, t: &Theory) -> Option<Word> {
        if !self.accepts(t) {
            return None;
        }
        let singleton = self.singleton_states();
        let bound = t.prefix().len() + t.period().len() * (self.edges.len() + 1);
        let mut q = 0u32;
        for k in 0..=bound {
            if singleton[q as usize] {
                return Some(t.take(k));
            }
            q = self.edge(q, t.bit(k))?;
        }
        None
    }

    /// The set minus the cylinder `[u]`.
    pub fn remove_cylinder(&self, u: &Word) -> Self {
        if u.is_empty() {
            return Self::empty();
        }
        let n = u.len() as u32;
        let mut raw: Vec<Edges> = u
            .bits()
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let mut e = [None; 2];
                if i as u32 + 1 < n {
                    e[usize::from(b)] = Some(i as u32 + 1);
                }
                e[usize::from(!b)] = Some(n);
                e
            })
            .collect();
        raw.push([Some(n), Some(n)]);
        self.intersect(&Self::from_raw(&raw, 0))
    }

    /// For clopen sets, the least depth determining membership; `None` if not clopen.
    pub fn clopen_depth(&self) -> Option<u32> {
        if self.is_empty() {
            return Some(0);
        }
        let universal = (0..self.edges.len() as u32).find(|&q| self.edges[q as usize] == [Some(q), Some(q)]);
        // Longest path to the universal state; any other cycle means not clopen.
        const OPEN: u32 = u32::MAX;
        let mut longest: Vec<Option<u32>> = vec![None; self.edges.len()];
        fn visit(a: &SafetyAutomaton, q: u32, u: Option<u32>, longest: &mut Vec<Option<u32>>) -> Option<u32> {
            if Some(q) == u {
                return Some(0);
            }
            match longest[q as usize] {
                Some(OPEN) => return None,
                Some(d) => return Some(d),
                None => {}
            }
            longest[q as usize] = Some(OPEN);
            let mut best = 0;
            for t in a.edges[q as usize].iter().flatten() {
                best = best.max(visit(a, *t, u, longest)? + 1);
            }
            longest[q as usize] = Some(best);
            Some(best)
        }
        visit(self, 0, universal, &mut longest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Theory {
        s.parse().unwrap()
    }

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn comb() -> SafetyAutomaton {
        SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap()
    }

    #[test]
    fn rejects_malformed_tables() {
        assert!(SafetyAutomaton::new(1, 1, &[]).is_err());
        assert!(SafetyAutomaton::new(1, 0, &[(0, true, 3)]).is_err());
        assert!(SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, true, 1)]).is_err());
        assert!(SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, true, 0)]).is_ok());
    }

    #[test]
    fn trims_dead_and_unreachable_states() {
        let a = SafetyAutomaton::new(4, 0, &[(0, true, 0), (0, false, 1), (2, false, 2), (3, true, 0)]).unwrap();
        assert_eq!(a, SafetyAutomaton::point(&t("(1)")));
        assert!(SafetyAutomaton::new(2, 0, &[(0, true, 1)]).unwrap().is_empty());
    }

    #[test]
    fn minimization_is_canonical() {
        let a = SafetyAutomaton::new(2, 0, &[(0, true, 1), (0, false, 1), (1, true, 0), (1, false, 0)]).unwrap();
        assert_eq!(a, SafetyAutomaton::universal());
        let b = SafetyAutomaton::new(3, 2, &[(2, true, 2), (2, false, 0), (0, false, 0)]).unwrap();
        assert_eq!(b, comb());
    }

    #[test]
    fn membership_follows_period_loops() {
        let a = comb();
        assert!(a.accepts(&t("(1)")));
        assert!(a.accepts(&t("11(0)")));
        assert!(a.accepts(&t("(0)")));
        assert!(!a.accepts(&t("(01)")));
        assert!(!a.accepts(&t("01(0)")));
    }

    #[test]
    fn singleton_states_detect_isolation() {
        let a = comb();
        assert_eq!(a.singleton_states(), vec![false, true]);
        assert_eq!(a.derivative(), SafetyAutomaton::point(&t("(1)")));
        assert_eq!(a.isolated_closure(), a);
        assert_eq!(a.isolating_prefix(&t("10(0)")), Some(w("10")));
        assert_eq!(a.isolating_prefix(&t("(1)")), None);
        assert!(SafetyAutomaton::universal().derivative() == SafetyAutomaton::universal());
    }

    #[test]
    fn set_algebra() {
        let a = comb();
        let zero = SafetyAutomaton::cylinder(&w("0"));
        assert_eq!(a.intersect(&zero), SafetyAutomaton::point(&t("(0)")));
        assert!(a.intersect(&zero).is_subset(&a));
        assert!(!a.is_subset(&zero));
        assert_eq!(a.union(&zero).union(&SafetyAutomaton::cylinder(&w("1"))), SafetyAutomaton::universal());
        assert_eq!(a.remove_cylinder(&w("0")).remove_cylinder(&w("10")).least_point(), Some(t("11(0)")));
    }

    #[test]
    fn enumerates_finite_sets() {
        let pts = [t("(0)"), t("1(0)"), t("(10)"), t("0(1)")];
        let a = SafetyAutomaton::from_points(&pts);
        let mut expected = pts.to_vec();
        expected.sort();
        assert_eq!(a.points(), Some(expected));
        assert_eq!(comb().points(), None);
        assert_eq!(a.least_point(), Some(t("(0)")));
    }

    #[test]
    fn clopen_round_trip() {
        let s: Sentence = "Q0 & !Q2 | Q1".parse().unwrap();
        let a = SafetyAutomaton::from_sentence(&s);
        assert_eq!(a.clopen_depth(), Some(3));
        let c = Clopen::from_automaton(&a).unwrap();
        assert_eq!(SafetyAutomaton::from_clopen(&c), a);
        assert_eq!(comb().clopen_depth(), None);
    }
}
