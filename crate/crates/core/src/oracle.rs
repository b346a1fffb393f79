//! Brute-force reference semantics used to cross-check the automaton algorithms.
//!
//! The oracle never trims or minimizes. It works on the raw edge table of an `N`-state
//! generator and decides everything by counting words: a cylinder meets the closed set iff
//! some path of length `N` leaves it, a cylinder meets a closed set `Y` in exactly one point
//! iff exactly one `Y`-word of length `N` extends it, and `[u]` meets `Y'` iff `[u] ∩ Y` is
//! infinite, i.e. some `Y`-word `N` bits past `u` is not a singleton. Infinitude therefore
//! comes from the generator, never from counting sampled points.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::expr::FamilyExpr;
use crate::family::Family;
use crate::rank::RankResult;
use crate::sentence::Sentence;
use crate::theory::Theory;
use crate::word::Word;

pub const DEFAULT_HORIZON: usize = 16;

type Edges = [Option<u32>; 2];

/// An untrimmed deterministic edge table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RawAutomaton {
    edges: Vec<Edges>,
    initial: u32,
}

impl RawAutomaton {
    pub fn new(states: usize, initial: usize, transitions: &[(usize, bool, usize)]) -> Result<Self> {
        if states == 0 {
            return Ok(RawAutomaton { edges: Vec::new(), initial: 0 });
        }
        if initial >= states {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        let mut edges = vec![[None; 2]; states];
        for &(s, b, t) in transitions {
            if s >= states || t >= states {
                return Err(Error::InvalidAutomaton(format!("edge {s} -> {t} out of range")));
            }
            let slot = &mut edges[s][usize::from(b)];
            if slot.is_some_and(|old| old as usize != t) {
                return Err(Error::InvalidAutomaton(format!("state {s} is nondeterministic")));
            }
            *slot = Some(t as u32);
        }
        Ok(RawAutomaton { edges, initial: initial as u32 })
    }

    pub(crate) fn from_edges(edges: Vec<Edges>, initial: u32) -> Self {
        RawAutomaton { edges, initial }
    }

    pub fn num_states(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edges] {
        &self.edges
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn transitions(&self) -> Vec<(usize, bool, usize)> {
        let mut out = Vec::new();
        for (s, e) in self.edges.iter().enumerate() {
            for b in [false, true] {
                if let Some(t) = e[usize::from(b)] {
                    out.push((s, b, t as usize));
                }
            }
        }
        out
    }

    fn step(&self, q: u32, b: bool) -> Option<u32> {
        self.edges[q as usize][usize::from(b)]
    }

    fn start(&self) -> Option<u32> {
        (!self.edges.is_empty()).then_some(self.initial)
    }
}

/// Cantor–Bendixson levels as tables over raw states: `levels[k][q]` says whether the tails
/// read from `q` meet the `k`-th derivative.
#[derive(Clone, Debug)]
struct Analysis {
    n: usize,
    levels: Vec<Vec<bool>>,
    /// The last level is its own derivative.
    perfect: bool,
}

impl Analysis {
    fn new(raw: &RawAutomaton) -> Self {
        let n = raw.num_states();
        // Paths of length n guarantee an infinite run by pigeonhole.
        let mut can = vec![true; n];
        for _ in 0..n {
            can = (0..n as u32)
                .map(|q| [false, true].iter().any(|&b| raw.step(q, b).is_some_and(|t| can[t as usize])))
                .collect();
        }
        let mut levels = vec![can];
        let mut perfect = false;
        let init = raw.initial as usize;
        while n > 0 && levels.last().expect("nonempty")[init] {
            let next = Self::next_level(raw, levels.last().expect("nonempty"));
            if next == *levels.last().expect("nonempty") {
                perfect = true;
                break;
            }
            levels.push(next);
        }
        Analysis { n, levels, perfect }
    }

    /// Number of `level`-words of length `n` from each state.
    fn counts(raw: &RawAutomaton, level: &[bool], len: usize) -> Vec<u128> {
        let n = raw.num_states();
        let mut cnt: Vec<u128> = level.iter().map(|&b| u128::from(b)).collect();
        for _ in 0..len {
            cnt = (0..n as u32)
                .map(|q| {
                    if !level[q as usize] {
                        return 0;
                    }
                    [false, true]
                        .iter()
                        .filter_map(|&b| raw.step(q, b))
                        .map(|t| cnt[t as usize])
                        .fold(0u128, u128::saturating_add)
                })
                .collect();
        }
        cnt
    }

    fn next_level(raw: &RawAutomaton, level: &[bool]) -> Vec<bool> {
        let n = raw.num_states();
        let cnt = Self::counts(raw, level, n);
        (0..n as u32)
            .map(|q| {
                if !level[q as usize] {
                    return false;
                }
                let mut frontier: HashSet<u32> = HashSet::from([q]);
                for _ in 0..n {
                    frontier = frontier
                        .iter()
                        .flat_map(|&s| [false, true].into_iter().filter_map(move |b| raw.step(s, b)))
                        .filter(|t| level[*t as usize])
                        .collect();
                }
                frontier.iter().any(|&s| cnt[s as usize] != 1)
            })
            .collect()
    }

    fn rank(&self, raw: &RawAutomaton) -> RankResult {
        if self.n == 0 || !self.levels[0][raw.initial as usize] {
            return RankResult::Empty;
        }
        if self.perfect {
            return RankResult::Infinite;
        }
        let r = self.levels.len() - 2;
        let degree = Self::counts(raw, &self.levels[r], self.n)[raw.initial as usize];
        RankResult::Finite { rank: r as u32, degree: u64::try_from(degree).expect("degree fits") }
    }

    /// Whether `t` lies in the closed set described by `level`.
    fn contains(&self, raw: &RawAutomaton, level: usize, t: &Theory) -> bool {
        let Some(mut q) = raw.start() else { return false };
        let table = &self.levels[level.min(self.levels.len() - 1)];
        if level >= self.levels.len() && !self.perfect {
            return false;
        }
        let bound = t.prefix().len() + (self.n + 1) * t.period().len();
        for i in 0..=bound {
            if !table[q as usize] {
                return false;
            }
            match raw.step(q, t.bit(i)) {
                Some(next) => q = next,
                None => return false,
            }
        }
        true
    }
}

/// Position of a finite set of theories along a word.
type Tracker = Vec<Option<usize>>;

fn advance(points: &[Theory], tracker: &Tracker, b: bool) -> Tracker {
    points
        .iter()
        .zip(tracker)
        .map(|(t, pos)| {
            let p = (*pos)?;
            if t.bit(p) != b {
                return None;
            }
            let end = t.prefix().len() + t.period().len();
            Some(if p + 1 == end { t.prefix().len() } else { p + 1 })
        })
        .collect()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Generator {
    /// An explicitly listed finite family.
    Finite(BTreeSet<Theory>),
    /// A closed set given by an automaton, minus finitely many points.
    Automaton { raw: RawAutomaton, excluded: BTreeSet<Theory> },
    /// A bare sample; infinitude cannot be decided from it.
    Unbacked(BTreeSet<Theory>),
}

/// A family known through its generator, analysed on prefixes up to a horizon.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointCloud {
    generator: Generator,
    horizon: usize,
}

impl PointCloud {
    pub fn finite(points: impl IntoIterator<Item = Theory>) -> Self {
        PointCloud { generator: Generator::Finite(points.into_iter().collect()), horizon: DEFAULT_HORIZON }
    }

    pub fn unbacked(points: impl IntoIterator<Item = Theory>) -> Self {
        PointCloud { generator: Generator::Unbacked(points.into_iter().collect()), horizon: DEFAULT_HORIZON }
    }

    pub fn automaton(raw: RawAutomaton, excluded: impl IntoIterator<Item = Theory>) -> Result<Self> {
        let excluded: BTreeSet<Theory> = excluded.into_iter().collect();
        let cloud = PointCloud {
            generator: Generator::Automaton { raw: raw.clone(), excluded: BTreeSet::new() },
            horizon: DEFAULT_HORIZON,
        };
        for t in &excluded {
            if !cloud.member(t)? {
                return Err(Error::ExcludedNotInCarrier(t.clone()));
            }
        }
        Ok(PointCloud { generator: Generator::Automaton { raw, excluded }, horizon: DEFAULT_HORIZON })
    }

    /// Reads a family's carrier transitions and exclusions as generator data.
    pub fn from_family(f: &Family) -> Self {
        if let Some(points) = f.explicit_points() {
            return Self::finite(points.iter().cloned());
        }
        let carrier = f.carrier();
        let raw = RawAutomaton::new(carrier.num_states(), 0, &carrier.transitions()).expect("valid automaton");
        PointCloud { generator: Generator::Automaton { raw, excluded: f.excluded() }, horizon: DEFAULT_HORIZON }
    }

    /// Builds the generator of a finite recipe from the derivatives of the expression itself.
    pub fn from_expr(e: &FamilyExpr) -> Result<Self> {
        let raw = expr_automaton(e)?;
        Ok(PointCloud { generator: Generator::Automaton { raw, excluded: BTreeSet::new() }, horizon: DEFAULT_HORIZON })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Accepts work needing prefixes of length `required`, doubling the horizon once.
    fn budget(&self, required: usize, what: &str) -> Result<()> {
        if required <= self.horizon || required <= 2 * self.horizon {
            Ok(())
        } else {
            Err(Error::Inconclusive(format!(
                "{what} needs prefixes of length {required}, beyond twice the horizon {}",
                self.horizon
            )))
        }
    }

    fn analysis(&self, raw: &RawAutomaton) -> Result<Analysis> {
        self.budget(2 * raw.num_states(), "level analysis")?;
        Ok(Analysis::new(raw))
    }

    fn unbacked_error() -> Error {
        Error::Unsupported("point cloud has no generator; infinitude is undecidable from a sample".into())
    }

    pub fn member(&self, t: &Theory) -> Result<bool> {
        match &self.generator {
            Generator::Finite(p) => Ok(p.contains(t)),
            Generator::Unbacked(_) => Err(Self::unbacked_error()),
            Generator::Automaton { raw, excluded } => {
                let a = self.analysis(raw)?;
                self.budget(t.prefix().len() + (a.n + 1) * t.period().len(), "membership")?;
                Ok(!excluded.contains(t) && a.contains(raw, 0, t))
            }
        }
    }

    /// Points of the cloud: the listed ones, or generator lassos `u·v^ω` with `|u|`
    /// bounded by the horizon.
    pub fn points(&self, limit: usize) -> Vec<Theory> {
        match &self.generator {
            Generator::Finite(p) | Generator::Unbacked(p) => p.iter().take(limit).cloned().collect(),
            Generator::Automaton { raw, excluded } => {
                let Some(init) = raw.start() else { return Vec::new() };
                let a = Analysis::new(raw);
                let alive = &a.levels[0];
                let mut out = BTreeSet::new();
                let mut queue = VecDeque::from([(init, Vec::new())]);
                while let Some((q, bits)) = queue.pop_front() {
                    if out.len() >= limit || !alive[q as usize] {
                        continue;
                    }
                    for first in [false, true] {
                        if let Some(t) = lasso(raw, alive, q, bits.clone(), first) {
                            if !excluded.contains(&t) {
                                out.insert(t);
                            }
                        }
                    }
                    if bits.len() < self.horizon {
                        for b in [false, true] {
                            if let Some(t) = raw.step(q, b) {
                                let mut next = bits.clone();
                                next.push(b);
                                queue.push_back((t, next));
                            }
                        }
                    }
                }
                out.into_iter().take(limit).collect()
            }
        }
    }
}

/// The lasso leaving `q` by `first`, then always by the smallest live bit.
fn lasso(raw: &RawAutomaton, alive: &[bool], q: u32, mut bits: Vec<bool>, first: bool) -> Option<Theory> {
    let mut cur = raw.step(q, first).filter(|t| alive[*t as usize])?;
    bits.push(first);
    let mut seen: HashMap<u32, usize> = HashMap::new();
    loop {
        if let Some(&start) = seen.get(&cur) {
            let period = bits.split_off(start);
            return Some(Theory::new(bits, period).expect("nonempty period"));
        }
        seen.insert(cur, bits.len());
        let b = !raw.step(cur, false).is_some_and(|t| alive[t as usize]);
        bits.push(b);
        cur = raw.step(cur, b).expect("live state has a live edge");
    }
}

/// E-closure: excluded points that are accumulation points come back.
pub fn oracle_closure(pc: &PointCloud) -> Result<PointCloud> {
    match &pc.generator {
        Generator::Finite(_) => Ok(pc.clone()),
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Automaton { raw, excluded } => {
            let a = pc.analysis(raw)?;
            let kept = excluded
                .iter()
                .filter(|t| a.levels.len() < 2 && !a.perfect || !a.contains(raw, 1, t))
                .cloned()
                .collect();
            Ok(PointCloud { generator: Generator::Automaton { raw: raw.clone(), excluded: kept }, horizon: pc.horizon })
        }
    }
}

/// The derivative of the closure, as a generator restricted to level-one states.
pub fn oracle_derivative(pc: &PointCloud) -> Result<PointCloud> {
    match &pc.generator {
        Generator::Finite(_) => Ok(PointCloud::finite([])),
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Automaton { raw, .. } => {
            let a = pc.analysis(raw)?;
            let level = a.levels.get(1).or(a.perfect.then(|| &a.levels[0]));
            let edges = match level {
                Some(keep) if keep[raw.initial as usize] => {
                    raw.edges.iter().map(|e| e.map(|t| t.filter(|t| keep[*t as usize]))).collect()
                }
                _ => Vec::new(),
            };
            Ok(PointCloud {
                generator: Generator::Automaton {
                    raw: RawAutomaton::from_edges(edges, raw.initial),
                    excluded: BTreeSet::new(),
                },
                horizon: pc.horizon,
            })
        }
    }
}

/// Rank and degree by literal iteration of isolated-point removal on the level tables.
pub fn oracle_rank(pc: &PointCloud) -> Result<RankResult> {
    match &pc.generator {
        Generator::Finite(p) if p.is_empty() => Ok(RankResult::Empty),
        Generator::Finite(p) => Ok(RankResult::Finite { rank: 0, degree: p.len() as u64 }),
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Automaton { raw, .. } => {
            let closure = oracle_closure(pc)?;
            let Generator::Automaton { excluded, .. } = &closure.generator else { unreachable!() };
            let a = pc.analysis(raw)?;
            Ok(match a.rank(raw) {
                // Removing isolated points only changes a finite family.
                RankResult::Finite { rank: 0, degree } => {
                    let left = degree - excluded.len() as u64;
                    if left == 0 {
                        RankResult::Empty
                    } else {
                        RankResult::Finite { rank: 0, degree: left }
                    }
                }
                r => r,
            })
        }
    }
}

/// Whether `[u]` meets `X \ E`, given the state after `u` and the points of `E` in `[u]`.
fn meets(raw: &RawAutomaton, a: &Analysis, counts: &[u128], q: Option<u32>, inside: usize) -> bool {
    let _ = raw;
    let Some(q) = q else { return false };
    if !a.levels[0][q as usize] {
        return false;
    }
    let infinite = a.levels.get(1).map_or(a.perfect, |l| l[q as usize]);
    infinite || counts[q as usize] > inside as u128
}

/// `φ ⊢ ψ` over the cloud: no theory satisfies `φ ∧ ¬ψ`.
pub fn oracle_forces(pc: &PointCloud, phi: &Sentence, psi: &Sentence) -> Result<bool> {
    let bad = Sentence::and(phi.clone(), Sentence::not(psi.clone()));
    match &pc.generator {
        Generator::Finite(p) | Generator::Unbacked(p) => Ok(!p.iter().any(|t| bad.eval(t))),
        Generator::Automaton { raw, excluded } => {
            let a = pc.analysis(raw)?;
            let d = bad.depth() as usize;
            pc.budget(d, "forcing")?;
            let counts = Analysis::counts(raw, &a.levels[0], a.n);
            let points: Vec<Theory> = excluded.iter().cloned().collect();
            // Depth-first over words of length d that meet the family.
            let mut stack = vec![(raw.start(), Vec::<bool>::new(), vec![Some(0usize); points.len()])];
            while let Some((q, bits, tracker)) = stack.pop() {
                let inside = tracker.iter().flatten().count();
                if !meets(raw, &a, &counts, q, inside) {
                    continue;
                }
                if bits.len() == d {
                    if bad.eval_with(&|i| bits[i as usize]) {
                        return Ok(false);
                    }
                    continue;
                }
                let q = q.expect("met");
                for b in [false, true] {
                    let mut next = bits.clone();
                    next.push(b);
                    stack.push((raw.step(q, b), next, advance(&points, &tracker, b)));
                }
            }
            Ok(true)
        }
    }
}

/// Whether the cloud's family and `f` denote the same set of theories.
pub fn same_family(pc: &PointCloud, f: &Family) -> Result<bool> {
    match &pc.generator {
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Finite(p) => Ok(f.cardinality() == Some(p.len()) && p.iter().all(|t| f.member(t))),
        Generator::Automaton { raw, excluded } => {
            let a = pc.analysis(raw)?;
            for t in excluded {
                if f.member(t) {
                    return Ok(false);
                }
            }
            for t in f.excluded() {
                if pc.member(&t)? {
                    return Ok(false);
                }
            }
            // Closures agree: walk words, comparing "the cylinder meets the family".
            let counts = Analysis::counts(raw, &a.levels[0], a.n);
            let carrier = f.carrier();
            let points: Vec<Theory> = excluded.iter().cloned().collect();
            let main_start = (!carrier.is_empty()).then_some(0u32);
            let start = (raw.start(), main_start, vec![Some(0usize); points.len()]);
            let mut seen = HashSet::from([start.clone()]);
            let mut stack = vec![start];
            while let Some((q, m, tracker)) = stack.pop() {
                let inside = tracker.iter().flatten().count();
                let ours = meets(raw, &a, &counts, q, inside);
                if ours != m.is_some() {
                    return Ok(false);
                }
                if !ours {
                    continue;
                }
                let (q, m) = (q.expect("met"), m.expect("met"));
                for b in [false, true] {
                    let next = (raw.step(q, b), carrier.edge(m, b), advance(&points, &tracker, b));
                    if seen.insert(next.clone()) {
                        stack.push(next);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// Point rank by level membership; `None` stands for the perfect kernel.
pub fn oracle_point_rank(pc: &PointCloud, t: &Theory) -> Result<Option<u32>> {
    match &pc.generator {
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Finite(p) if p.contains(t) => Ok(Some(0)),
        Generator::Finite(_) => Err(Error::NotInClosure(t.clone())),
        Generator::Automaton { raw, .. } => {
            let a = pc.analysis(raw)?;
            if !a.contains(raw, 0, t) {
                return Err(Error::NotInClosure(t.clone()));
            }
            let deepest = (0..a.levels.len()).rev().find(|&k| a.contains(raw, k, t)).expect("level 0");
            if a.perfect && deepest == a.levels.len() - 1 {
                return Ok(None);
            }
            Ok(Some(deepest as u32))
        }
    }
}

/// Number of theories in `𝒯_φ`, or `None` when it is infinite.
pub fn oracle_cardinality(pc: &PointCloud, phi: &Sentence) -> Result<Option<u128>> {
    match &pc.generator {
        Generator::Finite(p) => Ok(Some(p.iter().filter(|t| phi.eval(t)).count() as u128)),
        Generator::Unbacked(_) => Err(PointCloud::unbacked_error()),
        Generator::Automaton { raw, excluded } => {
            let a = pc.analysis(raw)?;
            let d = phi.depth() as usize;
            pc.budget(d, "counting")?;
            let counts = Analysis::counts(raw, &a.levels[0], a.n);
            let points: Vec<Theory> = excluded.iter().cloned().collect();
            let mut total: u128 = 0;
            let mut stack = vec![(raw.start(), Vec::<bool>::new(), vec![Some(0usize); points.len()])];
            while let Some((q, bits, tracker)) = stack.pop() {
                let inside = tracker.iter().flatten().count();
                if !meets(raw, &a, &counts, q, inside) {
                    continue;
                }
                let q = q.expect("met");
                if bits.len() == d {
                    if phi.eval_with(&|i| bits[i as usize]) {
                        if a.levels.get(1).map_or(a.perfect, |l| l[q as usize]) {
                            return Ok(None);
                        }
                        total += counts[q as usize] - inside as u128;
                    }
                    continue;
                }
                for b in [false, true] {
                    let mut next = bits.clone();
                    next.push(b);
                    stack.push((raw.step(q, b), next, advance(&points, &tracker, b)));
                }
            }
            Ok(Some(total))
        }
    }
}

/// The lexicographically least theory of the closed set, by greedy descent.
pub fn oracle_least_point(raw: &RawAutomaton) -> Option<Theory> {
    let a = Analysis::new(raw);
    let init = raw.start().filter(|q| a.levels[0][*q as usize])?;
    let alive = &a.levels[0];
    let mut seen: HashMap<u32, usize> = HashMap::new();
    let mut bits = Vec::new();
    let mut q = init;
    loop {
        if let Some(&start) = seen.get(&q) {
            let period = bits.split_off(start);
            return Some(Theory::new(bits, period).expect("nonempty period"));
        }
        seen.insert(q, bits.len());
        let b = !raw.step(q, false).is_some_and(|t| alive[t as usize]);
        bits.push(b);
        q = raw.step(q, b).expect("live state has a live edge");
    }
}

/// Calls `visit` on every trim accessible edge table with exactly `n` states, once per
/// isomorphism class: states are numbered in order of first appearance when the slots
/// `(0,0), (0,1), (1,0), …` are read in turn.
pub fn for_each_trim_table(n: usize, visit: &mut dyn FnMut(&RawAutomaton)) {
    fn rec(n: usize, slot: usize, next: usize, edges: &mut Vec<Edges>, visit: &mut dyn FnMut(&RawAutomaton)) {
        if slot == 2 * n {
            if next == n && edges.iter().all(|e| e[0].is_some() || e[1].is_some()) {
                visit(&RawAutomaton::from_edges(edges.clone(), 0));
            }
            return;
        }
        let (s, b) = (slot / 2, slot % 2);
        if s >= next {
            return;
        }
        let mut choices: Vec<(Option<u32>, usize)> = vec![(None, next)];
        choices.extend((0..next).map(|t| (Some(t as u32), next)));
        if next < n {
            choices.push((Some(next as u32), next + 1));
        }
        for (target, after) in choices {
            edges[s][b] = target;
            rec(n, slot + 1, after, edges, visit);
        }
        edges[s][b] = None;
    }
    if n == 0 {
        return;
    }
    let mut edges = vec![[None; 2]; n];
    rec(n, 0, 1, &mut edges, visit);
}

/// Raw automaton whose states are the residuals of the expression.
fn expr_automaton(e: &FamilyExpr) -> Result<RawAutomaton> {
    type Residual = Vec<(Vec<bool>, FamilyExpr)>;
    fn expand(e: &FamilyExpr, b: bool, out: &mut Residual) -> Result<()> {
        match e {
            FamilyExpr::Point(t) => {
                if t.bit(0) == b {
                    let tail = if t.prefix().is_empty() {
                        let mut p = t.period().to_vec();
                        p.rotate_left(1);
                        Theory::new(Vec::new(), p)?
                    } else {
                        Theory::new(t.prefix()[1..].to_vec(), t.period().to_vec())?
                    };
                    out.push((Vec::new(), FamilyExpr::Point(tail)));
                }
            }
            FamilyExpr::PrefixedUnion(children) => {
                for (u, c) in children {
                    step_entry(u.bits(), c, b, out)?;
                }
            }
            FamilyExpr::LimitStack { body, bit } => {
                out.push((Vec::new(), if *bit == b { e.clone() } else { (**body).clone() }));
            }
            FamilyExpr::OmegaLimit { rank, .. } => return Err(Error::Transfinite(rank.to_string())),
        }
        Ok(())
    }
    fn step_entry(prefix: &[bool], c: &FamilyExpr, b: bool, out: &mut Residual) -> Result<()> {
        match prefix.split_first() {
            Some((&first, rest)) if first == b => out.push((rest.to_vec(), c.clone())),
            Some(_) => {}
            None => expand(c, b, out)?,
        }
        Ok(())
    }
    fn step(r: &Residual, b: bool) -> Result<Residual> {
        let mut out = Vec::new();
        for (p, c) in r {
            step_entry(p, c, b, &mut out)?;
        }
        let mut keyed: Vec<(String, (Vec<bool>, FamilyExpr))> =
            out.into_iter().map(|x| (format!("{}|{}", Word::from_bits(x.0.clone()), x.1), x)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Ok(keyed.into_iter().map(|(_, x)| x).collect())
    }
    let key = |r: &Residual| -> String {
        r.iter().map(|(p, c)| format!("{}|{}", Word::from_bits(p.clone()), c)).collect::<Vec<_>>().join(";")
    };
    let start: Residual = vec![(Vec::new(), e.clone())];
    let mut ids: HashMap<String, u32> = HashMap::from([(key(&start), 0)]);
    let mut states = vec![start];
    let mut edges: Vec<Edges> = Vec::new();
    let mut i = 0;
    while i < states.len() {
        let r = states[i].clone();
        i += 1;
        let mut e = [None; 2];
        for b in [false, true] {
            let next = step(&r, b)?;
            if next.is_empty() {
                continue;
            }
            let k = key(&next);
            let id = match ids.get(&k) {
                Some(&id) => id,
                None => {
                    let id = states.len() as u32;
                    ids.insert(k, id);
                    states.push(next);
                    id
                }
            };
            e[usize::from(b)] = Some(id);
        }
        edges.push(e);
    }
    Ok(RawAutomaton::from_edges(edges, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::SafetyAutomaton;

    fn t(s: &str) -> Theory {
        s.parse().unwrap()
    }

    fn comb_raw() -> RawAutomaton {
        RawAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap()
    }

    fn comb_expr() -> FamilyExpr {
        FamilyExpr::limit_stack(FamilyExpr::point(t("(0)")), true)
    }

    #[test]
    fn closure_readds_the_limit() {
        let teeth = PointCloud::automaton(comb_raw(), [t("(1)")]).unwrap();
        let closed = oracle_closure(&teeth).unwrap();
        assert!(closed.member(&t("(1)")).unwrap());
        let finite = PointCloud::finite([t("(0)"), t("1(0)")]);
        assert_eq!(oracle_closure(&finite).unwrap(), finite);
        assert!(oracle_closure(&PointCloud::unbacked([t("(0)")])).is_err());
        let two =
            FamilyExpr::prefixed_union(vec![("0".parse().unwrap(), comb_expr()), ("1".parse().unwrap(), comb_expr())])
                .unwrap();
        let cloud = PointCloud::from_expr(&two).unwrap();
        let raw = match cloud.generator() {
            Generator::Automaton { raw, .. } => raw.clone(),
            _ => unreachable!(),
        };
        let open = PointCloud::automaton(raw, [t("0(1)"), t("(1)")]).unwrap();
        let closed = oracle_closure(&open).unwrap();
        assert!(closed.member(&t("0(1)")).unwrap() && closed.member(&t("(1)")).unwrap());
    }

    #[test]
    fn ranks() {
        let comb = PointCloud::automaton(comb_raw(), []).unwrap();
        assert_eq!(oracle_rank(&comb).unwrap(), RankResult::Finite { rank: 1, degree: 1 });
        let three = PointCloud::finite([t("(0)"), t("(1)"), t("1(0)")]);
        assert_eq!(oracle_rank(&three).unwrap(), RankResult::Finite { rank: 0, degree: 3 });
        let tower = FamilyExpr::limit_stack(comb_expr(), true);
        assert_eq!(
            oracle_rank(&PointCloud::from_expr(&tower).unwrap()).unwrap(),
            RankResult::Finite { rank: 2, degree: 1 }
        );
        let full = PointCloud::automaton(RawAutomaton::new(1, 0, &[(0, false, 0), (0, true, 0)]).unwrap(), []).unwrap();
        assert_eq!(oracle_rank(&full).unwrap(), RankResult::Infinite);
        let teeth = PointCloud::automaton(comb_raw(), [t("10(0)"), t("(0)")]).unwrap();
        assert_eq!(oracle_rank(&teeth).unwrap(), RankResult::Finite { rank: 1, degree: 1 });
    }

    #[test]
    fn forcing() {
        let comb = PointCloud::automaton(comb_raw(), []).unwrap();
        let s = |x: &str| x.parse::<Sentence>().unwrap();
        assert!(oracle_forces(&comb, &s("Q1"), &s("Q0")).unwrap());
        assert!(oracle_forces(&comb, &s("Q4"), &s("Q4")).unwrap());
        let two = PointCloud::finite([t("(0)"), t("(1)")]);
        assert!(!oracle_forces(&two, &s("Q0"), &s("Q1 & !Q1")).unwrap());
        let minus = PointCloud::automaton(comb_raw(), [t("(0)")]).unwrap();
        assert!(oracle_forces(&minus, &s("!Q0"), &s("F")).unwrap());
        assert!(!oracle_forces(&comb, &s("!Q0"), &s("F")).unwrap());
        let pair = PointCloud::finite([t("(0)"), t("1(0)")]);
        assert!(!oracle_forces(&pair, &s("Q0"), &s("Q1")).unwrap());
    }

    #[test]
    fn compares_with_families() {
        let a1 = SafetyAutomaton::new(2, 0, &[(0, true, 0), (0, false, 1), (1, false, 1)]).unwrap();
        let f = Family::regular(a1.clone(), [t("(1)")]).unwrap();
        let pc = PointCloud::automaton(comb_raw(), [t("(1)")]).unwrap();
        assert!(same_family(&pc, &f).unwrap());
        assert!(!same_family(&pc, &Family::closed(a1.clone())).unwrap());
        let tooth = PointCloud::automaton(comb_raw(), [t("110(0)")]).unwrap();
        assert!(same_family(&tooth, &Family::regular(a1, [t("110(0)")]).unwrap()).unwrap());
        let d = oracle_derivative(&pc).unwrap();
        assert!(same_family(&d, &Family::explicit([t("(1)")])).unwrap());
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (1..=4)
            .map(|n| {
                let mut c = 0;
                for_each_trim_table(n, &mut |_| c += 1);
                c
            })
            .collect();
        assert_eq!(counts, [3, 40, 750, 18864]);
    }

    #[test]
    fn cardinalities() {
        let s = |x: &str| x.parse::<Sentence>().unwrap();
        let teeth = PointCloud::automaton(comb_raw(), [t("(1)")]).unwrap();
        assert_eq!(oracle_cardinality(&teeth, &s("Q0")).unwrap(), None);
        assert_eq!(oracle_cardinality(&teeth, &s("!Q1")).unwrap(), Some(2));
        assert_eq!(oracle_cardinality(&teeth, &s("!Q0 & Q1")).unwrap(), Some(0));
        let minus = PointCloud::automaton(comb_raw(), [t("(0)")]).unwrap();
        assert_eq!(oracle_cardinality(&minus, &s("!Q1")).unwrap(), Some(1));
        assert_eq!(oracle_least_point(&comb_raw()), Some(t("(0)")));
    }

    #[test]
    fn horizon_limits() {
        let big: Vec<(usize, bool, usize)> = (0..40).map(|i| (i, true, (i + 1) % 40)).collect();
        let pc = PointCloud::automaton(RawAutomaton::new(40, 0, &big).unwrap(), []).unwrap();
        assert!(matches!(oracle_rank(&pc), Err(Error::Inconclusive(_))));
        assert_eq!(oracle_rank(&pc.with_horizon(40)).unwrap(), RankResult::Finite { rank: 0, degree: 1 });
    }

    #[test]
    fn sample_points() {
        let pc = PointCloud::automaton(comb_raw(), []).unwrap();
        let pts = pc.points(5);
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().all(|p| pc.member(p).unwrap()));
    }
}
