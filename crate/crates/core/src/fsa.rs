//! Monoidal finite-state transducers, their unweighted input projections and
//! power-set determinization.
//!
//! A [`Transducer`] carries transitions `(source, input, output, target)` where
//! the input is a symbol of an [`InputAlphabet`] or ε (`None`) and the output
//! is a [`MonoidValue`]. Dropping outputs gives an [`Automaton`], which is
//! determinized into a [`Dfa`] whose states are subsets of transducer states.
//!
//! Determinization only materializes accessible subsets and keeps δ partial:
//! an undefined move means the input has left the domain, there is no empty
//! sink state.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::monoid::{MgeMonoid, MonoidDescriptor, MonoidValue};

/// Index of an input symbol within an [`InputAlphabet`].
pub type Symbol = usize;

/// A finite set of named input symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputAlphabet {
    symbols: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl InputAlphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut alphabet = InputAlphabet {
            symbols: Vec::new(),
            index: HashMap::new(),
        };
        for s in symbols {
            let s = s.into();
            if s.is_empty() || s == "-" || s.chars().any(char::is_whitespace) {
                return Err(Error::InvalidTransducer(format!(
                    "`{s}` is not a valid input symbol"
                )));
            }
            if alphabet.index.contains_key(&s) {
                return Err(Error::InvalidTransducer(format!(
                    "input symbol `{s}` declared twice"
                )));
            }
            alphabet.index.insert(s.clone(), alphabet.symbols.len());
            alphabet.symbols.push(s);
        }
        Ok(alphabet)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn name(&self, symbol: Symbol) -> &str {
        &self.symbols[symbol]
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    /// Splits a word into symbols. Whitespace or commas separate symbols
    /// explicitly; otherwise the word is segmented over the alphabet,
    /// preferring longer symbols first.
    pub fn tokenize(&self, word: &str) -> Result<Vec<Symbol>> {
        if word.contains(|c: char| c.is_whitespace() || c == ',') {
            return word
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| self.lookup(s).ok_or_else(|| Error::UnknownSymbol(s.to_string())))
                .collect();
        }
        let mut by_length: Vec<Symbol> = (0..self.len()).collect();
        by_length.sort_by_key(|&s| std::cmp::Reverse(self.symbols[s].len()));
        // reachable[i]: a segmentation of word[i..] exists, with its first symbol
        let n = word.len();
        let mut next: Vec<Option<Symbol>> = vec![None; n + 1];
        let mut ok = vec![false; n + 1];
        ok[n] = true;
        for i in (0..n).rev() {
            if !word.is_char_boundary(i) {
                continue;
            }
            for &s in &by_length {
                let name = &self.symbols[s];
                if word[i..].starts_with(name.as_str()) && ok[i + name.len()] {
                    ok[i] = true;
                    next[i] = Some(s);
                    break;
                }
            }
        }
        if !ok[0] {
            return Err(Error::UnknownSymbol(word.to_string()));
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < n {
            let s = next[i].expect("segmentation exists");
            out.push(s);
            i += self.symbols[s].len();
        }
        Ok(out)
    }

    /// Concatenates symbol names back into a word.
    pub fn render(&self, word: &[Symbol]) -> String {
        word.iter().map(|&s| self.name(s)).collect()
    }
}

/// A sorted, duplicate-free set of state indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(Vec<usize>);

impl StateSet {
    pub fn new(states: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = states.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }

    pub fn from_sorted(states: Vec<usize>) -> Self {
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
        StateSet(states)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, state: usize) -> bool {
        self.0.binary_search(&state).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn position(&self, state: usize) -> Option<usize> {
        self.0.binary_search(&state).ok()
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        StateSet(out)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

impl fmt::Display for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, q) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{q}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: usize,
    /// `None` is an ε input.
    pub input: Option<Symbol>,
    pub output: MonoidValue,
    pub target: usize,
}

/// A monoidal finite-state transducer over `Σ* × M`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transducer {
    alphabet: InputAlphabet,
    monoid: MonoidDescriptor,
    num_states: usize,
    initial: Vec<usize>,
    finals: Vec<usize>,
    transitions: Vec<Transition>,
}

impl Transducer {
    pub fn new(
        alphabet: InputAlphabet,
        monoid: MonoidDescriptor,
        num_states: usize,
        initial: impl IntoIterator<Item = usize>,
        finals: impl IntoIterator<Item = usize>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        let initial = StateSet::new(initial).0;
        let finals = StateSet::new(finals).0;
        let bad_state = |q: usize| q >= num_states;
        if let Some(q) = initial.iter().chain(&finals).copied().find(|&q| bad_state(q)) {
            return Err(Error::InvalidTransducer(format!(
                "state {q} out of range (state count {num_states})"
            )));
        }
        for (k, t) in transitions.iter().enumerate() {
            if bad_state(t.source) || bad_state(t.target) {
                return Err(Error::InvalidTransducer(format!(
                    "transition {k} references a state out of range"
                )));
            }
            if matches!(t.input, Some(a) if a >= alphabet.len()) {
                return Err(Error::InvalidTransducer(format!(
                    "transition {k} uses an undeclared input symbol"
                )));
            }
            if !monoid.contains(&t.output) {
                return Err(Error::InvalidTransducer(format!(
                    "transition {k} output is not an element of {monoid}"
                )));
            }
        }
        Ok(Transducer {
            alphabet,
            monoid,
            num_states,
            initial,
            finals,
            transitions,
        })
    }

    pub fn alphabet(&self) -> &InputAlphabet {
        &self.alphabet
    }

    pub fn monoid(&self) -> &MonoidDescriptor {
        &self.monoid
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn is_initial(&self, q: usize) -> bool {
        self.initial.binary_search(&q).is_ok()
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.binary_search(&q).is_ok()
    }

    /// True iff no transition reads ε.
    pub fn is_real_time(&self) -> bool {
        self.transitions.iter().all(|t| t.input.is_some())
    }

    /// Removes exact duplicate transitions, keeping first occurrences.
    /// Returns how many were dropped.
    pub fn dedup_transitions(&mut self) -> usize {
        let before = self.transitions.len();
        let mut seen = HashSet::new();
        self.transitions.retain(|t| seen.insert(t.clone()));
        before - self.transitions.len()
    }

    /// Outgoing transition indices per state, in Δ order.
    pub fn outgoing(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (k, t) in self.transitions.iter().enumerate() {
            out[t.source].push(k);
        }
        out
    }

    /// The unweighted automaton obtained by dropping outputs.
    pub fn project_input(&self) -> Automaton {
        let mut edges: Vec<Edge> = self
            .transitions
            .iter()
            .map(|t| Edge {
                source: t.source,
                input: t.input,
                target: t.target,
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Automaton {
            num_symbols: self.alphabet.len(),
            num_states: self.num_states,
            initial: self.initial.clone(),
            finals: self.finals.clone(),
            edges,
        }
    }
}

/// Restricts `t` to states that are both accessible and co-accessible.
///
/// Returns the trimmed transducer and a map from old to new state indices.
pub fn trim(t: &Transducer) -> (Transducer, Vec<Option<usize>>) {
    let n = t.num_states;
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for tr in &t.transitions {
        fwd[tr.source].push(tr.target);
        bwd[tr.target].push(tr.source);
    }
    let accessible = reach(n, &t.initial, &fwd);
    let coaccessible = reach(n, &t.finals, &bwd);
    let mut map = vec![None; n];
    let mut next = 0;
    for q in 0..n {
        if accessible[q] && coaccessible[q] {
            map[q] = Some(next);
            next += 1;
        }
    }
    let keep = |q: usize| map[q];
    let transitions = t
        .transitions
        .iter()
        .filter_map(|tr| {
            Some(Transition {
                source: keep(tr.source)?,
                input: tr.input,
                output: tr.output.clone(),
                target: keep(tr.target)?,
            })
        })
        .collect();
    let trimmed = Transducer {
        alphabet: t.alphabet.clone(),
        monoid: t.monoid.clone(),
        num_states: next,
        initial: t.initial.iter().filter_map(|&q| keep(q)).collect(),
        finals: t.finals.iter().filter_map(|&q| keep(q)).collect(),
        transitions,
    };
    (trimmed, map)
}

fn reach(n: usize, roots: &[usize], adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = roots.to_vec();
    for &r in roots {
        seen[r] = true;
    }
    while let Some(q) = stack.pop() {
        for &r in &adj[q] {
            if !seen[r] {
                seen[r] = true;
                stack.push(r);
            }
        }
    }
    seen
}

/// Adds an `(ε, e)` self-loop on every state that does not already have one.
pub fn e_extend(t: &Transducer) -> Transducer {
    let unit = t.monoid.unit();
    let mut out = t.clone();
    let existing: HashSet<usize> = t
        .transitions
        .iter()
        .filter(|tr| tr.input.is_none() && tr.source == tr.target && tr.output == unit)
        .map(|tr| tr.source)
        .collect();
    for q in 0..t.num_states {
        if !existing.contains(&q) {
            out.transitions.push(Transition {
                source: q,
                input: None,
                output: unit.clone(),
                target: q,
            });
        }
    }
    out
}

/// Default bound on path length used by [`enumerate_outputs`] callers:
/// long enough for a simple ε-segment between any two consumed symbols.
pub fn default_path_bound(t: &Transducer, word_len: usize) -> usize {
    2 * t.num_states.max(1) * (word_len + 1)
}

/// All outputs of successful paths reading exactly `word` with at most
/// `max_path_len` transitions (ε transitions included).
pub fn enumerate_outputs(t: &Transducer, word: &[Symbol], max_path_len: usize) -> BTreeSet<MonoidValue> {
    enumerate_outputs_capped(t, word, max_path_len, usize::MAX, usize::MAX)
}

/// Like [`enumerate_outputs`] but stops once `max_outputs` distinct outputs
/// are known or `budget` configurations have been explored.
pub fn enumerate_outputs_capped(
    t: &Transducer,
    word: &[Symbol],
    max_path_len: usize,
    max_outputs: usize,
    budget: usize,
) -> BTreeSet<MonoidValue> {
    let out_edges = t.outgoing();
    let unit = t.monoid.unit();
    let mut found = BTreeSet::new();
    let mut seen: HashSet<(usize, usize, MonoidValue)> = HashSet::new();
    let mut queue: VecDeque<(usize, usize, MonoidValue, usize)> = VecDeque::new();
    for &i in &t.initial {
        if seen.insert((i, 0, unit.clone())) {
            queue.push_back((i, 0, unit.clone(), 0));
        }
    }
    let mut explored = 0usize;
    while let Some((q, pos, acc, depth)) = queue.pop_front() {
        explored += 1;
        if pos == word.len() && t.is_final(q) {
            found.insert(acc.clone());
            if found.len() >= max_outputs {
                break;
            }
        }
        if depth >= max_path_len || explored >= budget {
            continue;
        }
        for &k in &out_edges[q] {
            let tr = &t.transitions[k];
            let next_pos = match tr.input {
                None => pos,
                Some(a) if pos < word.len() && word[pos] == a => pos + 1,
                Some(_) => continue,
            };
            let v = t.monoid.op(&acc, &tr.output).expect("validated transducer");
            if seen.insert((tr.target, next_pos, v.clone())) {
                queue.push_back((tr.target, next_pos, v, depth + 1));
            }
        }
    }
    found
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub input: Option<Symbol>,
    pub target: usize,
}

/// An unweighted automaton over input symbols, possibly with ε edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub num_symbols: usize,
    pub num_states: usize,
    pub initial: Vec<usize>,
    pub finals: Vec<usize>,
    pub edges: Vec<Edge>,
}

impl Automaton {
    pub fn has_epsilon(&self) -> bool {
        self.edges.iter().any(|e| e.input.is_none())
    }

    /// Flips every edge and swaps initial and final states.
    pub fn reverse(&self) -> Automaton {
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge {
                source: e.target,
                input: e.input,
                target: e.source,
            })
            .collect();
        edges.sort_unstable();
        Automaton {
            num_symbols: self.num_symbols,
            num_states: self.num_states,
            initial: self.finals.clone(),
            finals: self.initial.clone(),
            edges,
        }
    }

    fn successors(&self) -> Vec<Vec<Vec<usize>>> {
        let mut succ = vec![vec![Vec::new(); self.num_symbols]; self.num_states];
        for e in &self.edges {
            if let Some(a) = e.input {
                succ[e.source][a].push(e.target);
            }
        }
        succ
    }

    /// Reflexive ε-closure of every state.
    pub fn epsilon_closures(&self) -> Vec<StateSet> {
        let mut eps = vec![Vec::new(); self.num_states];
        for e in &self.edges {
            if e.input.is_none() {
                eps[e.source].push(e.target);
            }
        }
        (0..self.num_states)
            .map(|q| {
                let seen = reach(self.num_states, &[q], &eps);
                StateSet::from_sorted((0..self.num_states).filter(|&r| seen[r]).collect())
            })
            .collect()
    }

    /// Whether a subset produced by [`determinize_eps`] accepts: some member
    /// reaches a final state by ε edges.
    pub fn accepts_subset(&self, closures: &[StateSet], set: &StateSet) -> bool {
        set.iter()
            .any(|q| closures[q].iter().any(|r| self.finals.binary_search(&r).is_ok()))
    }
}

/// A deterministic automaton whose states are subsets of some base automaton's
/// states. Every state counts as final; δ is partial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    num_symbols: usize,
    states: Vec<StateSet>,
    start: Option<usize>,
    delta: Vec<Option<usize>>,
}

impl Dfa {
    /// Assembles a DFA from parts; `delta` is row-major `states × symbols`.
    pub fn from_parts(
        num_symbols: usize,
        states: Vec<StateSet>,
        start: Option<usize>,
        delta: Vec<Option<usize>>,
    ) -> Result<Self> {
        if delta.len() != states.len() * num_symbols {
            return Err(Error::Inconsistent("transition table has the wrong size".into()));
        }
        if start.is_some_and(|s| s >= states.len())
            || delta.iter().flatten().any(|&s| s >= states.len())
        {
            return Err(Error::Inconsistent("DFA references an unknown state".into()));
        }
        Ok(Dfa {
            num_symbols,
            states,
            start,
            delta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().filter(|d| d.is_some()).count()
    }

    pub fn start(&self) -> Option<usize> {
        self.start
    }

    pub fn state(&self, index: usize) -> &StateSet {
        &self.states[index]
    }

    pub fn states(&self) -> &[StateSet] {
        &self.states
    }

    pub fn next(&self, state: usize, symbol: Symbol) -> Option<usize> {
        self.delta[state * self.num_symbols + symbol]
    }

    /// Runs the DFA from its start state over `word`.
    pub fn run(&self, word: &[Symbol]) -> Option<usize> {
        word.iter()
            .try_fold(self.start?, |s, &a| self.next(s, a))
    }

    /// Index of the state holding `set`, if any.
    pub fn find(&self, set: &StateSet) -> Option<usize> {
        self.states.iter().position(|s| s == set)
    }
}

/// Power-set construction over accessible subsets only.
fn power_set(
    num_symbols: usize,
    base_states: usize,
    start: StateSet,
    mut step: impl FnMut(&StateSet, Symbol) -> StateSet,
    limit: Option<usize>,
) -> Result<Dfa> {
    let mut states: Vec<StateSet> = Vec::new();
    let mut delta: Vec<Option<usize>> = Vec::new();
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    if start.is_empty() {
        return Ok(Dfa {
            num_symbols,
            states,
            start: None,
            delta,
        });
    }
    index.insert(start.clone(), 0);
    states.push(start);
    delta.resize(num_symbols, None);
    let mut cursor = 0;
    while cursor < states.len() {
        for a in 0..num_symbols {
            let image = step(&states[cursor], a);
            if image.is_empty() {
                continue;
            }
            let target = match index.get(&image) {
                Some(&k) => k,
                None => {
                    let k = states.len();
                    if limit.is_some_and(|l| k >= l) {
                        return Err(Error::StateLimit {
                            limit: limit.unwrap_or_default(),
                        });
                    }
                    index.insert(image.clone(), k);
                    states.push(image);
                    delta.resize(delta.len() + num_symbols, None);
                    k
                }
            };
            delta[cursor * num_symbols + a] = Some(target);
        }
        cursor += 1;
    }
    if base_states < usize::BITS as usize - 1 {
        assert!(
            states.len() <= 1usize << base_states,
            "power-set DFA with {} states exceeds 2^{}",
            states.len(),
            base_states
        );
    }
    Ok(Dfa {
        num_symbols,
        states,
        start: Some(0),
        delta,
    })
}

/// Standard accessible power-set determinization of an ε-free automaton.
pub fn determinize(a: &Automaton, limit: Option<usize>) -> Result<Dfa> {
    if a.has_epsilon() {
        return Err(Error::Precondition(
            "determinize requires an automaton without ε edges".into(),
        ));
    }
    let succ = a.successors();
    let mut mark = vec![false; a.num_states];
    power_set(
        a.num_symbols,
        a.num_states,
        StateSet::new(a.initial.iter().copied()),
        |set, sym| collect_image(set.iter(), |q| &succ[q][sym], &mut mark),
        limit,
    )
}

/// ε-aware determinization: `δ(L, a)` is the set of states reachable from
/// `L` by a path whose input projection is exactly `a` (ε moves allowed
/// before and after). The start state is the initial set itself.
pub fn determinize_eps(a: &Automaton, limit: Option<usize>) -> Result<Dfa> {
    let succ = a.successors();
    let closures = a.epsilon_closures();
    let mut mark = vec![false; a.num_states];
    let mut mark2 = vec![false; a.num_states];
    power_set(
        a.num_symbols,
        a.num_states,
        StateSet::new(a.initial.iter().copied()),
        |set, sym| {
            let closed = collect_image(set.iter(), |q| closures[q].as_slice(), &mut mark);
            let stepped = collect_image(closed.iter(), |q| &succ[q][sym], &mut mark);
            collect_image(stepped.iter(), |q| closures[q].as_slice(), &mut mark2)
        },
        limit,
    )
}

fn collect_image<'a>(
    from: impl Iterator<Item = usize>,
    image: impl Fn(usize) -> &'a [usize],
    mark: &mut [bool],
) -> StateSet {
    let mut out = Vec::new();
    for q in from {
        for &r in image(q) {
            if !mark[r] {
                mark[r] = true;
                out.push(r);
            }
        }
    }
    for &r in &out {
        mark[r] = false;
    }
    out.sort_unstable();
    StateSet::from_sorted(out)
}
