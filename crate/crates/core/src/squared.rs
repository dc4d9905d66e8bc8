//! Squared output automata and their valuations.
//!
//! The squared automaton of a transducer runs two copies of it in lockstep
//! over the same input and records the pair of outputs. States are pairs of
//! transducer states, discovered breadth-first from `I × I`; the stored order
//! is the discovery order, which the valuation relies on for reproducibility.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fsa::{Symbol, Transducer};
use crate::monoid::{MgeMonoid, MonoidValue};

pub type Pair = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquaredTransition {
    pub source: usize,
    /// The shared input symbol, or `None` for a one-sided ε move.
    pub input: Option<Symbol>,
    pub outputs: (MonoidValue, MonoidValue),
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct SquaredAutomaton {
    pairs: Vec<Pair>,
    index: HashMap<Pair, usize>,
    initial: Vec<usize>,
    finals: Vec<usize>,
    transitions: Vec<SquaredTransition>,
    /// `transitions[offsets[k]..offsets[k + 1]]` leave pair `k`.
    offsets: Vec<usize>,
}

impl SquaredAutomaton {
    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// State pairs in breadth-first discovery order.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> Pair {
        self.pairs[index]
    }

    pub fn index_of(&self, pair: Pair) -> Option<usize> {
        self.index.get(&pair).copied()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn finals(&self) -> &[usize] {
        &self.finals
    }

    pub fn transitions(&self) -> &[SquaredTransition] {
        &self.transitions
    }

    pub fn outgoing(&self, index: usize) -> &[SquaredTransition] {
        &self.transitions[self.offsets[index]..self.offsets[index + 1]]
    }
}

/// Squared automaton of a real-time transducer: every pair of transitions
/// reading the same symbol gives one pair transition.
pub fn squared(t: &Transducer) -> Result<SquaredAutomaton> {
    if !t.is_real_time() {
        return Err(Error::Precondition(
            "squared automaton requires a real-time transducer".into(),
        ));
    }
    Ok(build(t))
}

/// Squared automaton allowing ε transitions, which advance one component
/// while the other stays put with output `e`.
pub fn squared_eps(t: &Transducer) -> SquaredAutomaton {
    build(t)
}

fn build(t: &Transducer) -> SquaredAutomaton {
    let out = t.outgoing();
    let unit = t.monoid().unit();
    let delta = t.transitions();

    let mut sq = SquaredAutomaton {
        pairs: Vec::new(),
        index: HashMap::new(),
        initial: Vec::new(),
        finals: Vec::new(),
        transitions: Vec::new(),
        offsets: vec![0],
    };
    let discover = |sq: &mut SquaredAutomaton, pair: Pair| -> usize {
        if let Some(&k) = sq.index.get(&pair) {
            return k;
        }
        let k = sq.pairs.len();
        sq.pairs.push(pair);
        sq.index.insert(pair, k);
        if t.is_final(pair.0) && t.is_final(pair.1) {
            sq.finals.push(k);
        }
        k
    };
    for &i1 in t.initial() {
        for &i2 in t.initial() {
            let k = discover(&mut sq, (i1, i2));
            sq.initial.push(k);
        }
    }
    let mut cursor = 0;
    while cursor < sq.pairs.len() {
        let (p1, p2) = sq.pairs[cursor];
        let mut pending: Vec<(Option<Symbol>, MonoidValue, MonoidValue, Pair)> = Vec::new();
        for &k1 in &out[p1] {
            let t1 = &delta[k1];
            let Some(a) = t1.input else { continue };
            for &k2 in &out[p2] {
                let t2 = &delta[k2];
                if t2.input == Some(a) {
                    pending.push((Some(a), t1.output.clone(), t2.output.clone(), (t1.target, t2.target)));
                }
            }
        }
        for &k2 in &out[p2] {
            let t2 = &delta[k2];
            if t2.input.is_none() {
                pending.push((None, unit.clone(), t2.output.clone(), (p1, t2.target)));
            }
        }
        for &k1 in &out[p1] {
            let t1 = &delta[k1];
            if t1.input.is_none() {
                pending.push((None, t1.output.clone(), unit.clone(), (t1.target, p2)));
            }
        }
        for (input, m1, m2, target) in pending {
            let target = discover(&mut sq, target);
            sq.transitions.push(SquaredTransition {
                source: cursor,
                input,
                outputs: (m1, m2),
                target,
            });
        }
        sq.offsets.push(sq.transitions.len());
        cursor += 1;
    }
    sq
}

/// Pairs from which some final pair is reachable.
pub fn coaccessible(a: &SquaredAutomaton) -> Vec<bool> {
    let mut back = vec![Vec::new(); a.num_pairs()];
    for tr in &a.transitions {
        back[tr.target].push(tr.source);
    }
    let mut seen = vec![false; a.num_pairs()];
    let mut stack = a.finals.clone();
    for &f in &a.finals {
        seen[f] = true;
    }
    while let Some(k) = stack.pop() {
        for &j in &back[k] {
            if !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// A relevant output pair `rho` per useful state pair, and its normalized
/// most general equalizer `nu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    rho: Vec<Option<(MonoidValue, MonoidValue)>>,
    nu: Vec<Option<(MonoidValue, MonoidValue)>>,
}

impl Valuation {
    pub fn rho(&self, pair: usize) -> Option<&(MonoidValue, MonoidValue)> {
        self.rho[pair].as_ref()
    }

    pub fn nu(&self, pair: usize) -> Option<&(MonoidValue, MonoidValue)> {
        self.nu[pair].as_ref()
    }
}

/// Assigns `rho` by breadth-first search over co-accessible pairs (first
/// discovery wins) and derives `nu` from it.
pub fn valuation<M: MgeMonoid<Elem = MonoidValue>>(
    monoid: &M,
    a: &SquaredAutomaton,
    coaccessible: &[bool],
) -> Result<Valuation> {
    let n = a.num_pairs();
    let mut rho: Vec<Option<(MonoidValue, MonoidValue)>> = vec![None; n];
    let mut queue = VecDeque::new();
    for &i in &a.initial {
        if coaccessible[i] && rho[i].is_none() {
            rho[i] = Some((monoid.unit(), monoid.unit()));
            queue.push_back(i);
        }
    }
    while let Some(k) = queue.pop_front() {
        let (x1, x2) = rho[k].clone().expect("queued pairs carry rho");
        for tr in a.outgoing(k) {
            if !coaccessible[tr.target] || rho[tr.target].is_some() {
                continue;
            }
            let y1 = monoid.op(&x1, &tr.outputs.0)?;
            let y2 = monoid.op(&x2, &tr.outputs.1)?;
            rho[tr.target] = Some((y1, y2));
            queue.push_back(tr.target);
        }
    }
    let nu = rho
        .iter()
        .map(|r| match r {
            None => Ok(None),
            Some((x1, x2)) if x1 == x2 => Ok(Some((monoid.unit(), monoid.unit()))),
            Some((x1, x2)) => monoid.eta(x1, x2),
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Valuation { rho, nu })
}

/// One line per pair: `((p1,p2)) rho=(v,v) nu=(v,v)`, `-` when undefined.
pub fn debug_dump(t: &Transducer, a: &SquaredAutomaton, v: &Valuation) -> String {
    let d = t.monoid();
    let show = |x: Option<&(MonoidValue, MonoidValue)>| match x {
        Some((l, r)) => format!("({},{})", d.display(l), d.display(r)),
        None => "-".to_string(),
    };
    let mut out = String::new();
    for (k, &(p1, p2)) in a.pairs.iter().enumerate() {
        let _ = writeln!(
            out,
            "(({p1},{p2})) rho={} nu={}",
            show(v.rho(k)),
            show(v.nu(k))
        );
    }
    out
}
