//! Bimachine construction by equalizer accumulation.
//!
//! The left automaton determinizes the transducer, the right automaton
//! determinizes its reversal. For a left state `L` and right state `R`, the
//! states in `S = L ∩ R` are exactly those on a successful path through the
//! current position; `φ_S` assigns each of them the delay it still owes
//! relative to the others, accumulated from the valuation's pairwise mges.
//! Each `ψ` entry is then the unique `c` with `φ_S(p) ∘ c = m ∘ φ_{S'}(p')`.
//!
//! ε-transitions are handled by working with generalized transitions
//! `ε* a ε*` throughout: in the determinizations, in the choice of the
//! transition defining `ψ`, and in the well-definedness check.

use std::collections::HashMap;
use std::time::Instant;

use crate::bimachine::{Bimachine, PsiTable};
use crate::error::{Error, Result};
use crate::fsa::{determinize, determinize_eps, Dfa, StateSet, Symbol, Transducer};
use crate::functionality::{test_functionality, FunctionalityVerdict};
use crate::monoid::{MgeMonoid, MonoidDescriptor, MonoidValue};
use crate::squared::{SquaredAutomaton, Valuation};

#[derive(Debug, Clone)]
pub struct CompileOptions {
    /// Upper bound on the states of each power-set automaton.
    pub max_states: Option<usize>,
    /// Verify every `ψ` entry against all generalized transitions between
    /// `S` and `S'`, not only the one that defined it.
    pub check_well_defined: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            max_states: None,
            check_well_defined: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompileStats {
    pub left_states: usize,
    pub right_states: usize,
    pub left_transitions: usize,
    pub right_transitions: usize,
    pub psi_entries: usize,
    /// States of the expanded transducer (classical construction only).
    pub intermediate_states: Option<usize>,
    /// How many transitions were checked against an already chosen `ψ` value.
    pub well_definedness_checks: usize,
    pub build_ms: f64,
}

#[derive(Debug, Clone)]
pub struct Compiled {
    pub bimachine: Bimachine,
    pub stats: CompileStats,
}

/// Tests functionality and compiles in one go.
pub fn compile(t: &Transducer, options: &CompileOptions) -> Result<Compiled> {
    let started = Instant::now();
    let verdict = test_functionality(t)?;
    let mut compiled = compile_verdict(&verdict, options)?;
    compiled.stats.build_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(compiled)
}

/// Compiles from a verdict, reusing its squared automaton and valuation.
///
/// Subsets in the resulting automata refer to states of the verdict's
/// trimmed transducer.
pub fn compile_verdict(verdict: &FunctionalityVerdict, options: &CompileOptions) -> Result<Compiled> {
    if let Some(w) = verdict.witness() {
        return Err(Error::NotFunctional(w.clone()));
    }
    let started = Instant::now();
    let t = verdict.trimmed();
    let (sq, val) = match (verdict.squared(), verdict.valuation()) {
        (Some(sq), Some(val)) => (sq, val),
        _ => return Err(Error::Inconsistent("verdict carries no squared automaton".into())),
    };
    let automaton = t.project_input();
    let (left, right) = if t.is_real_time() {
        (
            determinize(&automaton, options.max_states)?,
            determinize(&automaton.reverse(), options.max_states)?,
        )
    } else {
        (
            determinize_eps(&automaton, options.max_states)?,
            determinize_eps(&automaton.reverse(), options.max_states)?,
        )
    };

    let mut ctx = OutputContext::new(t, sq, val, &left, &right, options.check_well_defined);
    let mut psi = PsiTable::new();
    for l in 0..left.num_states() {
        for a in 0..t.alphabet().len() {
            for r_next in 0..right.num_states() {
                if let Some(c) = ctx.output_value(l, a, r_next)? {
                    psi.insert((l, a, r_next), c);
                }
            }
        }
    }
    let stats = CompileStats {
        left_states: left.num_states(),
        right_states: right.num_states(),
        left_transitions: left.num_transitions(),
        right_transitions: right.num_transitions(),
        psi_entries: psi.len(),
        intermediate_states: None,
        well_definedness_checks: ctx.checks,
        build_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    let bimachine = Bimachine::new(
        t.monoid().clone(),
        t.alphabet().clone(),
        left,
        right,
        psi,
        verdict.eps_output().cloned(),
    )?;
    Ok(Compiled { bimachine, stats })
}

/// `φ_S` for the ascending enumeration `p_1 < … < p_k` of `S`: equalizer
/// accumulation over `ν(p_1, p_2), …, ν(p_{k-1}, p_k)`. Entries align with
/// `s.as_slice()`.
pub fn set_mge<M: MgeMonoid<Elem = MonoidValue>>(
    monoid: &M,
    s: &StateSet,
    sq: &SquaredAutomaton,
    val: &Valuation,
) -> Result<Vec<MonoidValue>> {
    let chain = s
        .as_slice()
        .windows(2)
        .map(|w| {
            sq.index_of((w[0], w[1]))
                .and_then(|k| val.nu(k))
                .cloned()
                .ok_or_else(|| {
                    Error::Inconsistent(format!(
                        "no equalizer for states ({}, {}); the transducer is not functional",
                        w[0], w[1]
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(monoid.gamma_n(&chain)?)
}

/// Everything needed to compute individual `ψ` entries.
pub struct OutputContext<'a> {
    t: &'a Transducer,
    sq: &'a SquaredAutomaton,
    val: &'a Valuation,
    left: &'a Dfa,
    right: &'a Dfa,
    /// `eps[p][q]`: output of an ε-path from `p` to `q`, if any.
    eps: Vec<Vec<Option<MonoidValue>>>,
    /// Transitions per `(source, symbol)` in Δ order.
    by_symbol: Vec<Vec<Vec<usize>>>,
    phi: HashMap<StateSet, Vec<MonoidValue>>,
    check_all: bool,
    pub checks: usize,
}

impl<'a> OutputContext<'a> {
    pub fn new(
        t: &'a Transducer,
        sq: &'a SquaredAutomaton,
        val: &'a Valuation,
        left: &'a Dfa,
        right: &'a Dfa,
        check_all: bool,
    ) -> Self {
        let mut by_symbol = vec![vec![Vec::new(); t.alphabet().len()]; t.num_states()];
        for (k, tr) in t.transitions().iter().enumerate() {
            if let Some(a) = tr.input {
                by_symbol[tr.source][a].push(k);
            }
        }
        OutputContext {
            t,
            sq,
            val,
            left,
            right,
            eps: eps_outputs(t),
            by_symbol,
            phi: HashMap::new(),
            check_all,
            checks: 0,
        }
    }

    fn phi(&mut self, s: &StateSet) -> Result<&Vec<MonoidValue>> {
        if !self.phi.contains_key(s) {
            let value = set_mge(self.t.monoid(), s, self.sq, self.val)?;
            self.phi.insert(s.clone(), value);
        }
        Ok(&self.phi[s])
    }

    /// `ψ(L, a, R')`, or `None` when `S = L ∩ δ_R(R', a)` is empty.
    pub fn output_value(&mut self, l: usize, a: Symbol, r_next: usize) -> Result<Option<MonoidValue>> {
        let (Some(l_next), Some(r)) = (self.left.next(l, a), self.right.next(r_next, a)) else {
            return Ok(None);
        };
        let s = self.left.state(l).intersection(self.right.state(r));
        if s.is_empty() {
            return Ok(None);
        }
        let s_next = self.left.state(l_next).intersection(self.right.state(r_next));
        let phi_s = self.phi(&s)?.clone();
        let phi_next = self.phi(&s_next)?.clone();
        let d: &MonoidDescriptor = self.t.monoid();

        let mut chosen: Option<MonoidValue> = None;
        for (i, p) in s.iter().enumerate() {
            for (q, m1) in self.eps[p].iter().enumerate() {
                let Some(m1) = m1 else { continue };
                for &k in &self.by_symbol[q][a] {
                    let tr = &self.t.transitions()[k];
                    let head = d.op(m1, &tr.output)?;
                    for (j, p_next) in s_next.iter().enumerate() {
                        let Some(m2) = &self.eps[tr.target][p_next] else { continue };
                        let lambda = d.op(&head, m2)?;
                        let rhs = d.op(&lambda, &phi_next[j])?;
                        match &chosen {
                            None => {
                                let c = d.solve_right(&phi_s[i], &rhs)?.ok_or_else(|| {
                                    Error::Inconsistent(format!(
                                        "no output solves the step from state {p} to {p_next}"
                                    ))
                                })?;
                                chosen = Some(c);
                                if !self.check_all {
                                    return Ok(chosen);
                                }
                            }
                            Some(c) => {
                                self.checks += 1;
                                if d.op(&phi_s[i], c)? != rhs {
                                    return Err(Error::Inconsistent(format!(
                                        "output for ({l}, {}, {r_next}) is not well defined \
                                         (transition {p} -> {p_next})",
                                        self.t.alphabet().name(a)
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        match chosen {
            Some(c) => Ok(Some(c)),
            None => Err(Error::Inconsistent(format!(
                "no transition links the intersections for ({l}, {}, {r_next})",
                self.t.alphabet().name(a)
            ))),
        }
    }
}

/// For every state, the output of the first ε-path found (breadth-first) to
/// each ε-reachable state; `eps[p][p]` is always `e`.
fn eps_outputs(t: &Transducer) -> Vec<Vec<Option<MonoidValue>>> {
    let n = t.num_states();
    let d = t.monoid();
    let mut adj: Vec<Vec<(usize, &MonoidValue)>> = vec![Vec::new(); n];
    for tr in t.transitions() {
        if tr.input.is_none() {
            adj[tr.source].push((tr.target, &tr.output));
        }
    }
    (0..n)
        .map(|p| {
            let mut row: Vec<Option<MonoidValue>> = vec![None; n];
            row[p] = Some(d.unit());
            let mut queue = std::collections::VecDeque::from([p]);
            while let Some(q) = queue.pop_front() {
                let acc = row[q].clone().expect("queued states are reached");
                for &(r, m) in &adj[q] {
                    if row[r].is_none() {
                        row[r] = Some(d.op(&acc, m).expect("validated transducer"));
                        queue.push_back(r);
                    }
                }
            }
            row
        })
        .collect()
}
