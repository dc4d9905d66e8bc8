//! The classical bimachine construction for free-monoid outputs.
//!
//! A pseudo-deterministic transducer is first made unambiguous: each state of
//! the expansion pairs a guessed positive state `p` with the set `N` of
//! alternatives that must fail for the guess to be right. Whenever several
//! transitions read the same symbol, the guess follows one of them and all
//! targets of lexicographically smaller outputs become negative hypotheses.
//! The bimachine is then read off the trimmed expansion, whose unambiguity
//! makes every `ψ` entry a plain transition output.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use crate::bimachine::{Bimachine, PsiTable};
use crate::compile::{CompileOptions, CompileStats, Compiled};
use crate::error::{Error, Result};
use crate::fsa::{determinize, trim, StateSet, Transducer, Transition};
use crate::monoid::{MgeMonoid, MonoidDescriptor, MonoidError, MonoidValue};

/// The unambiguous expansion `T′` together with the `(p, N)` label of each of
/// its states.
#[derive(Debug, Clone)]
pub struct ExpandedTransducer {
    pub transducer: Transducer,
    pub labels: Vec<(usize, StateSet)>,
}

fn require_free(t: &Transducer) -> Result<()> {
    match t.monoid() {
        MonoidDescriptor::Free(_) => {}
        other => {
            return Err(MonoidError::DescriptorMismatch {
                expected: "free monoid".into(),
                found: other.to_string(),
            }
            .into())
        }
    }
    if !t.is_real_time() {
        return Err(Error::Precondition(
            "the classical construction requires a real-time transducer".into(),
        ));
    }
    Ok(())
}

/// True iff `t` has a single initial state and is deterministic when
/// `(symbol, output word)` labels are read as opaque letters. Exact duplicate
/// transitions are ignored.
pub fn check_pseudo_deterministic(t: &Transducer) -> Result<bool> {
    require_free(t)?;
    if t.initial().len() != 1 {
        return Ok(false);
    }
    let mut targets: HashMap<(usize, usize, &MonoidValue), usize> = HashMap::new();
    for tr in t.transitions() {
        let a = tr.input.expect("real-time");
        match targets.insert((tr.source, a, &tr.output), tr.target) {
            Some(prev) if prev != tr.target => return Ok(false),
            _ => {}
        }
    }
    Ok(true)
}

fn word(v: &MonoidValue) -> &[u32] {
    match v {
        MonoidValue::Word(w) => w,
        _ => unreachable!("free-monoid transducer"),
    }
}

/// Builds the trimmed unambiguous expansion `T′` of a pseudo-deterministic
/// transducer. Output words are compared lexicographically over symbol
/// indices, a proper prefix preceding its extensions.
pub fn unambiguous_expand(t: &Transducer, max_states: Option<usize>) -> Result<ExpandedTransducer> {
    if !check_pseudo_deterministic(t)? {
        return Err(Error::Precondition(
            "the classical construction requires a pseudo-deterministic transducer".into(),
        ));
    }
    let mut t = t.clone();
    t.dedup_transitions();
    let n = t.num_states();
    let k = t.alphabet().len();
    let mut by_symbol: Vec<Vec<Vec<&Transition>>> = vec![vec![Vec::new(); k]; n];
    for tr in t.transitions() {
        by_symbol[tr.source][tr.input.expect("real-time")].push(tr);
    }

    let mut labels: Vec<(usize, StateSet)> = Vec::new();
    let mut index: HashMap<(usize, StateSet), usize> = HashMap::new();
    let mut transitions = Vec::new();
    let start = (t.initial()[0], StateSet::default());
    index.insert(start.clone(), 0);
    labels.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(cur) = queue.pop_front() {
        let (p, negatives) = labels[cur].clone();
        for a in 0..k {
            if by_symbol[p][a].is_empty() {
                continue;
            }
            let inherited: Vec<usize> = negatives
                .iter()
                .flat_map(|q| by_symbol[q][a].iter().map(|tr| tr.target))
                .collect();
            for tr in &by_symbol[p][a] {
                let v = word(&tr.output);
                let smaller = by_symbol[p][a]
                    .iter()
                    .filter(|other| word(&other.output) < v)
                    .map(|other| other.target);
                let next_negatives = StateSet::new(inherited.iter().copied().chain(smaller));
                if next_negatives.contains(tr.target) {
                    continue;
                }
                let label = (tr.target, next_negatives);
                let target = match index.get(&label) {
                    Some(&s) => s,
                    None => {
                        let s = labels.len();
                        if max_states.is_some_and(|l| s >= l) {
                            return Err(Error::StateLimit {
                                limit: max_states.unwrap_or_default(),
                            });
                        }
                        index.insert(label.clone(), s);
                        labels.push(label);
                        queue.push_back(s);
                        s
                    }
                };
                transitions.push(Transition {
                    source: cur,
                    input: Some(a),
                    output: tr.output.clone(),
                    target,
                });
            }
        }
    }
    let finals: Vec<usize> = labels
        .iter()
        .enumerate()
        .filter(|(_, (f, negatives))| {
            t.is_final(*f) && !negatives.iter().any(|q| t.is_final(q))
        })
        .map(|(s, _)| s)
        .collect();
    let expanded = Transducer::new(
        t.alphabet().clone(),
        t.monoid().clone(),
        labels.len(),
        [0],
        finals,
        transitions,
    )?;
    let (trimmed, map) = trim(&expanded);
    let mut kept = vec![(0, StateSet::default()); trimmed.num_states()];
    for (old, new) in map.iter().enumerate() {
        if let Some(new) = *new {
            kept[new] = labels[old].clone();
        }
    }
    Ok(ExpandedTransducer {
        transducer: trimmed,
        labels: kept,
    })
}

/// Classical bimachine: determinize `T′` and its reversal, and let `ψ(L, a, R′)`
/// be the output of the unique `T′` transition from `L ∩ δ_R(R′, a)` into
/// `δ_L(L, a) ∩ R′`.
pub fn classical_compile(t: &Transducer, options: &CompileOptions) -> Result<Compiled> {
    let started = Instant::now();
    let expanded = unambiguous_expand(t, options.max_states)?;
    let tp = &expanded.transducer;
    let automaton = tp.project_input();
    let left = determinize(&automaton, options.max_states)?;
    let right = determinize(&automaton.reverse(), options.max_states)?;

    let mut lefts_containing = vec![Vec::new(); tp.num_states()];
    for (l, set) in left.states().iter().enumerate() {
        for q in set.iter() {
            lefts_containing[q].push(l);
        }
    }
    let mut rights_containing = vec![Vec::new(); tp.num_states()];
    for (r, set) in right.states().iter().enumerate() {
        for q in set.iter() {
            rights_containing[q].push(r);
        }
    }
    let mut psi = PsiTable::new();
    for tr in tp.transitions() {
        let a = tr.input.expect("real-time");
        for &l in &lefts_containing[tr.source] {
            for &r_next in &rights_containing[tr.target] {
                let Some(r) = right.next(r_next, a) else { continue };
                if !right.state(r).contains(tr.source) {
                    continue;
                }
                if let Some(prev) = psi.insert((l, a, r_next), tr.output.clone()) {
                    if prev != tr.output {
                        return Err(Error::Inconsistent(format!(
                            "expanded transducer is ambiguous at ({l}, {}, {r_next})",
                            tp.alphabet().name(a)
                        )));
                    }
                }
            }
        }
    }
    let eps_output = tp
        .initial()
        .iter()
        .any(|&i| tp.is_final(i))
        .then(|| tp.monoid().unit());
    let stats = CompileStats {
        left_states: left.num_states(),
        right_states: right.num_states(),
        left_transitions: left.num_transitions(),
        right_transitions: right.num_transitions(),
        psi_entries: psi.len(),
        intermediate_states: Some(tp.num_states()),
        well_definedness_checks: 0,
        build_ms: 0.0,
    };
    let bimachine = Bimachine::new(
        tp.monoid().clone(),
        tp.alphabet().clone(),
        left,
        right,
        psi,
        eps_output,
    )?;
    let mut compiled = Compiled { bimachine, stats };
    compiled.stats.build_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(compiled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsa::InputAlphabet;

    fn d() -> MonoidDescriptor {
        MonoidDescriptor::free("xy").unwrap()
    }

    fn tr(src: usize, input: usize, out: &str, dst: usize) -> Transition {
        Transition {
            source: src,
            input: Some(input),
            output: d().word_from_str(out).unwrap(),
            target: dst,
        }
    }

    fn transducer(n: usize, init: &[usize], fin: &[usize], ts: Vec<Transition>) -> Transducer {
        Transducer::new(
            InputAlphabet::new(["a", "b"]).unwrap(),
            d(),
            n,
            init.iter().copied(),
            fin.iter().copied(),
            ts,
        )
        .unwrap()
    }

    #[test]
    fn pseudo_determinism() {
        let ok = transducer(2, &[0], &[1], vec![tr(0, 0, "x", 1), tr(0, 0, "y", 1)]);
        assert!(check_pseudo_deterministic(&ok).unwrap());
        let clash = transducer(3, &[0], &[1], vec![tr(0, 0, "x", 1), tr(0, 0, "x", 2)]);
        assert!(!check_pseudo_deterministic(&clash).unwrap());
        let two = transducer(2, &[0, 1], &[1], vec![]);
        assert!(!check_pseudo_deterministic(&two).unwrap());
        let dup = transducer(2, &[0], &[1], vec![tr(0, 0, "x", 1), tr(0, 0, "x", 1)]);
        assert!(check_pseudo_deterministic(&dup).unwrap());
    }

    #[test]
    fn wrong_monoid_is_a_descriptor_error() {
        let t = Transducer::new(
            InputAlphabet::new(["a"]).unwrap(),
            MonoidDescriptor::NonNegRational,
            1,
            [0],
            [0],
            vec![],
        )
        .unwrap();
        assert!(matches!(
            check_pseudo_deterministic(&t),
            Err(Error::Monoid(MonoidError::DescriptorMismatch { .. }))
        ));
    }

    #[test]
    fn deterministic_input_expands_to_copy() {
        let t = transducer(3, &[0], &[2], vec![tr(0, 0, "x", 1), tr(1, 1, "y", 2)]);
        let e = unambiguous_expand(&t, None).unwrap();
        assert_eq!(e.transducer.num_states(), 3);
        assert!(e.labels.iter().all(|(_, n)| n.is_empty()));
    }

    #[test]
    fn smaller_output_becomes_negative_hypothesis() {
        // a:x then b, or a:y then a — disambiguated by the next symbol
        let t = transducer(
            4,
            &[0],
            &[3],
            vec![tr(0, 0, "x", 1), tr(0, 0, "y", 2), tr(1, 1, "", 3), tr(2, 0, "", 3)],
        );
        let e = unambiguous_expand(&t, None).unwrap();
        assert!(e.labels.contains(&(2, StateSet::new([1]))));
        let c = classical_compile(&t, &CompileOptions::default()).unwrap();
        let b = &c.bimachine;
        assert_eq!(b.evaluate(&[0, 1]).unwrap(), Some(d().word_from_str("x").unwrap()));
        assert_eq!(b.evaluate(&[0, 0]).unwrap(), Some(d().word_from_str("y").unwrap()));
        assert_eq!(b.evaluate(&[0]).unwrap(), None);
    }

    #[test]
    fn ambiguous_same_output_paths_keep_the_smallest_guess() {
        // both branches accept "ab" with the same output; only one survives
        let t = transducer(
            4,
            &[0],
            &[3],
            vec![tr(0, 0, "", 1), tr(0, 0, "x", 2), tr(1, 1, "x", 3), tr(2, 1, "", 3)],
        );
        let c = classical_compile(&t, &CompileOptions::default()).unwrap();
        assert_eq!(
            c.bimachine.evaluate(&[0, 1]).unwrap(),
            Some(d().word_from_str("x").unwrap())
        );
    }
}
