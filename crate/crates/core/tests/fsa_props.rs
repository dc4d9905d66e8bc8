mod common;

use std::collections::BTreeSet;

use bimc::fsa::{determinize, determinize_eps, enumerate_outputs, trim, Edge};
use bimc::tn::make_tn;
use bimc::{Automaton, Dfa, MonoidValue, StateSet};
use common::{random_transducer, words_up_to, Shape};

/// Direct subset simulation, closing under ε after every step.
fn nfa_accepts(a: &Automaton, word: &[usize]) -> bool {
    let close = |mut set: BTreeSet<usize>| loop {
        let before = set.len();
        for e in &a.edges {
            if e.input.is_none() && set.contains(&e.source) {
                set.insert(e.target);
            }
        }
        if set.len() == before {
            return set;
        }
    };
    let mut current = close(a.initial.iter().copied().collect());
    for &sym in word {
        let stepped = a
            .edges
            .iter()
            .filter(|e| e.input == Some(sym) && current.contains(&e.source))
            .map(|e| e.target)
            .collect();
        current = close(stepped);
    }
    a.finals.iter().any(|f| current.contains(f))
}

fn dfa_accepts(a: &Automaton, dfa: &Dfa, word: &[usize]) -> bool {
    let closures = a.epsilon_closures();
    dfa.run(word)
        .is_some_and(|q| a.accepts_subset(&closures, dfa.state(q)))
}

#[test]
fn determinize_preserves_the_language() {
    let mut rng = common::rng(1);
    for _ in 0..200 {
        let shape = Shape {
            max_states: 5,
            ..Shape::default()
        };
        let a = random_transducer(&mut rng, shape).project_input();
        let dfa = determinize(&a, None).unwrap();
        assert!(dfa.num_states() <= 1 << a.num_states);
        for u in words_up_to(a.num_symbols, 6) {
            assert_eq!(dfa_accepts(&a, &dfa, &u), nfa_accepts(&a, &u), "{a:?} on {u:?}");
        }
    }
}

#[test]
fn determinize_eps_preserves_the_language() {
    let mut rng = common::rng(2);
    for _ in 0..200 {
        let shape = Shape {
            eps: true,
            ..Shape::default()
        };
        let a = random_transducer(&mut rng, shape).project_input();
        for b in [a.clone(), a.reverse()] {
            let dfa = determinize_eps(&b, None).unwrap();
            assert!(dfa.num_states() <= 1 << b.num_states);
            for u in words_up_to(b.num_symbols, 5) {
                assert_eq!(dfa_accepts(&b, &dfa, &u), nfa_accepts(&b, &u), "{b:?} on {u:?}");
            }
        }
    }
}

#[test]
fn determinize_eps_starts_from_the_unclosed_initial_set() {
    let a = Automaton {
        num_symbols: 1,
        num_states: 3,
        initial: vec![0],
        finals: vec![2],
        edges: vec![
            Edge { source: 0, input: None, target: 1 },
            Edge { source: 1, input: Some(0), target: 2 },
        ],
    };
    let dfa = determinize_eps(&a, None).unwrap();
    assert_eq!(dfa.state(dfa.start().unwrap()), &StateSet::new([0]));
    let next = dfa.next(dfa.start().unwrap(), 0).unwrap();
    assert_eq!(dfa.state(next), &StateSet::new([2]));
}

#[test]
fn tn_power_sets_have_the_expected_sizes() {
    for n in 1..=6 {
        let a = make_tn(n).unwrap().project_input();
        assert_eq!(determinize(&a, None).unwrap().num_states(), 3, "left, n={n}");
        assert_eq!(
            determinize(&a.reverse(), None).unwrap().num_states(),
            (1 << n) + n,
            "right, n={n}"
        );
    }
}

#[test]
fn tn_is_already_trim() {
    for n in 1..=5 {
        let t = make_tn(n).unwrap();
        let (trimmed, map) = trim(&t);
        assert_eq!(trimmed.num_states(), t.num_states());
        assert_eq!(trimmed.transitions().len(), t.transitions().len());
        assert!(map.iter().enumerate().all(|(i, m)| *m == Some(i)));
    }
}

#[test]
fn tn_maps_a_two_letter_word_to_2n_ones() {
    for n in 1..=4 {
        let t = make_tn(n).unwrap();
        let outputs = enumerate_outputs(&t, &[0, 0], 4);
        let expected: BTreeSet<_> = [MonoidValue::word(vec![0; 2 * n])].into();
        assert_eq!(outputs, expected, "n={n}");
        assert!(enumerate_outputs(&t, &[0], 4).is_empty());
    }
}
