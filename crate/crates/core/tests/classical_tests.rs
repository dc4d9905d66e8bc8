mod common;

use bimc::classical::{check_pseudo_deterministic, classical_compile, unambiguous_expand};
use bimc::compile::{compile, CompileOptions};
use bimc::tn::make_tn;
use bimc::Transducer;
use common::{oracle_outputs, random_functional, words_up_to, Shape};
use rand_chacha::ChaCha8Rng;

fn pseudo_deterministic_functional(rng: &mut ChaCha8Rng) -> Transducer {
    loop {
        let t = random_functional(rng, Shape::default(), 6);
        if check_pseudo_deterministic(&t).unwrap() {
            return t;
        }
    }
}

/// Number of successful paths reading `u`.
fn count_paths(t: &Transducer, u: &[usize]) -> usize {
    let mut counts = vec![0usize; t.num_states()];
    for &i in t.initial() {
        counts[i] += 1;
    }
    for &a in u {
        let mut next = vec![0usize; t.num_states()];
        for tr in t.transitions() {
            if tr.input == Some(a) {
                next[tr.target] += counts[tr.source];
            }
        }
        counts = next;
    }
    t.finals().iter().map(|&f| counts[f]).sum()
}

#[test]
fn expansion_is_unambiguous_and_equivalent() {
    let mut rng = common::rng(31);
    for _ in 0..60 {
        let t = pseudo_deterministic_functional(&mut rng);
        let expanded = unambiguous_expand(&t, None).unwrap();
        let tp = &expanded.transducer;
        assert_eq!(expanded.labels.len(), tp.num_states());
        for u in words_up_to(t.alphabet().len(), 5) {
            let paths = count_paths(tp, &u);
            assert!(paths <= 1, "{paths} paths for {u:?}");
            assert_eq!(oracle_outputs(tp, &u), oracle_outputs(&t, &u), "{u:?}");
        }
    }
}

#[test]
fn tn_intermediate_and_automaton_sizes() {
    let c = classical_compile(&make_tn(3).unwrap(), &CompileOptions::default()).unwrap();
    assert!(c.stats.intermediate_states.unwrap() >= 18);
    assert!(c.stats.left_states >= 8);
    assert!(c.stats.right_states >= 11);
}

#[test]
fn tn_expansion_labels_are_distinct() {
    let e = unambiguous_expand(&make_tn(3).unwrap(), None).unwrap();
    let mut labels = e.labels.clone();
    labels.sort();
    labels.dedup();
    assert_eq!(labels.len(), e.labels.len());
}

#[test]
fn agrees_with_the_equalizer_construction() {
    let mut rng = common::rng(32);
    for _ in 0..60 {
        let t = pseudo_deterministic_functional(&mut rng);
        let classical = classical_compile(&t, &CompileOptions::default()).unwrap().bimachine;
        let mge = compile(&t, &CompileOptions::default()).unwrap().bimachine;
        for u in words_up_to(t.alphabet().len(), 5) {
            assert_eq!(classical.evaluate(&u).unwrap(), mge.evaluate(&u).unwrap(), "{u:?}");
        }
    }
    for n in 1..=4 {
        let t = make_tn(n).unwrap();
        let classical = classical_compile(&t, &CompileOptions::default()).unwrap().bimachine;
        let mge = compile(&t, &CompileOptions::default()).unwrap().bimachine;
        for u in words_up_to(n, 4) {
            assert_eq!(classical.evaluate(&u).unwrap(), mge.evaluate(&u).unwrap(), "n={n} {u:?}");
        }
    }
}

#[test]
fn epsilon_input_is_rejected() {
    let t = bimc::io::parse_transducer("monoid free:x\nalphabet a\nstates 1\ninitial 0\nfinal 0\nt 0 - \"\" 0\n")
        .unwrap()
        .transducer;
    assert!(matches!(classical_compile(&t, &CompileOptions::default()), Err(bimc::Error::Precondition(_))));
}
