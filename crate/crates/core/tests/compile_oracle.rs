mod common;

use bimc::compile::{compile, CompileOptions};
use bimc::io::parse_transducer;
use bimc::tn::make_tn;
use bimc::{Error, MgeMonoid, MonoidValue, Transducer, Transition};
use common::{oracle_outputs, random_functional, words_up_to, Shape};

fn check_against_oracle(t: &Transducer, max_len: usize) {
    let b = compile(t, &CompileOptions::default()).unwrap().bimachine;
    for u in words_up_to(t.alphabet().len(), max_len) {
        let expected = oracle_outputs(t, &u);
        assert!(expected.len() <= 1);
        assert_eq!(b.evaluate(&u).unwrap().as_ref(), expected.iter().next(), "{u:?}\n{}", bimc::io::write_transducer(t));
    }
}

#[test]
fn real_time_outputs_match_the_oracle() {
    let mut rng = common::rng(21);
    for _ in 0..80 {
        check_against_oracle(&random_functional(&mut rng, Shape::default(), 6), 5);
    }
}

#[test]
fn epsilon_outputs_match_the_oracle() {
    let mut rng = common::rng(22);
    for _ in 0..80 {
        let shape = Shape { eps: true, ..Shape::default() };
        check_against_oracle(&random_functional(&mut rng, shape, 6), 5);
    }
}

/// Contracting every ε edge by hand gives an equivalent real-time
/// transducer; both compile to the same function.
#[test]
fn epsilon_transducer_matches_its_contracted_twin() {
    let load = |text: &str| parse_transducer(text).unwrap().transducer;
    let with_eps = load(
        "monoid free:xy\nalphabet a b\nstates 4\ninitial 0\nfinal 3\n\
         t 0 - \"x\" 1\nt 1 a \"y\" 2\nt 2 - \"\" 3\nt 3 b \"yy\" 3\nt 2 b \"x\" 1\n",
    );
    let contracted = load(
        "monoid free:xy\nalphabet a b\nstates 4\ninitial 0\nfinal 2 3\n\
         t 0 a \"xy\" 2\nt 2 b \"yy\" 3\nt 3 b \"yy\" 3\nt 2 b \"x\" 1\nt 1 a \"y\" 2\n",
    );
    let b1 = compile(&with_eps, &CompileOptions::default()).unwrap().bimachine;
    let b2 = compile(&contracted, &CompileOptions::default()).unwrap().bimachine;
    let mut defined = 0;
    for u in words_up_to(2, 6) {
        let (x, y) = (b1.evaluate(&u).unwrap(), b2.evaluate(&u).unwrap());
        assert_eq!(x, y, "{u:?}");
        assert_eq!(x.as_ref(), oracle_outputs(&with_eps, &u).iter().next());
        defined += usize::from(x.is_some());
    }
    assert!(defined > 3);
}

/// ψ* telescopes: the output of `uv` is the output of `u` against the right
/// state of `v`, followed by the output of `v` from the left state of `u`.
#[test]
fn psi_star_telescopes() {
    let mut rng = common::rng(23);
    let reversed = |w: &[usize]| w.iter().rev().copied().collect::<Vec<_>>();
    for _ in 0..40 {
        let t = random_functional(&mut rng, Shape::default(), 6);
        let b = compile(&t, &CompileOptions::default()).unwrap().bimachine;
        let (Some(l0), Some(r0)) = (b.left().start(), b.right().start()) else { continue };
        for w in words_up_to(t.alphabet().len(), 4) {
            let Some(whole) = b.psi_star(l0, &w, r0) else { continue };
            if !w.is_empty() {
                assert_eq!(b.evaluate(&w).unwrap(), Some(whole.clone()));
            }
            for cut in 0..=w.len() {
                let (u, v) = w.split_at(cut);
                let l_mid = b.left().run(u).unwrap();
                let r_mid = b.right().run(&reversed(v)).unwrap();
                let x = b.psi_star(l0, u, r_mid).unwrap();
                let y = b.psi_star(l_mid, v, r0).unwrap();
                assert_eq!(b.monoid().op(&x, &y).unwrap(), whole, "{w:?} at {cut}");
            }
        }
    }
}

#[test]
fn extra_checks_do_not_change_the_result() {
    let mut rng = common::rng(24);
    for i in 0..60 {
        let shape = Shape { eps: i % 2 == 0, ..Shape::default() };
        let t = random_functional(&mut rng, shape, 6);
        let checked = compile(&t, &CompileOptions::default()).unwrap();
        let unchecked = compile(&t, &CompileOptions { check_well_defined: false, ..CompileOptions::default() }).unwrap();
        assert_eq!(checked.bimachine, unchecked.bimachine);
        assert_eq!(unchecked.stats.well_definedness_checks, 0);
    }
}

/// A real-time transducer compiles to the same function whether or not it
/// takes the ε-aware path (forced by adding an unreachable ε edge).
#[test]
fn epsilon_path_agrees_with_real_time_path() {
    let mut rng = common::rng(25);
    for _ in 0..60 {
        let t = random_functional(&mut rng, Shape::default(), 6);
        let n = t.num_states();
        let mut transitions = t.transitions().to_vec();
        transitions.push(Transition { source: n, input: None, output: t.monoid().unit(), target: n });
        let padded = Transducer::new(
            t.alphabet().clone(),
            t.monoid().clone(),
            n + 1,
            t.initial().iter().copied().chain([n]),
            t.finals().iter().copied().chain([n]),
            transitions,
        )
        .unwrap();
        assert!(!padded.is_real_time());
        let a = compile(&t, &CompileOptions::default()).unwrap().bimachine;
        let b = compile(&padded, &CompileOptions::default()).unwrap().bimachine;
        for u in words_up_to(t.alphabet().len(), 5) {
            if u.is_empty() {
                continue; // the padding state accepts the empty word
            }
            assert_eq!(a.evaluate(&u).unwrap(), b.evaluate(&u).unwrap(), "{u:?}");
        }
    }
}

#[test]
fn tn_bimachine_examples() {
    let b = compile(&make_tn(2).unwrap(), &CompileOptions::default()).unwrap().bimachine;
    assert_eq!(b.evaluate_str("a1a1").unwrap(), Some(MonoidValue::word(vec![0; 4])));
    assert_eq!(b.evaluate_str("a1").unwrap(), None);
    assert_eq!(b.evaluate_str("").unwrap(), None);
    assert_eq!(b.evaluate_str("a2a1a2").unwrap(), Some(MonoidValue::word(vec![0; 6])));
}

#[test]
fn non_functional_input_is_refused() {
    let t = parse_transducer("monoid free:xy\nalphabet a\nstates 2\ninitial 0\nfinal 1\nt 0 a \"x\" 1\nt 0 a \"y\" 1\n")
        .unwrap()
        .transducer;
    assert!(matches!(compile(&t, &CompileOptions::default()), Err(Error::NotFunctional(_))));
}

#[test]
fn state_limit_is_reported() {
    let opts = CompileOptions { max_states: Some(4), ..CompileOptions::default() };
    assert!(matches!(compile(&make_tn(3).unwrap(), &opts), Err(Error::StateLimit { .. })));
}
