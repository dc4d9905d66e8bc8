//! Seeded generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use bimc::fsa::{default_path_bound, enumerate_outputs, enumerate_outputs_capped, Symbol};
use bimc::{InputAlphabet, MonoidDescriptor, MonoidValue, Transducer, Transition};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const OUTPUT_SYMBOLS: &str = "xy";

pub fn free() -> MonoidDescriptor {
    MonoidDescriptor::free(OUTPUT_SYMBOLS).unwrap()
}

pub fn word(s: &str) -> MonoidValue {
    free().word_from_str(s).unwrap()
}

pub fn random_word(rng: &mut ChaCha8Rng, max_len: usize) -> Vec<u32> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(0..OUTPUT_SYMBOLS.len() as u32)).collect()
}

/// All words over `symbols` letters with length `0..=max_len`, shortest first.
pub fn words_up_to(symbols: usize, max_len: usize) -> Vec<Vec<Symbol>> {
    bimc::cli::words_up_to(symbols, max_len)
}

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_states: usize,
    pub max_symbols: usize,
    pub max_output: usize,
    pub eps: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            max_states: 4,
            max_symbols: 3,
            max_output: 2,
            eps: false,
        }
    }
}

fn alphabet(k: usize) -> InputAlphabet {
    InputAlphabet::new(["a", "b", "c", "d"].into_iter().take(k)).unwrap()
}

/// An unconstrained random transducer with free outputs over `xy`.
pub fn random_transducer(rng: &mut ChaCha8Rng, shape: Shape) -> Transducer {
    let n = rng.gen_range(1..=shape.max_states);
    let k = rng.gen_range(1..=shape.max_symbols);
    let m = rng.gen_range(0..=2 * n * k);
    let mut transitions = Vec::new();
    for _ in 0..m {
        let input = if shape.eps && rng.gen_bool(0.25) {
            None
        } else {
            Some(rng.gen_range(0..k))
        };
        let output = MonoidValue::word(random_word(rng, shape.max_output));
        transitions.push(Transition {
            source: rng.gen_range(0..n),
            input,
            output,
            target: rng.gen_range(0..n),
        });
    }
    let initial: Vec<usize> = (0..rng.gen_range(1..=2.min(n))).map(|_| rng.gen_range(0..n)).collect();
    let finals: Vec<usize> = (0..rng.gen_range(1..=n)).map(|_| rng.gen_range(0..n)).collect();
    let mut t = Transducer::new(alphabet(k), free(), n, initial, finals, transitions).unwrap();
    t.dedup_transitions();
    t
}

/// A transducer that is functional by construction: it computes the
/// morphism `h` (one output word per input symbol), but states may hold back
/// a pending suffix `d(q)` that later transitions release. Initial and final
/// states hold nothing, so every successful path telescopes to `h(u)`.
pub fn random_delayed_morphism(rng: &mut ChaCha8Rng, shape: Shape) -> Transducer {
    let n = rng.gen_range(2..=shape.max_states.max(2));
    let k = rng.gen_range(1..=shape.max_symbols);
    let h: Vec<Vec<u32>> = (0..k).map(|_| random_word(rng, 2)).collect();
    let initial: Vec<usize> = vec![0];
    let finals: Vec<usize> = {
        let mut f = vec![n - 1];
        if rng.gen_bool(0.4) {
            f.push(rng.gen_range(0..n));
        }
        f
    };
    let pinned = |q: usize| initial.contains(&q) || finals.contains(&q);
    let pending: Vec<Vec<u32>> = (0..n)
        .map(|q| if pinned(q) { Vec::new() } else { random_word(rng, 2) })
        .collect();
    let mut transitions = Vec::new();
    for _ in 0..rng.gen_range(n..=3 * n * k) {
        let (p, q) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let input = if shape.eps && rng.gen_bool(0.25) {
            None
        } else {
            Some(rng.gen_range(0..k))
        };
        let mut released = pending[p].clone();
        if let Some(a) = input {
            released.extend(&h[a]);
        }
        let held = &pending[q];
        if released.len() < held.len() || !released.ends_with(held) {
            continue;
        }
        released.truncate(released.len() - held.len());
        if released.len() > shape.max_output {
            continue;
        }
        transitions.push(Transition {
            source: p,
            input,
            output: MonoidValue::word(released),
            target: q,
        });
    }
    transitions.shuffle(rng);
    let mut t = Transducer::new(alphabet(k), free(), n, initial, finals, transitions).unwrap();
    t.dedup_transitions();
    t
}

/// Outputs for `u` found by exhaustive bounded path search.
pub fn oracle_outputs(t: &Transducer, u: &[Symbol]) -> BTreeSet<MonoidValue> {
    enumerate_outputs(t, u, default_path_bound(t, u.len()))
}

/// Whether some word up to `max_len` has two distinct outputs.
pub fn oracle_conflict(t: &Transducer, max_len: usize) -> Option<Vec<Symbol>> {
    words_up_to(t.alphabet().len(), max_len).into_iter().find(|u| {
        enumerate_outputs_capped(t, u, default_path_bound(t, u.len()), 2, 200_000).len() > 1
    })
}

/// A functional transducer: half built by construction, half by rejection
/// sampling of unconstrained ones. Sampled transducers must pass both the
/// bounded oracle and the decision procedure, since a conflict may need a
/// longer word than the oracle explores.
pub fn random_functional(rng: &mut ChaCha8Rng, shape: Shape, oracle_len: usize) -> Transducer {
    if rng.gen_bool(0.5) {
        return random_delayed_morphism(rng, shape);
    }
    loop {
        let t = random_transducer(rng, shape);
        if t.transitions().is_empty() {
            continue;
        }
        if oracle_conflict(&t, oracle_len).is_none()
            && bimc::functionality::test_functionality(&t).unwrap().is_functional()
        {
            return t;
        }
    }
}
