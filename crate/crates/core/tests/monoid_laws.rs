use bimc::{MgeMonoid, MonoidDescriptor, MonoidValue};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn free() -> MonoidDescriptor {
    MonoidDescriptor::free("xyz").unwrap()
}

fn word() -> impl Strategy<Value = MonoidValue> {
    prop::collection::vec(0u32..3, 0..5).prop_map(MonoidValue::word)
}

fn rational() -> impl Strategy<Value = MonoidValue> {
    (0i64..20, 1i64..6).prop_map(|(n, d)| MonoidValue::Rational(BigRational::new(BigInt::from(n), BigInt::from(d))))
}

fn integer() -> impl Strategy<Value = MonoidValue> {
    (-50i64..50).prop_map(MonoidValue::integer)
}

fn product() -> impl Strategy<Value = MonoidValue> {
    (word(), rational()).prop_map(|(a, b)| MonoidValue::pair(a, b))
}

fn product_monoid() -> MonoidDescriptor {
    MonoidDescriptor::product(free(), MonoidDescriptor::NonNegRational)
}

/// Every small word, for exhaustive equalizer search.
fn small_words(max: usize) -> Vec<MonoidValue> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for s in 0..3u32 {
                let mut v: Vec<u32> = w.clone();
                v.push(s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.into_iter().map(MonoidValue::word).collect()
}

fn laws(m: &MonoidDescriptor, a: &MonoidValue, b: &MonoidValue, c: &MonoidValue) -> Result<(), TestCaseError> {
    let ab_c = m.op(&m.op(a, b).unwrap(), c).unwrap();
    let a_bc = m.op(a, &m.op(b, c).unwrap()).unwrap();
    prop_assert_eq!(ab_c, a_bc);
    prop_assert_eq!(&m.op(a, &m.unit()).unwrap(), a);
    prop_assert_eq!(&m.op(&m.unit(), a).unwrap(), a);
    if a != b {
        prop_assert_ne!(m.op(c, a).unwrap(), m.op(c, b).unwrap());
        prop_assert_ne!(m.op(a, c).unwrap(), m.op(b, c).unwrap());
    }
    // solve_right inverts left multiplication
    let ac = m.op(a, c).unwrap();
    prop_assert_eq!(m.solve_right(a, &ac).unwrap(), Some(c.clone()));
    Ok(())
}

fn eta_is_equalizer(m: &MonoidDescriptor, a: &MonoidValue, b: &MonoidValue, c: &MonoidValue) -> Result<(), TestCaseError> {
    if let Some((x1, x2)) = m.eta(a, b).unwrap() {
        prop_assert_eq!(m.op(a, &x1).unwrap(), m.op(b, &x2).unwrap());
        let ys = [m.op(&x1, c).unwrap(), m.op(&x2, c).unwrap()];
        prop_assert!(m.is_instance(&ys, &[x1, x2]).unwrap());
    }
    if a == b {
        prop_assert_eq!(m.eta(a, b).unwrap(), Some((m.unit(), m.unit())));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn free_monoid_laws(a in word(), b in word(), c in word()) {
        laws(&free(), &a, &b, &c)?;
        eta_is_equalizer(&free(), &a, &b, &c)?;
    }

    #[test]
    fn rational_monoid_laws(a in rational(), b in rational(), c in rational()) {
        laws(&MonoidDescriptor::NonNegRational, &a, &b, &c)?;
        eta_is_equalizer(&MonoidDescriptor::NonNegRational, &a, &b, &c)?;
    }

    #[test]
    fn integer_group_laws(a in integer(), b in integer(), c in integer()) {
        let m = MonoidDescriptor::IntegerGroup;
        laws(&m, &a, &b, &c)?;
        eta_is_equalizer(&m, &a, &b, &c)?;
        let inv = m.inverse(&a).unwrap().unwrap();
        prop_assert_eq!(m.op(&a, &inv).unwrap(), m.unit());
    }

    #[test]
    fn product_monoid_laws(a in product(), b in product(), c in product()) {
        laws(&product_monoid(), &a, &b, &c)?;
        eta_is_equalizer(&product_monoid(), &a, &b, &c)?;
    }

    /// Every equalizer found by brute force is an instance of `eta`, and
    /// `eta` is absent only if brute force finds nothing.
    #[test]
    fn eta_is_most_general_over_words(a in prop::collection::vec(0u32..3, 0..3), b in prop::collection::vec(0u32..3, 0..3)) {
        let m = free();
        let (a, b) = (MonoidValue::word(a), MonoidValue::word(b));
        let small = small_words(3);
        let mut found = Vec::new();
        for y1 in &small {
            for y2 in &small {
                if m.op(&a, y1).unwrap() == m.op(&b, y2).unwrap() {
                    found.push([y1.clone(), y2.clone()]);
                }
            }
        }
        match m.eta(&a, &b).unwrap() {
            Some((x1, x2)) => {
                for ys in &found {
                    prop_assert!(m.is_instance(ys, &[x1.clone(), x2.clone()]).unwrap());
                }
            }
            None => prop_assert!(found.is_empty()),
        }
    }

    #[test]
    fn product_eta_is_componentwise(a in product(), b in product()) {
        let m = product_monoid();
        let split = |v: &MonoidValue| match v {
            MonoidValue::Pair(l, r) => ((**l).clone(), (**r).clone()),
            other => panic!("not a pair: {other:?}"),
        };
        let ((a1, a2), (b1, b2)) = (split(&a), split(&b));
        let left = free().eta(&a1, &b1).unwrap();
        let right = MonoidDescriptor::NonNegRational.eta(&a2, &b2).unwrap();
        let expected = left.zip(right).map(|((x1, x2), (y1, y2))| {
            (MonoidValue::pair(x1, y1), MonoidValue::pair(x2, y2))
        });
        prop_assert_eq!(m.eta(&a, &b).unwrap(), expected);
    }

    /// Accumulating the chain of pairwise mges gives the tuple mge.
    #[test]
    fn gamma_n_matches_mu_n(base in prop::collection::vec(0u32..3, 0..6), cuts in prop::collection::vec(0usize..7, 1..6)) {
        let m = free();
        let tuple: Vec<MonoidValue> = cuts.iter().map(|&k| MonoidValue::word(base[..k.min(base.len())].to_vec())).collect();
        let mu = m.mu_n(&tuple).unwrap().expect("prefixes of one word are equalizable");
        prop_assert!(m.is_equalizer(&tuple, &mu).unwrap());
        let chain: Vec<_> = tuple.windows(2).map(|w| m.eta(&w[0], &w[1]).unwrap().unwrap()).collect();
        prop_assert_eq!(m.gamma_n(&chain).unwrap(), mu);
    }

    #[test]
    fn rational_gamma_n_matches_mu_n(tuple in prop::collection::vec(rational(), 1..6)) {
        let m = MonoidDescriptor::NonNegRational;
        let mu = m.mu_n(&tuple).unwrap().unwrap();
        prop_assert!(m.is_equalizer(&tuple, &mu).unwrap());
        let chain: Vec<_> = tuple.windows(2).map(|w| m.eta(&w[0], &w[1]).unwrap().unwrap()).collect();
        prop_assert_eq!(m.gamma_n(&chain).unwrap(), mu);
    }
}

#[test]
fn non_prefix_words_are_not_equalizable() {
    let m = free();
    let v = |s: &str| m.word_from_str(s).unwrap();
    assert_eq!(m.eta(&v("xy"), &v("yx")).unwrap(), None);
    assert_eq!(m.mu_n(&[v("x"), v("xy"), v("y")]).unwrap(), None);
}

#[test]
fn rational_mge_lifts_the_smaller_value() {
    let m = MonoidDescriptor::NonNegRational;
    let (a, b) = (MonoidValue::rational(1, 2), MonoidValue::rational(3, 4));
    assert_eq!(m.eta(&a, &b).unwrap(), Some((MonoidValue::rational(1, 4), MonoidValue::rational(0, 1))));
}
