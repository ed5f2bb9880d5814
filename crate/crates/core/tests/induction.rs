mod common;

use common::{euclid_quotients, iet, perm, q};
use ietk::combinat::{Kind, Path};
use ietk::iet::{random_exact, Iet, Orbiter};
use ietk::induction::{iterate, normalized_step, path_of, trace, zorich_step, Mode};
use ietk::matrices::{QVector, VisitMatrix};
use ietk::{Error, InductionState};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn big(v: &[u32]) -> Vec<BigUint> {
    v.iter().map(|&x| BigUint::from(x)).collect()
}

#[test]
fn rauzy_step_examples() {
    let mut s = InductionState::new(iet("AB/BA", &["3/8", "5/8"]));
    assert_eq!(s.step().unwrap(), Kind::Top);
    assert_eq!(s.current().lengths(), &[q("3/8"), q("2/8")]);
    assert_eq!(s.ls(), big(&[1, 0]).as_slice());
    assert_eq!(s.q().0, big(&[2, 1]));
    assert_eq!(s.step().unwrap(), Kind::Bottom);
    assert_eq!(s.h(1), &BigUint::from(2u32));
    assert_eq!(s.q().0, big(&[2, 3]));
    for x in 0..2 {
        assert_eq!(s.l(x) + s.h(x) + 1u32, s.q().0[x]);
    }
    let mut stop = InductionState::new(iet("AB/BA", &["1/2", "1/2"]));
    assert_eq!(stop.step(), Err(Error::AlgorithmStopped { step: 0 }));
}

#[test]
fn iterate_examples() {
    let t = iet("AB/BA", &["3/8", "5/8"]);
    let s0 = iterate(&t, 0).unwrap();
    assert_eq!(s0.b(), &VisitMatrix::identity(2));
    assert_eq!(s0.q(), &QVector::ones(2));
    let s2 = iterate(&t, 2).unwrap();
    let b = VisitMatrix::of_path(s2.path());
    assert_eq!(s2.b(), &b);
    assert_eq!(b.transpose_solve(t.lengths()).unwrap(), s2.current().lengths());
    assert_eq!(path_of(&t, 0).unwrap().len(), 0);
    assert_eq!(path_of(&t, 2).unwrap().kind_string(), "tb");
    assert!(matches!(iterate(&iet("AB/BA", &["1/3", "2/3"]), 5), Err(Error::AlgorithmStopped { .. })));
}

#[test]
fn normalized_and_zorich_examples() {
    let t = iet("AB/BA", &["3/8", "5/8"]);
    let n = normalized_step(&t).unwrap();
    assert_eq!(n.lengths(), &[q("3/5"), q("2/5")]);
    assert_eq!(n.norm(), BigRational::one());
    let (_, count) = zorich_step(&t).unwrap();
    assert_eq!(count, 1);
    let plain = trace(&t, 3, Mode::Plain).0;
    let normed = trace(&t, 3, Mode::Normalized).0;
    let kinds = |v: &[ietk::induction::TraceStep]| v.iter().map(|s| s.kind).collect::<String>();
    assert_eq!(kinds(&plain), kinds(&normed));
}

/// Zorich counts of the rotation with lengths `(a, b)` against the subtractive Euclidean algorithm.
fn zorich_counts(a: u64, b: u64) -> Vec<usize> {
    let mut t: Iet<BigRational> = iet("AB/BA", &[&a.to_string(), &b.to_string()]);
    let mut out = Vec::new();
    loop {
        match zorich_step(&t) {
            Ok((next, n)) => {
                assert!(n >= 1);
                out.push(n);
                t = next;
            }
            Err(Error::AlgorithmStopped { .. }) => return out,
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn zorich_counts_are_partial_quotients() {
    for (a, b) in [(3, 5), (5, 3), (13, 21), (1, 10), (355, 113), (1000, 999)] {
        let quot = euclid_quotients(a, b);
        let counts = zorich_counts(a, b);
        let expect: Vec<usize> = quot[..quot.len() - 1].iter().map(|&x| x as usize).collect();
        assert_eq!(counts, expect, "{a}/{b}");
    }
}

#[test]
fn barycenter_of_cone_follows_path() {
    let p = perm("ABCD/DCBA");
    for path in Path::enumerate(&p, 6) {
        let b = VisitMatrix::of_path(&path);
        let lengths = b.transpose_apply(&vec![BigRational::one(); 4]);
        let t = Iet::new(p.clone(), lengths).unwrap();
        assert_eq!(path_of(&t, path.len()).unwrap().kinds(), path.kinds());
    }
}

fn sample(seed: u64, d: usize, bits: u32) -> Iet<BigRational> {
    let p = perm(["AB/BA", "ABC/CBA", "ABCD/DCBA", "ABCDE/EDCBA"][d - 2]);
    random_exact(&p, bits, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn lengths_equal_pulled_back_data(seed in any::<u64>(), d in 2usize..6, r in 0usize..30) {
        let t = sample(seed, d, 64);
        let mut s = InductionState::new(t.clone());
        for _ in 0..r {
            if s.step().is_err() { break; }
            prop_assert_eq!(s.b().transpose_apply(s.current().lengths()), t.lengths().to_vec());
            for x in 0..d {
                prop_assert_eq!(s.l(x) + s.h(x) + 1u32, s.q().0[x].clone());
            }
        }
    }

    #[test]
    fn counters_transport_singularities(seed in any::<u64>(), d in 2usize..6, r in 0usize..15) {
        let t = sample(seed, d, 48);
        let orb = Orbiter::new(&t);
        let (ut, ub) = t.singularities();
        let mut s = InductionState::new(t.clone());
        for _ in 0..r {
            if s.step().is_err() { break; }
        }
        let (rt, rb) = s.current().singularities();
        for x in 0..d {
            let lx = u64::try_from(s.l(x)).unwrap();
            let hx = u64::try_from(s.h(x)).unwrap();
            prop_assert_eq!(&orb.forward_n(&ub[x], lx), &rb[x]);
            let mut y = ut[x].clone();
            for _ in 0..hx { y = orb.backward(&y); }
            prop_assert_eq!(&y, &rt[x]);
        }
    }

    #[test]
    fn induced_map_is_first_return(seed in any::<u64>(), d in 2usize..6, r in 1usize..12, num in 0u32..997) {
        let t = sample(seed, d, 48);
        let mut s = InductionState::new(t.clone());
        for _ in 0..r {
            if s.step().is_err() { break; }
        }
        let cur = s.current().clone();
        let x = cur.norm() * BigRational::new(num.into(), 997.into());
        let (ut, _) = cur.singularities();
        let letter = (0..d).filter(|&l| ut[l] <= x).max_by(|&a, &b| ut[a].cmp(&ut[b])).unwrap();
        let ret = u64::try_from(&s.q().0[letter]).unwrap();
        let orb = Orbiter::new(&t);
        prop_assert_eq!(orb.forward_n(&x, ret), cur.evaluate(&x).unwrap());
        let mut y = x.clone();
        for _ in 1..ret {
            y = orb.forward(&y);
            prop_assert!(y >= cur.norm());
        }
    }

    #[test]
    fn paths_extend(seed in any::<u64>(), d in 2usize..6, r in 0usize..20) {
        let t = sample(seed, d, 48);
        if let (Ok(a), Ok(b)) = (path_of(&t, r), path_of(&t, r + 1)) {
            prop_assert!(a.is_prefix_of(&b));
        }
    }

    #[test]
    fn stop_implies_connection(seed in any::<u64>(), d in 2usize..5) {
        let t = sample(seed, d, 6);
        let mut s = InductionState::new(t.clone());
        let err = loop {
            if let Err(e) = s.step() { break e; }
        };
        let stopped = matches!(err, Error::AlgorithmStopped { .. });
        prop_assert!(stopped);
        let horizon = u64::try_from(s.q().norm()).unwrap();
        prop_assert!(t.has_connection_up_to(horizon).unwrap().is_some());
    }
}
