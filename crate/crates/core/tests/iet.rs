mod common;

use common::{iet, perm, q};
use ietk::iet::{random_exact, render_rational, valid_pairs, w_vectors, AnyIet, Iet, IetJson, IetType, Triple};
use ietk::Error;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn singularities_examples() {
    let t = iet("AB/BA", &["1/3", "2/3"]);
    let (ut, ub) = t.singularities();
    assert_eq!((ut[1].clone(), ub[0].clone()), (q("1/3"), q("2/3")));
    assert_eq!((ut[0].clone(), ub[1].clone()), (q("0"), q("0")));
    let t = iet("ABC/CBA", &["1/6", "1/3", "1/2"]);
    let (ut, ub) = t.singularities();
    assert_eq!(ut, vec![q("0"), q("1/6"), q("1/2")]);
    assert_eq!(ub, vec![q("5/6"), q("1/2"), q("0")]);
    assert_eq!(t.singular_points(), vec![q("1/6"), q("1/2"), q("1/2"), q("5/6")]);
}

#[test]
fn evaluate_examples() {
    let t = iet("AB/BA", &["3/8", "5/8"]);
    assert_eq!(t.evaluate(&q("0")).unwrap(), q("5/8"));
    assert_eq!(t.evaluate(&q("5/8")).unwrap(), q("2/8"));
    assert_eq!(t.evaluate(&q("3/8")).unwrap(), q("0"));
    assert_eq!(t.evaluate(&q("1")), Err(Error::OutOfDomain));
    assert_eq!(t.evaluate(&q("-1/8")), Err(Error::OutOfDomain));
    assert_eq!(t.inverse(&q("5/8")).unwrap(), q("0"));
}

#[test]
fn type_examples() {
    assert_eq!(iet("AB/BA", &["3/8", "5/8"]).iet_type().unwrap(), IetType::Top);
    assert_eq!(iet("AB/BA", &["1/2", "1/2"]).iet_type().unwrap(), IetType::None);
    assert_eq!(iet("AB/BA", &["5/8", "3/8"]).iet_type().unwrap(), IetType::Bottom);
    let f = Iet::new(perm("AB/BA"), vec![0.5, 0.5 + 1e-15]).unwrap();
    assert!(matches!(f.iet_type(), Err(Error::PrecisionExhausted { .. })));
}

#[test]
fn connection_examples() {
    let rot = iet("AB/BA", &["3/8", "5/8"]);
    assert_eq!(rot.has_connection_up_to(100).unwrap(), Some(Triple { beta: 0, alpha: 1, n: 6 }));
    assert_eq!(rot.has_connection_up_to(5).unwrap(), None);
    let half = iet("AB/BA", &["1/2", "1/2"]);
    assert_eq!(half.has_connection_up_to(10).unwrap().map(|c| c.n), Some(0));
    let fib = iet("AB/BA", &["6765/17711", "10946/17711"]);
    assert_eq!(fib.has_connection_up_to(20).unwrap(), None);
    let float = Iet::new(perm("AB/BA"), vec![0.3, 0.7]).unwrap();
    assert_eq!(float.has_connection_up_to(3), Err(Error::FloatBackend));
    assert_eq!(float.is_reduced_triple(&Triple { beta: 0, alpha: 1, n: 1 }), Err(Error::FloatBackend));
}

#[test]
fn reduced_triple_examples() {
    let rot = iet("AB/BA", &["3/8", "5/8"]);
    let tr = Triple { beta: 0, alpha: 1, n: 1 };
    assert!(rot.is_reduced_triple(&tr).unwrap());
    assert_eq!(rot.triple_gap(&tr).unwrap(), q("1/8"));
    assert_eq!(rot.is_reduced_triple(&Triple { beta: 0, alpha: 1, n: 6 }), Err(Error::Connection));
    // n = 0 with the singularity 1/2 strictly between u_B^b = 3/8 and u_C^t = 5/8.
    let t = iet("ABC/CBA", &["1/2", "1/8", "3/8"]);
    let (ut, ub) = t.singularities();
    assert_eq!((ub[1].clone(), ut[2].clone()), (q("3/8"), q("5/8")));
    assert!(!t.is_reduced_triple(&Triple { beta: 1, alpha: 2, n: 0 }).unwrap());
    assert!(matches!(t.is_reduced_triple(&Triple { beta: 2, alpha: 1, n: 0 }), Err(Error::InvalidPair(_))));
}

#[test]
fn w_vector_examples() {
    let (wb, wt, w) = w_vectors(&perm("AB/BA"), 0, 1).unwrap();
    assert_eq!((wb, wt, w), (vec![0, 1], vec![1, 0], vec![-1, 1]));
    let (wb, wt, w) = w_vectors(&perm("ABC/CAB"), 1, 1).unwrap();
    assert_eq!((wb, wt, w), (vec![1, 0, 1], vec![1, 0, 0], vec![0, 0, 1]));
    let (_, _, w) = w_vectors(&perm("ABC/CBA"), 1, 1).unwrap();
    assert_eq!(w, vec![-1, 0, 1]);
    assert!(w_vectors(&perm("AB/BA"), 1, 1).is_err());
}

#[test]
fn valid_pairs_follow_positions() {
    let p = perm("ABCD/DCBA");
    let pairs = valid_pairs(&p);
    assert_eq!(pairs.len(), 9);
    assert!(pairs.iter().all(|&(b, a)| p.bottom_pos(b) > 1 && p.top_pos(a) > 1));
}

#[test]
fn json_roundtrip() {
    let t = iet("ABC/CBA", &["1/6", "1/3", "1/2"]);
    let j = t.to_json();
    assert_eq!(j.lengths, vec!["1/6", "1/3", "1/2"]);
    let text = serde_json::to_string(&j).unwrap();
    let back: IetJson = serde_json::from_str(&text).unwrap();
    match AnyIet::from_json(&back).unwrap() {
        AnyIet::Exact(u) => assert_eq!(u.lengths(), t.lengths()),
        AnyIet::Float(_) => panic!("exact expected"),
    }
    let f = IetJson { perm: "AB/BA".into(), lengths: vec!["0.25".into(), "0.75".into()], backend: "float".into() };
    assert_eq!(AnyIet::from_json(&f).unwrap().exact().lengths(), &[q("1/4"), q("3/4")]);
}

#[test]
fn integer_images_scale_lengths() {
    let t = iet("ABC/CBA", &["1/6", "1/4", "7/12"]);
    let (ti, den) = t.to_integer();
    assert_eq!(den, BigInt::from(12));
    assert_eq!(ti.lengths(), &[BigInt::from(2), BigInt::from(3), BigInt::from(7)]);
    let (small, _) = t.to_i128().unwrap();
    assert_eq!(small.lengths(), &[2, 3, 7]);
    assert_eq!(render_rational(&t.normalized().norm()), "1");
}

/// Brute-force oracle for `T^n u_β^b` using plain rational arithmetic on the rows.
fn orbit_oracle(t: &Iet<BigRational>, mut x: BigRational, n: u64) -> BigRational {
    for _ in 0..n {
        let (ut, ub) = t.singularities();
        let l = (0..t.d())
            .filter(|&l| ut[l] <= x)
            .max_by(|&a, &b| ut[a].cmp(&ut[b]))
            .unwrap();
        x = x - &ut[l] + &ub[l];
    }
    x
}

fn sample(seed: u64, which: usize) -> Iet<BigRational> {
    let p = perm(["AB/BA", "ABC/CBA", "ABCD/DCBA", "ABCD/DCAB", "ABCDE/EDCBA"][which]);
    random_exact(&p, 24, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn w_pairing_gives_singularity_difference(seed in any::<u64>(), which in 0usize..5) {
        let t = sample(seed, which);
        let (ut, ub) = t.singularities();
        for (b, a) in valid_pairs(t.perm()) {
            let (_, _, w) = w_vectors(t.perm(), b, a).unwrap();
            let dot: BigRational = w.iter().zip(t.lengths()).map(|(&c, l)| l * BigRational::from_integer(c.into())).sum();
            prop_assert_eq!(dot, &ub[b] - &ut[a]);
        }
    }

    #[test]
    fn inverse_undoes_evaluate(seed in any::<u64>(), which in 0usize..5, num in 0u32..1000) {
        let t = sample(seed, which);
        let x = t.norm() * BigRational::new(num.into(), 1000.into());
        let y = t.evaluate(&x).unwrap();
        prop_assert_eq!(t.inverse(&y).unwrap(), x.clone());
        let mut z = x.clone();
        for _ in 0..20 { z = t.evaluate(&z).unwrap(); }
        for _ in 0..20 { z = t.inverse(&z).unwrap(); }
        prop_assert_eq!(z, x);
    }

    #[test]
    fn gaps_match_orbit_oracle(seed in any::<u64>(), which in 0usize..5, n in 0u64..40) {
        let t = sample(seed, which);
        let (ut, ub) = t.singularities();
        for (b, a) in valid_pairs(t.perm()) {
            let end = orbit_oracle(&t, ub[b].clone(), n);
            let gap = t.triple_gap(&Triple { beta: b, alpha: a, n }).unwrap();
            prop_assert_eq!(gap, (end - &ut[a]).abs_sub_oracle());
        }
    }
}

trait AbsOracle {
    fn abs_sub_oracle(self) -> Self;
}

impl AbsOracle for BigRational {
    fn abs_sub_oracle(self) -> Self {
        if self < BigRational::from_integer(0.into()) {
            -self
        } else {
            self
        }
    }
}
