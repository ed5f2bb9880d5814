mod common;

use common::{perm, q};
use ietk::combinat::{Kind, Path};
use ietk::matrices::{conditional_probability, simplex_volume, QVector, VisitMatrix};
use ietk::Error;
use num_bigint::{BigInt, BigUint};
use num_traits::One;
use proptest::prelude::*;

fn m(rows: &[&[u32]]) -> Vec<Vec<BigUint>> {
    rows.iter().map(|r| r.iter().map(|&x| BigUint::from(x)).collect()).collect()
}

fn entries(b: &VisitMatrix) -> Vec<Vec<BigUint>> {
    (0..b.d()).map(|r| b.row(r).to_vec()).collect()
}

fn qv(v: &[u32]) -> QVector {
    QVector(v.iter().map(|&x| BigUint::from(x)).collect())
}

#[test]
fn arrow_matrix_adds_winner_column_to_loser_row() {
    let p = perm("ABC/CBA");
    let a = Path::parse(&p, "t").unwrap().arrows()[0].clone();
    assert_eq!((a.winner, a.loser), (2, 0));
    assert_eq!(entries(&VisitMatrix::of_arrow(&a)), m(&[&[1, 0, 1], &[0, 1, 0], &[0, 0, 1]]));
    assert_eq!(QVector::of_path(&Path::parse(&p, "t").unwrap()), qv(&[2, 1, 1]));
    assert_eq!(entries(&VisitMatrix::of_path(&Path::trivial(p))), m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]));
}

#[test]
fn path_matrix_examples() {
    let ab = perm("AB/BA");
    let tb = Path::parse(&ab, "tb").unwrap();
    assert_eq!(entries(&VisitMatrix::of_path(&tb)), m(&[&[1, 1], &[1, 2]]));
    assert_eq!(QVector::of_path(&tb), qv(&[2, 3]));
    let t = Path::parse(&ab, "t").unwrap();
    let b = Path::parse(t.end(), "b").unwrap();
    assert_eq!(VisitMatrix::of_path(&t.concat(&b).unwrap()), VisitMatrix::of_path(&b).mul(&VisitMatrix::of_path(&t)));
    assert_eq!(QVector::of_path(&Path::trivial(ab)), qv(&[1, 1]));
}

#[test]
fn volume_examples() {
    let ab = perm("AB/BA");
    assert_eq!(simplex_volume(&Path::trivial(ab.clone())), q("1"));
    assert_eq!(simplex_volume(&Path::parse(&ab, "t").unwrap()), q("1/2"));
    assert_eq!(simplex_volume(&Path::parse(&perm("ABCD/DCBA"), "b").unwrap()), q("1/2"));
    assert_eq!(simplex_volume(&Path::parse(&ab, "tb").unwrap()), q("1/6"));
}

#[test]
fn conditional_probability_examples() {
    let ab = perm("AB/BA");
    let t = Path::parse(&ab, "t").unwrap();
    let b = Path::parse(t.end(), "b").unwrap();
    assert_eq!(conditional_probability(&t, &b).unwrap(), q("1/3"));
    assert_eq!(conditional_probability(&t, &Path::trivial(t.end().clone())).unwrap(), q("1"));
    assert_eq!(conditional_probability(&Path::trivial(ab.clone()), &b).unwrap(), simplex_volume(&b));
    let abc = perm("ABC/CBA");
    let other = Path::parse(&abc.rauzy_op(Kind::Bottom).unwrap(), "t").unwrap();
    assert_eq!(conditional_probability(&Path::parse(&abc, "t").unwrap(), &other), Err(Error::NotComposable));
}

#[test]
fn transpose_inverse_recovers_lengths() {
    let p = perm("ABCD/DCBA");
    let path = Path::parse(&p, "tbbtbtt").unwrap();
    let b = VisitMatrix::of_path(&path);
    let v = vec![q("1/3"), q("2/7"), q("5/11"), q("1/13")];
    let w = b.transpose_apply(&v);
    assert_eq!(b.transpose_solve(&w).unwrap(), v);
}

fn walk() -> impl Strategy<Value = (usize, Vec<Kind>, Vec<Kind>)> {
    let ks = || prop::collection::vec(prop_oneof![Just(Kind::Top), Just(Kind::Bottom)], 0..12);
    (0usize..4, ks(), ks())
}

const STARTS: [&str; 4] = ["AB/BA", "ABC/CBA", "ABCD/DCBA", "ABCDE/EDCBA"];

proptest! {
    #[test]
    fn determinant_is_one((s, ks, _) in walk()) {
        let p = Path::from_kinds(&perm(STARTS[s]), &ks).unwrap();
        prop_assert_eq!(VisitMatrix::of_path(&p).det(), BigInt::one());
    }

    #[test]
    fn q_composes_and_grows((s, k1, k2) in walk()) {
        let nu = Path::from_kinds(&perm(STARTS[s]), &k1).unwrap();
        let gamma = Path::from_kinds(nu.end(), &k2).unwrap();
        let qn = QVector::of_path(&nu);
        let qng = QVector::of_path(&nu.concat(&gamma).unwrap());
        prop_assert_eq!(&VisitMatrix::of_path(&gamma).apply(&qn.0), &qng.0);
        prop_assert!(qn.0.iter().zip(&qng.0).all(|(a, b)| a <= b));
        prop_assert_eq!(
            conditional_probability(&nu, &gamma).unwrap(),
            simplex_volume(&nu.concat(&gamma).unwrap()) / simplex_volume(&nu)
        );
    }

    #[test]
    fn positive_suffix_bounds_ratios((s, k1, _) in walk(), extra in 0usize..6) {
        // A positive path, repeated from its own end, then appended to an arbitrary prefix.
        let start = perm(STARTS[s]);
        let gamma = Path::from_kinds(&start, &k1).unwrap();
        let mut eta = Path::trivial(gamma.end().clone());
        let mut kinds = [Kind::Top, Kind::Bottom].into_iter().cycle().skip(extra);
        while !eta.is_positive() {
            eta.push(kinds.next().unwrap()).unwrap();
        }
        let full = gamma.concat(&eta).unwrap();
        let mm = VisitMatrix::of_path(&eta).max_norm();
        let qf = QVector::of_path(&full);
        for a in &qf.0 {
            for b in &qf.0 {
                prop_assert!(a <= &(&mm * b));
            }
        }
    }
}
