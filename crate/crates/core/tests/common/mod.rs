//! Helpers shared by the integration tests.
#![allow(dead_code)]

use ietk::iet::{parse_rational, Iet};
use ietk::Permutation;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub fn q(s: &str) -> BigRational {
    parse_rational(s).unwrap()
}

pub fn perm(s: &str) -> Permutation {
    Permutation::parse(s).unwrap()
}

pub fn iet(p: &str, lengths: &[&str]) -> Iet<BigRational> {
    Iet::new(perm(p), lengths.iter().map(|s| q(s)).collect()).unwrap()
}

/// Quotients of the subtractive Euclidean algorithm on `(a, b)`, larger over smaller first.
pub fn euclid_quotients(a: u64, b: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.max(b), a.min(b));
    let mut out = Vec::new();
    while y != 0 {
        out.push(x / y);
        (x, y) = (y, x % y);
    }
    out
}

/// Intermediate convergent denominators `q_{k-2} + j q_{k-1}` (`1 <= j <= a_k`) of `num/den`, up to `bound`.
pub fn intermediate_denominators(num: impl Into<BigInt>, den: impl Into<BigInt>, bound: u64) -> Vec<u64> {
    let (mut num, mut den): (BigInt, BigInt) = (num.into(), den.into());
    let (mut q2, mut q1) = (0u64, 1u64);
    let mut out = vec![1];
    while !num.is_zero() {
        let a = u64::try_from(&den / &num).unwrap_or(u64::MAX);
        for j in 1..=a {
            let m = q2 + j * q1;
            if m > bound {
                return out;
            }
            out.push(m);
        }
        (q2, q1) = (q1, q2 + a * q1);
        let r = &den % &num;
        (num, den) = (r, num);
    }
    out
}

/// All paths of length `<= max_len` from `start` whose arrows are won by colored letters.
pub fn colored_paths(start: &Permutation, colors: &[bool], max_len: usize) -> Vec<ietk::Path> {
    let mut out = vec![ietk::Path::trivial(start.clone())];
    let mut lo = 0;
    for _ in 0..max_len {
        let hi = out.len();
        for i in lo..hi {
            for k in ietk::Kind::BOTH {
                if colors[out[i].end().winner_loser(k).0] {
                    let mut p = out[i].clone();
                    p.push(k).unwrap();
                    out.push(p);
                }
            }
        }
        lo = hi;
    }
    out
}
