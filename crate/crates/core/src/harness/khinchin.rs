//! Counting reduced solutions of `|T^n u_β^b − u_α^t| < φ(n)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::combinat::Letter;
use crate::error::{Error, Result};
use crate::iet::{valid_pairs, Iet, Orbiter, Scalar};
use crate::induction::InductionState;
use crate::triples::{candidate_triples, current_gap, Phi};

/// Solutions `n` found for one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCount {
    pub beta: Letter,
    pub alpha: Letter,
    /// Sorted solutions `1 <= n <= n_max`.
    pub ns: Vec<u64>,
}

/// Per-pair solution lists of one transformation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KhinchinCounts {
    pub n_max: u64,
    pub pairs: Vec<PairCount>,
}

impl KhinchinCounts {
    fn empty<S: Scalar>(t: &Iet<S>, n_max: u64) -> Self {
        let pairs = valid_pairs(t.perm())
            .into_iter()
            .map(|(beta, alpha)| PairCount { beta, alpha, ns: Vec::new() })
            .collect();
        KhinchinCounts { n_max, pairs }
    }

    fn record(&mut self, beta: Letter, alpha: Letter, n: u64) {
        if let Some(p) = self.pairs.iter_mut().find(|p| p.beta == beta && p.alpha == alpha) {
            p.ns.push(n);
        }
    }

    fn finish(mut self) -> Self {
        for p in &mut self.pairs {
            p.ns.sort_unstable();
            p.ns.dedup();
        }
        self
    }

    /// Total number of solutions.
    pub fn total(&self) -> usize {
        self.pairs.iter().map(|p| p.ns.len()).sum()
    }

    /// Number of solutions with `n <= bound`.
    pub fn count_up_to(&self, bound: u64) -> usize {
        self.pairs.iter().map(|p| p.ns.partition_point(|&n| n <= bound)).sum()
    }
}

/// `gap < φ(n) ‖λ‖`, compared exactly against the binary value of `φ(n)`.
fn below_phi<S: Scalar>(gap: &S, phi: f64, norm: &BigRational) -> bool {
    if phi.is_infinite() && phi > 0.0 {
        return true;
    }
    match BigRational::from_float(phi) {
        Some(p) if p > BigRational::from_integer(BigInt::from(0)) => gap.to_rational() < p * norm,
        _ => false,
    }
}

/// Reduced solutions with `1 <= n <= n_max`, found along the induction and confirmed by the orbit.
///
/// Returns `Err(Connection)` when a connection with `n <= n_max` exists, in which case the sample
/// is discarded.
pub fn khinchin_count<S: Scalar>(t: &Iet<S>, phi: &Phi, n_max: u64) -> Result<KhinchinCounts> {
    if !S::EXACT {
        return Err(Error::FloatBackend);
    }
    let mut out = KhinchinCounts::empty(t, n_max);
    let orb = Orbiter::new(t);
    let (ut, ub) = t.singularities();
    let norm = t.norm().to_rational();
    let bound = num_bigint::BigUint::from(n_max);
    let mut state = InductionState::new(t.clone());
    loop {
        for tr in candidate_triples(&state, t.perm()) {
            if tr.n == 0 || tr.n > n_max {
                continue;
            }
            let g = current_gap(&state, tr.beta, tr.alpha);
            if !below_phi(&g, phi.eval(tr.n), &norm) {
                continue;
            }
            let end = orb.forward_n(&ub[tr.beta], tr.n);
            if end == ut[tr.alpha] {
                return Err(Error::Connection);
            }
            if end.abs_diff(&ut[tr.alpha]) == g && orb.reduced_from(&end, &ut[tr.alpha], tr.n)? {
                out.record(tr.beta, tr.alpha, tr.n);
            }
        }
        if state.q().min() > bound {
            break;
        }
        match state.step() {
            Ok(_) => {}
            // The stop reveals a connection, possibly beyond `n_max`; finish by brute force then.
            Err(Error::AlgorithmStopped { .. }) => return khinchin_brute(t, phi, n_max),
            Err(e) => return Err(e),
        }
    }
    Ok(out.finish())
}

/// The same counts by brute force over every `n`.
pub fn khinchin_brute<S: Scalar>(t: &Iet<S>, phi: &Phi, n_max: u64) -> Result<KhinchinCounts> {
    if t.has_connection_up_to(n_max)?.is_some() {
        return Err(Error::Connection);
    }
    let norm = t.norm().to_rational();
    let mut out = KhinchinCounts::empty(t, n_max);
    for (tr, gap) in t.reduced_triples_up_to(n_max)? {
        if tr.n >= 1 && below_phi(&gap, phi.eval(tr.n), &norm) {
            out.record(tr.beta, tr.alpha, tr.n);
        }
    }
    Ok(out.finish())
}

/// [`khinchin_count`] on the bit-exact integer image of a float sample.
pub fn khinchin_count_float(t: &Iet<f64>, phi: &Phi, n_max: u64) -> Result<KhinchinCounts> {
    let exact = t.rationalize();
    match exact.to_i128() {
        Some((ti, _)) => khinchin_count(&ti, phi, n_max),
        None => khinchin_count(&exact.to_integer().0, phi, n_max),
    }
}
