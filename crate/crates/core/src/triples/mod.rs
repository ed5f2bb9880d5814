//! Reduced triples: detection by the induction, properties A and B, reference paths,
//! production of reduced triples, first returns and shrinking targets.

mod liouville;
mod properties;
mod targets;

pub use liouville::{liouville_builder, psi_sequence, Certificate, LiouvilleResult, Phi};
pub use properties::{
    build_reference_path, find_reference_pair, property_a_search, property_b_search, PairKind, PropertyB,
    ReferencePath,
};
pub use targets::{enumerate_targets, enumerate_targets_b, TargetFamily, TargetKind};

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use serde::Serialize;

use crate::combinat::{Kind, Letter, Path, Permutation};
use crate::error::{Error, Result};
use crate::iet::{random_exact, valid_pairs, Field, Iet, Orbiter, Scalar, Triple};
use crate::induction::InductionState;
use crate::matrices::{QVector, VisitMatrix};

/// Outcome of detecting a reduced triple by the induction.
#[derive(Debug, Clone)]
pub struct Detection<S: Scalar> {
    pub triple: Triple,
    /// Minimal detecting path `γ(T, r_min)`.
    pub path: Path,
    pub gap: S,
    /// Winner of the last arrow, absent at `r = 0`.
    pub last_winner: Option<Letter>,
    pub b: VisitMatrix,
    pub q: QVector,
}

/// `|u_β^{(r),b} − u_α^{(r),t}|` for the current state.
pub fn current_gap<S: Scalar>(state: &InductionState<S>, beta: Letter, alpha: Letter) -> S {
    let (ut, ub) = state.current().singularities();
    ub[beta].abs_diff(&ut[alpha])
}

fn counter_sum<S: Scalar>(state: &InductionState<S>, beta: Letter, alpha: Letter) -> BigUint {
    state.l(beta) + state.h(alpha)
}

/// Runs the induction until the triple is detected, within `max_steps` steps.
pub fn detect<S: Scalar>(t: &Iet<S>, tr: &Triple, max_steps: usize) -> Result<Detection<S>> {
    if !S::EXACT {
        return Err(Error::FloatBackend);
    }
    let target = t.triple_gap(tr)?;
    let n = BigUint::from(tr.n);
    let mut state = InductionState::new(t.clone());
    loop {
        let s = counter_sum(&state, tr.beta, tr.alpha);
        if s == n && current_gap(&state, tr.beta, tr.alpha) == target {
            return Ok(Detection {
                triple: *tr,
                path: state.path().clone(),
                gap: target,
                last_winner: state.path().arrows().last().map(|a| a.winner),
                b: state.b().clone(),
                q: state.q().clone(),
            });
        }
        if s > n || state.r() >= max_steps {
            return Err(Error::NotDetected { horizon: state.r() });
        }
        state.step()?;
    }
}

/// Triples `(β, α, n)` that may be detected at the current step.
///
/// After a top arrow with loser `β` these are `(β, α)` for every `α`; after a bottom arrow
/// with loser `α` they are `(β, α)` for every `β`; at `r = 0` every pair with `n = 0`.
pub fn candidate_triples<S: Scalar>(state: &InductionState<S>, pi0: &Permutation) -> Vec<Triple> {
    let pairs = valid_pairs(pi0);
    let last = state.path().arrows().last();
    let keep = |b: Letter, a: Letter| match last {
        None => true,
        Some(arr) => match arr.kind {
            Kind::Top => arr.loser == b,
            Kind::Bottom => arr.loser == a,
        },
    };
    pairs
        .into_iter()
        .filter(|&(b, a)| keep(b, a))
        .filter_map(|(beta, alpha)| {
            let n = counter_sum(state, beta, alpha);
            u64::try_from(n).ok().map(|n| Triple { beta, alpha, n })
        })
        .collect()
}

/// Every reduced triple with `n <= n_max` found along the induction, confirmed by the oracle.
pub fn detected_triples<S: Scalar>(t: &Iet<S>, n_max: u64, max_steps: usize) -> Result<Vec<(Triple, S)>> {
    if !S::EXACT {
        return Err(Error::FloatBackend);
    }
    let orb = Orbiter::new(t);
    let (ut, ub) = t.singularities();
    let mut state = InductionState::new(t.clone());
    let mut out = Vec::new();
    let bound = BigUint::from(n_max);
    loop {
        for tr in candidate_triples(&state, t.perm()) {
            if tr.n > n_max {
                continue;
            }
            let g = current_gap(&state, tr.beta, tr.alpha);
            let end = orb.forward_n(&ub[tr.beta], tr.n);
            if end == ut[tr.alpha] {
                return Err(Error::Connection);
            }
            if end.abs_diff(&ut[tr.alpha]) == g && orb.reduced_from(&end, &ut[tr.alpha], tr.n)? {
                out.push((tr, g));
            }
        }
        if state.q().min() > bound || state.r() >= max_steps {
            break;
        }
        state.step()?;
    }
    out.sort_by_key(|a| a.0);
    Ok(out)
}

/// Members of `Γ(β, α, n)` certified by sampling, each with a witness transformation.
///
/// A path absent from `members` has unknown membership: sampling never certifies emptiness.
#[derive(Debug, Clone)]
pub struct GammaFamily {
    pub triple: Triple,
    pub members: Vec<(Path, Iet<BigRational>)>,
    pub samples: usize,
    /// Samples for which the triple was not reduced or not detected within the step budget.
    pub undetected: usize,
}

impl GammaFamily {
    /// `Some(true)` for a certified member, `None` otherwise.
    pub fn membership(&self, gamma: &Path) -> Option<bool> {
        self.members.iter().any(|(p, _)| p == gamma).then_some(true)
    }
}

/// Samples `samples` exact transformations on `π_0` and collects the minimal detecting paths.
pub fn gamma_family<R: Rng>(
    pi0: &Permutation,
    tr: &Triple,
    samples: usize,
    bits: u32,
    max_steps: usize,
    rng: &mut R,
) -> Result<GammaFamily> {
    let mut fam = GammaFamily { triple: *tr, members: Vec::new(), samples, undetected: 0 };
    for _ in 0..samples {
        let t = random_exact(pi0, bits, rng);
        let found = match t.is_reduced_triple(tr) {
            Ok(true) => detect(&t, tr, max_steps),
            Ok(false) => Err(Error::NotDetected { horizon: 0 }),
            Err(e) => Err(e),
        };
        match found {
            Ok(det) => {
                if fam.membership(&det.path).is_none() {
                    fam.members.push((det.path, t));
                }
            }
            Err(Error::NotDetected { .. } | Error::Connection | Error::AlgorithmStopped { .. }) => {
                fam.undetected += 1
            }
            Err(e) => return Err(e),
        }
    }
    fam.members.sort_by_key(|(p, _)| p.kind_string());
    Ok(fam)
}

/// A triple produced at an occurrence of a reference path.
#[derive(Debug, Clone, Serialize)]
pub struct Produced {
    /// Step `r_k` at which `γ(T, r_k)` ends with the reference path.
    pub step: usize,
    pub n: u64,
    /// Letter whose length equals the gap.
    pub gap_letter: Letter,
    pub gap: String,
    /// Reducedness as certified by the production lemma.
    pub reduced: bool,
    /// `‖q^{γ(T, r_k)}‖`.
    pub q_norm: String,
}

/// Runs the induction for at most `max_steps` steps and emits a triple at each occurrence of `η`.
///
/// Stops early when the induction stops or the counters no longer fit in `u64`.
pub fn produce_triples<S: Scalar>(t: &Iet<S>, eta: &ReferencePath, max_steps: usize) -> Result<Vec<(Produced, S)>> {
    if t.perm() != eta.path.start() {
        return Err(Error::Precondition("transformation does not start at the reference path start".into()));
    }
    let lag = match eta.kind {
        PairKind::A => 2,
        PairKind::B { .. } => 1,
    };
    let (beta, alpha) = (eta.beta, eta.alpha);
    let mut state = InductionState::new(t.clone());
    let mut hist: Vec<u64> = vec![0];
    let mut out = Vec::new();
    let len = eta.path.len();
    while state.r() < max_steps {
        match state.step() {
            Ok(_) => {}
            Err(Error::AlgorithmStopped { .. }) => break,
            Err(e) => return Err(e),
        }
        let s = counter_sum(&state, beta, alpha);
        let Ok(s) = u64::try_from(s) else { break };
        hist.push(s);
        let r = state.r();
        if r >= len && state.path().ends_with(&eta.path) {
            let n = hist[r - lag];
            let lengths = state.current().lengths();
            let (gap_letter, reduced) = match eta.kind {
                PairKind::A => (alpha, true),
                PairKind::B { v, l } => (v, lengths[v] < lengths[l]),
            };
            let gap = lengths[gap_letter].clone();
            out.push((
                Produced {
                    step: r,
                    n,
                    gap_letter,
                    gap: gap.render(),
                    reduced,
                    q_norm: state.q().norm().to_string(),
                },
                gap,
            ));
        }
    }
    Ok(out)
}

/// Result of `k` applications of `F_η`.
#[derive(Debug, Clone)]
pub struct FirstReturn<S: Scalar> {
    pub iet: Iet<S>,
    /// Raw path followed by `Q̂`.
    pub path: Path,
    /// Step index of each occurrence end.
    pub occurrences: Vec<usize>,
}

/// `F_η^k(T)` for `T` at the end of `η`, iterating `Q̂` until the accumulated path ends with `η`.
pub fn first_return<S: Field>(eta: &Path, t: &Iet<S>, k: usize, max_steps: usize) -> Result<FirstReturn<S>> {
    if t.perm() != eta.end() {
        return Err(Error::Precondition("transformation is not at the end of the path".into()));
    }
    let mut state = InductionState::new(t.clone());
    let mut occurrences = Vec::with_capacity(k);
    let mut segment = Path::trivial(t.perm().clone());
    while occurrences.len() < k {
        if state.r() >= max_steps {
            return Err(Error::Budget(format!("{max_steps} steps")));
        }
        let kind = state.step()?;
        segment.push(kind)?;
        if segment.ends_with(eta) {
            occurrences.push(state.r());
            segment = Path::trivial(state.current().perm().clone());
        }
    }
    Ok(FirstReturn { iet: state.current().normalized(), path: state.path().clone(), occurrences })
}
