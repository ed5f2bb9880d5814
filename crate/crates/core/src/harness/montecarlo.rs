//! Monte Carlo volume checks, target-measure sweeps and the empirical growth estimate.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinat::{Kind, Letter, Path, Permutation};
use crate::error::{Error, Result};
use crate::iet::{random_float, render_rational, Scalar};
use crate::induction::InductionState;
use crate::matrices::simplex_volume;
use crate::triples::enumerate_targets;

use super::{sample_rng, with_workers};

/// Empirical frequency of `γ ≺ γ(T, ∞)` against its exact volume.
#[derive(Debug, Clone, Serialize)]
pub struct VolumeRow {
    pub path: String,
    pub hits: u64,
    pub samples: u64,
    pub frequency: f64,
    pub volume: String,
    pub z: f64,
}

/// Index of a path among all paths from one start, in breadth-first order with `t` before `b`.
fn path_index(kinds: &[Kind]) -> usize {
    let code = kinds.iter().fold(0usize, |acc, k| 2 * acc + k.index());
    (1usize << kinds.len()) - 1 + code
}

/// Kinds of the first `max_len` steps of one uniform sample; shorter on a float tie.
fn sample_prefix(start: &Permutation, max_len: usize, master: u64, index: u64) -> Vec<Kind> {
    let mut rng = sample_rng(master, index);
    let mut state = InductionState::new(random_float(start, &mut rng));
    let mut kinds = Vec::with_capacity(max_len);
    for _ in 0..max_len {
        match state.step() {
            Ok(k) => kinds.push(k),
            Err(_) => break,
        }
    }
    kinds
}

/// Tallies every path of length `<= max_len` from `start` over `samples` uniform points.
///
/// Rows are in breadth-first order with `t` before `b`, matching [`Path::enumerate`].
pub fn volume_mc(start: &Permutation, max_len: usize, samples: u64, seed: u64, workers: usize) -> Result<Vec<VolumeRow>> {
    if max_len >= usize::BITS as usize - 1 {
        return Err(Error::Budget(format!("path length {max_len} too large")));
    }
    let slots = (1usize << (max_len + 1)) - 1;
    let counts = with_workers(workers, || {
        (0..samples)
            .into_par_iter()
            .fold(
                || vec![0u64; slots],
                |mut acc, i| {
                    let kinds = sample_prefix(start, max_len, seed, i);
                    for len in 0..=kinds.len() {
                        acc[path_index(&kinds[..len])] += 1;
                    }
                    acc
                },
            )
            .reduce(
                || vec![0u64; slots],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            )
    })?;
    Ok(Path::enumerate(start, max_len)
        .into_iter()
        .map(|p| {
            let hits = counts[path_index(&p.kinds())];
            volume_row(&p, hits, samples)
        })
        .collect())
}

fn volume_row(p: &Path, hits: u64, samples: u64) -> VolumeRow {
    let vol = simplex_volume(p);
    let pv = ToPrimitive::to_f64(&vol).unwrap_or(0.0);
    let n = samples as f64;
    let frequency = if samples == 0 { 0.0 } else { hits as f64 / n };
    let var = n * pv * (1.0 - pv);
    let z = if var > 0.0 { (hits as f64 - n * pv) / var.sqrt() } else { 0.0 };
    VolumeRow { path: p.kind_string(), hits, samples, frequency, volume: render_rational(&vol), z }
}

/// One cell of a target-measure sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: String,
    pub e_mass: String,
    pub n_mass: String,
    pub undecided: String,
    /// `e_mass / ε`.
    pub ratio: f64,
    #[serde(skip)]
    pub exact: (BigRational, BigRational, BigRational, BigRational),
}

/// Exact truncated masses of `E(π, W, ε)` over an `ε` grid and the best constant `c`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub perm: String,
    pub avoided: String,
    pub rows: Vec<SweepRow>,
    /// `min_ε e_mass / ε`, the largest `c` with `mass >= c ε` on the grid.
    pub c_fit: Option<String>,
    #[serde(skip)]
    pub c_exact: Option<BigRational>,
}

/// Enumerates `E(π, W, ε)` for each `ε`, one family per worker task.
pub fn target_measure_sweep(
    pi: &Permutation,
    w: Letter,
    grid: &[BigRational],
    depth: usize,
    nodes: usize,
    workers: usize,
) -> Result<SweepReport> {
    let rows: Vec<SweepRow> = with_workers(workers, || {
        grid.par_iter()
            .map(|eps| {
                let fam = enumerate_targets(pi, w, eps, depth, nodes)?;
                let ratio = &fam.e_mass / eps;
                Ok(SweepRow {
                    epsilon: render_rational(eps),
                    e_mass: render_rational(&fam.e_mass),
                    n_mass: render_rational(&fam.n_mass),
                    undecided: render_rational(&fam.undecided),
                    ratio: ToPrimitive::to_f64(&ratio).unwrap_or(f64::NAN),
                    exact: (eps.clone(), fam.e_mass, fam.n_mass, fam.undecided),
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let c_exact = rows.iter().map(|r| &r.exact.1 / &r.exact.0).min();
    Ok(SweepReport {
        perm: pi.to_string(),
        avoided: pi.name(w).to_string(),
        c_fit: c_exact.as_ref().map(render_rational),
        c_exact,
        rows,
    })
}

/// Growth data of one sample.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthSample {
    pub index: u64,
    /// Occurrences of `η` as a suffix along the induction.
    pub occurrences: usize,
    /// `max_k ‖q‖^{1/k}` over the `k`-th occurrences.
    pub theta: Option<f64>,
    /// The float induction stopped before `steps`.
    pub truncated: bool,
}

/// Empirical `θ` with dispersion.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub eta: String,
    pub steps: usize,
    pub sup: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub truncated: usize,
    pub samples: Vec<GrowthSample>,
}

/// Natural logarithm of a positive integer of any size.
fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map_or(f64::INFINITY, f64::ln);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn growth_sample(eta: &Path, steps: usize, master: u64, index: u64) -> GrowthSample {
    let mut rng = sample_rng(master, index);
    let t = random_float(eta.start(), &mut rng).rationalize();
    let (occurrences, theta, truncated) = match t.to_i128() {
        Some((ti, _)) => growth_run(InductionState::new(ti), eta, steps),
        None => growth_run(InductionState::new(t.to_integer().0), eta, steps),
    };
    GrowthSample { index, occurrences, theta, truncated }
}

fn growth_run<S: Scalar>(mut state: InductionState<S>, eta: &Path, steps: usize) -> (usize, Option<f64>, bool) {
    let mut occurrences = 0usize;
    let mut theta: Option<f64> = None;
    for _ in 0..steps {
        if state.step().is_err() {
            return (occurrences, theta, true);
        }
        if state.path().ends_with(eta) {
            occurrences += 1;
            let v = (ln_big(&state.q().norm()) / occurrences as f64).exp();
            theta = Some(theta.map_or(v, |t| t.max(v)));
        }
    }
    (occurrences, theta, false)
}

/// Empirical `θ` in `‖q^{γ(T, r_k)}‖ <= θ^k`, where `r_k` is the `k`-th time `γ(T, r)` ends with `η`.
pub fn zorich_growth_estimate(eta: &Path, samples: u64, steps: usize, seed: u64, workers: usize) -> Result<GrowthReport> {
    let rows: Vec<GrowthSample> = with_workers(workers, || {
        (0..samples).into_par_iter().map(|i| growth_sample(eta, steps, seed, i)).collect()
    })?;
    let mut thetas: Vec<f64> = rows.iter().filter_map(|r| r.theta).collect();
    thetas.sort_by(f64::total_cmp);
    let median = match thetas.len() {
        0 => None,
        n if n % 2 == 1 => Some(thetas[n / 2]),
        n => Some((thetas[n / 2 - 1] + thetas[n / 2]) / 2.0),
    };
    Ok(GrowthReport {
        eta: eta.kind_string(),
        steps,
        sup: thetas.last().copied(),
        median,
        min: thetas.first().copied(),
        truncated: rows.iter().filter(|r| r.truncated).count(),
        samples: rows,
    })
}
