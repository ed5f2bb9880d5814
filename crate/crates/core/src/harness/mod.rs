//! Experiment drivers: Khinchin counts, the dichotomy experiment, Monte Carlo volume checks,
//! target-measure sweeps and growth estimates.
//!
//! Every sample draws from its own generator seeded by [`sample_seed`], and results are merged
//! in sample order, so output does not depend on the number of workers.

mod khinchin;
mod montecarlo;

pub use khinchin::{khinchin_brute, khinchin_count, khinchin_count_float, KhinchinCounts, PairCount};
pub use montecarlo::{
    target_measure_sweep, volume_mc, zorich_growth_estimate, GrowthReport, GrowthSample, SweepReport, SweepRow,
    VolumeRow,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinat::Permutation;
use crate::error::{Error, Result};
use crate::iet::random_float;
use crate::triples::Phi;

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of sample `index` under `master`.
pub fn sample_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Generator of sample `index` under `master`.
pub fn sample_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sample_seed(master, index))
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Configuration of the dichotomy experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub name: String,
    pub perm: String,
    /// `φ` families, in the syntax accepted by [`Phi`].
    pub families: Vec<String>,
    pub samples: usize,
    pub n_max: u64,
    /// Grid points `n_max · 2^{-j}` for `j = doublings, ..., 0`.
    pub doublings: u32,
    pub master_seed: u64,
    pub workers: usize,
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: "dichotomy".into(),
            perm: "ABCD/DCBA".into(),
            families: vec!["1/(n*log(n+1)^2)".into(), "1/(n*log(n+1))".into()],
            samples: 500,
            n_max: 10_000,
            doublings: 10,
            master_seed: 1,
            workers: 1,
            output: None,
        }
    }
}

impl ExperimentConfig {
    /// Ascending grid `n_max · 2^{-j}`.
    pub fn grid(&self) -> Vec<u64> {
        (0..=self.doublings).rev().map(|j| self.n_max >> j).collect()
    }
}

/// Outcome of one sample in the dichotomy experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleResult {
    pub index: usize,
    pub seed: u64,
    /// `ok`, `connection` or an error message.
    pub status: String,
    /// Per family: cumulative counts at each grid point.
    pub counts: Vec<Vec<usize>>,
}

/// Summary statistics of one family.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub grid: Vec<u64>,
    pub median_cumulative: Vec<f64>,
    /// Median of the new solutions in each doubling block `(grid[i-1], grid[i]]`.
    pub median_new: Vec<f64>,
    /// Fraction of samples with no new solution in the final block.
    pub frac_none_final: f64,
}

/// Result of [`dichotomy_experiment`].
#[derive(Debug, Clone, Serialize)]
pub struct DichotomyReport {
    pub config: ExperimentConfig,
    pub used: usize,
    pub discarded: usize,
    pub families: Vec<FamilyReport>,
    #[serde(skip)]
    pub samples: Vec<SampleResult>,
}

/// Median of integer counts.
pub fn median(v: &[usize]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_unstable();
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m] as f64
    } else {
        (s[m - 1] + s[m]) as f64 / 2.0
    }
}

fn run_sample(perm: &Permutation, phis: &[Phi], cfg: &ExperimentConfig, index: usize) -> SampleResult {
    let seed = sample_seed(cfg.master_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_float(perm, &mut rng);
    let grid = cfg.grid();
    let mut counts = Vec::with_capacity(phis.len());
    for phi in phis {
        match khinchin_count_float(&t, phi, cfg.n_max) {
            Ok(c) => counts.push(grid.iter().map(|&g| c.count_up_to(g)).collect()),
            Err(e) => {
                let status = if e == Error::Connection { "connection".to_string() } else { e.to_string() };
                return SampleResult { index, seed, status, counts: Vec::new() };
            }
        }
    }
    SampleResult { index, seed, status: "ok".into(), counts }
}

/// Samples uniform IETs and counts reduced solutions for each `φ` family on a doubling grid.
pub fn dichotomy_experiment(cfg: &ExperimentConfig) -> Result<DichotomyReport> {
    let perm = Permutation::parse(&cfg.perm)?;
    let phis = cfg.families.iter().map(|s| s.parse::<Phi>()).collect::<Result<Vec<_>>>()?;
    let samples: Vec<SampleResult> = with_workers(cfg.workers, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| run_sample(&perm, &phis, cfg, i))
            .collect()
    })?;
    let ok: Vec<&SampleResult> = samples.iter().filter(|s| s.status == "ok").collect();
    let grid = cfg.grid();
    let families = cfg
        .families
        .iter()
        .enumerate()
        .map(|(f, name)| {
            let column = |i: usize| ok.iter().map(|s| s.counts[f][i]).collect::<Vec<_>>();
            let new_in = |i: usize| ok.iter().map(|s| s.counts[f][i] - s.counts[f][i - 1]).collect::<Vec<_>>();
            let last = grid.len() - 1;
            let final_new = if last > 0 { new_in(last) } else { column(0) };
            FamilyReport {
                family: name.clone(),
                grid: grid.clone(),
                median_cumulative: (0..grid.len()).map(|i| median(&column(i))).collect(),
                median_new: (1..grid.len()).map(|i| median(&new_in(i))).collect(),
                frac_none_final: final_new.iter().filter(|&&x| x == 0).count() as f64
                    / final_new.len().max(1) as f64,
            }
        })
        .collect();
    Ok(DichotomyReport {
        config: cfg.clone(),
        used: ok.len(),
        discarded: samples.len() - ok.len(),
        families,
        samples,
    })
}

impl DichotomyReport {
    /// Pre-registered thresholds, reading the first family as convergent and the second as divergent.
    pub fn checks(&self) -> Vec<(&'static str, bool)> {
        let [conv, div] = &self.families[..] else {
            return vec![("two families", false)];
        };
        let conv_final = conv.median_cumulative.last().copied().unwrap_or(0.0);
        let div_final = div.median_cumulative.last().copied().unwrap_or(0.0);
        vec![
            ("convergent median new in final block is 0", conv.median_new.last().is_some_and(|&m| m == 0.0)),
            ("convergent final block empty in >= 90% of samples", conv.frac_none_final >= 0.9),
            (
                "divergent median cumulative strictly increasing",
                div.median_cumulative.windows(2).all(|w| w[1] > w[0]),
            ),
            ("divergent final median >= 3x convergent", div_final >= 3.0 * conv_final),
        ]
    }

    /// Per-sample CSV: `sample,seed,family,status,n_<g>...` with cumulative counts.
    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let grid = self.config.grid();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["sample".to_string(), "seed".into(), "family".into(), "status".into()];
        header.extend(grid.iter().map(|g| format!("n_{g}")));
        let csv_err = |e: csv::Error| Error::Precondition(format!("csv: {e}"));
        w.write_record(&header).map_err(csv_err)?;
        for s in &self.samples {
            for (f, fam) in self.config.families.iter().enumerate() {
                let mut row = vec![s.index.to_string(), s.seed.to_string(), fam.clone(), s.status.clone()];
                match s.counts.get(f) {
                    Some(c) => row.extend(c.iter().map(|x| x.to_string())),
                    None => row.extend(grid.iter().map(|_| String::new())),
                }
                w.write_record(&row).map_err(csv_err)?;
            }
        }
        w.into_inner().map_err(|e| Error::Precondition(format!("csv: {e}")))
    }
}
