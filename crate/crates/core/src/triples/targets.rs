//! Shrinking-target families `E(π, W, ε)`, `N(π, W, ε)` and their property-B refinements.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinat::{Kind, Letter, Path, Permutation};
use crate::error::{Error, Result};
use crate::iet::render_rational;
use crate::matrices::{open_simplex_below, QVector, VisitMatrix};

/// Which pair of families a [`TargetFamily`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TargetKind {
    /// `E(π, W, ε)` and `N(π, W, ε)`.
    E,
    /// `E^B(π₁, ε)` and `N^B(π₁, ε)`.
    EB,
}

/// A truncated enumeration of a target family and its complement.
#[derive(Debug, Clone)]
pub struct TargetFamily {
    pub base: Permutation,
    pub avoided: Letter,
    pub epsilon: BigRational,
    pub kind: TargetKind,
    pub e_paths: Vec<Path>,
    pub n_paths: Vec<Path>,
    pub e_mass: BigRational,
    pub n_mass: BigRational,
    /// Mass of the branches left open by the budgets.
    pub undecided: BigRational,
    /// Nodes where the expected shape failed (kind `EB` only).
    pub shape_violations: usize,
    /// Smallest conditional mass of an appended `L`-block (kind `EB` only).
    pub min_block_mass: Option<BigRational>,
}

/// JSON view of a [`TargetFamily`].
#[derive(Debug, Clone, Serialize)]
pub struct TargetSummary {
    pub base: String,
    pub avoided: String,
    pub epsilon: String,
    pub kind: TargetKind,
    pub e_paths: Vec<String>,
    pub n_paths: Vec<String>,
    pub e_mass: String,
    pub n_mass: String,
    pub undecided: String,
    pub shape_violations: usize,
}

impl TargetFamily {
    fn empty(base: &Permutation, avoided: Letter, epsilon: &BigRational, kind: TargetKind) -> Self {
        TargetFamily {
            base: base.clone(),
            avoided,
            epsilon: epsilon.clone(),
            kind,
            e_paths: Vec::new(),
            n_paths: Vec::new(),
            e_mass: BigRational::zero(),
            n_mass: BigRational::zero(),
            undecided: BigRational::zero(),
            shape_violations: 0,
            min_block_mass: None,
        }
    }

    /// `e_mass + n_mass + undecided`, which is one when the enumeration is consistent.
    pub fn total(&self) -> BigRational {
        &self.e_mass + &self.n_mass + &self.undecided
    }

    /// Target members whose simplex is not inside the expected region.
    ///
    /// For `E` the region is `λ_W < ε`; for `E^B` it is `λ_V < min(λ_L, ε)` with `L` given.
    pub fn containment_violations(&self, l: Option<Letter>) -> usize {
        let d = self.base.d();
        let unit = |x: Letter| -> Vec<BigRational> {
            (0..d)
                .map(|i| if i == x { BigRational::one() } else { BigRational::zero() })
                .collect()
        };
        let fw = unit(self.avoided);
        self.e_paths
            .iter()
            .filter(|p| {
                let verts = VisitMatrix::of_path(p).simplex_vertices();
                let below_eps = open_simplex_below(&verts, &fw, &self.epsilon);
                let below_l = match l {
                    None => true,
                    Some(l) => {
                        let mut f = fw.clone();
                        f[l] -= BigRational::one();
                        open_simplex_below(&verts, &f, &BigRational::zero())
                    }
                };
                !(below_eps && below_l)
            })
            .count()
    }

    pub fn summary(&self) -> TargetSummary {
        TargetSummary {
            base: self.base.to_string(),
            avoided: self.base.name(self.avoided).to_string(),
            epsilon: render_rational(&self.epsilon),
            kind: self.kind,
            e_paths: self.e_paths.iter().map(Path::kind_string).collect(),
            n_paths: self.n_paths.iter().map(Path::kind_string).collect(),
            e_mass: render_rational(&self.e_mass),
            n_mass: render_rational(&self.n_mass),
            undecided: render_rational(&self.undecided),
            shape_violations: self.shape_violations,
        }
    }
}

/// Limits on a truncated tree enumeration.
struct Budget {
    depth: usize,
    nodes: usize,
    used: usize,
}

impl Budget {
    /// Whether a node at `depth` may still be expanded.
    fn take(&mut self, depth: usize) -> bool {
        if depth >= self.depth || self.used >= self.nodes {
            return false;
        }
        self.used += 1;
        true
    }
}

fn mass(q: &QVector) -> BigRational {
    q.volume()
}

/// Exact sum by pairwise reduction, which keeps intermediate denominators small.
fn tree_sum(mut v: Vec<BigRational>) -> BigRational {
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a + b,
                None => a,
            });
        }
        v = next;
    }
    v.pop().unwrap_or_else(BigRational::zero)
}

/// A family under construction, with masses collected for a single exact summation.
struct Builder {
    fam: TargetFamily,
    e: Vec<BigRational>,
    n: Vec<BigRational>,
    undecided: Vec<BigRational>,
}

impl Builder {
    fn new(fam: TargetFamily) -> Self {
        Builder { fam, e: Vec::new(), n: Vec::new(), undecided: Vec::new() }
    }

    fn finish(mut self) -> TargetFamily {
        self.fam.e_mass = tree_sum(self.e);
        self.fam.n_mass = tree_sum(self.n);
        self.fam.undecided = tree_sum(self.undecided);
        self.fam
    }
}

fn check_epsilon(eps: &BigRational) -> Result<()> {
    if eps <= &BigRational::zero() {
        return Err(Error::OutOfDomain);
    }
    Ok(())
}

fn exceeds(q: &BigUint, inv_eps: &BigRational) -> bool {
    BigRational::from_integer(BigInt::from(q.clone())) > *inv_eps
}

/// Explores the `A_W`-colored tree from `π` up to `depth` arrows and `nodes` expansions.
///
/// A node joins `E` when `q_W > 1/ε`; a node with `q_W <= 1/ε` followed by the arrow won by `W`
/// joins `N`. Nodes are expanded in order of decreasing mass, so the budget leaves the least
/// mass open; open branches contribute to `undecided`. Members are listed by length, then kinds.
pub fn enumerate_targets(
    pi: &Permutation,
    w: Letter,
    eps: &BigRational,
    depth: usize,
    nodes: usize,
) -> Result<TargetFamily> {
    check_epsilon(eps)?;
    if w >= pi.d() {
        return Err(Error::OutOfDomain);
    }
    let mut fam = Builder::new(TargetFamily::empty(pi, w, eps, TargetKind::E));
    let inv = eps.recip();
    let q = QVector::ones(pi.d());
    if exceeds(q.get(w), &inv) {
        fam.e.push(mass(&q));
        fam.fam.e_paths.push(Path::trivial(pi.clone()));
        return Ok(fam.finish());
    }
    let mut budget = Budget { depth, nodes, used: 0 };
    let mut seq = 0u64;
    let mut heap = BinaryHeap::new();
    heap.push(Node { key: q.product(), seq, path: Path::trivial(pi.clone()), q });
    while let Some(Node { path, q, .. }) = heap.pop() {
        if !budget.take(path.len()) {
            fam.undecided.push(mass(&q));
            continue;
        }
        for kind in Kind::BOTH {
            let (winner, loser) = path.end().winner_loser(kind);
            let mut q2 = q.clone();
            q2.apply_arrow(winner, loser);
            let mut child = path.clone();
            child.push(kind)?;
            if winner == w {
                fam.n.push(mass(&q2));
                fam.fam.n_paths.push(child);
            } else if exceeds(q2.get(w), &inv) {
                fam.e.push(mass(&q2));
                fam.fam.e_paths.push(child);
            } else {
                seq += 1;
                heap.push(Node { key: q2.product(), seq, path: child, q: q2 });
            }
        }
    }
    let order = |a: &Path, b: &Path| a.len().cmp(&b.len()).then_with(|| a.kinds().cmp(&b.kinds()));
    fam.fam.e_paths.sort_by(order);
    fam.fam.n_paths.sort_by(order);
    Ok(fam.finish())
}

/// Frontier node, ordered so that the largest mass (smallest `∏ q`) pops first.
struct Node {
    key: BigUint,
    seq: u64,
    path: Path,
    q: QVector,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        (&other.key, other.seq).cmp(&(&self.key, self.seq))
    }
}

/// Builds `E^B(π₁, ε)` and `N^B(π₁, ε)` for a property-B pair with letters `V`, `L` and `α`.
///
/// Each `E(π₁, V, ε)` member is extended through maximal separated continuations (arrows whose
/// winner and loser both avoid `A' = {ξ : π₁^t(ξ) < π₁^t(α)}`), then by `d − a` bottom arrows
/// won by `L`. The complement gains `ν_i = b^i t` for `i = 0..d−a−1` after each continuation.
pub fn enumerate_targets_b(
    pi1: &Permutation,
    v: Letter,
    l: Letter,
    alpha: Letter,
    eps: &BigRational,
    depth: usize,
    nodes: usize,
) -> Result<TargetFamily> {
    check_epsilon(eps)?;
    let d = pi1.d();
    let a_pos = pi1.top_pos(alpha);
    let in_a: Vec<bool> = (0..d).map(|x| pi1.top_pos(x) < a_pos).collect();
    if !in_a[l] || in_a[v] || pi1.top_pos(v) != a_pos + 1 {
        return Err(Error::Precondition("base does not have the property-B shape".into()));
    }
    let a = in_a.iter().filter(|&&x| x).count();
    let base = enumerate_targets(pi1, v, eps, depth, nodes)?;
    let mut fam = Builder::new(TargetFamily::empty(pi1, v, eps, TargetKind::EB));
    fam.fam.n_paths = base.n_paths;
    fam.n.push(base.n_mass);
    fam.undecided.push(base.undecided);
    let ctx = BContext { in_a: &in_a, l, block: d - a };
    let mut budget = Budget { depth: depth.saturating_mul(2), nodes, used: 0 };
    for gamma in base.e_paths {
        let q = QVector::of_path(&gamma);
        let mut path = gamma;
        explore_separated(&mut path, &q, &ctx, &mut budget, &mut fam)?;
    }
    Ok(fam.finish())
}

struct BContext<'a> {
    in_a: &'a [bool],
    l: Letter,
    block: usize,
}

fn separated(pi: &Permutation, kind: Kind, in_a: &[bool]) -> bool {
    let (w, lo) = pi.winner_loser(kind);
    !in_a[w] && !in_a[lo]
}

fn explore_separated(
    path: &mut Path,
    q: &QVector,
    ctx: &BContext,
    budget: &mut Budget,
    fam: &mut Builder,
) -> Result<()> {
    let end = path.end().clone();
    let sep = Kind::BOTH.map(|k| separated(&end, k, ctx.in_a));
    match sep {
        [true, true] => {
            if !budget.take(path.len()) {
                fam.undecided.push(mass(q));
                return Ok(());
            }
            for kind in Kind::BOTH {
                let (w, lo) = end.winner_loser(kind);
                let mut q2 = q.clone();
                q2.apply_arrow(w, lo);
                path.push(kind)?;
                explore_separated(path, &q2, ctx, budget, fam)?;
                path.pop();
            }
            Ok(())
        }
        [false, false] if end.bottom_last() == ctx.l => {
            append_block(path, q, ctx, fam)?;
            Ok(())
        }
        _ => {
            fam.fam.shape_violations += 1;
            fam.undecided.push(mass(q));
            Ok(())
        }
    }
}

fn append_block(path: &Path, q: &QVector, ctx: &BContext, fam: &mut Builder) -> Result<()> {
    let mut block = path.clone();
    let mut qb = q.clone();
    for _ in 0..ctx.block {
        let mut nu = block.clone();
        let mut qn = qb.clone();
        let (w, lo) = nu.end().winner_loser(Kind::Top);
        qn.apply_arrow(w, lo);
        nu.push(Kind::Top)?;
        fam.n.push(mass(&qn));
        fam.fam.n_paths.push(nu);
        let (w, lo) = block.end().winner_loser(Kind::Bottom);
        if w != ctx.l {
            fam.fam.shape_violations += 1;
        }
        qb.apply_arrow(w, lo);
        block.push(Kind::Bottom)?;
    }
    let ratio = BigRational::new(BigInt::from(q.product()), BigInt::from(qb.product()));
    if fam.fam.min_block_mass.as_ref().is_none_or(|m| &ratio < m) {
        fam.fam.min_block_mass = Some(ratio);
    }
    fam.e.push(mass(&qb));
    fam.fam.e_paths.push(block);
    Ok(())
}
