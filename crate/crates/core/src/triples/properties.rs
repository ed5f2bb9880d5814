//! Properties A and B of letter pairs and reference paths.

use serde::Serialize;

use crate::combinat::{Kind, Letter, Path, Permutation, RauzyClass};
use crate::error::{Error, Result};
use crate::matrices::VisitMatrix;

/// Which production lemma a reference path follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairKind {
    /// `α` last in top and `β` last in bottom at the pivot.
    A,
    /// Pivot satisfying the first property-B condition, with its letters `V` and `L`.
    B { v: Letter, l: Letter },
}

/// A witness of the first property-B condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyB {
    pub perm: Permutation,
    pub v: Letter,
    pub l: Letter,
}

fn check_pair(class: &RauzyClass, beta: Letter, alpha: Letter) -> Result<()> {
    if beta >= class.d() || alpha >= class.d() || beta == class.y() || alpha == class.x() {
        return Err(Error::InvalidPair("need beta != Y and alpha != X".into()));
    }
    Ok(())
}

fn prefix_set(pi: &Permutation, kind: Kind, l: Letter) -> Vec<bool> {
    let mut v = vec![false; pi.d()];
    let p = pi.pos(kind, l);
    for &x in &pi.row(kind)[..p - 1] {
        v[x] = true;
    }
    v
}

/// First element (class order) with `α` last in the top row and `β` last in the bottom row.
pub fn property_a_search(class: &RauzyClass, beta: Letter, alpha: Letter) -> Result<Option<Permutation>> {
    check_pair(class, beta, alpha)?;
    Ok(class
        .elements()
        .iter()
        .find(|p| p.top_last() == alpha && p.bottom_last() == beta)
        .cloned())
}

fn witness_52(p: &Permutation, beta: Letter, alpha: Letter) -> Option<PropertyB> {
    let d = p.d();
    let v = p.top_last();
    if p.bottom_pos(alpha) != d {
        return None;
    }
    let mut left = prefix_set(p, Kind::Top, alpha);
    left[v] = true;
    if left != prefix_set(p, Kind::Bottom, beta) {
        return None;
    }
    let pb = p.bottom_pos(beta);
    if pb < 2 {
        return None;
    }
    let l = p.bottom_row()[pb - 2];
    if l == v || p.top_pos(l) >= p.top_pos(alpha) {
        return None;
    }
    Some(PropertyB { perm: p.clone(), v, l })
}

fn witness_53(p: &Permutation, beta: Letter, alpha: Letter) -> Option<(Permutation, Letter)> {
    let d = p.d();
    let v = p.bottom_last();
    if p.top_pos(beta) != d {
        return None;
    }
    let mut right = prefix_set(p, Kind::Bottom, beta);
    right[v] = true;
    (prefix_set(p, Kind::Top, alpha) == right).then(|| (p.clone(), v))
}

/// A permutation together with a letter.
pub type Marked = (Permutation, Letter);

/// First elements (class order) witnessing the two property-B conditions.
pub fn property_b_search(
    class: &RauzyClass,
    beta: Letter,
    alpha: Letter,
) -> Result<(Option<PropertyB>, Option<Marked>)> {
    check_pair(class, beta, alpha)?;
    let b52 = class.elements().iter().find_map(|p| witness_52(p, beta, alpha));
    let b53 = class.elements().iter().find_map(|p| witness_53(p, beta, alpha));
    Ok((b52, b53))
}

/// The pivot `π(β, α)` and kind used for a reference path; property A is preferred.
pub fn find_reference_pair(class: &RauzyClass, beta: Letter, alpha: Letter) -> Result<(Permutation, PairKind)> {
    if let Some(p) = property_a_search(class, beta, alpha)? {
        return Ok((p, PairKind::A));
    }
    match property_b_search(class, beta, alpha)?.0 {
        Some(w) => Ok((w.perm, PairKind::B { v: w.v, l: w.l })),
        None => Err(Error::Precondition("pair satisfies neither property A nor property B".into())),
    }
}

/// A neat and positive path ending with the production suffix of a pair.
#[derive(Debug, Clone)]
pub struct ReferencePath {
    pub path: Path,
    pub kind: PairKind,
    pub beta: Letter,
    pub alpha: Letter,
    pub pivot: Permutation,
}

impl ReferencePath {
    /// `π₁`.
    pub fn end(&self) -> &Permutation {
        self.path.end()
    }

    /// `M = ‖B_η‖`, the largest entry.
    pub fn m(&self) -> num_bigint::BigUint {
        VisitMatrix::of_path(&self.path).max_norm()
    }

    /// Letter whose wins are counted by the quota.
    pub fn quota_letter(&self) -> Letter {
        match self.kind {
            PairKind::A => self.alpha,
            PairKind::B { v, .. } => v,
        }
    }
}

fn suffix(kind: PairKind) -> &'static [Kind] {
    match kind {
        PairKind::A => &[Kind::Top, Kind::Bottom],
        PairKind::B { .. } => &[Kind::Bottom],
    }
}

fn acceptable(path: &Path, letter: Letter, quota: usize) -> bool {
    path.wins(letter) >= quota && path.is_neat().unwrap_or(false) && path.is_positive()
}

/// Shortest path `prefix · suffix` from `π₀` that is neat, positive and meets the win quota.
///
/// Prefixes are searched by increasing length, `t` before `b`, up to `max_prefix` arrows.
pub fn build_reference_path(
    class: &RauzyClass,
    pi0: &Permutation,
    beta: Letter,
    alpha: Letter,
    max_prefix: usize,
) -> Result<ReferencePath> {
    let start = class
        .index_of(pi0)
        .ok_or_else(|| Error::Precondition("start is not in the class".into()))?;
    let (pivot, kind) = find_reference_pair(class, beta, alpha)?;
    let target = class.index_of(&pivot).expect("pivot in class");
    let dist = class.distances_to(target);
    let (letter, quota) = match kind {
        PairKind::A => (alpha, 2),
        PairKind::B { v, .. } => (v, class.d()),
    };
    let suf = suffix(kind);
    for len in dist[start]..=max_prefix {
        let mut kinds = Vec::with_capacity(len + suf.len());
        if let Some(p) = search(class, &dist, start, len, &mut kinds, &|ks: &[Kind]| {
            let mut all = ks.to_vec();
            all.extend_from_slice(suf);
            let p = Path::from_kinds(pi0, &all).expect("valid kinds");
            acceptable(&p, letter, quota).then_some(p)
        }) {
            return Ok(ReferencePath { path: p, kind, beta, alpha, pivot });
        }
    }
    Err(Error::Budget(format!("no reference path with prefix up to {max_prefix} arrows")))
}

fn search(
    class: &RauzyClass,
    dist: &[usize],
    node: usize,
    remaining: usize,
    kinds: &mut Vec<Kind>,
    accept: &dyn Fn(&[Kind]) -> Option<Path>,
) -> Option<Path> {
    if dist[node] > remaining {
        return None;
    }
    if remaining == 0 {
        return accept(kinds);
    }
    for k in Kind::BOTH {
        kinds.push(k);
        let found = search(class, dist, class.next(node, k), remaining - 1, kinds, accept);
        kinds.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
