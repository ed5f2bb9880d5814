//! Decorated Rauzy classes and reduction of Rauzy classes.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::combinat::{Alphabet, Arrow, Kind, Letter, Path, Permutation, RauzyClass};
use crate::error::{Error, Result};

/// Classification of a permutation with respect to a color set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Classification {
    Trivial,
    Intermediate,
    Essential,
}

fn check_colors(d: usize, colors: &[bool]) -> Result<()> {
    let n = colors.iter().filter(|&&c| c).count();
    if colors.len() != d || n == 0 || n == d {
        return Err(Error::ImproperColors(format!("{n} of {d} letters")));
    }
    Ok(())
}

/// Indicator vector of a letter set.
pub fn color_set(d: usize, letters: &[Letter]) -> Vec<bool> {
    let mut v = vec![false; d];
    for &l in letters {
        v[l] = true;
    }
    v
}

/// Classification by the last letters of both rows.
pub fn classify(pi: &Permutation, colors: &[bool]) -> Result<Classification> {
    check_colors(pi.d(), colors)?;
    Ok(classify_unchecked(pi, colors))
}

fn classify_unchecked(pi: &Permutation, colors: &[bool]) -> Classification {
    match (colors[pi.top_last()], colors[pi.bottom_last()]) {
        (true, true) => Classification::Essential,
        (false, false) => Classification::Trivial,
        _ => Classification::Intermediate,
    }
}

/// Deletes the shortest prefix block with equal letter sets in both rows until none remains.
pub fn admissible_end(mut top: Vec<Letter>, mut bottom: Vec<Letter>) -> (Vec<Letter>, Vec<Letter>) {
    loop {
        let n = top.len();
        let mut bpos = HashMap::new();
        for (i, &l) in bottom.iter().enumerate() {
            bpos.insert(l, i + 1);
        }
        let mut block = None;
        let mut reach = 0;
        for k in 1..n {
            reach = reach.max(bpos[&top[k - 1]]);
            if reach == k {
                block = Some(k);
                break;
            }
        }
        match block {
            None => return (top, bottom),
            Some(k) => {
                top.drain(..k);
                bottom.drain(..k);
            }
        }
    }
}

/// Positions `(d_t, d_b, d_t + d_b)` of the rightmost uncolored letter in each row.
pub fn drift(pi: &Permutation, colors: &[bool]) -> Result<(usize, usize, usize)> {
    check_colors(pi.d(), colors)?;
    let rightmost = |row: &[Letter]| row.iter().rposition(|&l| !colors[l]).map(|i| i + 1);
    match (rightmost(pi.top_row()), rightmost(pi.bottom_row())) {
        (Some(t), Some(b)) => Ok((t, b, t + b)),
        _ => Err(Error::ImproperColors("a row is entirely colored".into())),
    }
}

/// True iff the arrow increases the drift `d(π)`.
pub fn is_drifting(a: &Arrow, colors: &[bool]) -> Result<bool> {
    Ok(drift(&a.end, colors)?.2 > drift(&a.start, colors)?.2)
}

/// Reduction tables of an essential decorated class.
#[derive(Debug, Clone)]
pub struct Reduced {
    /// Reduced letter to original letter.
    pub letters: Vec<Letter>,
    pub class: RauzyClass,
    /// Member index to reduced permutation, for essential members.
    pub perms: HashMap<usize, Permutation>,
}

impl Reduced {
    /// Original letter of a reduced letter.
    pub fn original(&self, l: Letter) -> Letter {
        self.letters[l]
    }

    /// Reduced letter of an original letter, if it survives.
    pub fn reduced_letter(&self, l: Letter) -> Option<Letter> {
        self.letters.iter().position(|&x| x == l)
    }

    /// Indicator of `A''` over the original alphabet.
    pub fn mask(&self, d: usize) -> Vec<bool> {
        color_set(d, &self.letters)
    }
}

/// An `A'`-decorated Rauzy class.
#[derive(Debug, Clone)]
pub struct DecoratedClass {
    colors: Vec<bool>,
    members: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    classes: Vec<Classification>,
    /// Per essential member and type index, the outgoing arc.
    arcs: HashMap<(usize, usize), Path>,
    /// Member index to the index of `π^ess`.
    ess: Vec<Option<usize>>,
    reduced: Option<Reduced>,
}

impl DecoratedClass {
    /// Closure of `{π}` under colored arrows in both directions.
    pub fn new(pi: &Permutation, colors: &[bool]) -> Result<DecoratedClass> {
        check_colors(pi.d(), colors)?;
        if !pi.is_admissible() {
            return Err(Error::NotAdmissible(pi.to_string()));
        }
        let ambient = RauzyClass::of(pi)?;
        let colored = |i: usize, k: Kind| colors[ambient.elements()[i].winner_loser(k).0];
        let root = ambient.index_of(pi).expect("member of its class");
        let mut seen = HashMap::from([(root, 0usize)]);
        let mut order = vec![root];
        let mut head = 0;
        while head < order.len() {
            let i = order[head];
            head += 1;
            for k in Kind::BOTH {
                let mut nb = Vec::new();
                if colored(i, k) {
                    nb.push(ambient.next(i, k));
                }
                let p = ambient.prev(i, k);
                if colored(p, k) {
                    nb.push(p);
                }
                for j in nb {
                    if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(j) {
                        e.insert(order.len());
                        order.push(j);
                    }
                }
            }
        }
        let members: Vec<Permutation> = order.iter().map(|&i| ambient.elements()[i].clone()).collect();
        let index: HashMap<Permutation, usize> =
            members.iter().enumerate().map(|(i, p)| (p.clone(), i)).collect();
        let classes: Vec<Classification> = members.iter().map(|p| classify_unchecked(p, colors)).collect();
        let mut dc = DecoratedClass {
            colors: colors.to_vec(),
            members,
            index,
            classes,
            arcs: HashMap::new(),
            ess: Vec::new(),
            reduced: None,
        };
        dc.build_arcs()?;
        dc.build_reduction()?;
        Ok(dc)
    }

    fn build_arcs(&mut self) -> Result<()> {
        let n = self.members.len();
        self.ess = vec![None; n];
        for i in 0..n {
            if self.classes[i] != Classification::Essential {
                continue;
            }
            self.ess[i] = Some(i);
            for k in Kind::BOTH {
                let mut path = Path::trivial(self.members[i].clone());
                path.push(k)?;
                let mut through = Vec::new();
                loop {
                    let j = self.index[path.end()];
                    match self.classes[j] {
                        Classification::Essential => break,
                        Classification::Intermediate => {
                            through.push(j);
                            let kind = Kind::BOTH
                                .into_iter()
                                .find(|&k2| self.colors[path.end().winner_loser(k2).0])
                                .expect("intermediate element has one colored arrow");
                            path.push(kind)?;
                        }
                        Classification::Trivial => {
                            return Err(Error::Precondition("arc reached a trivial element".into()))
                        }
                    }
                }
                let end = self.index[path.end()];
                for j in through {
                    self.ess[j] = Some(end);
                }
                self.arcs.insert((i, k.index()), path);
            }
        }
        Ok(())
    }

    fn build_reduction(&mut self) -> Result<()> {
        let ess: Vec<usize> = (0..self.members.len())
            .filter(|&i| self.classes[i] == Classification::Essential)
            .collect();
        if ess.is_empty() {
            return Ok(());
        }
        let mut rows = HashMap::new();
        let mut letters: Option<Vec<Letter>> = None;
        for &i in &ess {
            let (t, b) = self.members[i].restricted_rows(&self.colors);
            let (t, b) = admissible_end(t, b);
            let mut ls = t.clone();
            ls.sort_unstable();
            match &letters {
                None => letters = Some(ls),
                Some(prev) if *prev != ls => {
                    return Err(Error::Precondition("reduced alphabets differ across the class".into()))
                }
                _ => {}
            }
            rows.insert(i, (t, b));
        }
        let letters = letters.expect("nonempty");
        let names = letters.iter().map(|&l| self.members[0].name(l).to_string()).collect();
        let alphabet = Arc::new(Alphabet::new(names)?);
        let mut relabel = vec![usize::MAX; self.members[0].d()];
        for (i, &l) in letters.iter().enumerate() {
            relabel[l] = i;
        }
        let mut perms = HashMap::new();
        for (i, (t, b)) in rows {
            let t = t.iter().map(|&l| relabel[l]).collect();
            let b = b.iter().map(|&l| relabel[l]).collect();
            perms.insert(i, Permutation::new(alphabet.clone(), t, b)?);
        }
        let class = RauzyClass::of(&perms[&ess[0]])?;
        self.reduced = Some(Reduced { letters, class, perms });
        Ok(())
    }

    pub fn colors(&self) -> &[bool] {
        &self.colors
    }

    pub fn members(&self) -> &[Permutation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, pi: &Permutation) -> bool {
        self.index.contains_key(pi)
    }

    pub fn index_of(&self, pi: &Permutation) -> Option<usize> {
        self.index.get(pi).copied()
    }

    pub fn classification(&self, pi: &Permutation) -> Option<Classification> {
        self.index_of(pi).map(|i| self.classes[i])
    }

    pub fn classifications(&self) -> &[Classification] {
        &self.classes
    }

    pub fn is_essential(&self) -> bool {
        self.reduced.is_some()
    }

    pub fn essential_members(&self) -> Vec<&Permutation> {
        (0..self.len())
            .filter(|&i| self.classes[i] == Classification::Essential)
            .map(|i| &self.members[i])
            .collect()
    }

    /// All arcs, keyed by `(essential start, type)`.
    pub fn arcs(&self) -> Vec<&Path> {
        let mut keys: Vec<_> = self.arcs.keys().copied().collect();
        keys.sort_unstable();
        keys.iter().map(|k| &self.arcs[k]).collect()
    }

    /// The arc of a given type starting at an essential member.
    pub fn arc(&self, pi: &Permutation, kind: Kind) -> Option<&Path> {
        self.arcs.get(&(self.index_of(pi)?, kind.index()))
    }

    /// `π^ess`.
    pub fn ess(&self, pi: &Permutation) -> Option<&Permutation> {
        self.ess[self.index_of(pi)?].map(|i| &self.members[i])
    }

    pub fn reduced(&self) -> Option<&Reduced> {
        self.reduced.as_ref()
    }

    /// `red(π) = red(π^ess)`.
    pub fn reduce_perm(&self, pi: &Permutation) -> Result<Permutation> {
        let red = self.reduced.as_ref().ok_or(Error::NotColored)?;
        let i = self.index_of(pi).ok_or(Error::NotColored)?;
        let e = self.ess[i].ok_or(Error::NotColored)?;
        Ok(red.perms[&e].clone())
    }

    /// True iff every arrow of `γ` is colored and `γ` stays in the class.
    pub fn is_colored_path(&self, gamma: &Path) -> bool {
        self.contains(gamma.start()) && gamma.arrows().iter().all(|a| self.colors[a.winner])
    }

    /// `red(γ) = red(γ^ess)`, reducing arc by arc.
    pub fn reduce_path(&self, gamma: &Path) -> Result<Path> {
        if !self.is_colored_path(gamma) {
            return Err(Error::NotColored);
        }
        let start = self.reduce_perm(gamma.start())?;
        let mut out = Path::trivial(start);
        for a in gamma.arrows() {
            if self.classification(&a.start) == Some(Classification::Essential) {
                out.push(a.kind)?;
            }
        }
        Ok(out)
    }

    /// Letters of `A''` preceding `α_t(π)` in the top row or `α_b(π)` in the bottom row.
    pub fn good_letters(&self, pi: &Permutation) -> Result<Vec<Letter>> {
        if self.classification(pi) != Some(Classification::Essential) {
            return Err(Error::Precondition("good letters need an essential member".into()));
        }
        let red = self.reduced.as_ref().expect("essential class");
        let (dt, db, _) = drift(pi, &self.colors)?;
        let mut out: Vec<Letter> = red
            .letters
            .iter()
            .copied()
            .filter(|&l| pi.top_pos(l) < dt || pi.bottom_pos(l) < db)
            .collect();
        out.sort_unstable();
        Ok(out)
    }
}

/// JSON summary of a decorated class.
#[derive(Debug, Clone, Serialize)]
pub struct DecoratedSummary {
    pub colors: Vec<String>,
    pub members: Vec<(String, Classification)>,
    pub arcs: Vec<ArcSummary>,
    pub reduced_alphabet: Vec<String>,
    pub reduced_class: Vec<String>,
    pub reductions: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcSummary {
    pub start: String,
    pub kinds: String,
    pub end: String,
    pub winner: String,
    pub first_loser: String,
}

impl DecoratedClass {
    pub fn summary(&self) -> DecoratedSummary {
        let p0 = &self.members[0];
        let names = |ls: &[Letter]| ls.iter().map(|&l| p0.name(l).to_string()).collect();
        let colors: Vec<Letter> = (0..p0.d()).filter(|&l| self.colors[l]).collect();
        let arcs = self
            .arcs()
            .into_iter()
            .map(|p| ArcSummary {
                start: p.start().to_string(),
                kinds: p.kind_string(),
                end: p.end().to_string(),
                winner: p0.name(p.arrows()[0].winner).to_string(),
                first_loser: p0.name(p.arrows()[0].loser).to_string(),
            })
            .collect();
        let (reduced_alphabet, reduced_class, reductions) = match &self.reduced {
            None => (vec![], vec![], vec![]),
            Some(r) => {
                let mut reds: Vec<(String, String)> = r
                    .perms
                    .iter()
                    .map(|(&i, p)| (self.members[i].to_string(), p.to_string()))
                    .collect();
                reds.sort();
                (
                    names(&r.letters),
                    r.class.elements().iter().map(|p| p.to_string()).collect(),
                    reds,
                )
            }
        };
        DecoratedSummary {
            colors: names(&colors),
            members: self.members.iter().zip(&self.classes).map(|(p, c)| (p.to_string(), *c)).collect(),
            arcs,
            reduced_alphabet,
            reduced_class,
            reductions,
        }
    }
}
