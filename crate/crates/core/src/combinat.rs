//! Alphabets, permutations, Rauzy operations, Rauzy classes and paths.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrices::VisitMatrix;

/// Index of a letter inside its alphabet.
pub type Letter = usize;

/// An ordered set of `d >= 2` distinct letter names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Result<Self> {
        if names.len() < 2 {
            return Err(Error::Parse("alphabet needs at least two letters".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || a.chars().any(|c| c.is_whitespace() || c == '/') {
                return Err(Error::Parse(format!("bad letter name {a:?}")));
            }
            if names[..i].contains(a) {
                return Err(Error::Parse(format!("duplicate letter {a}")));
            }
        }
        Ok(Alphabet { names })
    }

    /// The alphabet `A, B, C, ...` of size `d` (at most 26).
    pub fn standard(d: usize) -> Self {
        assert!((2..=26).contains(&d));
        Alphabet {
            names: (0..d).map(|i| ((b'A' + i as u8) as char).to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name)
    }
}

/// Arrow type: `Top` is `R^t` (winner is the last top letter), `Bottom` is `R^b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Kind {
    Top,
    Bottom,
}

impl Kind {
    pub const BOTH: [Kind; 2] = [Kind::Top, Kind::Bottom];

    pub fn index(self) -> usize {
        match self {
            Kind::Top => 0,
            Kind::Bottom => 1,
        }
    }

    pub fn other(self) -> Kind {
        match self {
            Kind::Top => Kind::Bottom,
            Kind::Bottom => Kind::Top,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Kind::Top => 't',
            Kind::Bottom => 'b',
        }
    }

    pub fn from_char(c: char) -> Result<Kind> {
        match c {
            't' => Ok(Kind::Top),
            'b' => Ok(Kind::Bottom),
            _ => Err(Error::Parse(format!("bad arrow type {c:?}"))),
        }
    }

    pub fn parse_seq(s: &str) -> Result<Vec<Kind>> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(Kind::from_char)
            .collect()
    }
}

/// A pair of bijections from the alphabet onto positions `1..=d`.
///
/// Rows are stored as letter sequences; `top_pos`/`bottom_pos` return 1-based positions.
#[derive(Clone)]
pub struct Permutation {
    rows: Arc<Rows>,
}

struct Rows {
    alphabet: Arc<Alphabet>,
    top: Vec<Letter>,
    bottom: Vec<Letter>,
    tpos: Vec<usize>,
    bpos: Vec<usize>,
}

impl PartialEq for Permutation {
    fn eq(&self, other: &Self) -> bool {
        self.rows.top == other.rows.top && self.rows.bottom == other.rows.bottom && self.rows.alphabet == other.rows.alphabet
    }
}

impl Eq for Permutation {}

impl Hash for Permutation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows.top.hash(state);
        self.rows.bottom.hash(state);
    }
}

fn inverse_row(row: &[Letter]) -> Vec<usize> {
    let mut pos = vec![0; row.len()];
    for (i, &l) in row.iter().enumerate() {
        pos[l] = i + 1;
    }
    pos
}

impl Permutation {
    pub fn new(alphabet: Arc<Alphabet>, top: Vec<Letter>, bottom: Vec<Letter>) -> Result<Self> {
        let d = alphabet.len();
        for row in [&top, &bottom] {
            let mut seen = vec![false; d];
            if row.len() != d {
                return Err(Error::Parse("row length differs from alphabet size".into()));
            }
            for &l in row {
                if l >= d || seen[l] {
                    return Err(Error::Parse("row is not a bijection".into()));
                }
                seen[l] = true;
            }
        }
        Ok(Self::from_rows_unchecked(alphabet, top, bottom))
    }

    fn from_rows_unchecked(alphabet: Arc<Alphabet>, top: Vec<Letter>, bottom: Vec<Letter>) -> Self {
        let tpos = inverse_row(&top);
        let bpos = inverse_row(&bottom);
        Permutation { rows: Arc::new(Rows { alphabet, top, bottom, tpos, bpos }) }
    }

    /// Parses `"A B C / C B A"`. Rows without whitespace are read one character per letter.
    /// The alphabet order is the order of the top row.
    pub fn parse(s: &str) -> Result<Self> {
        let (t, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("missing '/' in {s:?}")))?;
        let split = |row: &str| -> Vec<String> {
            let row = row.trim();
            if row.contains(char::is_whitespace) {
                row.split_whitespace().map(str::to_string).collect()
            } else {
                row.chars().map(|c| c.to_string()).collect()
            }
        };
        let tn = split(t);
        let bn = split(b);
        let alphabet = Arc::new(Alphabet::new(tn.clone())?);
        Self::parse_with(alphabet, &tn, &bn)
    }

    /// Parses a permutation over a given alphabet.
    pub fn parse_in(alphabet: Arc<Alphabet>, s: &str) -> Result<Self> {
        let p = Self::parse(s)?;
        let tn: Vec<String> = p.rows.top.iter().map(|&l| p.rows.alphabet.name(l).to_string()).collect();
        let bn: Vec<String> = p.rows.bottom.iter().map(|&l| p.rows.alphabet.name(l).to_string()).collect();
        Self::parse_with(alphabet, &tn, &bn)
    }

    fn parse_with(alphabet: Arc<Alphabet>, tn: &[String], bn: &[String]) -> Result<Self> {
        let look = |n: &String| {
            alphabet
                .letter(n)
                .ok_or_else(|| Error::Parse(format!("unknown letter {n}")))
        };
        let top = tn.iter().map(look).collect::<Result<Vec<_>>>()?;
        let bottom = bn.iter().map(look).collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, top, bottom)
    }

    /// The symmetric datum `A B ... / ... B A` on the standard alphabet.
    pub fn symmetric(d: usize) -> Self {
        let alphabet = Arc::new(Alphabet::standard(d));
        let top: Vec<Letter> = (0..d).collect();
        let bottom: Vec<Letter> = (0..d).rev().collect();
        Self::from_rows_unchecked(alphabet, top, bottom)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.rows.alphabet
    }

    pub fn d(&self) -> usize {
        self.rows.top.len()
    }

    pub fn top_row(&self) -> &[Letter] {
        &self.rows.top
    }

    pub fn bottom_row(&self) -> &[Letter] {
        &self.rows.bottom
    }

    pub fn row(&self, kind: Kind) -> &[Letter] {
        match kind {
            Kind::Top => &self.rows.top,
            Kind::Bottom => &self.rows.bottom,
        }
    }

    /// 1-based position of `l` in the top row.
    pub fn top_pos(&self, l: Letter) -> usize {
        self.rows.tpos[l]
    }

    /// 1-based position of `l` in the bottom row.
    pub fn bottom_pos(&self, l: Letter) -> usize {
        self.rows.bpos[l]
    }

    pub fn pos(&self, kind: Kind, l: Letter) -> usize {
        match kind {
            Kind::Top => self.rows.tpos[l],
            Kind::Bottom => self.rows.bpos[l],
        }
    }

    /// Letter in top position 1.
    pub fn x(&self) -> Letter {
        self.rows.top[0]
    }

    /// Letter in bottom position 1.
    pub fn y(&self) -> Letter {
        self.rows.bottom[0]
    }

    /// Last letter of the top row.
    pub fn top_last(&self) -> Letter {
        self.rows.top[self.d() - 1]
    }

    /// Last letter of the bottom row.
    pub fn bottom_last(&self) -> Letter {
        self.rows.bottom[self.d() - 1]
    }

    pub fn last(&self, kind: Kind) -> Letter {
        match kind {
            Kind::Top => self.top_last(),
            Kind::Bottom => self.bottom_last(),
        }
    }

    pub fn name(&self, l: Letter) -> &str {
        self.rows.alphabet.name(l)
    }

    /// Winner and loser of the arrow of the given type.
    pub fn winner_loser(&self, kind: Kind) -> (Letter, Letter) {
        match kind {
            Kind::Top => (self.top_last(), self.bottom_last()),
            Kind::Bottom => (self.bottom_last(), self.top_last()),
        }
    }

    /// True iff no `k < d` has the same first-`k` letter set in both rows.
    pub fn is_admissible(&self) -> bool {
        self.reducible_prefix().is_none()
    }

    /// Smallest `k < d` such that both rows share their first `k` letters.
    pub fn reducible_prefix(&self) -> Option<usize> {
        let d = self.d();
        let mut max_bottom = 0;
        for k in 1..d {
            max_bottom = max_bottom.max(self.rows.bpos[self.rows.top[k - 1]]);
            if max_bottom == k {
                return Some(k);
            }
        }
        None
    }

    /// The elementary Rauzy operation `R^kind`.
    pub fn rauzy_op(&self, kind: Kind) -> Result<Permutation> {
        let d = self.d();
        let (w, l) = self.winner_loser(kind);
        if w == l {
            return Err(Error::RowsEndEqual);
        }
        let mut top = self.rows.top.clone();
        let mut bottom = self.rows.bottom.clone();
        let row = match kind {
            Kind::Top => &mut bottom,
            Kind::Bottom => &mut top,
        };
        let wpos = self.pos(kind.other(), w);
        row.pop();
        debug_assert!(wpos < d);
        row.insert(wpos, l);
        Ok(Self::from_rows_unchecked(self.rows.alphabet.clone(), top, bottom))
    }

    /// Both rows deleting letters outside `keep`, over the same alphabet index space.
    pub fn restricted_rows(&self, keep: &[bool]) -> (Vec<Letter>, Vec<Letter>) {
        (
            self.rows.top.iter().copied().filter(|&l| keep[l]).collect(),
            self.rows.bottom.iter().copied().filter(|&l| keep[l]).collect(),
        )
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: &[Letter]| {
            r.iter()
                .map(|&l| self.rows.alphabet.name(l))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(f, "{} / {}", row(&self.rows.top), row(&self.rows.bottom))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// An elementary arrow `start -> R^kind(start)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub start: Permutation,
    pub kind: Kind,
    pub winner: Letter,
    pub loser: Letter,
    pub end: Permutation,
}

impl Arrow {
    pub fn new(start: &Permutation, kind: Kind) -> Result<Arrow> {
        let end = start.rauzy_op(kind)?;
        let (winner, loser) = start.winner_loser(kind);
        Ok(Arrow { start: start.clone(), kind, winner, loser, end })
    }
}

/// A composable sequence of arrows; the empty sequence is identified with its start.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    start: Permutation,
    arrows: Vec<Arrow>,
}

impl Path {
    pub fn trivial(start: Permutation) -> Path {
        Path { start, arrows: Vec::new() }
    }

    pub fn from_kinds(start: &Permutation, kinds: &[Kind]) -> Result<Path> {
        let mut p = Path::trivial(start.clone());
        for &k in kinds {
            p.push(k)?;
        }
        Ok(p)
    }

    /// Path from `start` following a string over `{t, b}`.
    pub fn parse(start: &Permutation, kinds: &str) -> Result<Path> {
        Path::from_kinds(start, &Kind::parse_seq(kinds)?)
    }

    pub fn push(&mut self, kind: Kind) -> Result<()> {
        let a = Arrow::new(self.end(), kind)?;
        self.arrows.push(a);
        Ok(())
    }

    pub fn push_arrow(&mut self, a: Arrow) -> Result<()> {
        if &a.start != self.end() {
            return Err(Error::NotComposable);
        }
        self.arrows.push(a);
        Ok(())
    }

    pub fn pop(&mut self) -> Option<Arrow> {
        self.arrows.pop()
    }

    pub fn start(&self) -> &Permutation {
        &self.start
    }

    pub fn end(&self) -> &Permutation {
        self.arrows.last().map_or(&self.start, |a| &a.end)
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn d(&self) -> usize {
        self.start.d()
    }

    pub fn kinds(&self) -> Vec<Kind> {
        self.arrows.iter().map(|a| a.kind).collect()
    }

    pub fn kind_string(&self) -> String {
        self.arrows.iter().map(|a| a.kind.as_char()).collect()
    }

    /// Vertex before arrow `i` (`i == len()` gives the end).
    pub fn vertex(&self, i: usize) -> &Permutation {
        if i == 0 {
            &self.start
        } else {
            &self.arrows[i - 1].end
        }
    }

    /// Sub-path made of arrows `i..j`.
    pub fn sub(&self, i: usize, j: usize) -> Path {
        Path { start: self.vertex(i).clone(), arrows: self.arrows[i..j].to_vec() }
    }

    pub fn concat(&self, other: &Path) -> Result<Path> {
        if other.start() != self.end() {
            return Err(Error::NotComposable);
        }
        let mut p = self.clone();
        p.arrows.extend(other.arrows.iter().cloned());
        Ok(p)
    }

    /// `self ≺ other`: `other` begins with `self`.
    pub fn is_prefix_of(&self, other: &Path) -> bool {
        self.start == other.start
            && self.len() <= other.len()
            && self.arrows.iter().zip(&other.arrows).all(|(a, b)| a.kind == b.kind)
    }

    /// `self` ends with `eta` (arrows and vertices both matching).
    pub fn ends_with(&self, eta: &Path) -> bool {
        let (n, m) = (self.len(), eta.len());
        if m > n {
            return false;
        }
        self.vertex(n - m) == eta.start()
            && self.arrows[n - m..].iter().zip(&eta.arrows).all(|(a, b)| a.kind == b.kind)
    }

    /// Number of arrows won by `l`.
    pub fn wins(&self, l: Letter) -> usize {
        self.arrows.iter().filter(|a| a.winner == l).count()
    }

    /// True iff no non-trivial proper sub-path is both a prefix and a suffix.
    pub fn is_neat(&self) -> Result<bool> {
        if self.is_trivial() {
            return Err(Error::TrivialPath);
        }
        let n = self.len();
        Ok((1..n).all(|k| !self.ends_with(&self.sub(0, k))))
    }

    /// True iff every entry of the visit matrix is at least one.
    pub fn is_positive(&self) -> bool {
        VisitMatrix::of_path(self).is_positive()
    }

    /// True iff every letter wins some arrow.
    pub fn is_complete(&self) -> bool {
        let mut won = vec![false; self.d()];
        for a in &self.arrows {
            won[a.winner] = true;
        }
        won.into_iter().all(|w| w)
    }

    /// All paths of length `0..=max_len` from `start`, shortest first, `t` before `b`.
    pub fn enumerate(start: &Permutation, max_len: usize) -> Vec<Path> {
        let mut out = vec![Path::trivial(start.clone())];
        let mut lo = 0;
        for _ in 0..max_len {
            let hi = out.len();
            for i in lo..hi {
                for k in Kind::BOTH {
                    let mut p = out[i].clone();
                    p.push(k).expect("admissible vertices have distinct last letters");
                    out.push(p);
                }
            }
            lo = hi;
        }
        out
    }
}

/// A Rauzy class with its diagram, in breadth-first order.
#[derive(Debug, Clone)]
pub struct RauzyClass {
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    next: Vec<[usize; 2]>,
    prev: Vec<[usize; 2]>,
}

impl RauzyClass {
    /// Breadth-first closure of `{pi}` under `R^t` then `R^b`.
    pub fn of(pi: &Permutation) -> Result<RauzyClass> {
        if !pi.is_admissible() {
            return Err(Error::NotAdmissible(pi.to_string()));
        }
        let (x, y) = (pi.x(), pi.y());
        let mut elements = vec![pi.clone()];
        let mut index = HashMap::from([(pi.clone(), 0usize)]);
        let mut next: Vec<[usize; 2]> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut succ = [0; 2];
            for k in Kind::BOTH {
                let e = elements[i].rauzy_op(k)?;
                assert!(e.is_admissible(), "Rauzy operation broke admissibility");
                assert!(e.x() == x && e.y() == y, "X or Y moved inside a class");
                let j = match index.get(&e) {
                    Some(&j) => j,
                    None => {
                        let j = elements.len();
                        index.insert(e.clone(), j);
                        elements.push(e);
                        queue.push_back(j);
                        j
                    }
                };
                succ[k.index()] = j;
            }
            if next.len() <= i {
                next.resize(i + 1, [0; 2]);
            }
            next[i] = succ;
        }
        let mut prev = vec![[usize::MAX; 2]; elements.len()];
        for (i, s) in next.iter().enumerate() {
            for k in Kind::BOTH {
                let slot = &mut prev[s[k.index()]][k.index()];
                assert!(*slot == usize::MAX, "two incoming arrows of the same type");
                *slot = i;
            }
        }
        assert!(prev.iter().all(|p| p[0] != usize::MAX && p[1] != usize::MAX));
        Ok(RauzyClass { elements, index, next, prev })
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn d(&self) -> usize {
        self.elements[0].d()
    }

    pub fn index_of(&self, pi: &Permutation) -> Option<usize> {
        self.index.get(pi).copied()
    }

    pub fn contains(&self, pi: &Permutation) -> bool {
        self.index.contains_key(pi)
    }

    pub fn next(&self, i: usize, kind: Kind) -> usize {
        self.next[i][kind.index()]
    }

    pub fn prev(&self, i: usize, kind: Kind) -> usize {
        self.prev[i][kind.index()]
    }

    /// Letter in top position 1 for every element.
    pub fn x(&self) -> Letter {
        self.elements[0].x()
    }

    /// Letter in bottom position 1 for every element.
    pub fn y(&self) -> Letter {
        self.elements[0].y()
    }

    /// All arrows of the diagram, element by element, top before bottom.
    pub fn arrows(&self) -> Vec<Arrow> {
        let mut out = Vec::with_capacity(2 * self.len());
        for (i, e) in self.elements.iter().enumerate() {
            for k in Kind::BOTH {
                let (winner, loser) = e.winner_loser(k);
                out.push(Arrow {
                    start: e.clone(),
                    kind: k,
                    winner,
                    loser,
                    end: self.elements[self.next(i, k)].clone(),
                });
            }
        }
        out
    }

    /// First element in BFS order with `X` and `Y` at opposite ends of both rows.
    pub fn find_standard(&self) -> Option<&Permutation> {
        let d = self.d();
        self.elements.iter().find(|p| {
            let (x, y) = (p.x(), p.y());
            p.top_pos(y) == d && p.bottom_pos(x) == d
        })
    }

    /// Shortest path (BFS, `t` first) from `from` to `to` inside the class.
    pub fn shortest_path(&self, from: &Permutation, to: &Permutation) -> Option<Path> {
        let s = self.index_of(from)?;
        let t = self.index_of(to)?;
        let mut parent: Vec<Option<(usize, Kind)>> = vec![None; self.len()];
        let mut seen = vec![false; self.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            if i == t {
                break;
            }
            for k in Kind::BOTH {
                let j = self.next(i, k);
                if !seen[j] {
                    seen[j] = true;
                    parent[j] = Some((i, k));
                    queue.push_back(j);
                }
            }
        }
        if !seen[t] {
            return None;
        }
        let mut kinds = Vec::new();
        let mut cur = t;
        while cur != s {
            let (p, k) = parent[cur].expect("reached vertices have parents");
            kinds.push(k);
            cur = p;
        }
        kinds.reverse();
        Path::from_kinds(from, &kinds).ok()
    }

    /// Distance (in arrows) from every element to `target`.
    pub fn distances_to(&self, target: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[target] = 0;
        let mut queue = VecDeque::from([target]);
        while let Some(j) = queue.pop_front() {
            for k in Kind::BOTH {
                let i = self.prev(j, k);
                if dist[i] == usize::MAX {
                    dist[i] = dist[j] + 1;
                    queue.push_back(i);
                }
            }
        }
        dist
    }
}

/// All Rauzy classes of admissible data whose top row is `A B C ...`, `d` letters.
///
/// Every class contains such a datum up to relabeling; classes are listed once each, in order
/// of the lexicographically first bottom row that generates them.
pub fn classes_with_identity_top(d: usize) -> Vec<RauzyClass> {
    let alphabet = Arc::new(Alphabet::standard(d));
    let top: Vec<Letter> = (0..d).collect();
    let mut out: Vec<RauzyClass> = Vec::new();
    let mut bottom: Vec<Letter> = (0..d).collect();
    loop {
        let p = Permutation::from_rows_unchecked(alphabet.clone(), top.clone(), bottom.clone());
        if p.is_admissible() && !out.iter().any(|c| c.contains(&p)) {
            out.push(RauzyClass::of(&p).expect("admissible"));
        }
        if !next_permutation(&mut bottom) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
