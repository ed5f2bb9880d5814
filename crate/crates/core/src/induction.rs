//! Rauzy-Veech induction `Q`, its normalization `Q̂`, Zorich acceleration and return-time counters.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::combinat::{Kind, Letter, Path};
use crate::error::{Error, Result};
use crate::iet::{Field, Iet, IetType, Scalar};
use crate::matrices::{QVector, VisitMatrix};

/// `T^(r)` together with `γ(T, r)`, `B`, `q`, and the counters `l`, `h`.
#[derive(Debug, Clone)]
pub struct InductionState<S: Scalar> {
    current: Iet<S>,
    path: Path,
    b: VisitMatrix,
    q: QVector,
    l: Vec<BigUint>,
    h: Vec<BigUint>,
}

impl<S: Scalar> InductionState<S> {
    /// State at `r = 0`.
    pub fn new(t: Iet<S>) -> Self {
        let d = t.d();
        InductionState {
            path: Path::trivial(t.perm().clone()),
            current: t,
            b: VisitMatrix::identity(d),
            q: QVector::ones(d),
            l: vec![BigUint::zero(); d],
            h: vec![BigUint::zero(); d],
        }
    }

    pub fn current(&self) -> &Iet<S> {
        &self.current
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn b(&self) -> &VisitMatrix {
        &self.b
    }

    pub fn q(&self) -> &QVector {
        &self.q
    }

    pub fn l(&self, x: Letter) -> &BigUint {
        &self.l[x]
    }

    pub fn h(&self, x: Letter) -> &BigUint {
        &self.h[x]
    }

    pub fn ls(&self) -> &[BigUint] {
        &self.l
    }

    pub fn hs(&self) -> &[BigUint] {
        &self.h
    }

    /// Number of steps taken.
    pub fn r(&self) -> usize {
        self.path.len()
    }

    /// Type of the current transformation; float ties report the current step.
    pub fn next_kind(&self) -> Result<Kind> {
        match self.current.iet_type() {
            Ok(IetType::Top) => Ok(Kind::Top),
            Ok(IetType::Bottom) => Ok(Kind::Bottom),
            Ok(IetType::None) => Err(Error::AlgorithmStopped { step: self.r() }),
            Err(Error::PrecisionExhausted { .. }) => Err(Error::PrecisionExhausted { step: self.r() }),
            Err(e) => Err(e),
        }
    }

    /// One application of `Q`, updating all bookkeeping in place.
    pub fn step(&mut self) -> Result<Kind> {
        let kind = self.next_kind()?;
        let (w, lo) = self.current.perm().winner_loser(kind);
        let perm = self.current.perm().rauzy_op(kind)?;
        let mut lengths = self.current.lengths().to_vec();
        lengths[w] = lengths[w].sub(&lengths[lo]);
        let qw = self.q.get(w).clone();
        match kind {
            Kind::Top => self.l[lo] += &qw,
            Kind::Bottom => self.h[lo] += &qw,
        }
        self.q.apply_arrow(w, lo);
        self.b.apply_arrow(w, lo);
        self.path.push(kind)?;
        self.current = Iet::from_parts(perm, lengths);
        Ok(kind)
    }

    /// Runs `r` steps.
    pub fn run(&mut self, r: usize) -> Result<()> {
        for _ in 0..r {
            self.step()?;
        }
        Ok(())
    }
}

/// One step of `Q`, consuming the state.
pub fn rauzy_step<S: Scalar>(mut state: InductionState<S>) -> Result<InductionState<S>> {
    state.step()?;
    Ok(state)
}

/// `r` steps of `Q` from `T`.
pub fn iterate<S: Scalar>(t: &Iet<S>, r: usize) -> Result<InductionState<S>> {
    let mut s = InductionState::new(t.clone());
    s.run(r)?;
    Ok(s)
}

/// `γ(T, r)`.
pub fn path_of<S: Scalar>(t: &Iet<S>, r: usize) -> Result<Path> {
    Ok(iterate(t, r)?.path)
}

/// `Q̂(T)`.
pub fn normalized_step<S: Field>(t: &Iet<S>) -> Result<Iet<S>> {
    Ok(iterate(t, 1)?.current.normalized())
}

/// `Z(T) = Q̂^{N(T)}(T)` with `N(T)`.
pub fn zorich_step<S: Field>(t: &Iet<S>) -> Result<(Iet<S>, usize)> {
    let mut s = InductionState::new(t.clone());
    let first = s.step()?;
    let mut n = 1;
    loop {
        let k = s.next_kind()?;
        if k != first {
            break;
        }
        s.step()?;
        n += 1;
    }
    Ok((s.current.normalized(), n))
}

/// One traced step in an induction run.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub kind: char,
    pub winner: String,
    pub loser: String,
    pub perm: String,
    pub lengths: Vec<String>,
    pub q: Vec<String>,
    pub l: Vec<String>,
    pub h: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zorich_count: Option<usize>,
}

impl TraceStep {
    pub fn of<S: Scalar>(s: &InductionState<S>, zorich_count: Option<usize>) -> TraceStep {
        let a = s.path.arrows().last().expect("at least one step");
        let t = s.current.perm();
        let strs = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect();
        TraceStep {
            step: s.r(),
            kind: a.kind.as_char(),
            winner: t.name(a.winner).to_string(),
            loser: t.name(a.loser).to_string(),
            perm: t.to_string(),
            lengths: s.current.lengths().iter().map(Scalar::render).collect(),
            q: strs(&s.q.0),
            l: strs(&s.l),
            h: strs(&s.h),
            zorich_count,
        }
    }
}

/// Induction mode for traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Normalized,
    Zorich,
}

/// Trace of up to `steps` steps (Zorich mode counts accelerated steps); stops early on error.
pub fn trace<S: Field>(t: &Iet<S>, steps: usize, mode: Mode) -> (Vec<TraceStep>, Option<Error>) {
    let mut out = Vec::new();
    let mut s = InductionState::new(t.clone());
    for _ in 0..steps {
        match mode {
            Mode::Plain | Mode::Normalized => {
                if let Err(e) = s.step() {
                    return (out, Some(e));
                }
                let mut tr = TraceStep::of(&s, None);
                if mode == Mode::Normalized {
                    tr.lengths = s.current.normalized().lengths().iter().map(Scalar::render).collect();
                }
                out.push(tr);
            }
            Mode::Zorich => {
                let first = match s.step() {
                    Ok(k) => k,
                    Err(e) => return (out, Some(e)),
                };
                let mut n = 1;
                loop {
                    match s.next_kind() {
                        Ok(k) if k != first => break,
                        Ok(_) => {
                            if let Err(e) = s.step() {
                                return (out, Some(e));
                            }
                            n += 1;
                        }
                        Err(e) => return (out, Some(e)),
                    }
                }
                let mut tr = TraceStep::of(&s, Some(n));
                tr.lengths = s.current.normalized().lengths().iter().map(Scalar::render).collect();
                out.push(tr);
            }
        }
    }
    (out, None)
}
