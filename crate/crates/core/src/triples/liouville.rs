//! Approximation functions `φ`, the sequence `ψ_k`, and the nested-simplex Liouville construction.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinat::{Kind, Letter, Path, Permutation, RauzyClass};
use crate::error::{Error, Result};
use crate::iet::{render_rational, Iet, Triple};
use crate::matrices::{QVector, VisitMatrix};

use super::properties::{find_reference_pair, PairKind};

/// A positive approximation function `φ(n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Phi {
    /// `c / (n log²(n+1))`.
    LogSq { c: f64 },
    /// `c / (n log(n+1))`.
    Log { c: f64 },
    /// `c / n^p`.
    Power { c: f64, p: f64 },
    /// `c · b^{-n}`.
    Geometric { c: f64, b: f64 },
    /// `φ(1), φ(2), ...`; zero past the end of the table.
    Tabulated(Vec<f64>),
}

impl Phi {
    /// `φ(n)`; families with a pole at zero return `+∞` there.
    pub fn eval(&self, n: u64) -> f64 {
        let x = n as f64;
        match *self {
            Phi::LogSq { c } | Phi::Log { c } | Phi::Power { c, .. } if n == 0 => {
                if c == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Phi::LogSq { c } => c / (x * x.ln_1p().powi(2)),
            Phi::Log { c } => c / (x * x.ln_1p()),
            Phi::Power { c, p } => c / x.powf(p),
            Phi::Geometric { c, b } => c * (-x * b.ln()).exp(),
            Phi::Tabulated(ref v) => match n {
                0 => f64::INFINITY,
                _ => v.get(n as usize - 1).copied().unwrap_or(0.0),
            },
        }
    }

    /// `t φ(t)` for the step interpolation `φ(t) = nφ(n)/t`, `n = ⌊t⌋`, given `ln t`.
    pub fn t_phi_log(&self, ln_t: f64) -> f64 {
        if ln_t < 40.0 {
            let n = ln_t.exp().floor();
            return match *self {
                Phi::LogSq { c } => c / n.ln_1p().powi(2),
                Phi::Log { c } => c / n.ln_1p(),
                Phi::Power { c, p } => c * n.powf(1.0 - p),
                Phi::Geometric { c, b } => c * (n.ln() - n * b.ln()).exp(),
                Phi::Tabulated(_) => n * self.eval(n as u64),
            };
        }
        match *self {
            Phi::LogSq { c } => c / ln_t.powi(2),
            Phi::Log { c } => c / ln_t,
            Phi::Power { c, p } => c * ((1.0 - p) * ln_t).exp(),
            Phi::Geometric { .. } | Phi::Tabulated(_) => 0.0,
        }
    }
}

impl fmt::Display for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phi::LogSq { c } => write!(f, "{c}/(n*log(n+1)^2)"),
            Phi::Log { c } => write!(f, "{c}/(n*log(n+1))"),
            Phi::Power { c, p } => write!(f, "{c}/n^{p}"),
            Phi::Geometric { c, b } => write!(f, "{c}*{b}^-n"),
            Phi::Tabulated(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "tab:{}", items.join(","))
            }
        }
    }
}

impl FromStr for Phi {
    type Err = Error;

    /// Accepts `c/(n*log(n+1)^2)`, `c/(n*log(n+1))`, `c/n^p`, `c/n`, `c*b^-n`, `0` and
    /// `tab:v1,v2,...`.
    fn from_str(s: &str) -> Result<Phi> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |x: &str| x.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {x:?} in {s:?}")));
        if let Some(rest) = s.strip_prefix("tab:") {
            let v = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Ok(Phi::Tabulated(v));
        }
        if s == "0" {
            return Ok(Phi::Power { c: 0.0, p: 1.0 });
        }
        if let Some((c, rest)) = s.split_once('*') {
            if !rest.contains("log") {
                let base = rest
                    .strip_suffix("^-n")
                    .or_else(|| rest.strip_suffix("^(-n)"))
                    .ok_or_else(|| Error::Parse(format!("unknown form {s:?}")))?;
                return Ok(Phi::Geometric { c: num(c)?, b: num(base)? });
            }
        }
        let (c, den) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("unknown form {s:?}")))?;
        let c = num(c)?;
        match den {
            "(n*log(n+1)^2)" => Ok(Phi::LogSq { c }),
            "(n*log(n+1))" => Ok(Phi::Log { c }),
            "n" => Ok(Phi::Power { c, p: 1.0 }),
            _ => match den.strip_prefix("n^") {
                Some(p) => Ok(Phi::Power { c, p: num(p.trim_matches(|ch| ch == '(' || ch == ')'))? }),
                None => Err(Error::Parse(format!("unknown form {s:?}"))),
            },
        }
    }
}

/// `ψ_k = θ^k φ(θ^k) / (dM)` with `φ` step-interpolated.
pub fn psi_sequence(k: u32, phi: &Phi, theta: f64, m: &BigUint, d: usize) -> f64 {
    let ln_t = f64::from(k) * theta.ln();
    let mf = m.to_f64().unwrap_or(f64::INFINITY);
    phi.t_phi_log(ln_t) / (d as f64 * mf)
}

/// A reduced triple certified by the construction.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub round: usize,
    /// Step at which the reference suffix ends.
    pub step: usize,
    pub triple: Triple,
    pub gap: String,
    pub phi: f64,
    /// The exact oracle confirms the triple is reduced.
    pub reduced: bool,
    /// The exact gap is below `φ(n)`.
    pub below_phi: bool,
}

/// Output of [`liouville_builder`].
#[derive(Debug, Clone)]
pub struct LiouvilleResult {
    pub iet: Iet<BigRational>,
    pub path: Path,
    pub certificates: Vec<Certificate>,
}

fn phi_rational(x: f64) -> Option<BigRational> {
    if x.is_finite() {
        BigRational::from_float(x)
    } else {
        None
    }
}

/// `l(β) + h(α)` after each prefix of `path` (index = prefix length).
fn counter_sums(path: &Path, beta: Letter, alpha: Letter) -> Vec<BigUint> {
    let d = path.d();
    let mut q = QVector::ones(d);
    let mut l = vec![BigUint::zero(); d];
    let mut h = vec![BigUint::zero(); d];
    let mut out = vec![BigUint::zero()];
    for a in path.arrows() {
        let qw = q.get(a.winner).clone();
        match a.kind {
            Kind::Top => l[a.loser] += &qw,
            Kind::Bottom => h[a.loser] += &qw,
        }
        q.apply_arrow(a.winner, a.loser);
        out.push(&l[beta] + &h[alpha]);
    }
    out
}

/// First `A_α`-colored path from `start` (breadth first, `t` before `b`) with `q_α > 1/ε`.
fn shrinking_extension(start: &Permutation, alpha: Letter, eps: &BigRational, nodes: usize) -> Result<Path> {
    let inv = eps.recip();
    let root = Path::trivial(start.clone());
    let mut queue = VecDeque::from([(root, QVector::ones(start.d()))]);
    let mut seen = 0usize;
    while let Some((p, q)) = queue.pop_front() {
        if BigRational::from_integer(BigInt::from(q.get(alpha).clone())) > inv {
            return Ok(p);
        }
        seen += 1;
        if seen > nodes {
            break;
        }
        for k in Kind::BOTH {
            let (w, lo) = p.end().winner_loser(k);
            if w == alpha {
                continue;
            }
            let mut p2 = p.clone();
            p2.push(k)?;
            let mut q2 = q.clone();
            q2.apply_arrow(w, lo);
            queue.push_back((p2, q2));
        }
    }
    Err(Error::Budget(format!("no shrinking extension within {nodes} nodes")))
}

/// Builds a rational IET with `rounds` certified reduced triples `(X, Y, n)` satisfying
/// `|T^n u_X^b − u_Y^t| < φ(n)`.
///
/// Each round walks to the property-A pivot of `(X, Y)` and appends the suffix `t b`. Between
/// rounds an `A_Y`-colored extension forces `λ_Y < φ(n)` at the round end; after the last
/// round the final lengths are chosen with a small `Y`-coordinate and pulled back.
pub fn liouville_builder(
    class: &RauzyClass,
    pi0: &Permutation,
    phi: &Phi,
    rounds: usize,
    nodes: usize,
) -> Result<LiouvilleResult> {
    if !class.contains(pi0) {
        return Err(Error::Precondition("start is not in the class".into()));
    }
    let d = pi0.d();
    let (beta, alpha) = (pi0.x(), pi0.y());
    let mut path = Path::trivial(pi0.clone());
    let mut marks: Vec<(usize, u64, f64)> = Vec::with_capacity(rounds);
    if rounds > 0 {
        let (pivot, kind) = find_reference_pair(class, beta, alpha)?;
        debug_assert_eq!(kind, PairKind::A);
        for round in 0..rounds {
            let conn = class
                .shortest_path(path.end(), &pivot)
                .ok_or_else(|| Error::Precondition("pivot unreachable".into()))?;
            path = path.concat(&conn).map_err(|_| Error::NotComposable)?;
            path.push(Kind::Top)?;
            path.push(Kind::Bottom)?;
            let r = path.len();
            let sums = counter_sums(&path, beta, alpha);
            let n = u64::try_from(&sums[r - 2]).map_err(|_| Error::Budget("n overflows u64".into()))?;
            let f = phi.eval(n);
            if f <= 0.0 || f.is_nan() {
                return Err(Error::Precondition(format!("phi({n}) is not positive")));
            }
            marks.push((r, n, f));
            if round + 1 < rounds {
                if let Some(eps) = phi_rational(f) {
                    let ext = shrinking_extension(path.end(), alpha, &eps, nodes)?;
                    path = path.concat(&ext).map_err(|_| Error::NotComposable)?;
                }
            }
        }
    }
    let last_phi = marks.last().and_then(|m| phi_rational(m.2));
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let c = match last_phi {
        Some(f) if &f * &half < half => &f * &half,
        _ if rounds > 0 => half.clone(),
        _ => BigRational::new(BigInt::one(), BigInt::from(d)),
    };
    let rest = (BigRational::one() - &c) / BigRational::from_integer(BigInt::from(d - 1));
    let lam_end: Vec<BigRational> = (0..d).map(|x| if x == alpha { c.clone() } else { rest.clone() }).collect();
    let b = VisitMatrix::of_path(&path);
    let lam = b.transpose_apply(&lam_end);
    let t = Iet::new(pi0.clone(), lam)?.normalized();
    let certificates = certify(&t, &path, &marks, beta, alpha)?;
    Ok(LiouvilleResult { iet: t, path, certificates })
}

fn certify(
    t: &Iet<BigRational>,
    path: &Path,
    marks: &[(usize, u64, f64)],
    beta: Letter,
    alpha: Letter,
) -> Result<Vec<Certificate>> {
    let mut out = Vec::with_capacity(marks.len());
    for (round, &(step, n, f)) in marks.iter().enumerate() {
        let triple = Triple { beta, alpha, n };
        let gap = t.triple_gap(&triple)?;
        let reduced = t.is_reduced_triple(&triple)?;
        let below_phi = match phi_rational(f) {
            Some(pf) => gap < pf,
            None => true,
        };
        debug_assert!(step <= path.len());
        out.push(Certificate { round, step, triple, gap: render_rational(&gap), phi: f, reduced, below_phi });
    }
    Ok(out)
}
