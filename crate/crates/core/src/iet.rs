//! Interval exchange transformations over exact and floating backends.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::combinat::{Kind, Letter, Permutation};
use crate::error::{Error, Result};

/// Relative width of the float tie band.
pub const FLOAT_BAND: f64 = 1e-12;

/// Numeric backend for lengths and points.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Send + Sync + 'static {
    const EXACT: bool;
    fn zero() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value (bit-exact for floats).
    fn to_rational(&self) -> BigRational;
    /// Ordering, or `None` when a float comparison falls inside `FLOAT_BAND * scale`.
    fn compare(&self, o: &Self, scale: &Self) -> Option<Ordering>;
    fn render(&self) -> String;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    fn abs_diff(&self, o: &Self) -> Self {
        if self >= o {
            self.sub(o)
        } else {
            o.sub(self)
        }
    }
}

/// Backends supporting division, used by normalization.
pub trait Field: Scalar {
    fn div(&self, o: &Self) -> Self;
    fn from_rational(r: &BigRational) -> Self;
}

macro_rules! exact_integer_scalar {
    ($t:ty, $zero:expr) => {
        impl Scalar for $t {
            const EXACT: bool = true;
            fn zero() -> Self {
                $zero
            }
            fn add(&self, o: &Self) -> Self {
                self.clone() + o.clone()
            }
            fn sub(&self, o: &Self) -> Self {
                self.clone() - o.clone()
            }
            fn to_f64(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
            }
            fn to_rational(&self) -> BigRational {
                BigRational::from_integer(BigInt::from(self.clone()))
            }
            fn compare(&self, o: &Self, _scale: &Self) -> Option<Ordering> {
                self.partial_cmp(o)
            }
            fn render(&self) -> String {
                self.to_string()
            }
        }
    };
}

exact_integer_scalar!(i128, 0);
exact_integer_scalar!(BigInt, <BigInt as Zero>::zero());

impl Scalar for BigRational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn compare(&self, o: &Self, _scale: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
    fn render(&self) -> String {
        render_rational(self)
    }
}

impl Field for BigRational {
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite float")
    }
    fn compare(&self, o: &Self, scale: &Self) -> Option<Ordering> {
        if (self - o).abs() <= FLOAT_BAND * scale.abs() {
            None
        } else {
            self.partial_cmp(o)
        }
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

impl Field for f64 {
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn from_rational(r: &BigRational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
}

/// `"p/q"`, or `"p"` for integers.
pub fn render_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"`, an integer or an exact decimal such as `"0.375"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad number {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    let shift = exp - fp.len() as i32;
    let ten = BigInt::from(10u32);
    let mut r = BigRational::from_integer(n);
    if shift >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Result of comparing the two last intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IetType {
    Top,
    Bottom,
    None,
}

impl IetType {
    pub fn kind(self) -> Option<Kind> {
        match self {
            IetType::Top => Some(Kind::Top),
            IetType::Bottom => Some(Kind::Bottom),
            IetType::None => None,
        }
    }
}

/// A triple `(β, α, n)` with `π^b(β) > 1` and `π^t(α) > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Triple {
    pub beta: Letter,
    pub alpha: Letter,
    pub n: u64,
}

/// Pairs `(β, α)` with `π^b(β) > 1` and `π^t(α) > 1`, ordered by `(β, α)`.
pub fn valid_pairs(pi: &Permutation) -> Vec<(Letter, Letter)> {
    let d = pi.d();
    let mut out = Vec::new();
    for beta in 0..d {
        for alpha in 0..d {
            if pi.bottom_pos(beta) > 1 && pi.top_pos(alpha) > 1 {
                out.push((beta, alpha));
            }
        }
    }
    out
}

fn check_pair(pi: &Permutation, beta: Letter, alpha: Letter) -> Result<()> {
    if beta >= pi.d() || alpha >= pi.d() || pi.bottom_pos(beta) <= 1 || pi.top_pos(alpha) <= 1 {
        return Err(Error::InvalidPair(format!(
            "need bottom position of beta > 1 and top position of alpha > 1 in ({pi})"
        )));
    }
    Ok(())
}

/// The vectors `w_β^b`, `w_α^t` and `w_{β,α} = w_β^b − w_α^t`.
pub fn w_vectors(pi: &Permutation, beta: Letter, alpha: Letter) -> Result<(Vec<i64>, Vec<i64>, Vec<i64>)> {
    check_pair(pi, beta, alpha)?;
    let d = pi.d();
    let wb: Vec<i64> = (0..d).map(|x| (pi.bottom_pos(x) < pi.bottom_pos(beta)) as i64).collect();
    let wt: Vec<i64> = (0..d).map(|x| (pi.top_pos(x) < pi.top_pos(alpha)) as i64).collect();
    let w = wb.iter().zip(&wt).map(|(a, b)| a - b).collect();
    Ok((wb, wt, w))
}

/// An interval exchange transformation `T = (π, λ)` on `[0, ‖λ‖)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iet<S: Scalar> {
    perm: Permutation,
    lengths: Vec<S>,
}

impl<S: Scalar> Iet<S> {
    pub fn new(perm: Permutation, lengths: Vec<S>) -> Result<Self> {
        if !perm.is_admissible() {
            return Err(Error::NotAdmissible(perm.to_string()));
        }
        if lengths.len() != perm.d() {
            return Err(Error::Parse("length vector size differs from d".into()));
        }
        if !lengths.iter().all(|l| l.is_positive()) {
            return Err(Error::Precondition("lengths must be positive".into()));
        }
        Ok(Iet { perm, lengths })
    }

    pub(crate) fn from_parts(perm: Permutation, lengths: Vec<S>) -> Self {
        Iet { perm, lengths }
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn lengths(&self) -> &[S] {
        &self.lengths
    }

    pub fn d(&self) -> usize {
        self.perm.d()
    }

    /// `‖λ‖`.
    pub fn norm(&self) -> S {
        self.lengths.iter().fold(S::zero(), |acc, l| acc.add(l))
    }

    /// Applies a function to every length.
    pub fn map<U: Scalar>(&self, f: impl Fn(&S) -> U) -> Iet<U> {
        Iet { perm: self.perm.clone(), lengths: self.lengths.iter().map(f).collect() }
    }

    fn prefix(&self, kind: Kind) -> Vec<S> {
        let mut u = vec![S::zero(); self.d()];
        let mut acc = S::zero();
        for &l in self.perm.row(kind) {
            u[l] = acc.clone();
            acc = acc.add(&self.lengths[l]);
        }
        u
    }

    /// `(u^t, u^b)` per letter; letters in row position 1 get 0.
    pub fn singularities(&self) -> (Vec<S>, Vec<S>) {
        (self.prefix(Kind::Top), self.prefix(Kind::Bottom))
    }

    /// Singularities in both rows, excluding the position-1 zeros, sorted.
    pub fn singular_points(&self) -> Vec<S> {
        let (ut, ub) = self.singularities();
        let mut v: Vec<S> = Vec::with_capacity(2 * self.d());
        for l in 0..self.d() {
            if self.perm.top_pos(l) > 1 {
                v.push(ut[l].clone());
            }
            if self.perm.bottom_pos(l) > 1 {
                v.push(ub[l].clone());
            }
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        v
    }

    /// `T(x)` with half-open intervals `[left, right)`.
    pub fn evaluate(&self, x: &S) -> Result<S> {
        let (ut, ub) = self.singularities();
        let norm = self.norm();
        if *x < S::zero() || *x >= norm {
            return Err(Error::OutOfDomain);
        }
        for &l in self.perm.top_row().iter().rev() {
            if *x >= ut[l] {
                return Ok(x.sub(&ut[l]).add(&ub[l]));
            }
        }
        unreachable!("x >= 0")
    }

    /// `T^{-1}(x)` with half-open intervals `[left, right)`.
    pub fn inverse(&self, x: &S) -> Result<S> {
        let (ut, ub) = self.singularities();
        let norm = self.norm();
        if *x < S::zero() || *x >= norm {
            return Err(Error::OutOfDomain);
        }
        for &l in self.perm.bottom_row().iter().rev() {
            if *x >= ub[l] {
                return Ok(x.sub(&ub[l]).add(&ut[l]));
            }
        }
        unreachable!("x >= 0")
    }

    /// Type of `T`; for floats a tie inside the band is reported as `PrecisionExhausted`.
    pub fn iet_type(&self) -> Result<IetType> {
        let at = self.perm.top_last();
        let ab = self.perm.bottom_last();
        match self.lengths[at].compare(&self.lengths[ab], &self.norm()) {
            Some(Ordering::Greater) => Ok(IetType::Top),
            Some(Ordering::Less) => Ok(IetType::Bottom),
            Some(Ordering::Equal) => Ok(IetType::None),
            None => Err(Error::PrecisionExhausted { step: 0 }),
        }
    }
}

/// Precomputed translation data for repeated exact orbit evaluation.
#[derive(Debug, Clone)]
pub struct Orbiter<S: Scalar> {
    norm: S,
    /// Top intervals in row order: (left end, translation target left end).
    top: Vec<(S, S)>,
    /// Bottom intervals in row order: (left end, preimage left end).
    bottom: Vec<(S, S)>,
    singular: Vec<S>,
}

impl<S: Scalar> Orbiter<S> {
    pub fn new(t: &Iet<S>) -> Self {
        let (ut, ub) = t.singularities();
        let top = t.perm.top_row().iter().map(|&l| (ut[l].clone(), ub[l].clone())).collect();
        let bottom = t.perm.bottom_row().iter().map(|&l| (ub[l].clone(), ut[l].clone())).collect();
        Orbiter { norm: t.norm(), top, bottom, singular: t.singular_points() }
    }

    fn translate(table: &[(S, S)], x: &S) -> S {
        let i = table.partition_point(|(a, _)| a <= x) - 1;
        x.sub(&table[i].0).add(&table[i].1)
    }

    /// `T(x)`.
    pub fn forward(&self, x: &S) -> S {
        Self::translate(&self.top, x)
    }

    /// `T^{-1}(x)`, right-continuous.
    pub fn backward(&self, x: &S) -> S {
        Self::translate(&self.bottom, x)
    }

    /// `T^{-1}` on `(0, ‖λ‖]`, left-continuous.
    pub fn backward_left(&self, x: &S) -> S {
        let i = self.bottom.partition_point(|(a, _)| a < x) - 1;
        x.sub(&self.bottom[i].0).add(&self.bottom[i].1)
    }

    pub fn norm(&self) -> &S {
        &self.norm
    }

    /// True iff some singularity lies strictly inside `(a, b)`.
    pub fn hits_singularity(&self, a: &S, b: &S) -> bool {
        let i = self.singular.partition_point(|s| s <= a);
        i < self.singular.len() && self.singular[i] < *b
    }

    /// `T^n x`.
    pub fn forward_n(&self, x: &S, n: u64) -> S {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.forward(&y);
        }
        y
    }

    /// Reduced-triple test by pulling back the interval between `T^n u_β^b` and `u_α^t`.
    ///
    /// `end` is `T^n u_β^b`, `target` is `u_α^t`; returns `Err(Connection)` when they coincide.
    pub fn reduced_from(&self, end: &S, target: &S, n: u64) -> Result<bool> {
        let (mut a, mut b) = match end.partial_cmp(target) {
            Some(Ordering::Less) => (end.clone(), target.clone()),
            Some(Ordering::Greater) => (target.clone(), end.clone()),
            _ => return Err(Error::Connection),
        };
        for k in 0..=n {
            if self.hits_singularity(&a, &b) {
                return Ok(false);
            }
            if k < n {
                a = self.backward(&a);
                b = self.backward_left(&b);
            }
        }
        Ok(true)
    }
}

impl<S: Scalar> Iet<S> {
    fn require_exact() -> Result<()> {
        if S::EXACT {
            Ok(())
        } else {
            Err(Error::FloatBackend)
        }
    }

    /// Least-`n` connection with `n <= horizon`, ties broken by `(β, α)` order.
    pub fn has_connection_up_to(&self, horizon: u64) -> Result<Option<Triple>> {
        Self::require_exact()?;
        let orb = Orbiter::new(self);
        let (ut, ub) = self.singularities();
        let pairs = valid_pairs(&self.perm);
        let betas: Vec<Letter> = (0..self.d()).filter(|&b| self.perm.bottom_pos(b) > 1).collect();
        let mut pts: Vec<S> = betas.iter().map(|&b| ub[b].clone()).collect();
        for n in 0..=horizon {
            for (i, &beta) in betas.iter().enumerate() {
                for &(b2, alpha) in &pairs {
                    if b2 == beta && pts[i] == ut[alpha] {
                        return Ok(Some(Triple { beta, alpha, n }));
                    }
                }
            }
            if n < horizon {
                for p in pts.iter_mut() {
                    *p = orb.forward(p);
                }
            }
        }
        Ok(None)
    }

    /// `|T^n u_β^b − u_α^t|` and the signed endpoints.
    pub fn triple_gap(&self, tr: &Triple) -> Result<S> {
        check_pair(&self.perm, tr.beta, tr.alpha)?;
        let orb = Orbiter::new(self);
        let (ut, ub) = self.singularities();
        let end = orb.forward_n(&ub[tr.beta], tr.n);
        Ok(end.abs_diff(&ut[tr.alpha]))
    }

    /// Definition of reduced triple, by pulling back the interval `n` times.
    pub fn is_reduced_triple(&self, tr: &Triple) -> Result<bool> {
        Self::require_exact()?;
        check_pair(&self.perm, tr.beta, tr.alpha)?;
        let orb = Orbiter::new(self);
        let (ut, ub) = self.singularities();
        let end = orb.forward_n(&ub[tr.beta], tr.n);
        orb.reduced_from(&end, &ut[tr.alpha], tr.n)
    }

    /// All reduced triples with `n <= n_max`, with their gaps, in `(β, α, n)` order.
    pub fn reduced_triples_up_to(&self, n_max: u64) -> Result<Vec<(Triple, S)>> {
        Self::require_exact()?;
        let orb = Orbiter::new(self);
        let (ut, ub) = self.singularities();
        let mut out = Vec::new();
        for (beta, alpha) in valid_pairs(&self.perm) {
            let mut end = ub[beta].clone();
            for n in 0..=n_max {
                match orb.reduced_from(&end, &ut[alpha], n) {
                    Ok(true) => out.push((Triple { beta, alpha, n }, end.abs_diff(&ut[alpha]))),
                    Ok(false) => {}
                    Err(Error::Connection) => break,
                    Err(e) => return Err(e),
                }
                end = orb.forward(&end);
            }
        }
        Ok(out)
    }
}

impl<S: Field> Iet<S> {
    /// `(π, λ/‖λ‖)`.
    pub fn normalized(&self) -> Iet<S> {
        let n = self.norm();
        self.map(|l| l.div(&n))
    }
}

impl Iet<BigRational> {
    /// Integer lengths `λ · D` with `D` the common denominator.
    pub fn to_integer(&self) -> (Iet<BigInt>, BigInt) {
        let den = self
            .lengths
            .iter()
            .fold(BigInt::one(), |acc, l| acc.lcm(l.denom()));
        let lengths = self
            .lengths
            .iter()
            .map(|l| (l * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        (Iet { perm: self.perm.clone(), lengths }, den)
    }

    /// Integer image in `i128` when the total length fits comfortably.
    pub fn to_i128(&self) -> Option<(Iet<i128>, BigInt)> {
        let (big, den) = self.to_integer();
        if big.norm().bits() > 120 {
            return None;
        }
        let lengths = big.lengths.iter().map(|l| l.to_i128()).collect::<Option<Vec<_>>>()?;
        Some((Iet { perm: self.perm.clone(), lengths }, den))
    }
}

impl Iet<f64> {
    /// Bit-exact rational image of the float lengths.
    pub fn rationalize(&self) -> Iet<BigRational> {
        self.map(|l| l.to_rational())
    }
}

/// Uniform numerators in `1..=2^bits` over the denominator `2^bits`.
pub fn random_exact<R: Rng>(perm: &Permutation, bits: u32, rng: &mut R) -> Iet<BigRational> {
    let den = BigInt::one() << bits;
    let words = bits.div_ceil(32) as usize;
    let lengths = (0..perm.d())
        .map(|_| {
            let digits: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
            let raw = num_bigint::BigUint::new(digits) % (BigInt::one() << bits).magnitude();
            BigRational::new(BigInt::from(raw) + 1, den.clone())
        })
        .collect();
    Iet::from_parts(perm.clone(), lengths)
}

/// Uniform on the normalized simplex, by normalized exponential variates.
pub fn random_float<R: Rng>(perm: &Permutation, rng: &mut R) -> Iet<f64> {
    loop {
        let e: Vec<f64> = (0..perm.d()).map(|_| Exp1.sample(rng)).collect();
        let s: f64 = e.iter().sum();
        let lengths: Vec<f64> = e.iter().map(|x| x / s).collect();
        if lengths.iter().all(|&x| x > 0.0) {
            return Iet::from_parts(perm.clone(), lengths);
        }
    }
}

/// JSON form `{perm, lengths, backend}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IetJson {
    pub perm: String,
    pub lengths: Vec<String>,
    #[serde(default = "default_backend")]
    pub backend: String,
}

fn default_backend() -> String {
    "exact".into()
}

/// An IET on either backend.
#[derive(Debug, Clone)]
pub enum AnyIet {
    Exact(Iet<BigRational>),
    Float(Iet<f64>),
}

impl AnyIet {
    pub fn from_json(j: &IetJson) -> Result<AnyIet> {
        let perm = Permutation::parse(&j.perm)?;
        match j.backend.as_str() {
            "exact" => {
                let l = j.lengths.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
                Ok(AnyIet::Exact(Iet::new(perm, l)?))
            }
            "float" => {
                let l = j
                    .lengths
                    .iter()
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(s.clone())))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyIet::Float(Iet::new(perm, l)?))
            }
            b => Err(Error::Parse(format!("unknown backend {b}"))),
        }
    }

    /// Exact view; floats are rationalized bit-exactly.
    pub fn exact(&self) -> Iet<BigRational> {
        match self {
            AnyIet::Exact(t) => t.clone(),
            AnyIet::Float(t) => t.rationalize(),
        }
    }
}

impl<S: Scalar> Iet<S> {
    pub fn to_json(&self) -> IetJson {
        IetJson {
            perm: self.perm.to_string(),
            lengths: self.lengths.iter().map(Scalar::render).collect(),
            backend: if S::EXACT { "exact" } else { "float" }.into(),
        }
    }
}

/// `|x|` of a rational.
pub fn abs_rational(x: &BigRational) -> BigRational {
    x.abs()
}
