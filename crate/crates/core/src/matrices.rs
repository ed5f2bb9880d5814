//! Visit matrices `B_γ`, return-time vectors `q^γ`, simplex volumes and conditional probabilities.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinat::{Arrow, Letter, Path};
use crate::error::{Error, Result};

/// A `d×d` matrix of non-negative big integers indexed by letters (row-major).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisitMatrix {
    d: usize,
    e: Vec<BigUint>,
}

impl VisitMatrix {
    pub fn identity(d: usize) -> Self {
        let mut e = vec![BigUint::zero(); d * d];
        for i in 0..d {
            e[i * d + i] = BigUint::one();
        }
        VisitMatrix { d, e }
    }

    /// Identity plus a single 1 in row `loser`, column `winner`.
    pub fn of_arrow(a: &Arrow) -> Self {
        let mut m = Self::identity(a.start.d());
        let d = m.d;
        m.e[a.loser * d + a.winner] += 1u32;
        m
    }

    /// `B_γ`, composed by `B_{γ1 γ2} = B_{γ2} B_{γ1}`.
    pub fn of_path(p: &Path) -> Self {
        let mut m = Self::identity(p.d());
        for a in p.arrows() {
            m.apply_arrow(a.winner, a.loser);
        }
        m
    }

    /// Left-multiplies by the elementary matrix of an arrow: row `loser` += row `winner`.
    pub fn apply_arrow(&mut self, winner: Letter, loser: Letter) {
        let d = self.d;
        for j in 0..d {
            let w = self.e[winner * d + j].clone();
            self.e[loser * d + j] += w;
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, row: Letter, col: Letter) -> &BigUint {
        &self.e[row * self.d + col]
    }

    pub fn row(&self, r: Letter) -> &[BigUint] {
        &self.e[r * self.d..(r + 1) * self.d]
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &VisitMatrix) -> VisitMatrix {
        let d = self.d;
        let mut e = vec![BigUint::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.e[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    e[i * d + j] += a * &other.e[k * d + j];
                }
            }
        }
        VisitMatrix { d, e }
    }

    pub fn is_positive(&self) -> bool {
        self.e.iter().all(|x| !x.is_zero())
    }

    /// Largest entry.
    pub fn max_norm(&self) -> BigUint {
        self.e.iter().max().cloned().unwrap_or_default()
    }

    /// `B · 1`.
    pub fn row_sums(&self) -> QVector {
        QVector(
            (0..self.d)
                .map(|i| self.row(i).iter().sum())
                .collect(),
        )
    }

    /// `B · v`.
    pub fn apply(&self, v: &[BigUint]) -> Vec<BigUint> {
        (0..self.d)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `ᵗB · v` over the rationals.
    pub fn transpose_apply(&self, v: &[BigRational]) -> Vec<BigRational> {
        let d = self.d;
        (0..d)
            .map(|j| {
                let mut s = BigRational::zero();
                for (i, vi) in v.iter().enumerate() {
                    let b = self.get(i, j);
                    if !b.is_zero() {
                        s += BigRational::from_integer(BigInt::from(b.clone())) * vi;
                    }
                }
                s
            })
            .collect()
    }

    /// Solves `ᵗB · x = v` by Gaussian elimination over the rationals.
    pub fn transpose_solve(&self, v: &[BigRational]) -> Option<Vec<BigRational>> {
        let d = self.d;
        let mut a: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..d)
                    .map(|j| BigRational::from_integer(BigInt::from(self.get(j, i).clone())))
                    .collect();
                row.push(v[i].clone());
                row
            })
            .collect();
        for c in 0..d {
            let p = (c..d).find(|&r| !a[r][c].is_zero())?;
            a.swap(c, p);
            let piv = a[c][c].clone();
            for x in &mut a[c][c..] {
                *x = &*x / &piv;
            }
            for r in 0..d {
                if r != c && !a[r][c].is_zero() {
                    let f = a[r][c].clone();
                    let pivot_row = a[c].clone();
                    for (x, y) in a[r][c..].iter_mut().zip(&pivot_row[c..]) {
                        *x -= &f * y;
                    }
                }
            }
        }
        Some(a.into_iter().map(|mut row| row.pop().expect("augmented")).collect())
    }

    /// Determinant by fraction-free elimination.
    pub fn det(&self) -> BigInt {
        let d = self.d;
        let mut a: Vec<Vec<BigInt>> = (0..d)
            .map(|i| self.row(i).iter().map(|x| BigInt::from(x.clone())).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..d {
            if a[k][k].is_zero() {
                match (k + 1..d).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = t / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[d - 1][d - 1]
    }

    /// Normalized vertices `v_ξ = (1/q_ξ) ᵗB e_ξ` of `Δ_γ^(1)`, one per letter.
    pub fn simplex_vertices(&self) -> Vec<Vec<BigRational>> {
        let q = self.row_sums();
        (0..self.d)
            .map(|xi| {
                let qx = BigInt::from(q.0[xi].clone());
                self.row(xi)
                    .iter()
                    .map(|b| BigRational::new(BigInt::from(b.clone()), qx.clone()))
                    .collect()
            })
            .collect()
    }
}

/// Per-letter positive big integers `q^γ = B_γ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QVector(pub Vec<BigUint>);

impl QVector {
    pub fn ones(d: usize) -> Self {
        QVector(vec![BigUint::one(); d])
    }

    pub fn of_path(p: &Path) -> Self {
        let mut q = Self::ones(p.d());
        for a in p.arrows() {
            q.apply_arrow(a.winner, a.loser);
        }
        q
    }

    /// `q_loser += q_winner`.
    pub fn apply_arrow(&mut self, winner: Letter, loser: Letter) {
        let w = self.0[winner].clone();
        self.0[loser] += w;
    }

    pub fn get(&self, l: Letter) -> &BigUint {
        &self.0[l]
    }

    /// `‖q‖ = Σ q_ξ`.
    pub fn norm(&self) -> BigUint {
        self.0.iter().sum()
    }

    /// `N(q) = ∏ q_ξ`.
    pub fn product(&self) -> BigUint {
        self.0.iter().product()
    }

    /// `M(q)`.
    pub fn max(&self) -> BigUint {
        self.0.iter().max().cloned().unwrap_or_default()
    }

    /// `m(q)`.
    pub fn min(&self) -> BigUint {
        self.0.iter().min().cloned().unwrap_or_default()
    }

    /// `M_{A'}(q)`: maximum over the letters flagged in `subset`.
    pub fn max_over(&self, subset: &[bool]) -> BigUint {
        self.0
            .iter()
            .zip(subset)
            .filter(|(_, &s)| s)
            .map(|(q, _)| q.clone())
            .max()
            .unwrap_or_default()
    }

    /// `∏ 1/q_ξ`.
    pub fn volume(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(self.product()))
    }
}

/// `Leb(Δ_γ^(1)) = ∏ (q_ξ^γ)^{-1}`.
pub fn simplex_volume(p: &Path) -> BigRational {
    QVector::of_path(p).volume()
}

/// `P_ν(Δ_γ^(1)) = ∏ q^ν / ∏ q^{νγ}`.
pub fn conditional_probability(nu: &Path, gamma: &Path) -> Result<BigRational> {
    let ng = nu.concat(gamma).map_err(|_| Error::NotComposable)?;
    let a = QVector::of_path(nu).product();
    let b = QVector::of_path(&ng).product();
    Ok(BigRational::new(BigInt::from(a), BigInt::from(b)))
}

/// True iff the linear form `f` is strictly below `bound` on the open simplex spanned by `vertices`.
pub fn open_simplex_below(vertices: &[Vec<BigRational>], f: &[BigRational], bound: &BigRational) -> bool {
    let vals: Vec<BigRational> = vertices
        .iter()
        .map(|v| v.iter().zip(f).map(|(a, b)| a * b).sum())
        .collect();
    vals.iter().all(|x| x <= bound) && vals.iter().any(|x| x < bound)
}
