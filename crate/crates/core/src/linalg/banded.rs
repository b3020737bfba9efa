//! Direct solvers for banded systems.
//!
//! Structured meshes numbered row-major produce matrices whose bandwidth is
//! one grid row, so a band factorization is a sparse direct solve with no
//! reordering step.

use nalgebra::{ComplexField, RealField};
use num_traits::{One, Zero};

use super::csr::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting of a general band matrix.
///
/// Row interchanges are applied only to the trailing columns, so the
/// multipliers of step `k` stay in column `k` and the solve replays the
/// interchanges interleaved with the elimination.
#[derive(Clone, Debug)]
pub struct BandedLu<S> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<S>,
    pivots: Vec<usize>,
}

impl<S: ComplexField + Copy> BandedLu<S> {
    pub fn factor(a: &CsrMatrix<S>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Dimension(format!(
                "band LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let (kl, ku) = a.bandwidth();
        let width = 2 * kl + ku + 1;
        let mut lu = Self {
            n,
            kl,
            ku,
            width,
            data: vec![S::zero(); n * width],
            pivots: vec![0; n],
        };
        for i in 0..n {
            for (j, v) in a.row(i) {
                *lu.at_mut(i, j) = v;
            }
        }
        lu.eliminate();
        Ok(lu)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> S {
        self.data[self.idx(i, j)]
    }

    #[inline]
    fn at_mut(&mut self, i: usize, j: usize) -> &mut S {
        let k = self.idx(i, j);
        &mut self.data[k]
    }

    fn eliminate(&mut self) {
        let n = self.n;
        for k in 0..n {
            let last_row = (k + self.kl).min(n - 1);
            let last_col = (k + self.kl + self.ku).min(n - 1);
            let mut p = k;
            let mut best = self.at(k, k).norm1();
            for i in k + 1..=last_row {
                let m = self.at(i, k).norm1();
                if m > best {
                    best = m;
                    p = i;
                }
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.data.swap(a, b);
                }
            }
            let pivot = self.at(k, k);
            if pivot.is_zero() {
                continue;
            }
            for i in k + 1..=last_row {
                let l = self.at(i, k) / pivot;
                if l.is_zero() {
                    continue;
                }
                *self.at_mut(i, k) = l;
                let row_k = self.idx(k, k);
                let row_i = self.idx(i, k);
                for off in 1..=(last_col - k) {
                    let u = self.data[row_k + off];
                    self.data[row_i + off] -= l * u;
                }
            }
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Ratio of the largest to the smallest pivot modulus; infinite for an
    /// exactly singular factor.
    pub fn pivot_condition(&self) -> S::RealField {
        let mut lo: Option<S::RealField> = None;
        let mut hi = S::RealField::zero();
        for k in 0..self.n {
            let m = self.at(k, k).modulus();
            hi = hi.max(m.clone());
            lo = Some(match lo {
                Some(l) => l.min(m),
                None => m,
            });
        }
        match lo {
            Some(l) if !l.is_zero() => hi / l,
            _ => S::RealField::max_value().unwrap_or_else(S::RealField::one),
        }
    }

    pub fn solve(&self, b: &[S]) -> Vec<S> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk.is_zero() {
                continue;
            }
            for i in k + 1..=(k + self.kl).min(n - 1) {
                x[i] -= self.at(i, k) * xk;
            }
        }
        for i in (0..n).rev() {
            let row = self.idx(i, i);
            let last = (i + self.kl + self.ku).min(n - 1);
            let mut s = x[i];
            for (off, xj) in x[i + 1..=last].iter().enumerate() {
                s -= self.data[row + off + 1] * *xj;
            }
            x[i] = s / self.data[row];
        }
        x
    }
}

/// Cholesky factor `A = L L^T` of a real symmetric positive definite band matrix.
#[derive(Clone, Debug)]
pub struct BandedCholesky<T> {
    n: usize,
    k: usize,
    data: Vec<T>,
}

impl<T: Real> BandedCholesky<T> {
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let n = a.nrows();
        let (kl, ku) = a.bandwidth();
        let k = kl.max(ku);
        let width = k + 1;
        let mut data = vec![T::zero(); n * width];
        for i in 0..n {
            for (j, v) in a.row(i) {
                if j <= i {
                    data[i * width + (j + k - i)] = v;
                }
            }
        }
        for i in 0..n {
            let first = i.saturating_sub(k);
            for j in first..=i {
                let mut s = data[i * width + (j + k - i)];
                let p0 = first.max(j.saturating_sub(k));
                for p in p0..j {
                    s -= data[i * width + (p + k - i)] * data[j * width + (p + k - j)];
                }
                if i == j {
                    if s <= T::zero() || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite(format!(
                            "band Cholesky pivot {i} is {s:e}"
                        )));
                    }
                    data[i * width + k] = s.sqrt();
                } else {
                    data[i * width + (j + k - i)] = s / data[j * width + k];
                }
            }
        }
        Ok(Self { n, k, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn l(&self, i: usize, j: usize) -> T {
        self.data[i * (self.k + 1) + (j + self.k - i)]
    }

    /// Solves `A x = b` for a real or complex right-hand side.
    pub fn solve<S>(&self, b: &[S]) -> Vec<S>
    where
        S: ComplexField<RealField = T> + Copy,
    {
        let mut y = self.solve_lower(b);
        self.solve_upper_in_place(&mut y);
        y
    }

    /// Solves `L y = b`.
    pub fn solve_lower<S>(&self, b: &[S]) -> Vec<S>
    where
        S: ComplexField<RealField = T> + Copy,
    {
        assert_eq!(b.len(), self.n);
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for j in i.saturating_sub(self.k)..i {
                s -= y[j].scale(self.l(i, j));
            }
            y[i] = s.unscale(self.l(i, i));
        }
        y
    }

    fn solve_upper_in_place<S>(&self, y: &mut [S])
    where
        S: ComplexField<RealField = T> + Copy,
    {
        let n = self.n;
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..=(i + self.k).min(n - 1) {
                s -= y[j].scale(self.l(j, i));
            }
            y[i] = s.unscale(self.l(i, i));
        }
    }

    /// Computes `L^T x`, the square-root weighting used to turn the Gram
    /// inner product into a Euclidean one.
    pub fn mul_upper<S>(&self, x: &[S]) -> Vec<S>
    where
        S: ComplexField<RealField = T> + Copy,
    {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut s = S::zero();
                for j in i..=(i + self.k).min(n - 1) {
                    s += x[j].scale(self.l(j, i));
                }
                s
            })
            .collect()
    }
}
