use nalgebra::{ComplexField, RealField};
use num_traits::Zero;

use crate::scalar::{Cplx, Real};

/// Compressed sparse row matrix assembled from triplets.
#[derive(Clone, Debug)]
pub struct CsrMatrix<S> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<S>,
}

impl<S: ComplexField + Copy> CsrMatrix<S> {
    /// Builds the matrix summing duplicate `(row, col)` entries.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, S)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<S> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            if last == Some((i, j)) {
                let tail = values.last_mut().expect("duplicate implies previous entry");
                *tail += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates the stored entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.row(i)
            .find(|(c, _)| *c == j)
            .map(|(_, v)| v)
            .unwrap_or_else(S::zero)
    }

    pub fn mul_vec(&self, x: &[S]) -> Vec<S> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| self.row(i).fold(S::zero(), |acc, (j, v)| acc + v * x[j]))
            .collect()
    }

    /// Lower and upper bandwidths.
    pub fn bandwidth(&self) -> (usize, usize) {
        let mut kl = 0;
        let mut ku = 0;
        for i in 0..self.nrows {
            for (j, _) in self.row(i) {
                if j < i {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        (kl, ku)
    }

    pub fn max_abs(&self) -> S::RealField {
        self.values
            .iter()
            .fold(S::RealField::zero(), |m, v| RealField::max(m, v.clone().modulus()))
    }

    /// `max |a_ij - conj(a_ji)|` over the stored pattern.
    pub fn hermitian_residual(&self) -> S::RealField {
        let mut worst = S::RealField::zero();
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                let d = (v - self.get(j, i).conjugate()).modulus();
                worst = RealField::max(worst, d);
            }
        }
        worst
    }

    /// Applies `f` to every stored value, keeping the pattern.
    pub fn map<R: ComplexField + Copy>(&self, f: impl Fn(S) -> R) -> CsrMatrix<R> {
        CsrMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
    }

    /// Replaces row and column `k` by the identity (homogeneous Dirichlet constraint).
    pub fn constrain_identity(&mut self, constrained: &[bool]) {
        for i in 0..self.nrows {
            let range = self.row_ptr[i]..self.row_ptr[i + 1];
            for p in range {
                let j = self.col_idx[p];
                if constrained[i] || constrained[j] {
                    self.values[p] = if i == j { S::one() } else { S::zero() };
                }
            }
        }
    }
}

impl<T: Real> CsrMatrix<T> {
    /// Real matrix times complex vector.
    pub fn mul_complex(&self, x: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                self.row(i)
                    .fold(Cplx::new(T::zero(), T::zero()), |acc, (j, v)| acc + x[j] * v)
            })
            .collect()
    }

    /// Sesquilinear form `v^H A u` for a real matrix.
    pub fn form(&self, u: &[Cplx<T>], v: &[Cplx<T>]) -> Cplx<T> {
        assert_eq!(u.len(), self.ncols);
        assert_eq!(v.len(), self.nrows);
        let mut acc = Cplx::new(T::zero(), T::zero());
        for i in 0..self.nrows {
            let row = self
                .row(i)
                .fold(Cplx::new(T::zero(), T::zero()), |a, (j, g)| a + u[j] * g);
            acc += v[i].conj() * row;
        }
        acc
    }

    /// Real-valued `v^T A u`.
    pub fn form_real(&self, u: &[T], v: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.nrows {
            let row = self.row(i).fold(T::zero(), |a, (j, g)| a + u[j] * g);
            acc += v[i] * row;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0), (1, 1, 5.0)]);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![4.0, 7.0]);
        assert_eq!(m.bandwidth(), (1, 0));
    }

    #[test]
    fn form_matches_dense() {
        let m = CsrMatrix::from_triplets(2, 2, vec![(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 3.0)]);
        let u = [Cplx::new(1.0, 1.0), Cplx::new(0.0, 2.0)];
        let v = [Cplx::new(1.0, -1.0), Cplx::new(2.0, 0.0)];
        let au = m.mul_complex(&u);
        let expected = v[0].conj() * au[0] + v[1].conj() * au[1];
        assert!((m.form(&u, &v) - expected).norm() < 1e-15);
    }
}
