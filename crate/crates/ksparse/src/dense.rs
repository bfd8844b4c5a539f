//! Small dense matrices and a one-sided Jacobi SVD.
//!
//! Hierarchical-matrix blocks are small, so a simple row-major matrix plus a
//! Jacobi SVD covers everything the library needs from dense linear algebra:
//! best rank-r block approximations, numerical rank checks and smallest
//! singular values of desk-scale operands. None of these routines touch the
//! work counter; they are not sparse kernels.

use crate::error::{Error, Result};
use crate::sparse::{ColMajorSparseMatrix, DenseVector};
use crate::Scalar;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DenseMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged dense rows".into()));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        if self.cols != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} * vector of dim {}",
                self.rows,
                self.cols,
                x.dim()
            )));
        }
        let mut out = DenseVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = T::zero();
            for j in 0..self.cols {
                acc = acc + self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("sub of unequal shapes".into()));
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = *a - b;
        }
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("add of unequal shapes".into()));
        }
        let mut out = self.clone();
        for (a, &b) in out.data.iter_mut().zip(&other.data) {
            *a = *a + b;
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &v| acc + v * v)
    }

    /// Extracts the block `row_lo..row_hi` x `col_lo..col_hi`.
    pub fn block(&self, row_lo: usize, row_hi: usize, col_lo: usize, col_hi: usize) -> Self {
        Self::from_fn(row_hi - row_lo, col_hi - col_lo, |i, j| {
            self[(row_lo + i, col_lo + j)]
        })
    }

    pub fn to_sparse(&self) -> ColMajorSparseMatrix<T> {
        let rows: Vec<Vec<T>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        ColMajorSparseMatrix::from_dense_rows(&rows).expect("shape is rectangular")
    }

    pub fn from_sparse(m: &ColMajorSparseMatrix<T>) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        for j in 0..m.cols() {
            for &(i, v) in m.column(j).entries() {
                out[(i, j)] = v;
            }
        }
        out
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Singular value decomposition `A = U diag(sigma) V^T` with singular values
/// in descending order.
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub sigma: Vec<T>,
    pub vt: DenseMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    /// Best rank-`r` truncation as a `(left, right)` pair with
    /// `left = U_r diag(sigma_r)` and `right = V_r^T`.
    pub fn truncate(&self, r: usize) -> (DenseMatrix<T>, DenseMatrix<T>) {
        let r = r.min(self.sigma.len());
        let left = DenseMatrix::from_fn(self.u.rows(), r, |i, j| self.u[(i, j)] * self.sigma[j]);
        let right = DenseMatrix::from_fn(r, self.vt.cols(), |i, j| self.vt[(i, j)]);
        (left, right)
    }

    /// Number of singular values above `cutoff`.
    pub fn rank_above(&self, cutoff: T) -> usize {
        self.sigma.iter().take_while(|&&s| s > cutoff).count()
    }
}

/// One-sided Jacobi SVD. Suited to the small blocks this crate works with;
/// iterates plane rotations until all column pairs are numerically orthogonal.
pub fn svd<T: Scalar>(a: &DenseMatrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        let Svd { u, sigma, vt } = svd(&a.transpose());
        return Svd {
            u: vt.transpose(),
            sigma,
            vt: u.transpose(),
        };
    }
    let (m, n) = (a.rows(), a.cols());
    let mut b = a.clone();
    let mut v = DenseMatrix::<T>::identity(n);
    let eps = T::epsilon() * T::of(32.0);
    let max_sweeps = 60;

    let col_dot = |b: &DenseMatrix<T>, p: usize, q: usize| -> T {
        let mut acc = T::zero();
        for i in 0..m {
            acc = acc + b[(i, p)] * b[(i, q)];
        }
        acc
    };

    for _ in 0..max_sweeps {
        let mut off = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = col_dot(&b, p, p);
                let aqq = col_dot(&b, q, q);
                let apq = col_dot(&b, p, q);
                if apq.abs() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                off = true;
                // Jacobi rotation annihilating the (p, q) Gram entry.
                let tau = (aqq - app) / (T::of(2.0) * apq);
                let t = {
                    let sign = if tau >= T::zero() { T::one() } else { -T::one() };
                    sign / (tau.abs() + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let (bp, bq) = (b[(i, p)], b[(i, q)]);
                    b[(i, p)] = c * bp - s * bq;
                    b[(i, q)] = s * bp + c * bq;
                }
                for i in 0..n {
                    let (vp, vq) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !off {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = (0..n).map(|j| col_dot(&b, j, j).sqrt()).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());

    let mut u = DenseMatrix::zeros(m, n);
    let mut vt = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (out_j, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > T::zero() {
            for i in 0..m {
                u[(i, out_j)] = b[(i, j)] / s;
            }
        }
        for i in 0..n {
            vt[(out_j, i)] = v[(i, j)];
        }
    }
    Svd { u, sigma, vt }
}

/// Smallest singular value of `a` (including zeros for rank-deficient input).
pub fn smallest_singular_value<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let s = svd(a);
    s.sigma
        .last()
        .copied()
        .unwrap_or_else(T::zero)
}
