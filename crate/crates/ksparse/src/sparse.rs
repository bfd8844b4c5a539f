//! Sparse vectors, column-major sparse matrices and dense vectors.
//!
//! These are the operand types every other module builds on. Two invariants
//! are load-bearing for the complexity accounting elsewhere:
//!
//! * entries are stored with strictly increasing indices and never hold an
//!   exact `0.0` (support size is what every cost bound is stated in), and
//! * the sparse kernels ([`SparseVector::dot_dense`],
//!   [`SparseVector::axpy_into`], ...) report their multiply-adds to
//!   [`crate::work`], exactly one per stored entry.
//!
//! All types are immutable after construction.

use crate::error::{Error, Result};
use crate::work;
use crate::Scalar;

/// Sparse vector: sorted `(index, value)` entries with nonzero values.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector<T = f64> {
    dim: usize,
    entries: Vec<(usize, T)>,
}

impl<T: Scalar> SparseVector<T> {
    /// Builds a sparse vector from `(index, value)` pairs.
    ///
    /// Entries may arrive unsorted; exact zeros are dropped. Duplicate or
    /// out-of-range indices are rejected.
    pub fn new(dim: usize, mut entries: Vec<(usize, T)>) -> Result<Self> {
        entries.retain(|&(_, v)| v != T::zero());
        entries.sort_by_key(|&(i, _)| i);
        for pair in entries.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate index {} in sparse vector",
                    pair[0].0
                )));
            }
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= dim {
                return Err(Error::InvalidArgument(format!(
                    "index {i} out of range for dimension {dim}"
                )));
            }
        }
        Ok(Self { dim, entries })
    }

    /// The zero vector.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    /// The canonical basis vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        assert!(i < dim, "unit index out of range");
        Self {
            dim,
            entries: vec![(i, T::one())],
        }
    }

    /// Builds from a dense slice, dropping zeros.
    pub fn from_dense(values: &[T]) -> Self {
        let entries = values
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != T::zero())
            .map(|(i, &v)| (i, v))
            .collect();
        Self {
            dim: values.len(),
            entries,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, T)] {
        &self.entries
    }

    /// Support size (number of stored entries).
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// The set of indices of the nonzero entries, in increasing order.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(i, _)| i)
    }

    /// Value at `i` (zero if unstored).
    pub fn get(&self, i: usize) -> T {
        match self.entries.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => T::zero(),
        }
    }

    /// Dot product against a dense vector; costs exactly `nnz` multiply-adds.
    pub fn dot_dense(&self, x: &DenseVector<T>) -> Result<T> {
        if self.dim != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "sparse dim {} vs dense dim {}",
                self.dim,
                x.dim()
            )));
        }
        Ok(self.dot_dense_unchecked(x))
    }

    pub(crate) fn dot_dense_unchecked(&self, x: &DenseVector<T>) -> T {
        debug_assert_eq!(self.dim, x.dim());
        work::record(self.entries.len() as u64);
        self.entries
            .iter()
            .fold(T::zero(), |acc, &(i, v)| acc + v * x[i])
    }

    /// `x <- x + alpha * self`; costs exactly `nnz` multiply-adds.
    pub fn axpy_into(&self, alpha: T, x: &mut DenseVector<T>) -> Result<()> {
        if self.dim != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "sparse dim {} vs dense dim {}",
                self.dim,
                x.dim()
            )));
        }
        self.axpy_into_unchecked(alpha, x);
        Ok(())
    }

    pub(crate) fn axpy_into_unchecked(&self, alpha: T, x: &mut DenseVector<T>) {
        debug_assert_eq!(self.dim, x.dim());
        work::record(self.entries.len() as u64);
        for &(i, v) in &self.entries {
            x[i] = x[i] + alpha * v;
        }
    }

    /// Sparse-sparse dot product by sorted merge; costs one multiply-add per
    /// index common to both supports.
    pub fn dot_sparse(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "sparse dims {} vs {}",
                self.dim, other.dim
            )));
        }
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = T::zero();
        let mut hits = 0u64;
        while let (Some(&&(ia, va)), Some(&&(ib, vb))) = (a.peek(), b.peek()) {
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc = acc + va * vb;
                    hits += 1;
                    a.next();
                    b.next();
                }
            }
        }
        work::record(hits);
        Ok(acc)
    }

    /// True when the supports intersect.
    pub fn support_intersects(&self, other: &Self) -> bool {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        while let (Some(&&(ia, _)), Some(&&(ib, _))) = (a.peek(), b.peek()) {
            match ia.cmp(&ib) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// Scales every entry by a nonzero factor.
    pub fn scaled(&self, factor: T) -> Result<Self> {
        if factor == T::zero() {
            return Err(Error::InvalidArgument("scale factor must be nonzero".into()));
        }
        Ok(Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(i, v)| (i, v * factor)).collect(),
        })
    }

    /// Densifies into a full vector (no work recorded; not a sparse kernel).
    pub fn to_dense(&self) -> DenseVector<T> {
        let mut out = DenseVector::zeros(self.dim);
        for &(i, v) in &self.entries {
            out[i] = v;
        }
        out
    }
}

/// Dense vector of fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector<T = f64> {
    values: Vec<T>,
}

impl<T: Scalar> DenseVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self {
            values: vec![T::zero(); dim],
        }
    }

    pub fn from_vec(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.values.iter()
    }

    pub fn norm_sq(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v * v)
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        debug_assert_eq!(self.dim(), other.dim());
        self.values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }
}

impl<T> std::ops::Index<usize> for DenseVector<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T> std::ops::IndexMut<usize> for DenseVector<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.values[i]
    }
}

/// Column-major sparse matrix: a list of equal-dimension sparse columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ColMajorSparseMatrix<T = f64> {
    rows: usize,
    columns: Vec<SparseVector<T>>,
}

impl<T: Scalar> ColMajorSparseMatrix<T> {
    pub fn from_columns(rows: usize, columns: Vec<SparseVector<T>>) -> Result<Self> {
        for (j, col) in columns.iter().enumerate() {
            if col.dim() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has dim {} but the matrix has {rows} rows",
                    col.dim()
                )));
            }
        }
        Ok(Self { rows, columns })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            columns: (0..n).map(|i| SparseVector::unit(n, i)).collect(),
        }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            columns: (0..cols).map(|_| SparseVector::zero(rows)).collect(),
        }
    }

    /// Builds from a row-major dense table, dropping zeros.
    pub fn from_dense_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch("ragged dense rows".into()));
        }
        let columns = (0..ncols)
            .map(|j| {
                let entries = (0..nrows)
                    .filter(|&i| rows[i][j] != T::zero())
                    .map(|i| (i, rows[i][j]))
                    .collect();
                SparseVector::new(nrows, entries)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            rows: nrows,
            columns,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVector<T> {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVector<T>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.columns[j].get(i)
    }

    /// Largest column support size.
    pub fn max_col_support(&self) -> usize {
        self.columns.iter().map(|c| c.nnz()).max().unwrap_or(0)
    }

    /// Largest row support size, found by a transpose scan.
    pub fn max_row_support(&self) -> usize {
        let mut counts = vec![0usize; self.rows];
        for col in &self.columns {
            for i in col.support() {
                counts[i] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    /// Every column has support at most `k`.
    pub fn is_col_sparse(&self, k: usize) -> bool {
        self.max_col_support() <= k
    }

    /// Every row has support at most `k`.
    pub fn is_row_sparse(&self, k: usize) -> bool {
        self.max_row_support() <= k
    }

    /// For each row, the (ascending) list of columns whose support contains it.
    pub fn rows_to_columns(&self) -> Vec<Vec<usize>> {
        let mut map = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for i in col.support() {
                map[i].push(j);
            }
        }
        map
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<Vec<(usize, T)>> = vec![Vec::new(); self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col.entries() {
                cols[i].push((j, v));
            }
        }
        Self {
            rows: self.columns.len(),
            columns: cols
                .into_iter()
                .map(|entries| SparseVector {
                    dim: self.columns.len(),
                    entries,
                })
                .collect(),
        }
    }

    /// Dense matrix-vector product `self * x` (columns scattered; counts work).
    pub fn mul_dense(&self, x: &DenseVector<T>) -> Result<DenseVector<T>> {
        if self.cols() != x.dim() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{} but vector has dim {}",
                self.rows,
                self.cols(),
                x.dim()
            )));
        }
        let mut out = DenseVector::zeros(self.rows);
        for (j, col) in self.columns.iter().enumerate() {
            let xj = x[j];
            if xj != T::zero() {
                col.axpy_into_unchecked(xj, &mut out);
            }
        }
        Ok(out)
    }

    /// Densifies into row-major nested vectors (test and validation helper).
    pub fn to_dense_rows(&self) -> Vec<Vec<T>> {
        let mut out = vec![vec![T::zero(); self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col.entries() {
                out[i][j] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(dim: usize, entries: &[(usize, f64)]) -> SparseVector {
        SparseVector::new(dim, entries.to_vec()).unwrap()
    }

    #[test]
    fn support_reads_out_stored_indices() {
        let v = sv(4, &[(1, 2.0), (3, -1.0)]);
        assert_eq!(v.support().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(SparseVector::<f64>::zero(5).support().count(), 0);
        assert_eq!(
            SparseVector::<f64>::unit(3, 0).support().collect::<Vec<_>>(),
            vec![0]
        );
    }

    #[test]
    fn construction_drops_exact_zeros_and_sorts() {
        let v = sv(6, &[(4, 1.0), (2, 0.0), (0, 3.0)]);
        assert_eq!(v.entries(), &[(0, 3.0), (4, 1.0)]);
        assert_eq!(v.nnz(), 2);
    }

    #[test]
    fn construction_rejects_duplicates_and_out_of_range() {
        assert!(SparseVector::new(4, vec![(1, 2.0), (1, 3.0)]).is_err());
        assert!(SparseVector::new(4, vec![(4, 2.0)]).is_err());
    }

    #[test]
    fn dot_dense_matches_basis_extraction_and_zero() {
        let x = DenseVector::from_vec(vec![5.0, 6.0, 7.0]);
        assert_eq!(SparseVector::unit(3, 2).dot_dense(&x).unwrap(), 7.0);
        assert_eq!(SparseVector::zero(3).dot_dense(&x).unwrap(), 0.0);
    }

    #[test]
    fn dot_dense_matches_dense_oracle() {
        // dense oracle: 1*3 + 1*4 = 7
        let v = sv(3, &[(0, 1.0), (1, 1.0)]);
        let x = DenseVector::from_vec(vec![3.0, 4.0, 9.0]);
        assert_eq!(v.dot_dense(&x).unwrap(), 7.0);
    }

    #[test]
    fn dot_dense_rejects_dimension_mismatch() {
        let v = sv(3, &[(0, 1.0)]);
        let x = DenseVector::from_vec(vec![1.0, 2.0]);
        assert!(v.dot_dense(&x).is_err());
    }

    #[test]
    fn work_counter_counts_exactly_the_support() {
        let v = sv(10, &[(0, 1.0), (3, 2.0), (9, -1.0)]);
        let x = DenseVector::zeros(10);
        work::reset();
        let _ = v.dot_dense(&x).unwrap();
        assert_eq!(work::total(), 3);
        let mut y = DenseVector::zeros(10);
        work::reset();
        v.axpy_into(2.0, &mut y).unwrap();
        assert_eq!(work::total(), 3);
    }

    #[test]
    fn sparse_sparse_dot_merges_supports() {
        let a = sv(5, &[(0, 2.0), (2, 3.0), (4, 1.0)]);
        let b = sv(5, &[(2, 5.0), (3, 7.0), (4, -1.0)]);
        work::reset();
        assert_eq!(a.dot_sparse(&b).unwrap(), 14.0);
        assert_eq!(work::total(), 2);
        assert!(a.support_intersects(&b));
        assert!(!sv(5, &[(0, 1.0)]).support_intersects(&sv(5, &[(1, 1.0)])));
    }

    #[test]
    fn transpose_round_trips() {
        let m = ColMajorSparseMatrix::from_dense_rows(&[
            vec![1.0, 0.0, 2.0],
            vec![0.0, 3.0, 0.0],
        ])
        .unwrap();
        let back = m.transpose().transpose();
        assert_eq!(m.to_dense_rows(), back.to_dense_rows());
        assert_eq!(m.max_row_support(), 2);
        assert_eq!(m.max_col_support(), 1);
    }
}
