//! Factorizations `Q = CD` with a certified sparsity index.
//!
//! The sparsity index of a factorization is
//! `k = max_j |union over i in supp(d_j) of FO(c_i)|`, where the forward
//! overlap `FO(c_i)` is the set of columns `c_j` with `j >= i` whose support
//! intersects `supp(c_i)`. A small `k` is what makes the projection update
//! against any column `q_j = C d_j` cheap, regardless of how dense `q_j` is.
//!
//! Building a factorization precomputes the structures the iteration engine
//! needs: the upper-triangular Gram split `U` with `C^T C = U^T + U` (diagonal
//! fixed as half the Gram diagonal so one `U` serves both the inner-product
//! and norm identities), the columns `e_j = U^T d_j`, and the squared column
//! norms `q_j . q_j = 2 d_j . e_j`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};
use crate::work;
use crate::Scalar;

/// Default relative tolerance for [`KSparseFactorization::validate`].
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-10;

/// Forward overlaps of the columns of `C`: for each `i`, the ascending list of
/// columns `j >= i` whose support intersects `supp(c_i)` (always contains `i`).
pub fn forward_overlaps<T: Scalar>(c: &ColMajorSparseMatrix<T>) -> Result<Vec<Vec<usize>>> {
    for (i, col) in c.columns().iter().enumerate() {
        if col.is_zero() {
            return Err(Error::ZeroColumn {
                matrix: "C",
                index: i,
            });
        }
    }
    let rows_to_cols = c.rows_to_columns();
    let mut overlaps = Vec::with_capacity(c.cols());
    for (i, col) in c.columns().iter().enumerate() {
        let mut fo: Vec<usize> = Vec::new();
        for r in col.support() {
            for &j in &rows_to_cols[r] {
                if j >= i {
                    fo.push(j);
                }
            }
        }
        fo.sort_unstable();
        fo.dedup();
        overlaps.push(fo);
    }
    Ok(overlaps)
}

/// The tight sparsity index of the factorization `Q = CD`.
pub fn sparsity_index<T: Scalar>(
    c: &ColMajorSparseMatrix<T>,
    d: &ColMajorSparseMatrix<T>,
) -> Result<usize> {
    if c.cols() != d.rows() {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{} but D has {} rows",
            c.rows(),
            c.cols(),
            d.rows()
        )));
    }
    let overlaps = forward_overlaps(c)?;
    let mut k = 0usize;
    let mut union_buf: Vec<usize> = Vec::new();
    for dj in d.columns() {
        union_buf.clear();
        for i in dj.support() {
            union_buf.extend_from_slice(&overlaps[i]);
        }
        union_buf.sort_unstable();
        union_buf.dedup();
        k = k.max(union_buf.len());
    }
    Ok(k)
}

/// Upper-triangular `U` with `C^T C = U^T + U` and
/// `diag(U) = 1/2 diag(C^T C)`.
pub fn build_gram_split<T: Scalar>(c: &ColMajorSparseMatrix<T>) -> Result<ColMajorSparseMatrix<T>> {
    let (u, _) = gram_split_parts(c)?;
    Ok(u)
}

/// Builds `U` both column-major (for export and validation) and row-major
/// (rows of `U`, i.e. the columns of `U^T`, which the engine consumes).
fn gram_split_parts<T: Scalar>(
    c: &ColMajorSparseMatrix<T>,
) -> Result<(ColMajorSparseMatrix<T>, Vec<SparseVector<T>>)> {
    for (i, col) in c.columns().iter().enumerate() {
        if col.is_zero() {
            return Err(Error::ZeroColumn {
                matrix: "C",
                index: i,
            });
        }
    }
    let p = c.cols();
    // Row-wise accumulation keeps the cost at one multiply-add per ordered
    // pair of entries sharing a row, the O(m k^2) bound for k-row-sparse C.
    let rows_to_cols = c.rows_to_columns();
    let mut triples: Vec<(usize, usize, T)> = Vec::new();
    for (r, cols_in_row) in rows_to_cols.iter().enumerate() {
        let s = cols_in_row.len() as u64;
        work::record(s * (s + 1) / 2);
        for (a_pos, &a) in cols_in_row.iter().enumerate() {
            let va = c.column(a).get(r);
            for &b in &cols_in_row[a_pos..] {
                triples.push((a, b, va * c.column(b).get(r)));
            }
        }
    }
    triples.sort_by_key(|&(a, b, _)| (a, b));

    let half = T::of(0.5);
    let mut col_entries: Vec<Vec<(usize, T)>> = vec![Vec::new(); p];
    let mut row_entries: Vec<Vec<(usize, T)>> = vec![Vec::new(); p];
    let mut idx = 0;
    while idx < triples.len() {
        let (a, b, _) = triples[idx];
        let mut sum = T::zero();
        while idx < triples.len() && triples[idx].0 == a && triples[idx].1 == b {
            sum = sum + triples[idx].2;
            idx += 1;
        }
        let value = if a == b { sum * half } else { sum };
        if value != T::zero() {
            col_entries[b].push((a, value));
            row_entries[a].push((b, value));
        }
    }
    let u = ColMajorSparseMatrix::from_columns(
        p,
        col_entries
            .into_iter()
            .map(|e| SparseVector::new(p, e))
            .collect::<Result<_>>()?,
    )?;
    let u_rows = row_entries
        .into_iter()
        .map(|e| SparseVector::new(p, e))
        .collect::<Result<_>>()?;
    Ok((u, u_rows))
}

/// Computes `e_j = U^T d_j` for every column of `D`, plus the squared column
/// norms `q_j . q_j = 2 d_j . e_j`.
pub fn precompute_columns<T: Scalar>(
    u_rows: &[SparseVector<T>],
    d: &ColMajorSparseMatrix<T>,
) -> Result<(Vec<SparseVector<T>>, Vec<T>)> {
    let p = u_rows.len();
    if d.rows() != p {
        return Err(Error::DimensionMismatch(format!(
            "U is {p}x{p} but D has {} rows",
            d.rows()
        )));
    }
    let two = T::of(2.0);
    let mut e_cols = Vec::with_capacity(d.cols());
    let mut norms = Vec::with_capacity(d.cols());
    for (j, dj) in d.columns().iter().enumerate() {
        let mut terms: Vec<(usize, T)> = Vec::new();
        for &(i, coeff) in dj.entries() {
            let row = &u_rows[i];
            work::record(row.nnz() as u64);
            for &(col, v) in row.entries() {
                terms.push((col, coeff * v));
            }
        }
        terms.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, T)> = Vec::with_capacity(terms.len());
        for (i, v) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 = last.1 + v,
                _ => merged.push((i, v)),
            }
        }
        let e = SparseVector::new(p, merged)?;
        let norm = two * dj.dot_sparse(&e)?;
        if !(norm > T::zero()) {
            return Err(Error::ZeroDirection {
                index: j,
                norm: norm.as_f64(),
            });
        }
        e_cols.push(e);
        norms.push(norm);
    }
    Ok((e_cols, norms))
}

/// A `Q = CD` factorization with its certified sparsity index and the
/// precomputed structures that make `O(k)` projection updates possible.
#[derive(Debug, Clone)]
pub struct KSparseFactorization<T = f64> {
    c: ColMajorSparseMatrix<T>,
    d: ColMajorSparseMatrix<T>,
    u: ColMajorSparseMatrix<T>,
    u_rows: Vec<SparseVector<T>>,
    e_cols: Vec<SparseVector<T>>,
    col_sq_norms: Vec<T>,
    k: usize,
    augmented: bool,
    structural_zero_rows: Vec<usize>,
    setup_work: u64,
}

/// How the builder treats zero rows of `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ZeroRowPolicy {
    /// Reject with an error (the definition's normalization).
    Reject,
    /// Record them as structural; used by the identity augmentation and the
    /// block constructions whose layout leaves some `C` columns unused.
    Record,
}

impl<T: Scalar> KSparseFactorization<T> {
    /// Builds and certifies a factorization. Columns of `C` and rows of `D`
    /// must be nonzero.
    pub fn new(c: ColMajorSparseMatrix<T>, d: ColMajorSparseMatrix<T>) -> Result<Self> {
        Self::build(c, d, ZeroRowPolicy::Reject, false)
    }

    /// Prepends `I_m` to `C` (and matching zero rows to `D`) before building,
    /// so any `x0` is representable as `C h0` with `h0 = (x0; 0)`. The
    /// certified index grows by at most one.
    pub fn new_augmented(c: ColMajorSparseMatrix<T>, d: ColMajorSparseMatrix<T>) -> Result<Self> {
        check_strict(&c, &d)?;
        let m = c.rows();
        let mut columns: Vec<SparseVector<T>> = (0..m).map(|i| SparseVector::unit(m, i)).collect();
        columns.extend(c.columns().iter().cloned());
        let c_aug = ColMajorSparseMatrix::from_columns(m, columns)?;
        let d_aug_cols = d
            .columns()
            .iter()
            .map(|dj| {
                let entries = dj.entries().iter().map(|&(i, v)| (i + m, v)).collect();
                SparseVector::new(m + d.rows(), entries)
            })
            .collect::<Result<_>>()?;
        let d_aug = ColMajorSparseMatrix::from_columns(m + d.rows(), d_aug_cols)?;
        Self::build(c_aug, d_aug, ZeroRowPolicy::Record, true)
    }

    /// Permissive builder for block constructions that legitimately leave some
    /// rows of `D` zero (their `C` columns are simply never used).
    pub(crate) fn new_recording_zero_rows(
        c: ColMajorSparseMatrix<T>,
        d: ColMajorSparseMatrix<T>,
    ) -> Result<Self> {
        Self::build(c, d, ZeroRowPolicy::Record, false)
    }

    fn build(
        c: ColMajorSparseMatrix<T>,
        d: ColMajorSparseMatrix<T>,
        policy: ZeroRowPolicy,
        augmented: bool,
    ) -> Result<Self> {
        if c.cols() != d.rows() {
            return Err(Error::DimensionMismatch(format!(
                "C is {}x{} but D has {} rows",
                c.rows(),
                c.cols(),
                d.rows()
            )));
        }
        let zero_rows = zero_rows_of(&d);
        if policy == ZeroRowPolicy::Reject {
            if let Some(&index) = zero_rows.first() {
                return Err(Error::ZeroRow { matrix: "D", index });
            }
        }
        let work_before = work::total();
        let k = sparsity_index(&c, &d)?;
        let (u, u_rows) = gram_split_parts(&c)?;
        let (e_cols, col_sq_norms) = precompute_columns(&u_rows, &d)?;
        let setup_work = work::total() - work_before;
        Ok(Self {
            c,
            d,
            u,
            u_rows,
            e_cols,
            col_sq_norms,
            k,
            augmented,
            structural_zero_rows: zero_rows,
            setup_work,
        })
    }

    pub fn c(&self) -> &ColMajorSparseMatrix<T> {
        &self.c
    }

    pub fn d(&self) -> &ColMajorSparseMatrix<T> {
        &self.d
    }

    pub fn u(&self) -> &ColMajorSparseMatrix<T> {
        &self.u
    }

    /// Row `i` of `U`, i.e. column `i` of `U^T`.
    pub fn u_row(&self, i: usize) -> &SparseVector<T> {
        &self.u_rows[i]
    }

    pub fn e_col(&self, j: usize) -> &SparseVector<T> {
        &self.e_cols[j]
    }

    pub fn col_sq_norms(&self) -> &[T] {
        &self.col_sq_norms
    }

    /// Certified sparsity index (measured, not declared).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of rows of `Q`.
    pub fn m(&self) -> usize {
        self.c.rows()
    }

    /// Number of columns of `Q`.
    pub fn n(&self) -> usize {
        self.d.cols()
    }

    /// Number of columns of `C`.
    pub fn p(&self) -> usize {
        self.c.cols()
    }

    pub fn is_augmented(&self) -> bool {
        self.augmented
    }

    /// Rows of `D` that are structurally zero (empty by construction).
    pub fn structural_zero_rows(&self) -> &[usize] {
        &self.structural_zero_rows
    }

    /// Multiply-adds spent on the one-time precomputation (Gram split plus
    /// `U^T D` and the column norms).
    pub fn setup_work(&self) -> u64 {
        self.setup_work
    }

    /// `||Q||_Frob^2 = sum_j q_j . q_j`.
    pub fn frobenius_sq(&self) -> T {
        self.col_sq_norms
            .iter()
            .fold(T::zero(), |acc, &v| acc + v)
    }

    /// Coefficients `h0` with `C h0 = x0`. Requires the identity augmentation
    /// unless `x0` is zero.
    pub fn h0_from_x0(&self, x0: &DenseVector<T>) -> Result<DenseVector<T>> {
        if x0.dim() != self.m() {
            return Err(Error::DimensionMismatch(format!(
                "x0 has dim {} but Q has {} rows",
                x0.dim(),
                self.m()
            )));
        }
        let mut h0 = DenseVector::zeros(self.p());
        if x0.iter().all(|&v| v == T::zero()) {
            return Ok(h0);
        }
        if !self.augmented {
            return Err(Error::InvalidArgument(
                "a nonzero initial point needs an identity-augmented factorization".into(),
            ));
        }
        for i in 0..self.m() {
            h0[i] = x0[i];
        }
        Ok(h0)
    }

    /// Densifies `Q = CD` column by column.
    pub fn densify_q(&self) -> Vec<Vec<T>> {
        let mut rows = vec![vec![T::zero(); self.n()]; self.m()];
        for (j, dj) in self.d.columns().iter().enumerate() {
            for &(i, coeff) in dj.entries() {
                for &(r, v) in self.c.column(i).entries() {
                    rows[r][j] = rows[r][j] + coeff * v;
                }
            }
        }
        rows
    }

    /// Checks the product against `q` and every structural invariant.
    pub fn validate(&self, q: &ColMajorSparseMatrix<T>, tol: f64) -> ValidationReport {
        let mut report = ValidationReport {
            measured_k: self.k,
            ..ValidationReport::default()
        };

        if q.rows() != self.m() || q.cols() != self.n() {
            report.violations.push(format!(
                "shape mismatch: factorization is {}x{}, Q is {}x{}",
                self.m(),
                self.n(),
                q.rows(),
                q.cols()
            ));
            return report.finish();
        }
        for (i, col) in self.c.columns().iter().enumerate() {
            if col.is_zero() {
                report.violations.push(format!("zero column {i} of C"));
            }
        }
        for &i in &zero_rows_of(&self.d) {
            if !self.structural_zero_rows.contains(&i) {
                report.violations.push(format!("zero row {i} of D"));
            }
        }

        // U structure: upper triangular with half the Gram diagonal.
        for (j, col) in self.u.columns().iter().enumerate() {
            if col.entries().iter().any(|&(i, _)| i > j) {
                report
                    .violations
                    .push(format!("U has entries below the diagonal in column {j}"));
                break;
            }
        }
        let half = T::of(0.5);
        for (i, ci) in self.c.columns().iter().enumerate() {
            let gram_ii = ci.dot_sparse(ci).unwrap();
            let err = (self.u.get(i, i) - half * gram_ii).abs().as_f64();
            if err > tol * gram_ii.as_f64().max(1.0) {
                report
                    .violations
                    .push(format!("diag(U)[{i}] differs from half the Gram diagonal"));
                break;
            }
        }
        // Gram reconstruction U^T + U = C^T C on the overlap pattern.
        let mut gram_max = 0f64;
        let mut gram_err = 0f64;
        if report.violations.is_empty() {
            if let Ok(overlaps) = forward_overlaps(&self.c) {
                for (i, fo) in overlaps.iter().enumerate() {
                    for &j in fo {
                        let gram = self.c.column(i).dot_sparse(self.c.column(j)).unwrap();
                        let rebuilt = if i == j {
                            self.u.get(i, i) * T::of(2.0)
                        } else {
                            self.u.get(i, j) + self.u.get(j, i)
                        };
                        gram_max = gram_max.max(gram.abs().as_f64());
                        gram_err = gram_err.max((rebuilt - gram).abs().as_f64());
                    }
                }
            }
            if gram_err > tol * gram_max.max(1e-300) {
                report.violations.push(format!(
                    "Gram reconstruction error {gram_err:.3e} exceeds {tol:.1e} x {gram_max:.3e}"
                ));
            }
        }

        // e_j = U^T d_j and the norm identity against the densified column.
        for (j, dj) in self.d.columns().iter().enumerate() {
            if !report.violations.is_empty() {
                break;
            }
            let mut qj: DenseVector<T> = DenseVector::zeros(self.m());
            for &(i, coeff) in dj.entries() {
                for &(r, v) in self.c.column(i).entries() {
                    qj[r] = qj[r] + coeff * v;
                }
            }
            let dense_norm = qj.norm_sq().as_f64();
            let stored = self.col_sq_norms[j].as_f64();
            if !(stored > 0.0) {
                report
                    .violations
                    .push(format!("column {j} has non-positive squared norm"));
            } else if (stored - dense_norm).abs() > 1e-8 * dense_norm.max(1e-300) {
                report.violations.push(format!(
                    "norm identity fails on column {j}: 2 d.e = {stored:.6e} vs ||Cd||^2 = {dense_norm:.6e}"
                ));
            }
        }

        // Product check in relative max norm.
        let mut q_max = 0f64;
        for j in 0..q.cols() {
            for &(_, v) in q.column(j).entries() {
                q_max = q_max.max(v.abs().as_f64());
            }
        }
        let product = self.densify_q();
        let mut err = 0f64;
        for (i, row) in product.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                err = err.max((v - q.get(i, j)).abs().as_f64());
            }
        }
        report.max_product_error = err;
        if err > tol * q_max.max(1e-300) {
            report.violations.push(format!(
                "||CD - Q||_max = {err:.3e} exceeds {tol:.1e} x ||Q||_max = {:.3e}",
                tol * q_max
            ));
        }
        report.finish()
    }

    /// Exports as a directory of `C.mtx`, `D.mtx`, `U.mtx` plus a JSON sidecar.
    pub fn export_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        io::write_matrix_market(dir.join("C.mtx"), &self.c)?;
        io::write_matrix_market(dir.join("D.mtx"), &self.d)?;
        io::write_matrix_market(dir.join("U.mtx"), &self.u)?;
        let meta = FactorizationMeta {
            k: self.k,
            m: self.m(),
            n: self.n(),
            p: self.p(),
            augmented: self.augmented,
        };
        let json = serde_json::to_string_pretty(&meta).expect("meta serializes");
        io::write_atomic(&dir.join("meta.json"), json.as_bytes())
    }

    /// Reimports an exported directory, rebuilding the precomputed structures
    /// and checking the certified index against the sidecar.
    pub fn import_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let c = io::read_matrix_market(dir.join("C.mtx"))?;
        let d = io::read_matrix_market(dir.join("D.mtx"))?;
        let meta_path = dir.join("meta.json");
        let text = std::fs::read_to_string(&meta_path).map_err(|source| Error::Io {
            path: meta_path.clone(),
            source,
        })?;
        let meta: FactorizationMeta = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: meta_path,
            line: 1,
            msg: e.to_string(),
        })?;
        let mut fact = Self::build(c, d, ZeroRowPolicy::Record, meta.augmented)?;
        if fact.k != meta.k || fact.m() != meta.m || fact.n() != meta.n || fact.p() != meta.p {
            return Err(Error::InvalidArgument(format!(
                "sidecar mismatch: measured (k={}, m={}, n={}, p={}) vs recorded (k={}, m={}, n={}, p={})",
                fact.k,
                fact.m(),
                fact.n(),
                fact.p(),
                meta.k,
                meta.m,
                meta.n,
                meta.p
            )));
        }
        fact.augmented = meta.augmented;
        Ok(fact)
    }
}

#[derive(Serialize, Deserialize)]
struct FactorizationMeta {
    k: usize,
    m: usize,
    n: usize,
    p: usize,
    #[serde(default)]
    augmented: bool,
}

/// Outcome of [`KSparseFactorization::validate`].
#[derive(Debug, Default, Clone)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<String>,
    pub max_product_error: f64,
    pub measured_k: usize,
}

impl ValidationReport {
    fn finish(mut self) -> Self {
        self.pass = self.violations.is_empty();
        self
    }

    pub fn first_violation(&self) -> Option<&str> {
        self.violations.first().map(String::as_str)
    }
}

/// Validates a candidate `(C, D)` pair against `Q` without requiring that it
/// build successfully first; build failures become report entries.
pub fn validate_candidate<T: Scalar>(
    c: &ColMajorSparseMatrix<T>,
    d: &ColMajorSparseMatrix<T>,
    q: &ColMajorSparseMatrix<T>,
    tol: f64,
) -> ValidationReport {
    match KSparseFactorization::new(c.clone(), d.clone()) {
        Ok(f) => f.validate(q, tol),
        Err(e) => {
            let mut report = ValidationReport::default();
            report.violations.push(e.to_string());
            report.finish()
        }
    }
}

fn check_strict<T: Scalar>(c: &ColMajorSparseMatrix<T>, d: &ColMajorSparseMatrix<T>) -> Result<()> {
    for (i, col) in c.columns().iter().enumerate() {
        if col.is_zero() {
            return Err(Error::ZeroColumn {
                matrix: "C",
                index: i,
            });
        }
    }
    if let Some(&index) = zero_rows_of(d).first() {
        return Err(Error::ZeroRow { matrix: "D", index });
    }
    Ok(())
}

fn zero_rows_of<T: Scalar>(d: &ColMajorSparseMatrix<T>) -> Vec<usize> {
    let mut nonzero = vec![false; d.rows()];
    for col in d.columns() {
        for i in col.support() {
            nonzero[i] = true;
        }
    }
    nonzero
        .iter()
        .enumerate()
        .filter(|&(_, &nz)| !nz)
        .map(|(i, _)| i)
        .collect()
}

/// Stacks two factorizations of matrices with the same column count:
/// `(Q1; Q2) = blockdiag(C1, C2) (D1; D2)`.
pub fn stack<T: Scalar>(
    f1: &KSparseFactorization<T>,
    f2: &KSparseFactorization<T>,
) -> Result<KSparseFactorization<T>> {
    if f1.n() != f2.n() {
        return Err(Error::DimensionMismatch(format!(
            "stacking needs equal column counts, got {} and {}",
            f1.n(),
            f2.n()
        )));
    }
    let (m1, p1) = (f1.m(), f1.p());
    let (m2, p2) = (f2.m(), f2.p());
    let mut c_cols: Vec<SparseVector<T>> = Vec::with_capacity(p1 + p2);
    for col in f1.c().columns() {
        c_cols.push(SparseVector::new(
            m1 + m2,
            col.entries().to_vec(),
        )?);
    }
    for col in f2.c().columns() {
        let entries = col.entries().iter().map(|&(i, v)| (i + m1, v)).collect();
        c_cols.push(SparseVector::new(m1 + m2, entries)?);
    }
    let c = ColMajorSparseMatrix::from_columns(m1 + m2, c_cols)?;

    let d_cols = (0..f1.n())
        .map(|j| {
            let mut entries: Vec<(usize, T)> = f1.d().column(j).entries().to_vec();
            entries.extend(
                f2.d()
                    .column(j)
                    .entries()
                    .iter()
                    .map(|&(i, v)| (i + p1, v)),
            );
            SparseVector::new(p1 + p2, entries)
        })
        .collect::<Result<_>>()?;
    let d = ColMajorSparseMatrix::from_columns(p1 + p2, d_cols)?;
    KSparseFactorization::new_recording_zero_rows(c, d)
}

/// `QF = C (DF)` for an `f`-column-sparse `F`.
pub fn right_multiply<T: Scalar>(
    fact: &KSparseFactorization<T>,
    f: &ColMajorSparseMatrix<T>,
) -> Result<KSparseFactorization<T>> {
    if f.rows() != fact.n() {
        return Err(Error::DimensionMismatch(format!(
            "Q has {} columns but F has {} rows",
            fact.n(),
            f.rows()
        )));
    }
    let d_new_cols = (0..f.cols())
        .map(|j| combine_columns(fact.d(), f.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let d = ColMajorSparseMatrix::from_columns(fact.p(), d_new_cols)?;
    KSparseFactorization::new_recording_zero_rows(fact.c().clone(), d)
}

/// Sparse linear combination `sum_i coeffs[i] * m.column(i)`.
fn combine_columns<T: Scalar>(
    m: &ColMajorSparseMatrix<T>,
    coeffs: &SparseVector<T>,
) -> Result<SparseVector<T>> {
    let mut terms: Vec<(usize, T)> = Vec::new();
    for &(i, coeff) in coeffs.entries() {
        let col = m.column(i);
        work::record(col.nnz() as u64);
        for &(r, v) in col.entries() {
            terms.push((r, coeff * v));
        }
    }
    terms.sort_by_key(|&(i, _)| i);
    let mut merged: Vec<(usize, T)> = Vec::with_capacity(terms.len());
    for (i, v) in terms {
        match merged.last_mut() {
            Some(last) if last.0 == i => last.1 = last.1 + v,
            _ => merged.push((i, v)),
        }
    }
    SparseVector::new(m.rows(), merged)
}

/// `Q = I Q`: certified index is the largest column support of `Q`.
pub fn trivial_left<T: Scalar>(q: &ColMajorSparseMatrix<T>) -> Result<KSparseFactorization<T>> {
    KSparseFactorization::new(ColMajorSparseMatrix::identity(q.rows()), q.clone())
}

/// `Q = Q I`: certified index is the largest forward overlap of `Q`'s columns.
pub fn trivial_right<T: Scalar>(q: &ColMajorSparseMatrix<T>) -> Result<KSparseFactorization<T>> {
    KSparseFactorization::new(q.clone(), ColMajorSparseMatrix::identity(q.cols()))
}
