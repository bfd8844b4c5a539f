//! Dendrograms, hierarchical matrices and their sparse factorization.
//!
//! A dendrogram partitions `{0, .., n-1}` into nested contiguous intervals.
//! It induces a block partition of a square matrix: off-diagonal blocks
//! between siblings are elementary (stored as low-rank factor pairs), and
//! diagonal blocks recurse down to 1x1 scalars. A matrix whose elementary
//! blocks all have rank at most `r` factorizes as `Q = CD` with sparsity
//! index at most `r d (d-1) (h+1)` and at most `r d^2 n` columns in `C`,
//! where `d` and `h` are the dendrogram's maximum degree and height.

use serde::{Deserialize, Serialize};

use crate::dense::{svd, DenseMatrix};
use crate::error::{Error, Result};
use crate::factorization::KSparseFactorization;
use crate::sparse::{ColMajorSparseMatrix, SparseVector};
use crate::Scalar;

/// Hierarchical partition of `{0, .., n-1}` into nested contiguous intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    n: usize,
    root: DendrogramNode,
}

/// One interval `[lo, hi)`; children partition it, leaves are singletons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DendrogramNode {
    pub lo: usize,
    pub hi: usize,
    pub children: Vec<DendrogramNode>,
}

impl DendrogramNode {
    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    fn max_degree(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.max_degree())
            .chain([self.children.len()])
            .max()
            .unwrap_or(0)
    }

    fn validate(&self) -> Result<()> {
        if self.lo >= self.hi {
            return Err(Error::InvalidArgument("empty dendrogram interval".into()));
        }
        if self.is_leaf() {
            if self.len() != 1 {
                return Err(Error::InvalidArgument(format!(
                    "dendrogram leaf [{}, {}) is not a singleton",
                    self.lo, self.hi
                )));
            }
            return Ok(());
        }
        let mut cursor = self.lo;
        for child in &self.children {
            if child.lo != cursor {
                return Err(Error::InvalidArgument(
                    "dendrogram children must be contiguous and cover the parent".into(),
                ));
            }
            child.validate()?;
            cursor = child.hi;
        }
        if cursor != self.hi {
            return Err(Error::InvalidArgument(
                "dendrogram children do not cover the parent".into(),
            ));
        }
        Ok(())
    }
}

impl Dendrogram {
    pub fn from_root(root: DendrogramNode) -> Result<Self> {
        root.validate()?;
        if root.lo != 0 {
            return Err(Error::InvalidArgument("dendrogram root must start at 0".into()));
        }
        Ok(Self { n: root.hi, root })
    }

    /// Near-even recursive split into at most `d` contiguous children, with
    /// smaller parts first; height is at most `ceil(log_d n) + 1`.
    pub fn balanced(n: usize, d: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dendrogram over an empty set".into()));
        }
        if d < 2 {
            return Err(Error::InvalidArgument("dendrogram degree must be at least 2".into()));
        }
        fn build(lo: usize, hi: usize, d: usize) -> DendrogramNode {
            let s = hi - lo;
            if s == 1 {
                return DendrogramNode {
                    lo,
                    hi,
                    children: Vec::new(),
                };
            }
            let t = d.min(s);
            let base = s / t;
            let rem = s % t;
            let mut children = Vec::with_capacity(t);
            let mut cursor = lo;
            for c in 0..t {
                let size = if c < t - rem { base } else { base + 1 };
                children.push(build(cursor, cursor + size, d));
                cursor += size;
            }
            DendrogramNode {
                lo,
                hi,
                children,
            }
        }
        Ok(Self {
            n,
            root: build(0, n, d),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &DendrogramNode {
        &self.root
    }

    /// Height of the partition tree (singleton leaves sit at height 0).
    pub fn height(&self) -> usize {
        self.root.height()
    }

    /// Maximum number of children over all nodes.
    pub fn max_degree(&self) -> usize {
        self.root.max_degree()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dendrogram serializes")
    }
}

/// Low-rank factor pair of one elementary block: `block = left * right`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowRank<T = f64> {
    pub left: DenseMatrix<T>,
    pub right: DenseMatrix<T>,
}

impl<T: Scalar> LowRank<T> {
    pub fn rank(&self) -> usize {
        self.left.cols()
    }
}

/// Nodes of the block tree mirroring the dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HNode<T = f64> {
    /// 1x1 diagonal block.
    Leaf { value: T },
    /// `children[i]` recurses on the i-th diagonal block; `blocks[i][j]`
    /// (for `i != j`) holds the low-rank factors of block `(I_i, I_j)`, with
    /// `None` for an all-zero block.
    Branch {
        children: Vec<HNode<T>>,
        blocks: Vec<Vec<Option<LowRank<T>>>>,
    },
}

/// Square matrix with rank-bounded elementary blocks over a dendrogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HMatrix<T = f64> {
    n: usize,
    r: usize,
    dendrogram: Dendrogram,
    root: HNode<T>,
}

impl<T: Scalar> HMatrix<T> {
    pub fn from_parts(dendrogram: Dendrogram, r: usize, root: HNode<T>) -> Result<Self> {
        check_node(&root, dendrogram.root(), r)?;
        Ok(Self {
            n: dendrogram.n(),
            r,
            dendrogram,
            root,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared rank bound of the elementary blocks.
    pub fn rank_bound(&self) -> usize {
        self.r
    }

    pub fn dendrogram(&self) -> &Dendrogram {
        &self.dendrogram
    }

    pub fn root(&self) -> &HNode<T> {
        &self.root
    }

    /// Guaranteed upper bound on the sparsity index: `r d (d-1) (h+1)`,
    /// floored at 1.
    pub fn sparsity_bound(&self) -> usize {
        let d = self.dendrogram.max_degree().max(2);
        let h = self.dendrogram.height();
        (self.r * d * (d - 1) * (h + 1)).max(1)
    }

    /// Bound on the number of columns of `C`: `r d^2 n`.
    pub fn column_bound(&self) -> usize {
        let d = self.dendrogram.max_degree().max(2);
        (self.r * d * d * self.n).max(1)
    }

    pub fn densify(&self) -> DenseMatrix<T> {
        let mut out = DenseMatrix::zeros(self.n, self.n);
        fill_dense(&self.root, self.dendrogram.root(), &mut out);
        out
    }

    /// The diagonal block at a child path from the root, as a hierarchical
    /// matrix in its own right (indices shifted to start at zero).
    pub fn sub_hierarchy(&self, path: &[usize]) -> Option<HMatrix<T>> {
        let mut node = &self.root;
        let mut dnode = self.dendrogram.root();
        for &c in path {
            match node {
                HNode::Branch { children, .. } if c < children.len() => {
                    node = &children[c];
                    dnode = &dnode.children[c];
                }
                _ => return None,
            }
        }
        let shift = dnode.lo;
        let dend = Dendrogram::from_root(shift_node(dnode, shift)).ok()?;
        HMatrix::from_parts(dend, self.r, node.clone()).ok()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hmatrix serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: HMatrix<T> = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<hmatrix json>".into(),
            line: 1,
            msg: e.to_string(),
        })?;
        HMatrix::from_parts(m.dendrogram, m.r, m.root)
    }
}

fn shift_node(node: &DendrogramNode, shift: usize) -> DendrogramNode {
    DendrogramNode {
        lo: node.lo - shift,
        hi: node.hi - shift,
        children: node.children.iter().map(|c| shift_node(c, shift)).collect(),
    }
}

fn check_node<T: Scalar>(node: &HNode<T>, dnode: &DendrogramNode, r: usize) -> Result<()> {
    match node {
        HNode::Leaf { .. } => {
            if !dnode.is_leaf() {
                return Err(Error::InvalidArgument(
                    "scalar block on a non-singleton dendrogram node".into(),
                ));
            }
            Ok(())
        }
        HNode::Branch { children, blocks } => {
            let t = dnode.children.len();
            if children.len() != t || blocks.len() != t || blocks.iter().any(|row| row.len() != t) {
                return Err(Error::InvalidArgument(
                    "block tree does not match the dendrogram arity".into(),
                ));
            }
            for (i, row) in blocks.iter().enumerate() {
                for (j, blk) in row.iter().enumerate() {
                    match blk {
                        Some(lr) if i != j => {
                            let (si, sj) = (dnode.children[i].len(), dnode.children[j].len());
                            if lr.left.rows() != si
                                || lr.right.cols() != sj
                                || lr.left.cols() != lr.right.rows()
                            {
                                return Err(Error::InvalidArgument(format!(
                                    "block ({i}, {j}) factor shapes do not match its interval"
                                )));
                            }
                            if lr.rank() > r {
                                return Err(Error::InvalidArgument(format!(
                                    "block ({i}, {j}) stores rank {} > bound {r}",
                                    lr.rank()
                                )));
                            }
                        }
                        Some(_) => {
                            return Err(Error::InvalidArgument(
                                "diagonal positions must not store low-rank blocks".into(),
                            ))
                        }
                        None => {}
                    }
                }
            }
            for (child, dchild) in children.iter().zip(&dnode.children) {
                check_node(child, dchild, r)?;
            }
            Ok(())
        }
    }
}

fn fill_dense<T: Scalar>(node: &HNode<T>, dnode: &DendrogramNode, out: &mut DenseMatrix<T>) {
    match node {
        HNode::Leaf { value } => out[(dnode.lo, dnode.lo)] = *value,
        HNode::Branch { children, blocks } => {
            for (child, dchild) in children.iter().zip(&dnode.children) {
                fill_dense(child, dchild, out);
            }
            for (i, row) in blocks.iter().enumerate() {
                for (j, blk) in row.iter().enumerate() {
                    if let Some(lr) = blk {
                        let (ri, cj) = (&dnode.children[i], &dnode.children[j]);
                        for a in 0..ri.len() {
                            for b in 0..cj.len() {
                                let mut acc = T::zero();
                                for l in 0..lr.rank() {
                                    acc = acc + lr.left[(a, l)] * lr.right[(l, b)];
                                }
                                out[(ri.lo + a, cj.lo + b)] = acc;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Compresses a dense square matrix into the hierarchical format, replacing
/// each elementary block by its best rank-at-most-`r` approximation.
///
/// Returns the matrix and the largest spectral-norm error committed on any
/// block (zero when every true block rank is at most `r`). `cutoff` is the
/// absolute singular-value threshold below which a block direction counts as
/// zero; `None` uses `1e-12` times the block's largest singular value.
pub fn compress_dense<T: Scalar>(
    a: &DenseMatrix<T>,
    dendrogram: &Dendrogram,
    r: usize,
    cutoff: Option<T>,
) -> Result<(HMatrix<T>, T)> {
    if a.rows() != a.cols() || a.rows() != dendrogram.n() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but the dendrogram covers {}",
            a.rows(),
            a.cols(),
            dendrogram.n()
        )));
    }
    let mut max_err = T::zero();
    let root = compress_node(a, dendrogram.root(), r, cutoff, &mut max_err);
    Ok((HMatrix::from_parts(dendrogram.clone(), r, root)?, max_err))
}

fn compress_node<T: Scalar>(
    a: &DenseMatrix<T>,
    dnode: &DendrogramNode,
    r: usize,
    cutoff: Option<T>,
    max_err: &mut T,
) -> HNode<T> {
    if dnode.is_leaf() {
        return HNode::Leaf {
            value: a[(dnode.lo, dnode.lo)],
        };
    }
    let t = dnode.children.len();
    let children: Vec<HNode<T>> = dnode
        .children
        .iter()
        .map(|c| compress_node(a, c, r, cutoff, max_err))
        .collect();
    let mut blocks: Vec<Vec<Option<LowRank<T>>>> = vec![vec![None; t]; t];
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let (ri, cj) = (&dnode.children[i], &dnode.children[j]);
            let block = a.block(ri.lo, ri.hi, cj.lo, cj.hi);
            let decomp = svd(&block);
            let top = decomp.sigma.first().copied().unwrap_or_else(T::zero);
            let cut = cutoff.unwrap_or_else(|| T::of(1e-12) * top);
            let rank = decomp.rank_above(cut).min(r);
            if let Some(&dropped) = decomp.sigma.get(rank) {
                if dropped > cut {
                    *max_err = (*max_err).max(dropped);
                }
            }
            if rank > 0 {
                let (left, right) = decomp.truncate(rank);
                blocks[i][j] = Some(LowRank { left, right });
            }
        }
    }
    HNode::Branch { children, blocks }
}

/// Assembles the recursive `Q = CD` factorization of a hierarchical matrix.
///
/// Per block-row, the diagonal block's columns come first, then the
/// off-diagonal `C_ij` left factors in ascending `j`; `D` mirrors that
/// layout. A zero 1x1 diagonal block is rejected: its column would leave a
/// row of `D` zero.
pub fn factorize_hmatrix<T: Scalar>(h: &HMatrix<T>) -> Result<KSparseFactorization<T>> {
    let local = factorize_node(h.root(), h.dendrogram().root())?;
    let n = h.n();
    let p = local.c_cols.len();
    let c = ColMajorSparseMatrix::from_columns(n, local.c_cols)?;
    let d_cols = local
        .d_entries
        .into_iter()
        .map(|entries| SparseVector::new(p, entries))
        .collect::<Result<_>>()?;
    let d = ColMajorSparseMatrix::from_columns(p, d_cols)?;
    KSparseFactorization::new(c, d)
}

struct LocalFact<T> {
    /// Columns of the local `C`, with row indices relative to the node.
    c_cols: Vec<SparseVector<T>>,
    /// Per local matrix column: `(c column index, coefficient)` pairs.
    d_entries: Vec<Vec<(usize, T)>>,
}

fn factorize_node<T: Scalar>(node: &HNode<T>, dnode: &DendrogramNode) -> Result<LocalFact<T>> {
    match node {
        HNode::Leaf { value } => {
            if *value == T::zero() {
                return Err(Error::ZeroDiagonalBlock { index: dnode.lo });
            }
            Ok(LocalFact {
                c_cols: vec![SparseVector::new(1, vec![(0, *value)])?],
                d_entries: vec![vec![(0, T::one())]],
            })
        }
        HNode::Branch { children, blocks } => {
            let t = children.len();
            let sizes: Vec<usize> = dnode.children.iter().map(|c| c.len()).collect();
            let offsets: Vec<usize> = dnode.children.iter().map(|c| c.lo - dnode.lo).collect();
            let locals = children
                .iter()
                .zip(&dnode.children)
                .map(|(c, d)| factorize_node(c, d))
                .collect::<Result<Vec<_>>>()?;

            let size = dnode.len();
            let mut c_cols: Vec<SparseVector<T>> = Vec::new();
            let mut diag_offset = vec![0usize; t];
            let mut block_offset = vec![vec![0usize; t]; t];

            for i in 0..t {
                diag_offset[i] = c_cols.len();
                for col in &locals[i].c_cols {
                    let entries = col
                        .entries()
                        .iter()
                        .map(|&(r, v)| (offsets[i] + r, v))
                        .collect();
                    c_cols.push(SparseVector::new(size, entries)?);
                }
                for j in 0..t {
                    if i == j {
                        continue;
                    }
                    block_offset[i][j] = c_cols.len();
                    if let Some(lr) = &blocks[i][j] {
                        for l in 0..lr.rank() {
                            let entries = (0..sizes[i])
                                .filter(|&r| lr.left[(r, l)] != T::zero())
                                .map(|r| (offsets[i] + r, lr.left[(r, l)]))
                                .collect();
                            c_cols.push(SparseVector::new(size, entries)?);
                        }
                    }
                }
            }

            let mut d_entries: Vec<Vec<(usize, T)>> = vec![Vec::new(); size];
            for j in 0..t {
                for (local_col, child_entries) in locals[j].d_entries.iter().enumerate() {
                    let col = offsets[j] + local_col;
                    for &(idx, v) in child_entries {
                        d_entries[col].push((diag_offset[j] + idx, v));
                    }
                    for i in 0..t {
                        if i == j {
                            continue;
                        }
                        if let Some(lr) = &blocks[i][j] {
                            for l in 0..lr.rank() {
                                let v = lr.right[(l, local_col)];
                                if v != T::zero() {
                                    d_entries[col].push((block_offset[i][j] + l, v));
                                }
                            }
                        }
                    }
                }
            }
            Ok(LocalFact { c_cols, d_entries })
        }
    }
}

/// Converts a `(p, q)`-semiseparable matrix into hierarchical form over the
/// binary halving dendrogram (first part of size `floor(n/2)`).
///
/// Every elementary block must compress exactly at rank `max(p, q)`; the
/// first block whose numerical rank exceeds the bound (relative cutoff
/// `rank_tol` on its singular values) is reported.
pub fn semiseparable_to_hmatrix<T: Scalar>(
    a: &DenseMatrix<T>,
    p: usize,
    q: usize,
    rank_tol: f64,
) -> Result<HMatrix<T>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "semiseparable input must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if p == 0 || q == 0 {
        return Err(Error::InvalidArgument(
            "semiseparability orders must be at least 1".into(),
        ));
    }
    let n = a.rows();
    let r = p.max(q);
    let dendrogram = Dendrogram::balanced(n, 2)?;
    let root = semiseparable_node(a, dendrogram.root(), r, rank_tol)?;
    HMatrix::from_parts(dendrogram, r, root)
}

fn semiseparable_node<T: Scalar>(
    a: &DenseMatrix<T>,
    dnode: &DendrogramNode,
    r: usize,
    rank_tol: f64,
) -> Result<HNode<T>> {
    if dnode.is_leaf() {
        return Ok(HNode::Leaf {
            value: a[(dnode.lo, dnode.lo)],
        });
    }
    let t = dnode.children.len();
    let children = dnode
        .children
        .iter()
        .map(|c| semiseparable_node(a, c, r, rank_tol))
        .collect::<Result<Vec<_>>>()?;
    let mut blocks: Vec<Vec<Option<LowRank<T>>>> = vec![vec![None; t]; t];
    for i in 0..t {
        for j in 0..t {
            if i == j {
                continue;
            }
            let (ri, cj) = (&dnode.children[i], &dnode.children[j]);
            let block = a.block(ri.lo, ri.hi, cj.lo, cj.hi);
            let decomp = svd(&block);
            let top = decomp.sigma.first().copied().unwrap_or_else(T::zero);
            if top == T::zero() {
                continue;
            }
            let cut = T::of(rank_tol) * top;
            let rank = decomp.rank_above(cut);
            if rank > r {
                return Err(Error::RankViolation {
                    row_lo: ri.lo,
                    row_hi: ri.hi,
                    col_lo: cj.lo,
                    col_hi: cj.hi,
                    found: rank,
                    bound: r,
                    ratio: (decomp.sigma[r] / top).as_f64(),
                });
            }
            if rank > 0 {
                let (left, right) = decomp.truncate(rank);
                blocks[i][j] = Some(LowRank { left, right });
            }
        }
    }
    Ok(HNode::Branch { children, blocks })
}
