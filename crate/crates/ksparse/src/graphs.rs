//! Weighted graphs, incidence matrices, tree vertex separators and the
//! hierarchical structure of tree incidence matrices.
//!
//! A spanning tree rooted at the grounded node orders its non-root nodes by a
//! recursive vertex-separator split. Under that ordering the reduced
//! incidence matrix `E` of the tree is upper triangular with diagonal
//! `+sqrt(w)`, and both `E` and `E^{-1}` are hierarchical with rank-1
//! off-diagonal blocks, hence `O(log n)`-sparsely factorizable. The inverse
//! has the closed form `E^{-1}[i][j] = 1/sqrt(w_i)` when node `i` is an
//! ancestor of `j` (edges oriented root to leaves), which is what the block
//! builder exploits.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::factorization::KSparseFactorization;
use crate::hmatrix::{factorize_hmatrix, Dendrogram, DendrogramNode, HMatrix, HNode, LowRank};
use crate::dense::DenseMatrix;
use crate::sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};
use crate::Scalar;

/// Undirected positively weighted graph; parallel edges permitted.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<T = f64> {
    n: usize,
    edges: Vec<(usize, usize, T)>,
    connected: bool,
}

impl<T: Scalar> WeightedGraph<T> {
    pub fn new(n: usize, edges: Vec<(usize, usize, T)>) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if !(w > T::zero()) {
                return Err(Error::InvalidArgument(
                    "edge weights must be strictly positive".into(),
                ));
            }
        }
        let connected = is_connected(n, &edges);
        Ok(Self {
            n,
            edges,
            connected,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Per node: `(neighbor, edge index)` pairs, ascending by edge index.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (e, &(u, v, _)) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        adj
    }
}

fn is_connected<T>(n: usize, edges: &[(usize, usize, T)]) -> bool {
    if n == 0 {
        return false;
    }
    let mut adj = vec![Vec::new(); n];
    for &(u, v, _) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Node-by-edge matrix with `-sqrt(w)` at each edge's source and `+sqrt(w)`
/// at its target.
#[derive(Debug, Clone)]
pub struct IncidenceMatrix<T = f64> {
    matrix: ColMajorSparseMatrix<T>,
    /// `(source, target)` per edge.
    orientation: Vec<(usize, usize)>,
}

impl<T: Scalar> IncidenceMatrix<T> {
    pub fn matrix(&self) -> &ColMajorSparseMatrix<T> {
        &self.matrix
    }

    pub fn orientation(&self) -> &[(usize, usize)] {
        &self.orientation
    }
}

/// Builds the incidence matrix. Without a seed, edges point from the lower to
/// the higher node id; a seed flips each edge by a reproducible coin.
pub fn incidence<T: Scalar>(g: &WeightedGraph<T>, orientation_seed: Option<u64>) -> IncidenceMatrix<T> {
    let mut rng = orientation_seed.map(ChaCha8Rng::seed_from_u64);
    let mut orientation = Vec::with_capacity(g.edge_count());
    let mut columns = Vec::with_capacity(g.edge_count());
    for &(u, v, w) in g.edges() {
        let (mut s, mut t) = (u.min(v), u.max(v));
        if let Some(rng) = rng.as_mut() {
            if rng.next_u64() & 1 == 1 {
                std::mem::swap(&mut s, &mut t);
            }
        }
        let root_w = w.sqrt();
        let mut entries = vec![(s, -root_w), (t, root_w)];
        entries.sort_by_key(|&(i, _)| i);
        columns.push(SparseVector::new(g.node_count(), entries).expect("valid incidence column"));
        orientation.push((s, t));
    }
    IncidenceMatrix {
        matrix: ColMajorSparseMatrix::from_columns(g.node_count(), columns)
            .expect("columns share the node dimension"),
        orientation,
    }
}

/// Deletes the grounded node's row, renumbering the rows above it down.
pub fn reduce<T: Scalar>(b: &IncidenceMatrix<T>, grounded: usize) -> Result<ColMajorSparseMatrix<T>> {
    let n = b.matrix.rows();
    if grounded >= n {
        return Err(Error::InvalidArgument(format!(
            "grounded node {grounded} out of range for {n} nodes"
        )));
    }
    let columns = b
        .matrix
        .columns()
        .iter()
        .map(|col| {
            let entries = col
                .entries()
                .iter()
                .filter(|&&(i, _)| i != grounded)
                .map(|&(i, v)| (if i > grounded { i - 1 } else { i }, v))
                .collect();
            SparseVector::new(n - 1, entries)
        })
        .collect::<Result<_>>()?;
    ColMajorSparseMatrix::from_columns(n - 1, columns)
}

/// Result of one vertex-separator application.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorSplit {
    /// Removed node, or `None` when the subset was already disconnected and
    /// could be split by grouping whole components.
    pub separator: Option<usize>,
    pub part1: Vec<usize>,
    pub part2: Vec<usize>,
}

/// Splits a forest-inducing node subset into two forests of at most
/// `ceil(2n/3)` nodes each by removing at most one node.
///
/// Among valid separators the lowest-index one is chosen; splits with two
/// nonempty parts are preferred.
pub fn tree_separator<T: Scalar>(g: &WeightedGraph<T>, subset: &[usize]) -> Result<SeparatorSplit> {
    let n = subset.len();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "separator needs a subset of at least two nodes".into(),
        ));
    }
    let mut in_subset = vec![false; g.node_count()];
    for &u in subset {
        if u >= g.node_count() {
            return Err(Error::InvalidArgument(format!("node {u} out of range")));
        }
        if in_subset[u] {
            return Err(Error::InvalidArgument(format!("duplicate node {u} in subset")));
        }
        in_subset[u] = true;
    }
    let adj = g.adjacency();
    // forest check: edges within the subset must not close a cycle
    let mut dsu = Dsu::new(g.node_count());
    for &(u, v, _) in g.edges() {
        if in_subset[u] && in_subset[v] && !dsu.union(u, v) {
            return Err(Error::InvalidArgument(
                "subset does not induce a forest".into(),
            ));
        }
    }
    let neighbors = |u: usize| {
        adj[u]
            .iter()
            .map(|&(v, _)| v)
            .filter(|&v| in_subset[v])
            .collect::<Vec<_>>()
    };
    let comps = components(subset, &in_subset, &adj);
    let hi = (2 * n).div_ceil(3);

    if comps.len() > 1 && comps.iter().all(|c| c.len() <= hi) {
        let (part1, part2) = pack_groups(&comps, hi);
        return Ok(SeparatorSplit {
            separator: None,
            part1,
            part2,
        });
    }

    // work inside the unique component larger than the bound (or the only one)
    let target = comps
        .iter()
        .max_by_key(|c| (c.len(), usize::MAX - c[0]))
        .expect("at least one component");
    let mut fallback: Option<(usize, Vec<Vec<usize>>)> = None;
    let mut candidates: Vec<usize> = target.to_vec();
    candidates.sort_unstable();
    for &d in &candidates {
        // fragments after removing d: components of subset minus d
        let mut fragments: Vec<Vec<usize>> = comps
            .iter()
            .filter(|c| !c.contains(&d))
            .cloned()
            .collect();
        let mut seen = vec![false; g.node_count()];
        seen[d] = true;
        for start in neighbors(d) {
            if seen[start] {
                continue;
            }
            let mut frag = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(u) = stack.pop() {
                frag.push(u);
                for v in neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            fragments.push(frag);
        }
        if fragments.iter().all(|f| f.len() <= hi) {
            if fragments.len() >= 2 {
                let (part1, part2) = pack_groups(&fragments, hi);
                return Ok(SeparatorSplit {
                    separator: Some(d),
                    part1,
                    part2,
                });
            }
            if fallback.is_none() {
                fallback = Some((d, fragments));
            }
        }
    }
    // No separator yields two nonempty parts (only possible at tiny sizes):
    // accept an empty second part.
    if let Some((d, fragments)) = fallback {
        let (part1, part2) = pack_groups(&fragments, hi);
        return Ok(SeparatorSplit {
            separator: Some(d),
            part1,
            part2,
        });
    }
    Err(Error::InvalidArgument(
        "no valid vertex separator found".into(),
    ))
}

fn components(
    subset: &[usize],
    in_subset: &[bool],
    adj: &[Vec<(usize, usize)>],
) -> Vec<Vec<usize>> {
    let mut seen = vec![false; in_subset.len()];
    let mut comps = Vec::new();
    let mut order = subset.to_vec();
    order.sort_unstable();
    for &start in &order {
        if seen[start] {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &(v, _) in &adj[u] {
                if in_subset[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Packs groups into two parts, largest first onto the smaller side (ties to
/// the first part, then by smallest member for determinism).
///
/// With every group of size at most `hi = ceil(2n/3)` and total at most `n`,
/// neither part can exceed `hi`: when a group `g` lands on the smaller side
/// `s > 0`, the larger side already holds an item of size at least `|g|`, so
/// `s + 2|g| <= n` and `s + |g| <= n - |g|`; exceeding `hi` would force
/// `|g| > n/3` and `|g| < n/3` simultaneously.
fn pack_groups(groups: &[Vec<usize>], hi: usize) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by_key(|&i| (usize::MAX - groups[i].len(), groups[i][0]));
    let (mut part1, mut part2) = (Vec::new(), Vec::new());
    for i in order {
        let target = if part1.len() <= part2.len() {
            &mut part1
        } else {
            &mut part2
        };
        target.extend_from_slice(&groups[i]);
        debug_assert!(target.len() <= hi, "separator packing exceeded the bound");
    }
    part1.sort_unstable();
    part2.sort_unstable();
    (part1, part2)
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }
}

/// Strategy for picking a spanning tree.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeStrategy {
    /// Kruskal on inverse weights: minimizes `sum 1/w` over tree edges.
    MstInverseWeight,
    /// Cluster-merging heuristic: edges are bucketed by weight class
    /// (descending), and in each round bounded-radius clusters are grown over
    /// the contracted graph before merging.
    AkpwLike,
    /// Caller-supplied edge indices into the graph's edge list.
    Given(Vec<usize>),
}

impl TreeStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            TreeStrategy::MstInverseWeight => "mst-inverse-weight",
            TreeStrategy::AkpwLike => "akpw-like",
            TreeStrategy::Given(_) => "given",
        }
    }
}

/// A rooted spanning tree with its separator-based node ordering.
///
/// Edges are oriented root to leaves and each edge is indexed by its child
/// node, so the reduced incidence matrix of the tree is square, indexed both
/// ways by the non-root nodes, and upper triangular under the ordering.
#[derive(Debug, Clone)]
pub struct SpanningTree<T = f64> {
    n: usize,
    root: usize,
    parent: Vec<usize>,
    parent_weight: Vec<T>,
    /// Graph edge index of each node's parent edge (`usize::MAX` at the root).
    parent_edge: Vec<usize>,
    strategy: &'static str,
    /// `position[node]` in the permuted matrix; the root maps to `usize::MAX`.
    position: Vec<usize>,
    /// `node_at[pos]` inverts `position`.
    node_at: Vec<usize>,
    dendrogram: Dendrogram,
    split_root: SplitNode,
}

/// Separator recursion outcome over one contiguous block of positions.
#[derive(Debug, Clone)]
enum SplitNode {
    Leaf,
    Branch {
        part1: Box<SplitNode>,
        part2: Box<SplitNode>,
        sizes: (usize, usize),
        /// Tree edges crossing from part1 into part2 as `(parent, child)`.
        cross_edges: Vec<(usize, usize)>,
        /// Ancestor chain in part1 shared by all crossing columns.
        chain: Vec<usize>,
        /// part2 nodes that are descendants of the separator.
        descendants: Vec<usize>,
    },
}

/// Picks the spanning tree edges for a strategy.
pub fn spanning_tree_edges<T: Scalar>(
    g: &WeightedGraph<T>,
    strategy: &TreeStrategy,
) -> Result<Vec<usize>> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    match strategy {
        TreeStrategy::MstInverseWeight => {
            let mut order: Vec<usize> = (0..g.edge_count()).collect();
            // ascending inverse weight = descending weight; ties by edge index
            order.sort_by(|&a, &b| {
                let (wa, wb) = (g.edges()[a].2, g.edges()[b].2);
                wb.partial_cmp(&wa).unwrap().then(a.cmp(&b))
            });
            let mut dsu = Dsu::new(g.node_count());
            let mut picked = Vec::with_capacity(g.node_count() - 1);
            for e in order {
                let (u, v, _) = g.edges()[e];
                if dsu.union(u, v) {
                    picked.push(e);
                }
            }
            picked.sort_unstable();
            Ok(picked)
        }
        TreeStrategy::AkpwLike => Ok(akpw_like_edges(g)),
        TreeStrategy::Given(edges) => {
            let mut dsu = Dsu::new(g.node_count());
            if edges.len() != g.node_count() - 1 {
                return Err(Error::NotSpanning(format!(
                    "{} edges given, {} needed",
                    edges.len(),
                    g.node_count() - 1
                )));
            }
            for &e in edges {
                if e >= g.edge_count() {
                    return Err(Error::NotSpanning(format!("edge index {e} out of range")));
                }
                let (u, v, _) = g.edges()[e];
                if !dsu.union(u, v) {
                    return Err(Error::NotSpanning(format!("edge {e} closes a cycle")));
                }
            }
            Ok(edges.clone())
        }
    }
}

/// Rounds of bounded-radius cluster growth over weight classes (strong edges
/// first), with a Kruskal sweep for anything the rounds leave unconnected.
fn akpw_like_edges<T: Scalar>(g: &WeightedGraph<T>) -> Vec<usize> {
    let n = g.node_count();
    let class_of = |w: T| -> i64 { w.as_f64().log2().floor() as i64 };
    let classes: Vec<i64> = g.edges().iter().map(|&(_, _, w)| class_of(w)).collect();
    let mut order: Vec<i64> = classes.clone();
    order.sort_unstable();
    order.dedup();
    order.reverse();

    let mut dsu = Dsu::new(n);
    let mut picked = Vec::new();
    for class in order {
        // cluster graph restricted to this weight class
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(u, v, _)) in g.edges().iter().enumerate() {
            if classes[e] == class && dsu.find(u) != dsu.find(v) {
                adj[dsu.find(u)].push((dsu.find(v), e));
                adj[dsu.find(v)].push((dsu.find(u), e));
            }
        }
        let mut depth = vec![usize::MAX; n];
        for seed in 0..n {
            let seed = dsu.find(seed);
            if depth[seed] != usize::MAX {
                continue;
            }
            depth[seed] = 0;
            let mut queue = std::collections::VecDeque::from([seed]);
            while let Some(c) = queue.pop_front() {
                if depth[c] >= 2 {
                    continue; // bounded cluster radius
                }
                let mut nbrs = adj[c].clone();
                nbrs.sort_by_key(|&(_, e)| e);
                for (other, e) in nbrs {
                    let other = dsu.find(other);
                    if depth[other] == usize::MAX {
                        let (u, v, _) = g.edges()[e];
                        if dsu.union(u, v) {
                            depth[other] = depth[c] + 1;
                            picked.push(e);
                            queue.push_back(other);
                        }
                    }
                }
            }
        }
    }
    // finish with a deterministic sweep in case cluster rounds left gaps
    for (e, &(u, v, _)) in g.edges().iter().enumerate() {
        if dsu.union(u, v) {
            picked.push(e);
        }
    }
    picked.sort_unstable();
    picked
}

impl<T: Scalar> SpanningTree<T> {
    /// Builds the tree for a strategy, roots it (default: the top-level
    /// vertex separator of the tree) and computes the separator ordering.
    pub fn build(
        g: &WeightedGraph<T>,
        strategy: &TreeStrategy,
        root: Option<usize>,
    ) -> Result<Self> {
        let edges = spanning_tree_edges(g, strategy)?;
        Self::from_edge_ids(g, &edges, root, strategy.name())
    }

    fn from_edge_ids(
        g: &WeightedGraph<T>,
        tree_edges: &[usize],
        root: Option<usize>,
        strategy: &'static str,
    ) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::Disconnected);
        }
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for &e in tree_edges {
            let (u, v, _) = g.edges()[e];
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        let root = match root {
            Some(r) => {
                if r >= n {
                    return Err(Error::InvalidArgument(format!(
                        "grounded node {r} out of range"
                    )));
                }
                r
            }
            None if n >= 2 => {
                let all: Vec<usize> = (0..n).collect();
                let tree_graph = WeightedGraph::new(
                    n,
                    tree_edges.iter().map(|&e| g.edges()[e]).collect(),
                )?;
                tree_separator(&tree_graph, &all)?.separator.unwrap_or(0)
            }
            None => 0,
        };

        // root the tree
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut parent_weight = vec![T::one(); n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(u) = stack.pop() {
            order.push(u);
            let mut nbrs = adj[u].clone();
            nbrs.sort_unstable();
            for (v, e) in nbrs {
                if parent[v] == usize::MAX {
                    parent[v] = u;
                    parent_edge[v] = e;
                    parent_weight[v] = g.edges()[e].2;
                    stack.push(v);
                }
            }
        }
        if order.len() != n {
            return Err(Error::NotSpanning("tree edges do not span the graph".into()));
        }

        let (position, node_at, dendrogram, split_root) =
            separator_ordering_impl(n, root, &parent, &adj)?;
        Ok(Self {
            n,
            root,
            parent,
            parent_weight,
            parent_edge,
            strategy,
            position,
            node_at,
            dendrogram,
            split_root,
        })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn strategy(&self) -> &'static str {
        self.strategy
    }

    pub fn parent(&self, node: usize) -> Option<usize> {
        if node == self.root {
            None
        } else {
            Some(self.parent[node])
        }
    }

    pub fn parent_weight(&self, node: usize) -> T {
        self.parent_weight[node]
    }

    /// Graph edge index of the node's parent edge.
    pub fn parent_edge(&self, node: usize) -> Option<usize> {
        if node == self.root {
            None
        } else {
            Some(self.parent_edge[node])
        }
    }

    /// Indices of the graph edges used by the tree, ordered by position.
    pub fn tree_edge_ids(&self) -> Vec<usize> {
        self.node_at.iter().map(|&v| self.parent_edge[v]).collect()
    }

    /// Position of a non-root node in the permuted incidence matrix.
    pub fn position(&self, node: usize) -> Option<usize> {
        if node == self.root {
            None
        } else {
            Some(self.position[node])
        }
    }

    pub fn node_at_position(&self, pos: usize) -> usize {
        self.node_at[pos]
    }

    pub fn dendrogram(&self) -> &Dendrogram {
        &self.dendrogram
    }

    /// The permuted reduced incidence matrix `E` as a hierarchical matrix.
    pub fn e_hmatrix(&self) -> Result<HMatrix<T>> {
        let root = self.build_block_node(&self.split_root, 0, false);
        HMatrix::from_parts(self.dendrogram.clone(), 1, root)
    }

    /// The inverse `E^{-1}` as a hierarchical matrix over the same ordering.
    pub fn einv_hmatrix(&self) -> Result<HMatrix<T>> {
        let root = self.build_block_node(&self.split_root, 0, true);
        HMatrix::from_parts(self.dendrogram.clone(), 1, root)
    }

    fn build_block_node(&self, split: &SplitNode, base: usize, inverse: bool) -> HNode<T> {
        match split {
            SplitNode::Leaf => {
                let node = self.node_at[base];
                let w = self.parent_weight[node].sqrt();
                HNode::Leaf {
                    value: if inverse { T::one() / w } else { w },
                }
            }
            SplitNode::Branch {
                part1,
                part2,
                sizes,
                cross_edges,
                chain,
                descendants,
            } => {
                let (s1, s2) = *sizes;
                let children = vec![
                    self.build_block_node(part1, base, inverse),
                    self.build_block_node(part2, base + s1, inverse),
                ];
                let mut blocks: Vec<Vec<Option<LowRank<T>>>> = vec![vec![None, None], vec![None, None]];
                blocks[0][1] = if inverse {
                    self.inverse_block(chain, descendants, base, base + s1, s1, s2)
                } else {
                    self.forward_block(cross_edges, base, base + s1, s1, s2)
                };
                HNode::Branch { children, blocks }
            }
        }
    }

    /// Crossing entries of `E`: `-sqrt(w_child)` at `(parent row, child col)`;
    /// all crossing edges share the parent row, so the block has rank 1.
    fn forward_block(
        &self,
        cross_edges: &[(usize, usize)],
        row_base: usize,
        col_base: usize,
        s1: usize,
        s2: usize,
    ) -> Option<LowRank<T>> {
        if cross_edges.is_empty() {
            return None;
        }
        let parent_row = self.position[cross_edges[0].0] - row_base;
        debug_assert!(cross_edges
            .iter()
            .all(|&(p, _)| self.position[p] - row_base == parent_row));
        let mut left = DenseMatrix::zeros(s1, 1);
        left[(parent_row, 0)] = T::one();
        let mut right = DenseMatrix::zeros(1, s2);
        for &(_, child) in cross_edges {
            right[(0, self.position[child] - col_base)] = -self.parent_weight[child].sqrt();
        }
        Some(LowRank { left, right })
    }

    /// Crossing entries of `E^{-1}`: `1/sqrt(w_i)` for every ancestor `i` in
    /// the chain and every descendant column.
    fn inverse_block(
        &self,
        chain: &[usize],
        descendants: &[usize],
        row_base: usize,
        col_base: usize,
        s1: usize,
        s2: usize,
    ) -> Option<LowRank<T>> {
        if chain.is_empty() || descendants.is_empty() {
            return None;
        }
        let mut left = DenseMatrix::zeros(s1, 1);
        for &a in chain {
            left[(self.position[a] - row_base, 0)] = T::one() / self.parent_weight[a].sqrt();
        }
        let mut right = DenseMatrix::zeros(1, s2);
        for &dsc in descendants {
            right[(0, self.position[dsc] - col_base)] = T::one();
        }
        Some(LowRank { left, right })
    }

    /// Serializes as a parent-array JSON with the separator permutation.
    /// Node ids are 1-based; `0` marks "none" (the root's parent, the root's
    /// position).
    pub fn to_json(&self) -> String {
        let parent: Vec<usize> = (0..self.n)
            .map(|v| self.parent(v).map_or(0, |p| p + 1))
            .collect();
        let weight: Vec<f64> = (0..self.n)
            .map(|v| {
                if v == self.root {
                    0.0
                } else {
                    self.parent_weight[v].as_f64()
                }
            })
            .collect();
        let position: Vec<usize> = (0..self.n)
            .map(|v| self.position(v).map_or(0, |p| p + 1))
            .collect();
        let value = serde_json::json!({
            "n": self.n,
            "root": self.root + 1,
            "strategy": self.strategy,
            "parent": parent,
            "parent_weight": weight,
            "position": position,
        });
        serde_json::to_string_pretty(&value).expect("tree serializes")
    }

    /// Solves `E^T chi_reduced = x_e` over the tree (root to leaves) and
    /// embeds the grounded zero, returning the full node vector.
    pub fn solve_transposed(&self, x_e: &DenseVector<T>) -> Result<DenseVector<T>> {
        if x_e.dim() != self.n - 1 {
            return Err(Error::DimensionMismatch(format!(
                "x_e has dim {} but the tree has {} edges",
                x_e.dim(),
                self.n - 1
            )));
        }
        let mut chi = DenseVector::zeros(self.n);
        let mut order: Vec<usize> = Vec::with_capacity(self.n);
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for v in 0..self.n {
            if v != self.root {
                children[self.parent[v]].push(v);
            }
        }
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &c in &children[u] {
                order.push(c);
            }
        }
        for &v in &order {
            if v == self.root {
                continue;
            }
            let pos = self.position[v];
            chi[v] = chi[self.parent[v]] + x_e[pos] / self.parent_weight[v].sqrt();
        }
        Ok(chi)
    }
}

/// Factorizations of the tree's permuted reduced incidence matrix and its
/// inverse, both certified `O(log n)`-sparse.
pub struct TreeIncidenceFactorizations<T = f64> {
    pub e: KSparseFactorization<T>,
    pub e_inverse: KSparseFactorization<T>,
}

pub fn tree_e_factorizations<T: Scalar>(
    tree: &SpanningTree<T>,
) -> Result<TreeIncidenceFactorizations<T>> {
    Ok(TreeIncidenceFactorizations {
        e: factorize_hmatrix(&tree.e_hmatrix()?)?,
        e_inverse: factorize_hmatrix(&tree.einv_hmatrix()?)?,
    })
}

/// Computes the separator-based node permutation and its dendrogram.
///
/// The recursion works on the forest left after deleting the root. When the
/// current piece is connected, the preferred split takes a node `d` whose
/// subtree holds between a third and two thirds of the piece and assigns the
/// subtree to the second part (crossing block: the single entry of the edge
/// to `d`'s father). When no such node exists, a fallback keeps the
/// separator with the first part and moves a subset of its child fragments:
/// the crossing entries then share the separator's row, keeping the block at
/// rank 1. Already-disconnected pieces are split by grouping components.
pub fn separator_ordering<T: Scalar>(
    tree: &SpanningTree<T>,
) -> (Vec<Option<usize>>, Dendrogram) {
    let perm = (0..tree.n)
        .map(|v| tree.position(v))
        .collect();
    (perm, tree.dendrogram.clone())
}

type OrderingParts = (Vec<usize>, Vec<usize>, Dendrogram, SplitNode);

fn separator_ordering_impl(
    n: usize,
    root: usize,
    parent: &[usize],
    adj: &[Vec<(usize, usize)>],
) -> Result<OrderingParts> {
    if n < 2 {
        return Err(Error::InvalidArgument(
            "separator ordering needs at least two nodes".into(),
        ));
    }
    let mut position = vec![usize::MAX; n];
    let mut node_at = vec![usize::MAX; n - 1];
    let mut piece: Vec<usize> = (0..n).filter(|&v| v != root).collect();
    piece.sort_unstable();
    let mut ctx = OrderCtx {
        parent,
        adj,
        stamp: vec![0; n],
        token: 0,
        position: &mut position,
        node_at: &mut node_at,
    };
    let (split, dnode) = ctx.recurse(piece, 0);
    let dendrogram = Dendrogram::from_root(dnode)?;
    Ok((position, node_at, dendrogram, split))
}

struct OrderCtx<'a> {
    parent: &'a [usize],
    adj: &'a [Vec<(usize, usize)>],
    stamp: Vec<u64>,
    token: u64,
    position: &'a mut Vec<usize>,
    node_at: &'a mut Vec<usize>,
}

impl OrderCtx<'_> {
    fn recurse(&mut self, piece: Vec<usize>, base: usize) -> (SplitNode, DendrogramNode) {
        let n = piece.len();
        if n == 1 {
            self.position[piece[0]] = base;
            self.node_at[base] = piece[0];
            return (
                SplitNode::Leaf,
                DendrogramNode {
                    lo: base,
                    hi: base + 1,
                    children: Vec::new(),
                },
            );
        }
        let (part1, part2, cross_edges, chain, descendants) = self.split_piece(&piece);
        let (s1, s2) = (part1.len(), part2.len());
        debug_assert!(s1 >= 1 && s2 >= 1);
        let (t1, d1) = self.recurse(part1, base);
        let (t2, d2) = self.recurse(part2, base + s1);
        (
            SplitNode::Branch {
                part1: Box::new(t1),
                part2: Box::new(t2),
                sizes: (s1, s2),
                cross_edges,
                chain,
                descendants,
            },
            DendrogramNode {
                lo: base,
                hi: base + s1 + s2,
                children: vec![d1, d2],
            },
        )
    }

    fn in_piece(&self, v: usize) -> bool {
        self.stamp[v] == self.token
    }

    fn neighbors_in_piece(&self, u: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .adj[u]
            .iter()
            .map(|&(v, _)| v)
            .filter(|&v| self.in_piece(v))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Splits a piece into `(part1, part2, cross_edges, chain, descendants)`.
    #[allow(clippy::type_complexity)]
    fn split_piece(
        &mut self,
        piece: &[usize],
    ) -> (Vec<usize>, Vec<usize>, Vec<(usize, usize)>, Vec<usize>, Vec<usize>) {
        let n = piece.len();
        let hi = (2 * n).div_ceil(3);
        let lo = n - hi;
        self.token += 1;
        for &u in piece {
            self.stamp[u] = self.token;
        }
        let comps = self.piece_components(piece);

        if comps.len() > 1 && comps.iter().all(|c| c.len() <= hi) {
            let (p1, p2) = pack_groups(&comps, hi);
            return (p1, p2, Vec::new(), Vec::new(), Vec::new());
        }

        let target_idx = (0..comps.len())
            .max_by_key(|&i| (comps[i].len(), usize::MAX - comps[i][0]))
            .expect("piece is nonempty");
        let target = &comps[target_idx];
        let local_root = *target
            .iter()
            .find(|&&u| u == self.parent[u] || !self.in_piece(self.parent[u]))
            .expect("component has a shallowest node");
        let sizes = self.subtree_sizes(local_root);

        // preferred: a subtree of balanced size becomes the second part
        let mut a_choice = None;
        for &u in target {
            let s = sizes[&u];
            if s >= lo && s <= hi && s < n {
                a_choice = Some(u);
                break;
            }
        }
        if let Some(d) = a_choice {
            let part2 = self.collect_subtree(d);
            let in_part2: std::collections::HashSet<usize> = part2.iter().copied().collect();
            let mut part1: Vec<usize> = piece
                .iter()
                .copied()
                .filter(|u| !in_part2.contains(u))
                .collect();
            part1.sort_unstable();
            let (cross, chain) = if self.in_piece(self.parent[d]) {
                (
                    vec![(self.parent[d], d)],
                    self.ancestor_chain(self.parent[d]),
                )
            } else {
                (Vec::new(), Vec::new())
            };
            let descendants = part2.clone();
            return (part1, part2, cross, chain, descendants);
        }

        // fallback: keep the separator in part1, move child fragments
        let other_total: usize = comps
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != target_idx)
            .map(|(_, c)| c.len())
            .sum();
        let need = lo.max(1);
        let mut b_choice = None;
        for &u in target {
            let child_usable: usize = self
                .children_in_piece(u)
                .iter()
                .map(|&c| sizes[&c])
                .filter(|&s| s <= hi)
                .sum();
            if child_usable + other_total >= need {
                b_choice = Some(u);
                break;
            }
        }
        let d = b_choice.expect("a centroid-style separator always exists");

        // items: child fragments of d, then whole other components
        struct Item {
            nodes: Vec<usize>,
            is_fragment: bool,
            root: usize,
        }
        let mut items: Vec<Item> = Vec::new();
        for c in self.children_in_piece(d) {
            items.push(Item {
                nodes: self.collect_subtree(c),
                is_fragment: true,
                root: c,
            });
        }
        for (i, comp) in comps.iter().enumerate() {
            if i != target_idx {
                items.push(Item {
                    nodes: comp.clone(),
                    is_fragment: false,
                    root: comp[0],
                });
            }
        }
        items.sort_by_key(|it| (usize::MAX - it.nodes.len(), it.nodes[0]));

        let mut selected: Vec<usize> = Vec::new();
        if let Some(single) = items
            .iter()
            .position(|it| it.nodes.len() >= need && it.nodes.len() <= hi)
        {
            selected.push(single);
        } else {
            let mut total = 0usize;
            for (i, it) in items.iter().enumerate() {
                if it.nodes.len() > hi {
                    continue;
                }
                selected.push(i);
                total += it.nodes.len();
                if total >= need {
                    break;
                }
            }
        }

        let mut part2: Vec<usize> = Vec::new();
        let mut cross = Vec::new();
        let mut descendants = Vec::new();
        for &i in &selected {
            part2.extend_from_slice(&items[i].nodes);
            if items[i].is_fragment {
                cross.push((d, items[i].root));
                descendants.extend_from_slice(&items[i].nodes);
            }
        }
        part2.sort_unstable();
        let in_part2: std::collections::HashSet<usize> = part2.iter().copied().collect();
        let mut part1: Vec<usize> = piece
            .iter()
            .copied()
            .filter(|u| !in_part2.contains(u))
            .collect();
        part1.sort_unstable();
        let chain = if cross.is_empty() {
            Vec::new()
        } else {
            self.ancestor_chain(d)
        };
        descendants.sort_unstable();
        (part1, part2, cross, chain, descendants)
    }

    fn piece_components(&self, piece: &[usize]) -> Vec<Vec<usize>> {
        let mut seen: std::collections::HashSet<usize> = std::collections::HashSet::new();
        let mut comps = Vec::new();
        for &start in piece {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen.insert(start);
            while let Some(u) = stack.pop() {
                comp.push(u);
                for v in self.neighbors_in_piece(u) {
                    if seen.insert(v) {
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Children of `u` inside the piece (neighbors other than its parent).
    fn children_in_piece(&self, u: usize) -> Vec<usize> {
        self.neighbors_in_piece(u)
            .into_iter()
            .filter(|&v| self.parent[v] == u)
            .collect()
    }

    /// Subtree sizes within the piece, keyed by node, below `local_root`.
    fn subtree_sizes(&self, local_root: usize) -> std::collections::HashMap<usize, usize> {
        let mut sizes = std::collections::HashMap::new();
        // iterative post-order
        let mut stack = vec![(local_root, false)];
        while let Some((u, processed)) = stack.pop() {
            if processed {
                let mut s = 1;
                for c in self.children_in_piece(u) {
                    s += sizes[&c];
                }
                sizes.insert(u, s);
            } else {
                stack.push((u, true));
                for c in self.children_in_piece(u) {
                    stack.push((c, false));
                }
            }
        }
        sizes
    }

    fn collect_subtree(&self, d: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![d];
        while let Some(u) = stack.pop() {
            out.push(u);
            for c in self.children_in_piece(u) {
                stack.push(c);
            }
        }
        out.sort_unstable();
        out
    }

    /// Walks from `start` up to the piece's local root.
    fn ancestor_chain(&self, start: usize) -> Vec<usize> {
        let mut chain = Vec::new();
        let mut u = start;
        loop {
            chain.push(u);
            let p = self.parent[u];
            if p == u || !self.in_piece(p) {
                break;
            }
            u = p;
        }
        chain
    }
}

/// Inverse-weight stretch of the tree in the graph: the sum over non-tree
/// edges `(u, v, w)` of `w * sum over the tree path from u to v of 1/w_e`.
/// Equals `||E^{-1} F||_Frob^2` for the tree/non-tree column split.
pub fn stretch<T: Scalar>(g: &WeightedGraph<T>, tree: &SpanningTree<T>) -> Result<T> {
    if tree.node_count() != g.node_count() {
        return Err(Error::NotSpanning(
            "tree and graph have different node counts".into(),
        ));
    }
    let lca = Lca::new(tree);
    let tree_edges: std::collections::HashSet<usize> =
        tree.tree_edge_ids().into_iter().collect();
    let mut total = T::zero();
    for (e, &(u, v, w)) in g.edges().iter().enumerate() {
        if tree_edges.contains(&e) {
            continue;
        }
        total = total + w * lca.inverse_weight_path(u, v);
    }
    Ok(total)
}

/// Lowest common ancestors by binary lifting, with path sums of inverse
/// weights to the root.
pub struct Lca<T = f64> {
    up: Vec<Vec<usize>>,
    depth: Vec<usize>,
    inv_weight_to_root: Vec<T>,
}

impl<T: Scalar> Lca<T> {
    pub fn new(tree: &SpanningTree<T>) -> Self {
        let n = tree.node_count();
        let root = tree.root();
        let levels = usize::BITS as usize - n.leading_zeros() as usize;
        let mut depth = vec![0usize; n];
        let mut inv = vec![T::zero(); n];
        let mut order = vec![root];
        let mut head = 0;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for v in 0..n {
            if let Some(p) = tree.parent(v) {
                children[p].push(v);
            }
        }
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &c in &children[u] {
                depth[c] = depth[u] + 1;
                inv[c] = inv[u] + T::one() / tree.parent_weight(c);
                order.push(c);
            }
        }
        let mut up = vec![vec![0usize; n]; levels.max(1)];
        for v in 0..n {
            up[0][v] = tree.parent(v).unwrap_or(v);
        }
        for l in 1..up.len() {
            for v in 0..n {
                up[l][v] = up[l - 1][up[l - 1][v]];
            }
        }
        Self {
            up,
            depth,
            inv_weight_to_root: inv,
        }
    }

    pub fn lca(&self, mut u: usize, mut v: usize) -> usize {
        if self.depth[u] < self.depth[v] {
            std::mem::swap(&mut u, &mut v);
        }
        let mut diff = self.depth[u] - self.depth[v];
        for (l, ups) in self.up.iter().enumerate() {
            if diff & (1 << l) != 0 {
                u = ups[u];
                diff ^= 1 << l;
            }
        }
        if u == v {
            return u;
        }
        for ups in self.up.iter().rev() {
            if ups[u] != ups[v] {
                u = ups[u];
                v = ups[v];
            }
        }
        self.up[0][u]
    }

    /// Sum of `1/w_e` along the tree path between `u` and `v`.
    pub fn inverse_weight_path(&self, u: usize, v: usize) -> T {
        let a = self.lca(u, v);
        let two = T::of(2.0);
        self.inv_weight_to_root[u] + self.inv_weight_to_root[v]
            - two * self.inv_weight_to_root[a]
    }
}

/// Matches the edges of a caller-provided spanning tree against the graph's
/// edge list (endpoints and weight must agree), returning edge indices.
pub fn resolve_tree_edges<T: Scalar>(
    g: &WeightedGraph<T>,
    tree_graph: &WeightedGraph<T>,
) -> Result<Vec<usize>> {
    let mut used = vec![false; g.edge_count()];
    let mut ids = Vec::with_capacity(tree_graph.edge_count());
    for &(u, v, w) in tree_graph.edges() {
        let found = g.edges().iter().enumerate().find(|&(e, &(a, b, wg))| {
            !used[e]
                && ((a, b) == (u, v) || (a, b) == (v, u))
                && (wg - w).abs() <= T::of(1e-12) * wg.abs().max(T::one())
        });
        match found {
            Some((e, _)) => {
                used[e] = true;
                ids.push(e);
            }
            None => {
                return Err(Error::NotSpanning(format!(
                    "tree edge ({}, {}) is not an edge of the graph",
                    u + 1,
                    v + 1
                )))
            }
        }
    }
    Ok(ids)
}



#[cfg(test)]
mod path_norm_tests {
    use super::*;

    #[test]
    fn seven_node_path_factorization_norms_match_dense_columns() {
        let g = crate::instances::path(7);
        let tree = SpanningTree::build(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let fact = factorize_hmatrix(&tree.einv_hmatrix().unwrap()).unwrap();
        let dense = fact.densify_q();
        for j in 0..fact.n() {
            let dense_norm: f64 = (0..fact.m()).map(|i| dense[i][j] * dense[i][j]).sum();
            let stored = fact.col_sq_norms()[j];
            assert!(
                (stored - dense_norm).abs() <= 1e-12 * dense_norm,
                "column {j}: {stored} vs {dense_norm}"
            );
        }
    }
}
