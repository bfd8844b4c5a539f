//! Seeded instance generators for tests and benchmarks.
//!
//! Everything here is deterministic in the seed: graphs and trees use
//! weights log-uniform in `[0.1, 10]`, hierarchical matrices fill their
//! low-rank blocks with uniform entries.

use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

use crate::dense::DenseMatrix;
use crate::graphs::WeightedGraph;
use crate::hmatrix::{Dendrogram, DendrogramNode, HMatrix, HNode, LowRank};
use crate::sparse::DenseVector;

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    // log-uniform over [0.1, 10]
    10f64.powf(unit(rng) * 2.0 - 1.0)
}

fn signed_unit(rng: &mut ChaCha8Rng) -> f64 {
    unit(rng) * 2.0 - 1.0
}

/// Path graph with unit weights.
pub fn path(n: usize) -> WeightedGraph {
    let edges = (1..n).map(|v| (v - 1, v, 1.0)).collect();
    WeightedGraph::new(n, edges).expect("path is a valid graph")
}

/// Square grid with unit weights; `side * side` nodes.
pub fn grid(side: usize) -> WeightedGraph {
    let at = |r: usize, c: usize| r * side + c;
    let mut edges = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                edges.push((at(r, c), at(r, c + 1), 1.0));
            }
            if r + 1 < side {
                edges.push((at(r, c), at(r + 1, c), 1.0));
            }
        }
    }
    WeightedGraph::new(side * side, edges).expect("grid is a valid graph")
}

/// Random tree: each node attaches to a uniformly chosen earlier node.
pub fn random_tree(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7265_6573);
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        let p = (rng.next_u64() as usize) % v;
        edges.push((p, v, weight(&mut rng)));
    }
    WeightedGraph::new(n, edges).expect("random tree is a valid graph")
}

/// Connected random graph: a random tree plus distinct extra edges, up to
/// `m_target` edges in total.
pub fn random_connected_graph(n: usize, m_target: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6772_6170);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let p = (rng.next_u64() as usize) % v;
        edges.push((p, v, weight(&mut rng)));
        present.insert((p.min(v), p.max(v)));
    }
    let max_extra = n * (n - 1) / 2 - edges.len();
    let extra = m_target.saturating_sub(edges.len()).min(max_extra);
    let mut added = 0;
    while added < extra {
        let u = (rng.next_u64() as usize) % n;
        let v = (rng.next_u64() as usize) % n;
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if present.insert(key) {
            edges.push((key.0, key.1, weight(&mut rng)));
            added += 1;
        }
    }
    WeightedGraph::new(n, edges).expect("random graph is valid")
}

/// Zero-sum vector with entries in `[-1, 1]` before recentring.
pub fn random_zero_sum(n: usize, seed: u64) -> DenseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7a65_726f);
    let mut values: Vec<f64> = (0..n).map(|_| signed_unit(&mut rng)).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    for v in &mut values {
        *v -= mean;
    }
    DenseVector::from_vec(values)
}

pub fn random_dense_vector(n: usize, seed: u64) -> DenseVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7665_6374);
    DenseVector::from_vec((0..n).map(|_| signed_unit(&mut rng)).collect())
}

/// Random hierarchical matrix over the balanced `(n, d)` dendrogram: every
/// off-diagonal elementary block gets dense rank-`r` factors, diagonal
/// scalars are kept away from zero.
pub fn random_hmatrix(n: usize, r: usize, d: usize, seed: u64) -> HMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x686d_6174);
    let dend = Dendrogram::balanced(n, d).expect("valid dendrogram parameters");
    fn build(dnode: &DendrogramNode, r: usize, rng: &mut ChaCha8Rng) -> HNode {
        if dnode.is_leaf() {
            let magnitude = 0.5 + unit(rng);
            let sign = if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
            return HNode::Leaf {
                value: sign * magnitude,
            };
        }
        let t = dnode.children.len();
        let children = dnode.children.iter().map(|c| build(c, r, rng)).collect();
        let mut blocks: Vec<Vec<Option<LowRank>>> = vec![vec![None; t]; t];
        for i in 0..t {
            for j in 0..t {
                if i == j {
                    continue;
                }
                let (si, sj) = (dnode.children[i].len(), dnode.children[j].len());
                let rank = r.min(si).min(sj);
                if rank == 0 {
                    continue;
                }
                let left = DenseMatrix::from_fn(si, rank, |_, _| signed_unit(rng));
                let right = DenseMatrix::from_fn(rank, sj, |_, _| signed_unit(rng));
                blocks[i][j] = Some(LowRank { left, right });
            }
        }
        HNode::Branch { children, blocks }
    }
    let root = build(dend.root(), r, &mut rng);
    HMatrix::from_parts(dend, r, root).expect("random hierarchical matrix is valid")
}

/// Random square matrix with entries in `[-1, 1]`.
pub fn random_dense_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6465_6e73);
    DenseMatrix::from_fn(rows, cols, |_, _| signed_unit(&mut rng))
}

/// Random diagonally dominant tridiagonal matrix (symmetric positive
/// definite), whose inverse is `(1, 1)`-semiseparable.
pub fn random_tridiagonal(n: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7472_6964);
    let mut a = DenseMatrix::zeros(n, n);
    let mut off = Vec::new();
    for i in 0..n.saturating_sub(1) {
        off.push(signed_unit(&mut rng));
        let _ = i;
    }
    for i in 0..n {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { off[i].abs() } else { 0.0 };
        a[(i, i)] = left + right + 0.5 + unit(&mut rng);
        if i + 1 < n {
            a[(i, i + 1)] = off[i];
            a[(i + 1, i)] = off[i];
        }
    }
    a
}
