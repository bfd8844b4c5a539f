//! End-to-end solvers built on the projection engine.
//!
//! * [`solve_min_norm`]: minimum-norm solution of an underdetermined
//!   `A x = b` with `A = [E F]`, iterating over a null-space basis
//!   `Q = (E^{-1} F; -I)` from the feasible start `x0 = (E^{-1} b; 0)`.
//! * [`solve_square`]: square or overdetermined `A y = b` via the
//!   substitution `x = A y - b`; the dual coordinates tracked by the engine
//!   are the solution.
//! * [`solve_laplacian`]: two-step scheme for `L chi = c` with `L = B B^T`:
//!   solve `B x = c` in the minimum-norm sense over a spanning tree's
//!   factorization, then back-substitute the triangular tree system
//!   `E^T chi = x_E`.

use crate::engine::{
    self, per_decade_iterations, ErrorEstimateKind, RunOptions, SolveReport,
};
use crate::error::{Error, Result};
use crate::factorization::KSparseFactorization;
use crate::graphs::{stretch, SpanningTree, TreeStrategy, WeightedGraph};
use crate::sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};
use crate::Scalar;

/// Relative residual above which a right-hand side is declared incompatible.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Safety factor applied to predicted iteration budgets.
pub const BUDGET_SAFETY: f64 = 10.0;

/// Common knobs for the three solvers.
#[derive(Debug, Clone)]
pub struct SolveOptions<T = f64> {
    pub eps: f64,
    pub seed: u64,
    /// Overrides the predicted iteration budget.
    pub max_iters: Option<u64>,
    /// Error-trace spacing; default geometric.
    pub trace_stride: Option<u64>,
    /// Reference solution, in the result space of the solver called
    /// (testing only; enables oracle error traces and early stopping).
    pub oracle: Option<DenseVector<T>>,
}

impl<T: Scalar> SolveOptions<T> {
    pub fn new(eps: f64, seed: u64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eps must lie in (0, 1), got {eps}"
            )));
        }
        Ok(Self {
            eps,
            seed,
            max_iters: None,
            trace_stride: None,
            oracle: None,
        })
    }

    pub fn with_oracle(mut self, oracle: DenseVector<T>) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn with_max_iters(mut self, max_iters: u64) -> Self {
        self.max_iters = Some(max_iters);
        self
    }
}

/// An underdetermined system matrix split as `A = [E F]` with invertible `E`
/// given through a factorization of its inverse.
#[derive(Debug, Clone)]
pub struct SplitSystem<T = f64> {
    a: ColMajorSparseMatrix<T>,
    einv: KSparseFactorization<T>,
    e_cols: usize,
    f_cols: usize,
    f_col_sparsity: usize,
    /// `||E^{-1} F||_Frob^2`; for graph systems this is the tree's
    /// inverse-weight stretch.
    stretch: f64,
    tree: Option<SpanningTree<T>>,
    grounded: Option<usize>,
    /// Column index -> graph edge index, when built from a graph.
    col_to_edge: Option<Vec<usize>>,
    /// Edge list of the originating graph, when built from one.
    graph_edges: Option<Vec<(usize, usize, T)>>,
}

impl<T: Scalar> SplitSystem<T> {
    /// Generic constructor from an explicit split.
    pub fn from_parts(
        e: &ColMajorSparseMatrix<T>,
        f: &ColMajorSparseMatrix<T>,
        einv: KSparseFactorization<T>,
    ) -> Result<Self> {
        let nn = e.rows();
        if e.cols() != nn {
            return Err(Error::DimensionMismatch("E must be square".into()));
        }
        if einv.m() != nn || einv.n() != nn {
            return Err(Error::DimensionMismatch(
                "E^{-1} factorization shape differs from E".into(),
            ));
        }
        if f.rows() != nn {
            return Err(Error::DimensionMismatch(
                "F must have the same row count as E".into(),
            ));
        }
        let mut columns: Vec<SparseVector<T>> = e.columns().to_vec();
        columns.extend(f.columns().iter().cloned());
        let a = ColMajorSparseMatrix::from_columns(nn, columns)?;
        let stretch = einv_image_frobenius_sq(&einv, f);
        Ok(Self {
            a,
            einv,
            e_cols: nn,
            f_cols: f.cols(),
            f_col_sparsity: f.max_col_support(),
            stretch,
            tree: None,
            grounded: None,
            col_to_edge: None,
            graph_edges: None,
        })
    }

    /// Builds the split for a connected graph's reduced incidence matrix:
    /// the spanning tree's columns (separator order) form `E`, the remaining
    /// edges form `F`, and the grounded node is the tree root.
    pub fn from_graph(
        g: &WeightedGraph<T>,
        strategy: &TreeStrategy,
        grounded: Option<usize>,
    ) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = g.node_count();
        if n < 2 {
            return Err(Error::InvalidArgument(
                "graph systems need at least two nodes".into(),
            ));
        }
        let tree = SpanningTree::build(g, strategy, grounded)?;
        let root = tree.root();
        let facts = crate::graphs::tree_e_factorizations(&tree)?;
        let stretch_val = stretch(g, &tree)?.as_f64();

        let nn = n - 1;
        let tree_edge_ids = tree.tree_edge_ids();
        let in_tree: std::collections::HashSet<usize> = tree_edge_ids.iter().copied().collect();
        let mut columns: Vec<SparseVector<T>> = Vec::with_capacity(g.edge_count());
        let mut col_to_edge = Vec::with_capacity(g.edge_count());
        for pos in 0..nn {
            let child = tree.node_at_position(pos);
            let w_sqrt = tree.parent_weight(child).sqrt();
            let mut entries = vec![(pos, w_sqrt)];
            let parent = tree.parent(child).expect("non-root node has a parent");
            if parent != root {
                entries.push((tree.position(parent).unwrap(), -w_sqrt));
            }
            columns.push(SparseVector::new(nn, entries)?);
            col_to_edge.push(tree_edge_ids[pos]);
        }
        let mut f_col_sparsity = 0;
        for (e, &(u, v, w)) in g.edges().iter().enumerate() {
            if in_tree.contains(&e) {
                continue;
            }
            let (s, t) = (u.min(v), u.max(v));
            let w_sqrt = w.sqrt();
            let mut entries = Vec::with_capacity(2);
            if s != root {
                entries.push((tree.position(s).unwrap(), -w_sqrt));
            }
            if t != root {
                entries.push((tree.position(t).unwrap(), w_sqrt));
            }
            let col = SparseVector::new(nn, entries)?;
            f_col_sparsity = f_col_sparsity.max(col.nnz());
            columns.push(col);
            col_to_edge.push(e);
        }
        let a = ColMajorSparseMatrix::from_columns(nn, columns)?;
        Ok(Self {
            a,
            einv: facts.e_inverse,
            e_cols: nn,
            f_cols: g.edge_count() - nn,
            f_col_sparsity,
            stretch: stretch_val,
            tree: Some(tree),
            grounded: Some(root),
            col_to_edge: Some(col_to_edge),
            graph_edges: Some(g.edges().to_vec()),
        })
    }

    /// The full matrix `A = [E F]`.
    pub fn a(&self) -> &ColMajorSparseMatrix<T> {
        &self.a
    }

    pub fn einv(&self) -> &KSparseFactorization<T> {
        &self.einv
    }

    pub fn e_cols(&self) -> usize {
        self.e_cols
    }

    pub fn f_cols(&self) -> usize {
        self.f_cols
    }

    pub fn f_col_sparsity(&self) -> usize {
        self.f_col_sparsity
    }

    /// `||E^{-1} F||_Frob^2`.
    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    /// `kappa = m + ||E^{-1} F||_Frob^2` with `m` the column count of `A`.
    pub fn kappa(&self) -> f64 {
        (self.e_cols + self.f_cols) as f64 + self.stretch
    }

    pub fn tree(&self) -> Option<&SpanningTree<T>> {
        self.tree.as_ref()
    }

    pub fn grounded(&self) -> Option<usize> {
        self.grounded
    }

    /// Row of the reduced system a non-grounded node maps to.
    pub fn row_of_node(&self, node: usize) -> Option<usize> {
        self.tree.as_ref().and_then(|t| t.position(node))
    }

    /// Permutes a solution from column space back to graph edge order.
    pub fn x_to_edge_space(&self, x: &DenseVector<T>) -> Option<DenseVector<T>> {
        let map = self.col_to_edge.as_ref()?;
        let mut out = DenseVector::zeros(map.len());
        for (col, &edge) in map.iter().enumerate() {
            out[edge] = x[col];
        }
        Some(out)
    }

    /// Dense check that the stored factorization inverts `E`; returns the
    /// max-norm deviation from the identity.
    pub fn validate_inverse(&self) -> f64 {
        let einv_rows = self.einv.densify_q();
        let nn = self.e_cols;
        let mut max_dev = 0f64;
        for j in 0..nn {
            // column j of Einv * E
            let ej = self.a.column(j);
            for (i, row) in einv_rows.iter().enumerate() {
                let mut acc = T::zero();
                for &(l, v) in ej.entries() {
                    acc = acc + row[l] * v;
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                max_dev = max_dev.max((acc.as_f64() - expect).abs());
            }
        }
        max_dev
    }
}

/// `sum_j ||E^{-1} f_j||^2` evaluated through the factorization.
fn einv_image_frobenius_sq<T: Scalar>(
    einv: &KSparseFactorization<T>,
    f: &ColMajorSparseMatrix<T>,
) -> f64 {
    let mut total = 0f64;
    for j in 0..f.cols() {
        let coeffs = f.column(j).to_dense();
        let v = einv.d().mul_dense(&coeffs).expect("shapes agree");
        let x = einv.c().mul_dense(&v).expect("shapes agree");
        total += x.norm_sq().as_f64();
    }
    total
}

/// Null-space basis `Q = (E^{-1} F; -I)` factored as
/// `[[C, 0], [0, I]] * [[D F], [-I]]`; certified `k <= k0 f + 1`.
pub fn build_nullspace_q<T: Scalar>(split: &SplitSystem<T>) -> Result<KSparseFactorization<T>> {
    let nn = split.e_cols;
    let nf = split.f_cols;
    let p = split.einv.p();
    let rows = nn + nf;
    let total_cols = p + nf;

    let mut c_cols: Vec<SparseVector<T>> = Vec::with_capacity(total_cols);
    for col in split.einv.c().columns() {
        c_cols.push(SparseVector::new(rows, col.entries().to_vec())?);
    }
    for i in 0..nf {
        c_cols.push(SparseVector::new(rows, vec![(nn + i, T::one())])?);
    }
    let c = ColMajorSparseMatrix::from_columns(rows, c_cols)?;

    let mut d_cols: Vec<SparseVector<T>> = Vec::with_capacity(nf);
    for j in 0..nf {
        let fj = split.a.column(nn + j);
        // D * f_j
        let mut terms: Vec<(usize, T)> = Vec::new();
        for &(i, coeff) in fj.entries() {
            for &(r, v) in split.einv.d().column(i).entries() {
                terms.push((r, coeff * v));
            }
        }
        terms.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, T)> = Vec::with_capacity(terms.len() + 1);
        for (i, v) in terms {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 = last.1 + v,
                _ => entries.push((i, v)),
            }
        }
        entries.push((p + j, -T::one()));
        d_cols.push(SparseVector::new(total_cols, entries)?);
    }
    let d = ColMajorSparseMatrix::from_columns(total_cols, d_cols)?;
    KSparseFactorization::new_recording_zero_rows(c, d)
}

/// Minimum-norm solution of the compatible system `A x = b`.
///
/// `b` lives in the row space of `A` (for graph systems: non-grounded nodes
/// at their separator positions). The iteration budget defaults to
/// `ceil(kappa ln(eps0 / eps)) * 10` with `eps0 = 1 + sqrt(n + stretch)`.
pub fn solve_min_norm<T: Scalar>(
    split: &SplitSystem<T>,
    b: &DenseVector<T>,
    opts: &SolveOptions<T>,
) -> Result<(DenseVector<T>, SolveReport)> {
    let nn = split.e_cols;
    if b.dim() != nn {
        return Err(Error::DimensionMismatch(format!(
            "b has dim {} but A has {} rows",
            b.dim(),
            nn
        )));
    }
    let q = build_nullspace_q(split)?;
    let m_total = nn + split.f_cols;

    // x0 = (E^{-1} b; 0) through the factorization: h0 = (D b; 0)
    let db = split.einv.d().mul_dense(b)?;
    let mut h0 = DenseVector::zeros(q.p());
    for i in 0..split.einv.p() {
        h0[i] = db[i];
    }
    let x0 = engine::recover_x(&engine::init_state(&q, &h0)?, &q);

    // compatibility: ||A x0 - b|| <= tol ||b||
    let b_norm = b.norm().as_f64();
    let residual = self::residual_norm(split, &x0, b);
    if b_norm > 0.0 && residual / b_norm > COMPATIBILITY_TOL {
        return Err(Error::IncompatibleSystem {
            residual: residual / b_norm,
        });
    }

    // b = 0 has the exact solution x = 0; skip the sampling loop
    if b_norm == 0.0 {
        let run_opts = RunOptions {
            max_iters: 0,
            target_error: None,
            seed: opts.seed,
            trace_stride: opts.trace_stride,
            sigma_min_sq: Some(1.0),
        };
        let (state, mut report) = engine::run(&q, &h0, &run_opts, None)?;
        report.kappa = Some(split.kappa());
        report.final_error_estimate = Some(0.0);
        report.error_estimate_kind = ErrorEstimateKind::Residual;
        report.target_met = Some(true);
        return Ok((engine::recover_x(&state, &q), report));
    }

    let eps0_bound = 1.0 + ((nn as f64) + split.stretch).sqrt();
    let budget = opts.max_iters.unwrap_or_else(|| {
        let decades_needed = (eps0_bound / opts.eps).max(1.0).ln();
        ((split.kappa() * decades_needed).ceil() * BUDGET_SAFETY) as u64
    });

    let frob_sq = q.frobenius_sq().as_f64();
    let run_opts = RunOptions {
        max_iters: budget,
        target_error: opts.oracle.as_ref().map(|_| opts.eps),
        seed: opts.seed,
        trace_stride: opts.trace_stride,
        // sigma_min^2(Q) = lambda_min(F^T E^{-T} E^{-1} F + I) >= 1
        sigma_min_sq: Some(1.0),
    };
    let (state, mut report) = engine::run(&q, &h0, &run_opts, opts.oracle.as_ref())?;
    let x = engine::recover_x(&state, &q);

    report.kappa = Some(split.kappa());
    if split.tree.is_some() {
        report.stretch = Some(split.stretch);
        report.tree_strategy = split.tree.as_ref().map(|t| t.strategy().to_string());
    }
    if report.final_error_estimate.is_none() && frob_sq > 1.0 {
        // expected-contraction bound relative to the initial-error bound
        let rho = 1.0 - 1.0 / frob_sq;
        let estimate = eps0_bound * (0.5 * state.iterations() as f64 * rho.ln()).exp();
        report.final_error_estimate = Some(estimate);
        report.error_estimate_kind = ErrorEstimateKind::TheoryBound;
    } else if report.final_error_estimate.is_none() {
        // Q is empty or a single direction: x0 is already optimal
        report.final_error_estimate = Some(0.0);
        report.error_estimate_kind = ErrorEstimateKind::TheoryBound;
    }
    report.target_met = report.final_error_estimate.map(|e| e <= opts.eps);
    debug_assert_eq!(x.dim(), m_total);
    Ok((x, report))
}

fn residual_norm<T: Scalar>(
    split: &SplitSystem<T>,
    x: &DenseVector<T>,
    b: &DenseVector<T>,
) -> f64 {
    let ax = split.a.mul_dense(x).expect("dimensions agree");
    ax.sub(b).norm().as_f64()
}

/// Square or overdetermined `A y = b` by dual coordinate descent on
/// `x = A y - b` with `Q = A`.
///
/// For square systems the stopping rule is the relative residual
/// `||A y - b|| / ||b||`; for overdetermined systems it is the
/// normal-equation residual `||A^T (A y - b)|| / ||A^T b||`. Exhausting the
/// iteration count predicted from `sigma_min^2` without reaching the target
/// is reported as a stall: it indicates rank deficiency (the residual
/// plateaus at the distance to the column space).
pub fn solve_square<T: Scalar>(
    afact: &KSparseFactorization<T>,
    b: &DenseVector<T>,
    opts: &SolveOptions<T>,
) -> Result<(DenseVector<T>, SolveReport)> {
    let m = afact.m();
    let n = afact.n();
    if b.dim() != m {
        return Err(Error::DimensionMismatch(format!(
            "b has dim {} but A has {m} rows",
            b.dim()
        )));
    }
    if m < n {
        return Err(Error::InvalidArgument(
            "solve_square needs a square or overdetermined system".into(),
        ));
    }
    let owned;
    let fact = if afact.is_augmented() {
        afact
    } else {
        owned = KSparseFactorization::new_augmented(afact.c().clone(), afact.d().clone())?;
        &owned
    };

    // x0 = A*0 - b = -b
    let minus_b = b.scaled(-T::one());
    let h0 = fact.h0_from_x0(&minus_b)?;
    let mut state = engine::init_state(fact, &h0)?;
    let dist = engine::SamplingDistribution::new(fact);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    use rand_core::SeedableRng;

    let square = m == n;
    let atb_norm = column_dots(fact, b).norm().as_f64();
    let b_norm = b.norm().as_f64();
    let target_denominator = if square { b_norm } else { atb_norm };

    let frob_sq = fact.frobenius_sq().as_f64();
    let sigma_raw = dense_sigma_min_sq_if_small(fact);
    let rank_deficient = sigma_raw.is_some_and(|s| s <= 1e-13 * frob_sq);
    let sigma_min_sq = sigma_raw.filter(|_| !rank_deficient);
    let budget = match (opts.max_iters, sigma_min_sq) {
        (Some(m), _) => m,
        (None, Some(s)) => {
            let n1 = per_decade_iterations(frob_sq, s)?;
            ((1.0 / opts.eps).log10().max(1.0) * n1 * BUDGET_SAFETY).ceil() as u64
        }
        (None, None) if rank_deficient => {
            return Err(Error::InvalidArgument(format!(
                "system is numerically rank deficient (sigma_min^2 = {:.3e});                  pass max_iters to iterate toward the least-squares set anyway",
                sigma_raw.unwrap_or(0.0)
            )))
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "system too large for the dense sigma_min oracle: pass max_iters".into(),
            ))
        }
    };

    let check_every = (n as u64).max(64);
    let mut trace: Vec<(u64, f64)> = Vec::new();
    let mut work_total = 0u64;
    let mut work_max = 0u64;
    let mut residual = eval_residual(fact, &state, square, target_denominator);
    trace.push((0, residual));
    let mut steps = 0u64;

    while steps < budget && residual > opts.eps && !dist.is_empty() {
        let chunk = check_every.min(budget - steps);
        for _ in 0..chunk {
            let j = dist.sample(&mut rng);
            let before = crate::work::total();
            state.step(fact, j);
            let w = crate::work::total() - before;
            work_total += w;
            work_max = work_max.max(w);
        }
        steps += chunk;
        residual = eval_residual(fact, &state, square, target_denominator);
        trace.push((steps, residual));
    }
    // Stall: the target is unmet although either the dense oracle flagged a
    // zero singular value outright or the sigma-predicted budget (safety
    // factor included) ran out, which a full-rank system will not do.
    let stalled = residual > opts.eps
        && (rank_deficient || (opts.max_iters.is_none() && sigma_min_sq.is_some() && steps >= budget));

    let y = state.y().clone();
    let final_est = if let Some(oracle) = &opts.oracle {
        let diff = y.sub(oracle).norm().as_f64();
        let denom = oracle.norm().as_f64();
        Some(if denom > 0.0 { diff / denom } else { diff })
    } else {
        Some(residual)
    };
    let report = SolveReport {
        schema: 1,
        iterations: steps,
        final_error_estimate: final_est,
        error_estimate_kind: if opts.oracle.is_some() {
            ErrorEstimateKind::Oracle
        } else {
            ErrorEstimateKind::Residual
        },
        error_trace: trace,
        work_per_iteration: engine::WorkStats {
            mean: if steps > 0 {
                work_total as f64 / steps as f64
            } else {
                0.0
            },
            max: work_max,
        },
        k: fact.k(),
        theory: engine::TheoryInfo {
            sigma_min_sq,
            frob_sq,
            n1: sigma_min_sq.and_then(|s| per_decade_iterations(frob_sq, s).ok()),
        },
        setup_work: fact.setup_work(),
        rng: engine::RNG_ALGORITHM.to_string(),
        seed: opts.seed,
        kappa: None,
        stretch: None,
        tree_strategy: None,
        target_met: Some(residual <= opts.eps),
        stall_detected: Some(stalled),
    };
    Ok((y, report))
}

/// `A^T v` evaluated through the factorization: `D^T (C^T v)`.
fn column_dots<T: Scalar>(fact: &KSparseFactorization<T>, v: &DenseVector<T>) -> DenseVector<T> {
    let mut ctv = DenseVector::zeros(fact.p());
    for i in 0..fact.p() {
        ctv[i] = fact.c().column(i).dot_dense_unchecked(v);
    }
    let mut out = DenseVector::zeros(fact.n());
    for j in 0..fact.n() {
        out[j] = fact.d().column(j).dot_dense_unchecked(&ctv);
    }
    out
}

fn eval_residual<T: Scalar>(
    fact: &KSparseFactorization<T>,
    state: &engine::IterationState<T>,
    square: bool,
    denominator: f64,
) -> f64 {
    let x = engine::recover_x(state, fact); // x = A y - b
    let raw = if square {
        x.norm().as_f64()
    } else {
        column_dots(fact, &x).norm().as_f64()
    };
    if denominator > 0.0 {
        raw / denominator
    } else {
        raw
    }
}

/// Dense smallest-singular-value oracle for small operands.
fn dense_sigma_min_sq_if_small<T: Scalar>(fact: &KSparseFactorization<T>) -> Option<f64> {
    if fact.m().max(fact.n()) > 400 {
        return None;
    }
    let rows = fact.densify_q();
    let a = crate::dense::DenseMatrix::from_rows(&rows).ok()?;
    let s = crate::dense::smallest_singular_value(&a).as_f64();
    Some(s * s)
}

/// A Laplacian system `L chi = c` with `L = B B^T` held implicitly through
/// the graph.
#[derive(Debug, Clone)]
pub struct LaplacianSystem<T = f64> {
    graph: WeightedGraph<T>,
    c: DenseVector<T>,
    grounded: Option<usize>,
}

impl<T: Scalar> LaplacianSystem<T> {
    /// Requires a connected graph and a zero-sum right-hand side (within
    /// `1e-12 ||c||`).
    pub fn new(graph: WeightedGraph<T>, c: DenseVector<T>, grounded: Option<usize>) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        if c.dim() != graph.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "c has dim {} but the graph has {} nodes",
                c.dim(),
                graph.node_count()
            )));
        }
        let sum = c.iter().fold(0f64, |acc, &v| acc + v.as_f64());
        if sum.abs() > 1e-12 * c.norm().as_f64() {
            return Err(Error::InvalidArgument(format!(
                "right-hand side must sum to zero, got {sum:.3e}"
            )));
        }
        if let Some(g) = grounded {
            if g >= graph.node_count() {
                return Err(Error::InvalidArgument(format!(
                    "grounded node {g} out of range"
                )));
            }
        }
        Ok(Self { graph, c, grounded })
    }

    pub fn graph(&self) -> &WeightedGraph<T> {
        &self.graph
    }

    pub fn c(&self) -> &DenseVector<T> {
        &self.c
    }
}

/// Two-step Laplacian solve: minimum-norm `B x = c` over a spanning tree
/// split with inner accuracy `eps / sqrt(stretch + m)`, then the `O(n)`
/// triangular back-substitution `E^T chi = x_E`. The grounded entry of the
/// returned potential vector is zero.
pub fn solve_laplacian<T: Scalar>(
    sys: &LaplacianSystem<T>,
    opts: &SolveOptions<T>,
    strategy: &TreeStrategy,
) -> Result<(DenseVector<T>, SolveReport)> {
    let g = &sys.graph;
    let n = g.node_count();
    let split = SplitSystem::from_graph(g, strategy, sys.grounded)?;
    let grounded = split.grounded().expect("graph split has a grounded node");
    let tree = split.tree().expect("graph split has a tree");

    // b = c with the grounded entry removed, in position space
    let mut b = DenseVector::zeros(n - 1);
    for v in 0..n {
        if v != grounded {
            b[split.row_of_node(v).unwrap()] = sys.c[v];
        }
    }

    if b.norm() == T::zero() {
        let chi = DenseVector::zeros(n);
        let mut inner_opts = opts.clone();
        inner_opts.oracle = None;
        inner_opts.max_iters = Some(0);
        let (_, mut report) = solve_min_norm(&split, &b, &inner_opts)?;
        report.stretch = Some(split.stretch());
        report.kappa = Some(split.kappa());
        report.target_met = Some(true);
        return Ok((chi, report));
    }

    let delta = opts.eps / (split.stretch() + (split.e_cols() + split.f_cols()) as f64).sqrt();
    let mut inner_opts = SolveOptions::<T> {
        eps: delta.min(0.999_999),
        seed: opts.seed,
        max_iters: opts.max_iters,
        trace_stride: opts.trace_stride,
        oracle: None,
    };
    // a chi-space oracle maps to x* = B^T chi* in column space
    if let Some(chi_star) = &opts.oracle {
        let x_star = bt_chi(&split, chi_star);
        inner_opts.oracle = Some(x_star);
    }
    let (x, mut report) = solve_min_norm(&split, &b, &inner_opts)?;

    // step 2: back-substitute the tree part
    let mut x_e = DenseVector::zeros(n - 1);
    for pos in 0..n - 1 {
        x_e[pos] = x[pos];
    }
    let chi = tree.solve_transposed(&x_e)?;

    if let Some(chi_star) = &opts.oracle {
        let err_sq = l_pseudo_norm_sq(g, &chi.sub(chi_star))?.as_f64();
        let star_sq = l_pseudo_norm_sq(g, chi_star)?.as_f64();
        let rel = if star_sq > 0.0 {
            (err_sq / star_sq).sqrt()
        } else {
            err_sq.sqrt()
        };
        report.final_error_estimate = Some(rel);
        report.error_estimate_kind = ErrorEstimateKind::Oracle;
        report.target_met = Some(rel <= opts.eps);
    } else if let Some(inner_est) = report.final_error_estimate {
        // error transfer: ||d chi||_L <= sqrt(stretch + n) ||d x||
        let transfer = (split.stretch() + n as f64).sqrt();
        let est = inner_est * transfer;
        report.final_error_estimate = Some(est);
        report.target_met = Some(est <= opts.eps);
    }
    report.stretch = Some(split.stretch());
    report.kappa = Some(split.kappa());
    Ok((chi, report))
}

/// `B^T chi` in the split's column space: entry for an oriented edge
/// `(s -> t, w)` is `sqrt(w) (chi_t - chi_s)`.
pub fn bt_chi<T: Scalar>(split: &SplitSystem<T>, chi: &DenseVector<T>) -> DenseVector<T> {
    let nn = split.e_cols();
    let tree = split.tree().expect("graph split");
    let root = split.grounded().unwrap();
    let cols = nn + split.f_cols();
    let mut out = DenseVector::zeros(cols);
    // tree columns: oriented parent -> child
    for pos in 0..nn {
        let child = tree.node_at_position(pos);
        let parent = tree.parent(child).unwrap();
        let w_sqrt = tree.parent_weight(child).sqrt();
        let parent_chi = if parent == root { T::zero() } else { chi[parent] };
        out[pos] = w_sqrt * (chi[child] - parent_chi);
    }
    // F columns: oriented min -> max id
    let map = split.col_to_edge.as_ref().expect("graph split");
    let g_edges = tree_graph_edges(split);
    for col in nn..cols {
        let (u, v, w) = g_edges[map[col]];
        let (s, t) = (u.min(v), u.max(v));
        out[col] = w.sqrt() * (chi[t] - chi[s]);
    }
    out
}

fn tree_graph_edges<T: Scalar>(split: &SplitSystem<T>) -> &[(usize, usize, T)] {
    split
        .graph_edges
        .as_deref()
        .expect("graph-backed split system")
}

/// `chi^T L chi = sum over edges of w (chi_u - chi_v)^2`.
pub fn l_pseudo_norm_sq<T: Scalar>(g: &WeightedGraph<T>, chi: &DenseVector<T>) -> Result<T> {
    if chi.dim() != g.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "chi has dim {} but the graph has {} nodes",
            chi.dim(),
            g.node_count()
        )));
    }
    let mut total = T::zero();
    for &(u, v, w) in g.edges() {
        let d = chi[u] - chi[v];
        total = total + w * d * d;
    }
    Ok(total)
}

/// `||chi||_L = sqrt(chi^T L chi)`; vanishes exactly on constant vectors.
pub fn l_pseudo_norm<T: Scalar>(g: &WeightedGraph<T>, chi: &DenseVector<T>) -> Result<T> {
    Ok(l_pseudo_norm_sq(g, chi)?.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factorization::{trivial_left, trivial_right};
    use crate::instances;

    fn mat(rows: &[Vec<f64>]) -> ColMajorSparseMatrix {
        ColMajorSparseMatrix::from_dense_rows(rows).unwrap()
    }

    fn one_by_one_split(e_val: f64, f_vals: &[f64]) -> SplitSystem {
        let e = mat(&[vec![e_val]]);
        let f = mat(&[f_vals.to_vec()]);
        let einv = trivial_left(&mat(&[vec![1.0 / e_val]])).unwrap();
        SplitSystem::from_parts(&e, &f, einv).unwrap()
    }

    #[test]
    fn nullspace_of_row_of_ones_is_signed_pair() {
        let split = one_by_one_split(1.0, &[1.0]);
        let q = build_nullspace_q(&split).unwrap();
        let dense = q.densify_q();
        assert_eq!(dense, vec![vec![1.0], vec![-1.0]]);
        // A Q = 0
        let aq0 = split.a().get(0, 0) * dense[0][0] + split.a().get(0, 1) * dense[1][0];
        assert_eq!(aq0, 0.0);
    }

    #[test]
    fn nullspace_with_zero_f_is_minus_identity_block() {
        let split = one_by_one_split(2.0, &[0.0, 0.0]);
        let q = build_nullspace_q(&split).unwrap();
        let dense = q.densify_q();
        assert_eq!(dense[0], vec![0.0, 0.0]);
        assert_eq!(dense[1], vec![-1.0, 0.0]);
        assert_eq!(dense[2], vec![0.0, -1.0]);
    }

    #[test]
    fn nullspace_on_triangle_graph_annihilates_a() {
        let g = instances::random_connected_graph(3, 3, 1);
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let q = build_nullspace_q(&split).unwrap();
        let dense_q = q.densify_q();
        let a = split.a();
        let mut max_abs = 0f64;
        for i in 0..a.rows() {
            for j in 0..q.n() {
                let mut acc = 0.0;
                for l in 0..a.cols() {
                    acc += a.get(i, l) * dense_q[l][j];
                }
                max_abs = max_abs.max(acc.abs());
            }
        }
        assert!(max_abs <= 1e-10, "A Q deviates by {max_abs}");
        // certified index respects k0 * f + 1
        let bound = split.einv().k() * split.f_col_sparsity() + 1;
        assert!(q.k() <= bound, "k = {} > bound {bound}", q.k());
    }

    #[test]
    fn min_norm_on_row_of_ones_finds_symmetric_point() {
        let split = one_by_one_split(1.0, &[1.0]);
        let b = DenseVector::from_vec(vec![2.0]);
        let opts = SolveOptions::new(1e-10, 3).unwrap();
        let (x, report) = solve_min_norm(&split, &b, &opts).unwrap();
        assert!((x[0] - 1.0).abs() <= 1e-9, "x = {:?}", x.as_slice());
        assert!((x[1] - 1.0).abs() <= 1e-9);
        assert_eq!(report.kappa, Some(split.kappa()));
    }

    #[test]
    fn min_norm_on_square_identity_needs_no_iterations() {
        let e = ColMajorSparseMatrix::<f64>::identity(3);
        let f = ColMajorSparseMatrix::zero(3, 0);
        let einv = trivial_left(&ColMajorSparseMatrix::identity(3)).unwrap();
        let split = SplitSystem::from_parts(&e, &f, einv).unwrap();
        let b = DenseVector::from_vec(vec![1.0, -2.0, 0.5]);
        let opts = SolveOptions::new(1e-9, 5).unwrap();
        let (x, report) = solve_min_norm(&split, &b, &opts).unwrap();
        assert_eq!(report.iterations, 0);
        assert_eq!(x.as_slice(), b.as_slice());
    }

    #[test]
    fn min_norm_rejects_incompatible_rhs() {
        // E singular-in-effect: einv deliberately wrong so A x0 != b
        let e = mat(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let f = ColMajorSparseMatrix::zero(2, 0);
        let einv = trivial_left(&mat(&[vec![1.0, 0.0], vec![1.0, 0.00001]])).unwrap();
        let split = SplitSystem::from_parts(&e, &f, einv).unwrap();
        let b = DenseVector::from_vec(vec![1.0, 1.0]);
        let opts = SolveOptions::new(1e-9, 5).unwrap();
        match solve_min_norm(&split, &b, &opts) {
            Err(Error::IncompatibleSystem { .. }) => {}
            other => panic!("expected incompatibility, got {other:?}"),
        }
    }

    #[test]
    fn square_identity_returns_rhs() {
        let afact = trivial_left(&ColMajorSparseMatrix::<f64>::identity(4)).unwrap();
        let b = DenseVector::from_vec(vec![3.0, -1.0, 0.5, 2.0]);
        let opts = SolveOptions::new(1e-9, 2).unwrap();
        let (y, report) = solve_square(&afact, &b, &opts).unwrap();
        for i in 0..4 {
            assert!((y[i] - b[i]).abs() <= 1e-8, "y = {:?}", y.as_slice());
        }
        assert_eq!(report.target_met, Some(true));
    }

    #[test]
    fn square_path_incidence_recovers_all_ones() {
        let g = instances::path(8);
        let tree = SpanningTree::build(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let facts = crate::graphs::tree_e_factorizations(&tree).unwrap();
        // b = E * 1
        let ones = DenseVector::from_vec(vec![1.0; 7]);
        let dense_e = facts.e.densify_q();
        let b = DenseVector::from_vec(
            (0..7)
                .map(|i| dense_e[i].iter().sum::<f64>())
                .collect::<Vec<_>>(),
        );
        let _ = ones;
        let opts = SolveOptions::new(1e-9, 11).unwrap();
        let (y, report) = solve_square(&facts.e, &b, &opts).unwrap();
        for i in 0..7 {
            assert!((y[i] - 1.0).abs() <= 1e-8, "y[{i}] = {}", y[i]);
        }
        assert_eq!(report.target_met, Some(true));
    }

    #[test]
    fn overdetermined_incompatible_matches_normal_equations() {
        // A is 3x2 full column rank, b off the column space
        let a = mat(&[vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 2.0]]);
        let afact = trivial_right(&a).unwrap();
        let b = DenseVector::from_vec(vec![1.0, 0.0, 1.0]);
        // dense normal-equations solution of (A^T A) y = A^T b:
        // A^T A = [[2, 1], [1, 5]], A^T b = [1, 2] -> y = (1/3, 1/3)
        let opts = SolveOptions::new(1e-8, 17).unwrap();
        let (y, _) = solve_square(&afact, &b, &opts).unwrap();
        assert!((y[0] - 1.0 / 3.0).abs() <= 1e-6, "y = {:?}", y.as_slice());
        assert!((y[1] - 1.0 / 3.0).abs() <= 1e-6);
    }

    #[test]
    fn laplacian_two_node_example() {
        let g: WeightedGraph = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let c = DenseVector::from_vec(vec![1.0, -1.0]);
        let sys = LaplacianSystem::new(g, c, Some(1)).unwrap();
        let opts = SolveOptions::new(1e-8, 1).unwrap();
        let (chi, report) = solve_laplacian(&sys, &opts, &TreeStrategy::MstInverseWeight).unwrap();
        assert!((chi[0] - 1.0).abs() <= 1e-9, "chi = {:?}", chi.as_slice());
        assert_eq!(chi[1], 0.0);
        assert_eq!(report.stretch, Some(0.0));
    }

    #[test]
    fn laplacian_zero_rhs_gives_zero_potentials() {
        let g = instances::random_connected_graph(10, 20, 3);
        let c = DenseVector::zeros(10);
        let sys = LaplacianSystem::new(g, c, None).unwrap();
        let opts = SolveOptions::new(1e-6, 4).unwrap();
        let (chi, _) = solve_laplacian(&sys, &opts, &TreeStrategy::MstInverseWeight).unwrap();
        assert!(chi.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn laplacian_rejects_nonzero_sum_and_disconnected() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let c = DenseVector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(
            LaplacianSystem::new(g, c, None),
            Err(Error::InvalidArgument(_))
        ));
        let disconnected = WeightedGraph::new(3, vec![(0, 1, 1.0)]).unwrap();
        let c = DenseVector::zeros(3);
        assert!(matches!(
            LaplacianSystem::new(disconnected, c, None),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn l_pseudo_norm_examples() {
        let g = WeightedGraph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let constant = DenseVector::from_vec(vec![3.0, 3.0]);
        assert_eq!(l_pseudo_norm_sq(&g, &constant).unwrap(), 0.0);
        let step = DenseVector::from_vec(vec![1.0, 0.0]);
        assert_eq!(l_pseudo_norm_sq(&g, &step).unwrap(), 1.0);
        assert_eq!(l_pseudo_norm(&g, &step).unwrap(), 1.0);
    }

    #[test]
    fn l_pseudo_norm_matches_dense_quadratic_form() {
        let g = instances::random_connected_graph(12, 30, 7);
        let chi = instances::random_dense_vector(12, 8);
        // dense chi^T L chi
        let mut dense = 0.0;
        for &(u, v, w) in g.edges() {
            dense += w * (chi[u] - chi[v]) * (chi[u] - chi[v]);
        }
        let got = l_pseudo_norm_sq(&g, &chi).unwrap();
        assert!((got - dense).abs() <= 1e-12 * dense.max(1.0));
    }

    #[test]
    fn split_system_validates_its_inverse() {
        let g = instances::random_connected_graph(15, 25, 5);
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        assert!(split.validate_inverse() <= 1e-9);
    }
}
