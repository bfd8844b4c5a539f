//! Oracle-backed integration tests: the dense references here come from
//! nalgebra, independent of the library's own Jacobi SVD and sparse kernels.

use ksparse::dense::DenseMatrix;
use ksparse::engine::{self, RunOptions};
use ksparse::graphs::{self, TreeStrategy};
use ksparse::hmatrix;
use ksparse::instances;
use ksparse::solvers::{self, LaplacianSystem, SolveOptions, SplitSystem};
use ksparse::{ColMajorSparseMatrix, DenseVector};

use nalgebra::DMatrix;

fn to_na(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn sparse_to_na(m: &ColMajorSparseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn dense_to_na(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Minimum-norm solution via nalgebra's pseudoinverse.
fn pinv_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let pinv = a.clone().pseudo_inverse(1e-12).expect("pseudoinverse");
    let x = &pinv * DMatrix::from_column_slice(b.len(), 1, b);
    x.column(0).iter().copied().collect()
}

#[test]
fn jacobi_svd_matches_nalgebra_singular_values() {
    for seed in [1u64, 2, 3] {
        let a = instances::random_dense_matrix(9, 6, seed);
        let ours = ksparse::dense::svd(&a);
        let theirs = dense_to_na(&a).svd(false, false);
        let mut reference: Vec<f64> = theirs.singular_values.iter().copied().collect();
        reference.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (o, r) in ours.sigma.iter().zip(&reference) {
            assert!((o - r).abs() <= 1e-10 * reference[0], "{o} vs {r}");
        }
    }
}

#[test]
fn engine_converges_to_pseudoinverse_min_norm_point() {
    // underdetermined tree system: A = reduced incidence of a 6-node tree
    let g = instances::random_tree(6, 4);
    let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
    let a_na = sparse_to_na(split.a());

    // compatible b = A * (random x)
    let x_true = instances::random_dense_vector(split.a().cols(), 9);
    let b_vec = &a_na * DMatrix::from_column_slice(x_true.dim(), 1, x_true.as_slice());
    let b: Vec<f64> = b_vec.column(0).iter().copied().collect();
    let x_star = pinv_solve(&a_na, &b);

    let opts = SolveOptions::new(1e-9, 12)
        .unwrap()
        .with_oracle(DenseVector::from_vec(x_star.clone()));
    let (x, report) = solvers::solve_min_norm(&split, &DenseVector::from_vec(b), &opts).unwrap();

    let num: f64 = x
        .as_slice()
        .iter()
        .zip(&x_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den: f64 = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(num / den <= 1e-8, "relative error {}", num / den);
    assert_eq!(report.target_met, Some(true));
}

#[test]
fn feasibility_is_preserved_along_the_run() {
    let g = instances::random_connected_graph(12, 24, 6);
    let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
    let a_na = sparse_to_na(split.a());
    let x_true = instances::random_dense_vector(split.a().cols(), 2);
    let b_na = &a_na * DMatrix::from_column_slice(x_true.dim(), 1, x_true.as_slice());
    let b: Vec<f64> = b_na.column(0).iter().copied().collect();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();

    // drive the engine manually, checking A x_t = b at every step
    let q = solvers::build_nullspace_q(&split).unwrap();
    let db = split.einv().d().mul_dense(&DenseVector::from_vec(b.clone())).unwrap();
    let mut h0 = DenseVector::zeros(q.p());
    for i in 0..split.einv().p() {
        h0[i] = db[i];
    }
    let mut state = engine::init_state(&q, &h0).unwrap();
    let dist = engine::SamplingDistribution::new(&q);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    use rand_core::SeedableRng;
    for _ in 0..500 {
        let j = dist.sample(&mut rng);
        state.step(&q, j);
        let x = engine::recover_x(&state, &q);
        let ax = &a_na * DMatrix::from_column_slice(x.dim(), 1, x.as_slice());
        let resid: f64 = ax
            .column(0)
            .iter()
            .zip(&b)
            .map(|(l, r)| (l - r) * (l - r))
            .sum::<f64>()
            .sqrt();
        assert!(resid <= 1e-8 * b_norm, "feasibility drift {resid}");
    }
}

#[test]
fn nullspace_q_has_sigma_min_at_least_one() {
    for seed in [3u64, 8, 21] {
        let g = instances::random_connected_graph(15, 35, seed);
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let q = solvers::build_nullspace_q(&split).unwrap();
        let q_na = to_na(&q.densify_q());
        let svd = q_na.svd(false, false);
        let min_nonzero = svd
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(
            min_nonzero * min_nonzero >= 1.0 - 1e-9,
            "sigma_min^2 = {}",
            min_nonzero * min_nonzero
        );
    }
}

#[test]
fn initial_guess_satisfies_the_norm_bound() {
    for seed in [5u64, 14] {
        let g = instances::random_connected_graph(14, 30, seed);
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let a_na = sparse_to_na(split.a());
        let x_rand = instances::random_dense_vector(split.a().cols(), seed + 1);
        let b_na = &a_na * DMatrix::from_column_slice(x_rand.dim(), 1, x_rand.as_slice());
        let b: Vec<f64> = b_na.column(0).iter().copied().collect();
        let x_star = pinv_solve(&a_na, &b);
        let star_norm: f64 = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();

        // x0 = (E^{-1} b; 0) via the factorization
        let db = split
            .einv()
            .d()
            .mul_dense(&DenseVector::from_vec(b.clone()))
            .unwrap();
        let e_inv_b = split.einv().c().mul_dense(&db).unwrap();
        let x0_norm = e_inv_b.norm();

        let nn = split.e_cols() as f64;
        let bound = (nn + split.stretch()).sqrt() * star_norm * (1.0 + 1e-6);
        assert!(
            x0_norm <= bound,
            "||x0|| = {x0_norm} exceeds sqrt(n + fro) ||x*|| = {bound}"
        );
    }
}

#[test]
fn laplacian_solution_matches_dense_pseudoinverse() {
    let n = 24;
    let g = instances::random_connected_graph(n, 60, 13);
    // c = L * chi_true, recentred
    let chi_true = instances::random_dense_vector(n, 3);
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &(u, v, w) in g.edges() {
        lap[(u, u)] += w;
        lap[(v, v)] += w;
        lap[(u, v)] -= w;
        lap[(v, u)] -= w;
    }
    let c_na = &lap * DMatrix::from_column_slice(n, 1, chi_true.as_slice());
    let mut c: Vec<f64> = c_na.column(0).iter().copied().collect();
    let mean = c.iter().sum::<f64>() / n as f64;
    for v in &mut c {
        *v -= mean;
    }
    let chi_star = pinv_solve(&lap, &c);

    let sys = LaplacianSystem::new(g.clone(), DenseVector::from_vec(c), None).unwrap();
    let opts = SolveOptions::new(1e-6, 10)
        .unwrap()
        .with_oracle(DenseVector::from_vec(chi_star.clone()));
    let (chi, report) = solvers::solve_laplacian(&sys, &opts, &TreeStrategy::MstInverseWeight).unwrap();

    // compare in the L-pseudo-norm (grounding shifts by constants)
    let diff = DenseVector::from_vec(
        chi.as_slice()
            .iter()
            .zip(&chi_star)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>(),
    );
    let err_sq = solvers::l_pseudo_norm_sq(&g, &diff).unwrap();
    let star_sq = solvers::l_pseudo_norm_sq(&g, &DenseVector::from_vec(chi_star)).unwrap();
    let rel = (err_sq / star_sq).sqrt();
    assert!(rel <= 1e-5, "relative L-norm error {rel}");
    assert_eq!(report.target_met, Some(true));
}

#[test]
fn grounding_choice_shifts_solutions_by_constants() {
    let n = 16;
    let g = instances::random_connected_graph(n, 30, 23);
    let c = instances::random_zero_sum(n, 7);
    let opts = SolveOptions::new(1e-8, 6).unwrap();

    let sys_a = LaplacianSystem::new(g.clone(), c.clone(), Some(0)).unwrap();
    let (chi_a, _) = solvers::solve_laplacian(&sys_a, &opts, &TreeStrategy::MstInverseWeight).unwrap();
    let sys_b = LaplacianSystem::new(g.clone(), c.clone(), Some(n - 1)).unwrap();
    let (chi_b, _) = solvers::solve_laplacian(&sys_b, &opts, &TreeStrategy::MstInverseWeight).unwrap();

    let diff = chi_a.sub(&chi_b);
    let l_norm_sq = solvers::l_pseudo_norm_sq(&g, &diff).unwrap();
    // solutions may each carry roughly eps-sized errors; their difference is
    // constant up to the sum of those errors
    let scale = solvers::l_pseudo_norm_sq(&g, &chi_a).unwrap().sqrt();
    assert!(
        l_norm_sq.sqrt() <= 1e-6 * scale.max(1.0),
        "difference has L-norm {}",
        l_norm_sq.sqrt()
    );
}

#[test]
fn semiseparable_inverse_of_tridiagonal_converts_exactly() {
    let n = 5;
    let tri = instances::random_tridiagonal(n, 2);
    let inv = dense_to_na(&tri).try_inverse().expect("diagonally dominant");
    let inv_dense = DenseMatrix::from_fn(n, n, |i, j| inv[(i, j)]);
    let h = hmatrix::semiseparable_to_hmatrix(&inv_dense, 1, 1, 1e-8).unwrap();
    let err = h.densify().sub(&inv_dense).unwrap().max_abs();
    assert!(err <= 1e-10, "reconstruction error {err}");
}

#[test]
fn disconnected_reduced_incidence_is_rank_deficient() {
    // two components: reduced incidence cannot have full row rank
    let g = ksparse::graphs::WeightedGraph::new(
        4,
        vec![(0, 1, 1.0), (2, 3, 2.0)],
    )
    .unwrap();
    let b = graphs::incidence(&g, None);
    let reduced = graphs::reduce(&b, 0).unwrap();
    let na = sparse_to_na(&reduced);
    assert_eq!(na.rank(1e-10), 2, "3 rows but rank 2");
}

#[test]
fn predict_iterations_matches_dense_svd_on_triangle_nullspace() {
    let g = ksparse::graphs::WeightedGraph::new(
        3,
        vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
    )
    .unwrap();
    let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
    let q = solvers::build_nullspace_q(&split).unwrap();
    let q_na = to_na(&q.densify_q());
    let sigma_min = q_na
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let n1 = engine::per_decade_iterations(q.frobenius_sq(), sigma_min * sigma_min).unwrap();
    let expect = -(0.1f64.ln()) / -(1.0 - sigma_min * sigma_min / q.frobenius_sq()).ln();
    assert!((n1 - expect).abs() <= 1e-12);
    assert_eq!(
        engine::predict_iterations(&q, sigma_min * sigma_min, 2.0).unwrap(),
        (2.0 * expect).ceil() as u64
    );
}

#[test]
fn run_error_trace_decays_on_tree_system() {
    // 6-node graph solved over its spanning tree, oracle from the dense
    // pseudoinverse; five tree columns plus five null-space directions
    let g = instances::random_connected_graph(6, 10, 11);
    let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
    let a_na = sparse_to_na(split.a());
    let x_rand = instances::random_dense_vector(split.a().cols(), 5);
    let b_na = &a_na * DMatrix::from_column_slice(x_rand.dim(), 1, x_rand.as_slice());
    let b: Vec<f64> = b_na.column(0).iter().copied().collect();
    let x_star = DenseVector::from_vec(pinv_solve(&a_na, &b));

    let q = solvers::build_nullspace_q(&split).unwrap();
    let db = split
        .einv()
        .d()
        .mul_dense(&DenseVector::from_vec(b))
        .unwrap();
    let mut h0 = DenseVector::zeros(q.p());
    for i in 0..split.einv().p() {
        h0[i] = db[i];
    }
    let opts = RunOptions {
        max_iters: 20_000,
        target_error: Some(1e-8),
        seed: 3,
        trace_stride: None,
        sigma_min_sq: Some(1.0),
    };
    let (_, report) = engine::run(&q, &h0, &opts, Some(&x_star)).unwrap();
    let final_err = report.final_error_estimate.unwrap();
    assert!(final_err <= 1e-8, "final error {final_err}");
    assert!(report.iterations <= 20_000);
    // trace is recorded and roughly decreasing at the tail
    assert!(report.error_trace.len() >= 3);
}

#[test]
fn f32_instantiation_solves_a_small_system() {
    // the core is generic over the scalar: run a solve in single precision
    use ksparse::factorization::trivial_left;
    let a = ColMajorSparseMatrix::<f32>::from_dense_rows(&[
        vec![2.0f32, 0.0],
        vec![0.0, 4.0],
    ])
    .unwrap();
    let afact = trivial_left(&a).unwrap();
    let b = ksparse::DenseVector32::from_vec(vec![2.0f32, 8.0]);
    let opts = SolveOptions::<f32>::new(1e-4, 1).unwrap();
    let (y, _) = solvers::solve_square(&afact, &b, &opts).unwrap();
    assert!((y[0] - 1.0).abs() < 1e-3);
    assert!((y[1] - 2.0).abs() < 1e-3);
}
