//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Dense references come from nalgebra and are independent of the library's
//! own kernels.

use std::time::Instant;

use ksparse::engine::{self, SamplingDistribution};
use ksparse::factorization::{self, KSparseFactorization};
use ksparse::graphs::{self, tree_e_factorizations, SpanningTree, TreeStrategy};
use ksparse::hmatrix::{factorize_hmatrix, semiseparable_to_hmatrix};
use ksparse::instances;
use ksparse::solvers::{self, LaplacianSystem, SolveOptions, SplitSystem};
use ksparse::sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};
use ksparse::{dense::DenseMatrix, work};

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use rand_core::{Rng, SeedableRng};

fn finish(criterion: &str, pass: bool, elapsed_s: f64, limit_s: f64, detail: &str) {
    let status = if pass && elapsed_s < limit_s { "PASS" } else { "FAIL" };
    println!("[{status}] {criterion}: {detail} ({elapsed_s:.1}s of {limit_s:.0}s budget)");
    assert!(pass, "{criterion}: {detail}");
    assert!(
        elapsed_s < limit_s,
        "{criterion}: runtime {elapsed_s:.1}s exceeds {limit_s:.0}s"
    );
}

fn sparse_to_na(m: &ColMajorSparseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

fn rows_to_na(rows: &[Vec<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

fn pinv_solve(a: &DMatrix<f64>, b: &[f64]) -> Vec<f64> {
    let pinv = a.clone().pseudo_inverse(1e-12).expect("pseudoinverse");
    (&pinv * DMatrix::from_column_slice(b.len(), 1, b))
        .column(0)
        .iter()
        .copied()
        .collect()
}

#[test]
fn acceptance_01_hierarchical_factorization_correctness() {
    let start = Instant::now();
    let mut worst_rel = 0f64;
    let mut worst_k_slack = 0f64;
    let mut pass = true;
    for seed in 0..100u64 {
        let r = [1, 2, 3][(seed % 3) as usize];
        let d = [2, 3][(seed % 2) as usize];
        let n = 16 + ((seed * 31 + 7) as usize % 497);
        let h = instances::random_hmatrix(n, r, d, seed);
        let fact = factorize_hmatrix(&h).expect("random hierarchical matrix factorizes");

        let dense_h = h.densify();
        let product = fact.densify_q();
        let mut err = 0f64;
        let scale = dense_h.max_abs().max(1e-300);
        for (i, row) in product.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                err = err.max((v - dense_h[(i, j)]).abs());
            }
        }
        worst_rel = worst_rel.max(err / scale);
        if err / scale > 1e-10 {
            pass = false;
        }

        let height = h.dendrogram().height();
        let k_bound = r * d * (d - 1) * (height + 1);
        let p_bound = r * d * d * n;
        worst_k_slack = worst_k_slack.max(fact.k() as f64 / k_bound as f64);
        if fact.k() > k_bound || fact.p() > p_bound {
            pass = false;
        }
    }
    finish(
        "criterion 1 (H_r factorization correctness)",
        pass,
        start.elapsed().as_secs_f64(),
        60.0,
        &format!("100 instances, worst rel err {worst_rel:.2e}, worst k/bound {worst_k_slack:.2}"),
    );
}

#[test]
fn acceptance_02_per_step_work_is_o_of_k() {
    let start = Instant::now();
    let sizes = [1usize << 8, 1 << 10, 1 << 12, 1 << 13];
    let mut mean_works = Vec::new();
    let mut pass = true;
    let mut detail_parts = Vec::new();
    for (idx, &n) in sizes.iter().enumerate() {
        let g = instances::random_tree(n, 1000 + idx as u64);
        let tree = SpanningTree::build(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let facts = tree_e_factorizations(&tree).unwrap();
        let fact = facts.e_inverse;
        let k = fact.k();

        let h0 = DenseVector::from_vec(
            (0..fact.p())
                .map(|i| if i == 0 { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        );
        let mut state = engine::init_state(&fact, &h0).unwrap();
        let dist = SamplingDistribution::new(&fact);
        let mut rng = ChaCha8Rng::seed_from_u64(55 + idx as u64);
        let steps = 512;
        let mut total = 0u64;
        let mut max_step = 0u64;
        for _ in 0..steps {
            let j = dist.sample(&mut rng);
            let ((), w) = work::metered(|| state.step(&fact, j));
            total += w;
            max_step = max_step.max(w);
        }
        let bound = 6 * k as u64 + 16;
        if max_step > bound {
            pass = false;
        }
        mean_works.push(total as f64 / steps as f64);
        detail_parts.push(format!("n={n}: k={k}, max step {max_step} <= {bound}"));
    }
    // sublinear fit: slope of ln(mean work) vs ln(n)
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = mean_works.iter().map(|&w| w.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xm) * (y - ym))
        .sum::<f64>()
        / xs.iter().map(|x| (x - xm) * (x - xm)).sum::<f64>();
    if slope >= 0.3 {
        pass = false;
    }
    finish(
        "criterion 2 (O(k) per-step work)",
        pass,
        start.elapsed().as_secs_f64(),
        120.0,
        &format!("{}; growth exponent {slope:.3} < 0.3", detail_parts.join("; ")),
    );
}

#[test]
fn acceptance_03_expected_convergence_rate() {
    let start = Instant::now();
    // fixed 12 x 20 instance
    let q_dense = instances::random_dense_matrix(12, 20, 42);
    let q_sparse = q_dense.to_sparse();
    let fact = factorization::trivial_left(&q_sparse).unwrap();

    let q_na = DMatrix::from_fn(12, 20, |i, j| q_dense[(i, j)]);
    let svd = q_na.clone().svd(false, false);
    let sigma_min = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sigma_min_sq = sigma_min * sigma_min;
    let frob_sq = fact.frobenius_sq();
    let rho = 1.0 - sigma_min_sq / frob_sq;

    let x0 = instances::random_dense_vector(12, 7);
    // x* = (I - Q Q^+) x0 via the dense oracle
    let pinv = q_na.clone().pseudo_inverse(1e-12).unwrap();
    let proj = &q_na * (&pinv * DMatrix::from_column_slice(12, 1, x0.as_slice()));
    let x_star: Vec<f64> = (0..12).map(|i| x0[i] - proj[(i, 0)]).collect();
    let init_err_sq: f64 = (0..12).map(|i| (x0[i] - x_star[i]).powi(2)).sum();

    let checkpoints = [10u64, 50, 200];
    let mut sums = [0f64; 3];
    let dist = SamplingDistribution::new(&fact);
    for seed in 0..200u64 {
        let mut state = engine::init_state(&fact, &x0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = 0u64;
        for (ci, &cp) in checkpoints.iter().enumerate() {
            while t < cp {
                state.step(&fact, dist.sample(&mut rng));
                t += 1;
            }
            let x = engine::recover_x(&state, &fact);
            let err_sq: f64 = (0..12).map(|i| (x[i] - x_star[i]).powi(2)).sum();
            sums[ci] += err_sq;
        }
    }
    let mut pass = true;
    let mut details = Vec::new();
    for (ci, &cp) in checkpoints.iter().enumerate() {
        let mean = sums[ci] / 200.0;
        let bound = 1.1 * rho.powi(cp as i32) * init_err_sq;
        details.push(format!("t={cp}: mean {mean:.3e} <= bound {bound:.3e}"));
        if mean > bound {
            pass = false;
        }
    }
    finish(
        "criterion 3 (expected contraction rate)",
        pass,
        start.elapsed().as_secs_f64(),
        30.0,
        &details.join("; "),
    );
}

#[test]
fn acceptance_04_min_norm_matches_pseudoinverse() {
    let start = Instant::now();
    let mut pass = true;
    let mut worst = 0f64;
    for seed in 0..50u64 {
        let n = 10 + (seed as usize * 13) % 31; // up to 40
        let m_target = (n * 3).min(120);
        let g = instances::random_connected_graph(n, m_target, 300 + seed);
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let a_na = sparse_to_na(split.a());
        let x_rand = instances::random_dense_vector(split.a().cols(), seed);
        let b_na = &a_na * DMatrix::from_column_slice(x_rand.dim(), 1, x_rand.as_slice());
        let b: Vec<f64> = b_na.column(0).iter().copied().collect();
        let x_star = pinv_solve(&a_na, &b);

        let eps = 1e-6;
        let eps0 = 1.0 + ((split.e_cols() as f64) + split.stretch()).sqrt();
        let budget = ((split.kappa() * (eps0 / eps).ln()).ceil() * 10.0) as u64;

        let opts = SolveOptions::new(eps, 900 + seed)
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
        let den = x_star.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel = num / den;
        worst = worst.max(rel);
        if rel > 1e-6 || report.iterations > budget {
            pass = false;
        }
    }
    finish(
        "criterion 4 (min-norm pseudoinverse equivalence)",
        pass,
        start.elapsed().as_secs_f64(),
        120.0,
        &format!("50 graphs, worst relative error {worst:.2e} <= 1e-6 within budget"),
    );
}

#[test]
fn acceptance_05_stretch_identity() {
    let start = Instant::now();
    let mut pass = true;
    let mut worst = 0f64;
    for seed in 0..50u64 {
        let n = 8 + (seed as usize * 7) % 53; // up to 60
        let g = instances::random_connected_graph(n, n * 2, 500 + seed);
        let tree = SpanningTree::build(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let s = graphs::stretch(&g, &tree).unwrap();

        // dense oracle: ||E^{-1} F||_F^2 via nalgebra inverse
        let split = SplitSystem::from_graph(
            &g,
            &TreeStrategy::MstInverseWeight,
            Some(tree.root()),
        )
        .unwrap();
        let a_na = sparse_to_na(split.a());
        let nn = split.e_cols();
        let e_na = a_na.view((0, 0), (nn, nn)).into_owned();
        let f_na = a_na.view((0, nn), (nn, split.f_cols())).into_owned();
        let einv = e_na.try_inverse().expect("tree incidence is invertible");
        let image = &einv * f_na;
        let fro_sq: f64 = image.iter().map(|v| v * v).sum();

        let rel = (s - fro_sq).abs() / fro_sq.max(1e-300);
        worst = worst.max(rel);
        if rel > 1e-9 {
            pass = false;
        }
    }
    // unit triangle: exactly 2
    let tri = ksparse::graphs::WeightedGraph::new(
        3,
        vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
    )
    .unwrap();
    let tree = SpanningTree::build(&tri, &TreeStrategy::MstInverseWeight, None).unwrap();
    if graphs::stretch(&tri, &tree).unwrap() != 2.0 {
        pass = false;
    }
    finish(
        "criterion 5 (stretch identity)",
        pass,
        start.elapsed().as_secs_f64(),
        30.0,
        &format!("50 graphs, worst relative deviation {worst:.2e}; unit triangle = 2 exactly"),
    );
}

#[test]
fn acceptance_06_laplacian_pipeline() {
    let start = Instant::now();
    let mut pass = true;
    let mut worst_rel = 0f64;
    let mut transfer_ok = true;
    for seed in 0..25u64 {
        let n = 10 + (seed as usize * 11) % 41; // up to 50
        let g = instances::random_connected_graph(n, n * 2 + 5, 600 + seed);
        let chi_true = instances::random_dense_vector(n, seed + 1);
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

        let sys = LaplacianSystem::new(g.clone(), DenseVector::from_vec(c.clone()), None).unwrap();
        let opts = SolveOptions::new(1e-5, 700 + seed)
            .unwrap()
            .with_oracle(DenseVector::from_vec(chi_star.clone()));
        let (_chi, report) =
            solvers::solve_laplacian(&sys, &opts, &TreeStrategy::MstInverseWeight).unwrap();
        let rel = report.final_error_estimate.unwrap();
        worst_rel = worst_rel.max(rel);
        if rel > 1e-5 {
            pass = false;
        }

        // error-transfer inequality at traced checkpoints, driven manually
        let split = SplitSystem::from_graph(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let tree = split.tree().unwrap();
        let grounded = split.grounded().unwrap();
        let mut b = DenseVector::zeros(n - 1);
        for v in 0..n {
            if v != grounded {
                b[split.row_of_node(v).unwrap()] = c[v];
            }
        }
        let a_na = sparse_to_na(split.a());
        let b_vec: Vec<f64> = b.as_slice().to_vec();
        let x_star = pinv_solve(&a_na, &b_vec);
        let mut x_star_e = DenseVector::zeros(n - 1);
        for pos in 0..n - 1 {
            x_star_e[pos] = x_star[pos];
        }
        let chi_hat = tree.solve_transposed(&x_star_e).unwrap();

        let q = solvers::build_nullspace_q(&split).unwrap();
        let db = split.einv().d().mul_dense(&b).unwrap();
        let mut h0 = DenseVector::zeros(q.p());
        for i in 0..split.einv().p() {
            h0[i] = db[i];
        }
        let mut state = engine::init_state(&q, &h0).unwrap();
        let dist = SamplingDistribution::new(&q);
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let mut checkpoint = 1u64;
        let mut t = 0u64;
        let factor = (split.stretch() + n as f64) * (1.0 + 1e-6);
        while t < 2000 {
            state.step(&q, dist.sample(&mut rng));
            t += 1;
            if t == checkpoint || t == 2000 {
                checkpoint *= 2;
                let x = engine::recover_x(&state, &q);
                let dx_sq: f64 = (0..x.dim()).map(|i| (x[i] - x_star[i]).powi(2)).sum();
                let mut x_e = DenseVector::zeros(n - 1);
                for pos in 0..n - 1 {
                    x_e[pos] = x[pos];
                }
                let chi_t = tree.solve_transposed(&x_e).unwrap();
                let dchi = chi_t.sub(&chi_hat);
                let dchi_l_sq = solvers::l_pseudo_norm_sq(&g, &dchi).unwrap();
                if dchi_l_sq > factor * dx_sq + 1e-18 {
                    transfer_ok = false;
                }
            }
        }
    }
    finish(
        "criterion 6 (Laplacian pipeline and error transfer)",
        pass && transfer_ok,
        start.elapsed().as_secs_f64(),
        120.0,
        &format!(
            "25 graphs, worst L-norm relative error {worst_rel:.2e} <= 1e-5; transfer inequality {}",
            if transfer_ok { "held at all checkpoints" } else { "VIOLATED" }
        ),
    );
}

#[test]
fn acceptance_07_tree_machinery() {
    let start = Instant::now();
    let mut pass = true;

    // separator bounds on 200 random trees
    for seed in 0..200u64 {
        let n = 3 + (seed as usize * 17) % 198;
        let g = instances::random_tree(n, 70_000 + seed);
        let all: Vec<usize> = (0..n).collect();
        let split = graphs::tree_separator(&g, &all).unwrap();
        let bound = (2 * n).div_ceil(3);
        if split.part1.len() > bound || split.part2.len() > bound {
            pass = false;
        }
        let accounted =
            split.part1.len() + split.part2.len() + usize::from(split.separator.is_some());
        if accounted != n {
            pass = false;
        }
    }

    // triangularity and inverse correctness up to n = 128
    let mut worst_inv = 0f64;
    for seed in 0..12u64 {
        let n = 8 + (seed as usize * 11) % 121;
        let g = instances::random_tree(n, 71_000 + seed);
        let tree = SpanningTree::build(&g, &TreeStrategy::MstInverseWeight, None).unwrap();
        let e = tree.e_hmatrix().unwrap().densify();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                if i > j && e[(i, j)] != 0.0 {
                    pass = false;
                }
            }
            let node = tree.node_at_position(i);
            let expect = tree.parent_weight(node).sqrt();
            if (e[(i, i)].abs() - expect).abs() > 1e-12 * expect {
                pass = false;
            }
        }
        let facts = tree_e_factorizations(&tree).unwrap();
        let einv = rows_to_na(&facts.e_inverse.densify_q());
        let e_na = DMatrix::from_fn(n - 1, n - 1, |i, j| e[(i, j)]);
        let prod = &einv * &e_na;
        let mut dev = 0f64;
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                let expect = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((prod[(i, j)] - expect).abs());
            }
        }
        worst_inv = worst_inv.max(dev);
        if dev > 1e-9 {
            pass = false;
        }
    }
    finish(
        "criterion 7 (tree separator machinery)",
        pass,
        start.elapsed().as_secs_f64(),
        60.0,
        &format!("200 separator splits within ceil(2n/3); inverse factorization deviation {worst_inv:.2e} <= 1e-9"),
    );
}

#[test]
fn acceptance_08_semiseparable_conversion() {
    let start = Instant::now();
    let mut pass = true;
    let mut worst = 0f64;
    for seed in 0..10u64 {
        let n = 8 + (seed as usize * 7) % 57; // up to 64
        let tri = instances::random_tridiagonal(n, 810 + seed);
        let tri_na = DMatrix::from_fn(n, n, |i, j| tri[(i, j)]);
        let inv = tri_na.try_inverse().expect("diagonally dominant");
        let inv_dense = DenseMatrix::from_fn(n, n, |i, j| inv[(i, j)]);
        match semiseparable_to_hmatrix(&inv_dense, 1, 1, 1e-8) {
            Ok(h) => {
                let err = h.densify().sub(&inv_dense).unwrap().max_abs();
                let rel = err / inv_dense.max_abs();
                worst = worst.max(rel);
                if rel > 1e-9 {
                    pass = false;
                }
            }
            Err(_) => pass = false,
        }
    }
    // a constructed violator is rejected
    let mut bad = DenseMatrix::identity(8);
    bad[(0, 7)] = 1.0;
    bad[(1, 6)] = 1.0;
    if semiseparable_to_hmatrix(&bad, 1, 1, 1e-8).is_ok() {
        pass = false;
    }
    finish(
        "criterion 8 (semiseparable conversion)",
        pass,
        start.elapsed().as_secs_f64(),
        30.0,
        &format!("tridiagonal inverses convert at rel error {worst:.2e} <= 1e-9; violator rejected"),
    );
}

#[test]
fn acceptance_09_elementary_property_suite() {
    let start = Instant::now();
    let mut pass = true;
    let mut built = 0u64;
    let mut seed = 0u64;
    while built < 50 {
        seed += 1;
        let (m, p, n) = (10, 8, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(910 + seed);
        let gen_value = |rng: &mut ChaCha8Rng| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            0.25 + 1.5 * u
        };
        let gen_matrix = |rng: &mut ChaCha8Rng, rows: usize, cols: usize| {
            // every row and column nonzero: seed the diagonal pattern first
            let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
            for r in 0..rows {
                entries[r % cols].push((r, gen_value(rng)));
            }
            for (j, col) in entries.iter_mut().enumerate() {
                let extra = (rng.next_u64() % 2) as usize + usize::from(j % 3 == 0);
                for _ in 0..extra {
                    let r = (rng.next_u64() as usize) % rows;
                    if !col.iter().any(|&(i, _)| i == r) {
                        col.push((r, gen_value(rng)));
                    }
                }
            }
            let columns: Vec<SparseVector> = entries
                .into_iter()
                .map(|e| SparseVector::new(rows, e).unwrap())
                .collect();
            ColMajorSparseMatrix::from_columns(rows, columns).unwrap()
        };
        let c1 = gen_matrix(&mut rng, m, p);
        let d1 = gen_matrix(&mut rng, p, n);
        let c2 = gen_matrix(&mut rng, m, p);
        let d2 = gen_matrix(&mut rng, p, n);
        let (f1, f2) = match (
            KSparseFactorization::new(c1.clone(), d1.clone()),
            KSparseFactorization::new(c2, d2),
        ) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue, // a degenerate draw; take the next seed
        };
        built += 1;

        // stacking: k <= k1 + k2, and stacking with the identity: k <= k1 + 1
        let stacked = factorization::stack(&f1, &f2).unwrap();
        if stacked.k() > f1.k() + f2.k() {
            pass = false;
        }
        let ident = factorization::trivial_left(&ColMajorSparseMatrix::identity(n)).unwrap();
        let stacked_id = factorization::stack(&f1, &ident).unwrap();
        if stacked_id.k() > f1.k() + 1 {
            pass = false;
        }

        // right multiplication: k <= k1 * f
        let fmat = {
            let mut cols = Vec::new();
            for j in 0..n {
                let a = (rng.next_u64() as usize) % n;
                let mut b = (rng.next_u64() as usize) % n;
                if b == a {
                    b = (b + 1) % n;
                }
                cols.push(
                    SparseVector::new(n, vec![(a.min(b), 1.0), (a.max(b), gen_value(&mut rng))])
                        .unwrap(),
                );
                let _ = j;
            }
            ColMajorSparseMatrix::from_columns(n, cols).unwrap()
        };
        match factorization::right_multiply(&f1, &fmat) {
            Ok(rm) => {
                if rm.k() > f1.k() * 2 {
                    pass = false;
                }
                // dense agreement (CD)F = C(DF)
                let q1 = rows_to_na(&f1.densify_q());
                let f_na = sparse_to_na(&fmat);
                let direct = &q1 * &f_na;
                let got = rows_to_na(&rm.densify_q());
                let dev = (&got - &direct).abs().max();
                if dev > 1e-12 * direct.abs().max().max(1.0) {
                    pass = false;
                }
            }
            Err(ksparse::Error::ZeroDirection { .. }) => {} // cancellation draw
            Err(_) => pass = false,
        }

        // identity augmentation: k grows by at most one
        let aug = KSparseFactorization::new_augmented(c1, d1).unwrap();
        if aug.k() > f1.k() + 1 {
            pass = false;
        }
    }
    finish(
        "criterion 9 (elementary property suite)",
        pass,
        start.elapsed().as_secs_f64(),
        30.0,
        &format!("{built} instances: stack <= k1+k2, stack with I <= k+1, QF <= kf, augmentation <= k+1"),
    );
}
