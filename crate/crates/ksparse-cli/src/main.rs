//! Command-line front end: factorize matrices, run the three solvers,
//! evaluate tree stretch and benchmark instance families.
//!
//! Exit codes: 0 success, 1 internal/validation failure, 2 parse error,
//! 3 incompatible system, 4 disconnected graph, 5 budget exhausted above
//! the target error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use ksparse::engine::SolveReport;
use ksparse::factorization::{self, KSparseFactorization};
use ksparse::graphs::{self, SpanningTree, TreeStrategy, WeightedGraph};
use ksparse::hmatrix::{factorize_hmatrix, HMatrix};
use ksparse::instances;
use ksparse::io;
use ksparse::solvers::{self, LaplacianSystem, SolveOptions, SplitSystem};
use ksparse::{ColMajorSparseMatrix, DenseVector, Error};

#[derive(Parser)]
#[command(name = "ksparse", about = "Sparse-factorization projection solvers", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factorize a matrix (.mtx), a hierarchical matrix (.json) or reimport
    /// an exported factorization directory; prints a JSON summary.
    Factorize {
        /// Input: Matrix Market file, hierarchical-matrix JSON, or directory.
        input: PathBuf,
        /// Directory to export C.mtx, D.mtx, U.mtx and the JSON sidecar into.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Relative validation tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Minimum-norm solution of A x = b for the grounded incidence matrix of
    /// a graph; b holds one entry per non-grounded node, ascending.
    SolveMinNorm {
        graph: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Square or overdetermined A y = b for a sparse (.mtx) or hierarchical
    /// (.json) matrix.
    SolveSquare {
        matrix: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Two-step Laplacian solve L chi = c; c is a zero-sum vector over all
    /// nodes.
    SolveLaplacian {
        graph: PathBuf,
        c: PathBuf,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Inverse-weight stretch of a spanning tree in the graph.
    Stretch {
        graph: PathBuf,
        #[arg(long, default_value = "mst")]
        tree: String,
        /// Grounded node (1-based); defaults to the tree's top separator.
        #[arg(long)]
        ground: Option<usize>,
    },
    /// Benchmark instance families; emits CSV sorted by (family, n, seed).
    Bench {
        #[arg(long, value_parser = ["path", "grid", "random-tree", "random-graph"])]
        family: String,
        /// Comma-separated ascending instance sizes (node counts).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Comma-separated seeds.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        seeds: Vec<u64>,
        /// Engine iterations measured per instance.
        #[arg(long, default_value_t = 1000)]
        iters: u64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_iters: Option<u64>,
    /// Spanning-tree strategy: mst, akpw, or `given:<edge-list-path>`.
    #[arg(long, default_value = "mst")]
    tree: String,
    /// Grounded node, 1-based. Defaults: the separator root (laplacian), the
    /// last node (min-norm).
    #[arg(long)]
    ground: Option<usize>,
    /// Where to write the SolveReport JSON (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where to write the solution vector (one-column Matrix Market).
    #[arg(long, default_value = "solution.mtx")]
    solution: PathBuf,
    /// Record the error trace every this many iterations.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trace_stride: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Io { .. }
        | Error::DuplicateCoordinate { .. }
        | Error::NonPositiveWeight { .. } => 2,
        Error::IncompatibleSystem { .. } => 3,
        Error::Disconnected => 4,
        _ => 1,
    }
}

fn run(cli: Cli) -> ksparse::Result<ExitCode> {
    match cli.command {
        Command::Factorize { input, out, tol } => cmd_factorize(&input, out.as_deref(), tol),
        Command::SolveMinNorm { graph, b, solve } => cmd_solve_min_norm(&graph, &b, &solve),
        Command::SolveSquare { matrix, b, solve } => cmd_solve_square(&matrix, &b, &solve),
        Command::SolveLaplacian { graph, c, solve } => cmd_solve_laplacian(&graph, &c, &solve),
        Command::Stretch { graph, tree, ground } => cmd_stretch(&graph, &tree, ground),
        Command::Bench {
            family,
            sizes,
            seeds,
            iters,
            out,
        } => cmd_bench(&family, &sizes, &seeds, iters, out.as_deref()),
    }
}

fn parse_tree_strategy(spec: &str, graph: &WeightedGraph) -> ksparse::Result<TreeStrategy> {
    match spec {
        "mst" => Ok(TreeStrategy::MstInverseWeight),
        "akpw" => Ok(TreeStrategy::AkpwLike),
        other => {
            if let Some(path) = other.strip_prefix("given:") {
                let tree_graph = io::read_edge_list(Path::new(path))?;
                let ids = graphs::resolve_tree_edges(graph, &tree_graph)?;
                Ok(TreeStrategy::Given(ids))
            } else {
                Err(Error::InvalidArgument(format!(
                    "unknown tree strategy {other:?}; use mst, akpw or given:<path>"
                )))
            }
        }
    }
}

/// 1-based CLI node id to internal index.
fn ground_to_index(ground: Option<usize>, n: usize) -> ksparse::Result<Option<usize>> {
    match ground {
        None => Ok(None),
        Some(0) => Err(Error::InvalidArgument("node ids are 1-based".into())),
        Some(g) if g > n => Err(Error::InvalidArgument(format!(
            "grounded node {g} exceeds the node count {n}"
        ))),
        Some(g) => Ok(Some(g - 1)),
    }
}

fn emit_report(report: &SolveReport, path: Option<&Path>) -> ksparse::Result<()> {
    let json = report.to_json();
    match path {
        Some(p) => io::write_atomic(p, json.as_bytes()),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn solve_exit(report: &SolveReport) -> ExitCode {
    if report.target_met == Some(false) {
        ExitCode::from(5)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_factorize(input: &Path, out: Option<&Path>, tol: f64) -> ksparse::Result<ExitCode> {
    let (fact, q) = if input.is_dir() {
        let fact = KSparseFactorization::<f64>::import_dir(input)?;
        let q_rows = fact.densify_q();
        let q = ColMajorSparseMatrix::from_dense_rows(&q_rows)?;
        (fact, q)
    } else if input.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(input).map_err(|source| Error::Io {
            path: input.to_path_buf(),
            source,
        })?;
        let h = HMatrix::<f64>::from_json(&text)?;
        let fact = factorize_hmatrix(&h)?;
        let dense = h.densify();
        (fact, dense.to_sparse())
    } else {
        let q: ColMajorSparseMatrix = io::read_matrix_market(input)?;
        // trivial route with the smaller certified index
        let left = factorization::trivial_left(&q);
        let right = factorization::trivial_right(&q);
        let fact = match (left, right) {
            (Ok(l), Ok(r)) => {
                if l.k() <= r.k() {
                    l
                } else {
                    r
                }
            }
            (Ok(l), Err(_)) => l,
            (Err(_), Ok(r)) => r,
            (Err(e), Err(_)) => return Err(e),
        };
        (fact, q)
    };

    let report = fact.validate(&q, tol);
    if let Some(dir) = out {
        fact.export_dir(dir)?;
    }
    let summary = serde_json::json!({
        "schema": 1,
        "k": fact.k(),
        "m": fact.m(),
        "n": fact.n(),
        "p": fact.p(),
        "validation": if report.pass { "pass" } else { "fail" },
        "violations": report.violations,
        "max_product_error": report.max_product_error,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_solve_min_norm(graph: &Path, b_path: &Path, args: &SolveArgs) -> ksparse::Result<ExitCode> {
    let g: WeightedGraph = io::read_edge_list(graph)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let strategy = parse_tree_strategy(&args.tree, &g)?;
    // b is indexed by non-grounded nodes; the ground must be fixed up front
    let grounded = ground_to_index(args.ground, n)?.unwrap_or(n - 1);
    let split = SplitSystem::from_graph(&g, &strategy, Some(grounded))?;

    let b_user: DenseVector = io::read_vector(b_path)?;
    if b_user.dim() != n - 1 {
        return Err(Error::DimensionMismatch(format!(
            "b has {} entries but the reduced system has {} rows",
            b_user.dim(),
            n - 1
        )));
    }
    let mut b = DenseVector::zeros(n - 1);
    for v in 0..n {
        if v == grounded {
            continue;
        }
        let user_idx = if v > grounded { v - 1 } else { v };
        b[split.row_of_node(v).expect("non-grounded node")] = b_user[user_idx];
    }

    let opts = solve_options(args)?;
    let (x, report) = solvers::solve_min_norm(&split, &b, &opts)?;
    let x_edges = split.x_to_edge_space(&x).expect("graph-backed split");
    io::write_vector(&args.solution, &x_edges)?;
    emit_report(&report, args.report.as_deref())?;
    Ok(solve_exit(&report))
}

fn cmd_solve_square(matrix: &Path, b_path: &Path, args: &SolveArgs) -> ksparse::Result<ExitCode> {
    let fact = if matrix.extension().is_some_and(|e| e == "json") {
        let text = std::fs::read_to_string(matrix).map_err(|source| Error::Io {
            path: matrix.to_path_buf(),
            source,
        })?;
        factorize_hmatrix(&HMatrix::<f64>::from_json(&text)?)?
    } else {
        let a: ColMajorSparseMatrix = io::read_matrix_market(matrix)?;
        factorization::trivial_left(&a).or_else(|_| factorization::trivial_right(&a))?
    };
    let b: DenseVector = io::read_vector(b_path)?;
    let opts = solve_options(args)?;
    let (y, report) = solvers::solve_square(&fact, &b, &opts)?;
    io::write_vector(&args.solution, &y)?;
    emit_report(&report, args.report.as_deref())?;
    Ok(solve_exit(&report))
}

fn cmd_solve_laplacian(graph: &Path, c_path: &Path, args: &SolveArgs) -> ksparse::Result<ExitCode> {
    let g: WeightedGraph = io::read_edge_list(graph)?;
    let c: DenseVector = io::read_vector(c_path)?;
    let grounded = ground_to_index(args.ground, g.node_count())?;
    let strategy = parse_tree_strategy(&args.tree, &g)?;
    let sys = LaplacianSystem::new(g, c, grounded)?;
    let opts = solve_options(args)?;
    let (chi, report) = solvers::solve_laplacian(&sys, &opts, &strategy)?;
    io::write_vector(&args.solution, &chi)?;
    emit_report(&report, args.report.as_deref())?;
    Ok(solve_exit(&report))
}

fn solve_options(args: &SolveArgs) -> ksparse::Result<SolveOptions> {
    let mut opts = SolveOptions::new(args.eps, args.seed)?;
    opts.max_iters = args.max_iters;
    opts.trace_stride = args.trace_stride;
    Ok(opts)
}

fn cmd_stretch(graph: &Path, tree_spec: &str, ground: Option<usize>) -> ksparse::Result<ExitCode> {
    let g: WeightedGraph = io::read_edge_list(graph)?;
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let strategy = parse_tree_strategy(tree_spec, &g)?;
    let grounded = ground_to_index(ground, g.node_count())?;
    let tree = SpanningTree::build(&g, &strategy, grounded)?;
    let stretch = graphs::stretch(&g, &tree)?;
    let summary = serde_json::json!({
        "schema": 1,
        "n": g.node_count(),
        "m": g.edge_count(),
        "strategy": tree.strategy(),
        "grounded": tree.root() + 1,
        "stretch": stretch,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(ExitCode::SUCCESS)
}

fn bench_graph(family: &str, n: usize, seed: u64) -> WeightedGraph {
    match family {
        "path" => instances::path(n),
        "grid" => {
            let side = (n as f64).sqrt().round().max(2.0) as usize;
            instances::grid(side)
        }
        "random-tree" => instances::random_tree(n, seed),
        "random-graph" => instances::random_connected_graph(n, n * 3, seed),
        other => unreachable!("clap validated the family {other:?}"),
    }
}

fn cmd_bench(
    family: &str,
    sizes: &[usize],
    seeds: &[u64],
    iters: u64,
    out: Option<&Path>,
) -> ksparse::Result<ExitCode> {
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("sizes must be ascending".into()));
    }
    let mut csv = String::from(
        "family,n,seed,m,k,stretch,iterations,work_per_iter_mean,work_per_iter_max,wall_time_ms\n",
    );
    for &size in sizes {
        for &seed in seeds {
            let started = Instant::now();
            let g = bench_graph(family, size, seed);
            let row = bench_instance(&g, seed, iters)?;
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            csv.push_str(&format!(
                "{family},{},{seed},{},{},{},{},{:.3},{},{wall_ms:.2}\n",
                g.node_count(),
                g.edge_count(),
                row.k,
                row.stretch,
                row.iterations,
                row.work_mean,
                row.work_max,
            ));
        }
    }
    match out {
        Some(p) => io::write_atomic(p, csv.as_bytes())?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

struct BenchRow {
    k: usize,
    stretch: f64,
    iterations: u64,
    work_mean: f64,
    work_max: u64,
}

/// Tree instances exercise the incidence-inverse factorization; instances
/// with extra edges exercise the null-space basis of the min-norm solver.
fn bench_instance(g: &WeightedGraph, seed: u64, iters: u64) -> ksparse::Result<BenchRow> {
    use ksparse::engine::{init_state, SamplingDistribution};
    use ksparse::work;

    let split = SplitSystem::from_graph(g, &TreeStrategy::MstInverseWeight, None)?;
    let is_tree = split.f_cols() == 0;
    let (fact, h0) = if is_tree {
        let fact = split.einv().clone();
        let mut h0 = DenseVector::zeros(fact.p());
        h0[0] = 1.0;
        (fact, h0)
    } else {
        let q = solvers::build_nullspace_q(&split)?;
        let c = instances::random_zero_sum(g.node_count(), seed);
        let grounded = split.grounded().expect("graph split");
        let mut b = DenseVector::zeros(g.node_count() - 1);
        for v in 0..g.node_count() {
            if v != grounded {
                b[split.row_of_node(v).unwrap()] = c[v];
            }
        }
        let db = split.einv().d().mul_dense(&b)?;
        let mut h0 = DenseVector::zeros(q.p());
        for i in 0..split.einv().p() {
            h0[i] = db[i];
        }
        (q, h0)
    };

    let mut state = init_state(&fact, &h0)?;
    let dist = SamplingDistribution::new(&fact);
    let mut rng = ksparse::engine::seeded_rng(seed);
    let mut total = 0u64;
    let mut max_step = 0u64;
    let mut steps = 0u64;
    while steps < iters && !dist.is_empty() {
        let j = dist.sample(&mut rng);
        let ((), w) = work::metered(|| state.step(&fact, j));
        total += w;
        max_step = max_step.max(w);
        steps += 1;
    }
    Ok(BenchRow {
        k: fact.k(),
        stretch: split.stretch(),
        iterations: steps,
        work_mean: if steps > 0 {
            total as f64 / steps as f64
        } else {
            0.0
        },
        work_max: max_step,
    })
}
