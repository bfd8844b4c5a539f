use std::path::PathBuf;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("duplicate coordinate ({row}, {col}) at {path}:{line}")]
    DuplicateCoordinate {
        path: PathBuf,
        line: usize,
        row: usize,
        col: usize,
    },

    #[error("non-positive edge weight {weight} at {path}:{line}")]
    NonPositiveWeight {
        path: PathBuf,
        line: usize,
        weight: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("column {index} of {matrix} is zero")]
    ZeroColumn { matrix: &'static str, index: usize },

    #[error("row {index} of {matrix} is zero")]
    ZeroRow { matrix: &'static str, index: usize },

    #[error("column {index} of Q has non-positive squared norm {norm}: invalid direction set")]
    ZeroDirection { index: usize, norm: f64 },

    #[error(
        "1x1 diagonal block at index {index} of the hierarchical matrix is zero; \
         its factorization column would leave row {index} of D zero"
    )]
    ZeroDiagonalBlock { index: usize },

    #[error(
        "rank condition violated: block rows {row_lo}..{row_hi} x cols {col_lo}..{col_hi} \
         has numerical rank {found} > {bound} (sigma_{{r+1}}/sigma_1 = {ratio:.3e})"
    )]
    RankViolation {
        row_lo: usize,
        row_hi: usize,
        col_lo: usize,
        col_hi: usize,
        found: usize,
        bound: usize,
        ratio: f64,
    },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge set is not a spanning tree of the graph: {0}")]
    NotSpanning(String),

    #[error("incompatible right-hand side: relative residual {residual:.3e} of the initial guess exceeds tolerance")]
    IncompatibleSystem { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
