//! File ingestion and emission: Matrix Market coordinate files and weighted
//! edge lists.
//!
//! Matrix Market files use the exact header
//! `%%MatrixMarket matrix coordinate real general` with 1-based indices.
//! Coordinate duplicates are an error, never summed. Writing then reading a
//! matrix reproduces its entries bit for bit (values are printed with Rust's
//! shortest round-trip formatting).
//!
//! Edge lists hold one `u v w` edge per line with 1-based node ids and a
//! strictly positive weight; `#` starts a comment line.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graphs::WeightedGraph;
use crate::sparse::{ColMajorSparseMatrix, DenseVector, SparseVector};
use crate::Scalar;

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

/// Reads a Matrix Market coordinate file into a column-major sparse matrix.
pub fn read_matrix_market<T: Scalar>(path: impl AsRef<Path>) -> Result<ColMajorSparseMatrix<T>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file"))?;
    if header.trim() != MM_HEADER {
        return Err(parse_err(
            path,
            lineno + 1,
            format!("expected header \"{MM_HEADER}\""),
        ));
    }

    let mut dims: Option<(usize, usize, usize)> = None;
    let mut seen: std::collections::HashSet<(usize, usize)> = std::collections::HashSet::new();
    let mut triples: Vec<(usize, usize, T)> = Vec::new();

    for (idx, raw) in lines {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if dims.is_none() {
            if fields.len() != 3 {
                return Err(parse_err(path, lineno, "expected \"rows cols nnz\""));
            }
            let parse = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(path, lineno, format!("invalid count {s:?}")))
            };
            dims = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            continue;
        }
        let (rows, cols, _) = dims.unwrap();
        if fields.len() != 3 {
            return Err(parse_err(path, lineno, "expected \"i j value\""));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid row index {:?}", fields[0])))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid col index {:?}", fields[1])))?;
        let v: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid value {:?}", fields[2])))?;
        if i == 0 || i > rows || j == 0 || j > cols {
            return Err(parse_err(
                path,
                lineno,
                format!("coordinate ({i}, {j}) out of range for {rows}x{cols}"),
            ));
        }
        if !seen.insert((i, j)) {
            return Err(Error::DuplicateCoordinate {
                path: path.to_path_buf(),
                line: lineno,
                row: i,
                col: j,
            });
        }
        triples.push((i - 1, j - 1, T::of(v)));
    }

    let (rows, cols, nnz) = dims.ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    if triples.len() != nnz {
        return Err(parse_err(
            path,
            1,
            format!("size line promises {nnz} entries, found {}", triples.len()),
        ));
    }
    let mut per_col: Vec<Vec<(usize, T)>> = vec![Vec::new(); cols];
    for (i, j, v) in triples {
        per_col[j].push((i, v));
    }
    let columns = per_col
        .into_iter()
        .map(|entries| SparseVector::new(rows, entries))
        .collect::<Result<_>>()?;
    ColMajorSparseMatrix::from_columns(rows, columns)
}

/// Writes a matrix in coordinate format, entries in column-major order.
pub fn write_matrix_market<T: Scalar>(
    path: impl AsRef<Path>,
    m: &ColMajorSparseMatrix<T>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(MM_HEADER);
    out.push('\n');
    out.push_str(&format!("{} {} {}\n", m.rows(), m.cols(), m.nnz()));
    for j in 0..m.cols() {
        for &(i, v) in m.column(j).entries() {
            out.push_str(&format!("{} {} {}\n", i + 1, j + 1, v.as_f64()));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Reads a one-column Matrix Market file as a dense vector.
pub fn read_vector<T: Scalar>(path: impl AsRef<Path>) -> Result<DenseVector<T>> {
    let path = path.as_ref();
    let m = read_matrix_market::<T>(path)?;
    if m.cols() != 1 {
        return Err(parse_err(
            path,
            1,
            format!("expected a one-column matrix, got {} columns", m.cols()),
        ));
    }
    Ok(m.column(0).to_dense())
}

/// Writes a dense vector as a one-column Matrix Market file.
pub fn write_vector<T: Scalar>(path: impl AsRef<Path>, v: &DenseVector<T>) -> Result<()> {
    let m = ColMajorSparseMatrix::from_columns(v.dim(), vec![SparseVector::from_dense(v.as_slice())])
        .expect("vector column has matching dimension");
    write_matrix_market(path, &m)
}

/// Reads a weighted edge list. Node count is the largest id mentioned.
pub fn read_edge_list<T: Scalar>(path: impl AsRef<Path>) -> Result<WeightedGraph<T>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut edges: Vec<(usize, usize, T)> = Vec::new();
    let mut max_node = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(path, lineno, "expected \"u v w\""));
        }
        let u: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid node id {:?}", fields[0])))?;
        let v: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid node id {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(path, lineno, format!("invalid weight {:?}", fields[2])))?;
        if u == 0 || v == 0 {
            return Err(parse_err(path, lineno, "node ids are 1-based"));
        }
        if u == v {
            return Err(parse_err(path, lineno, format!("self-loop at node {u}")));
        }
        if !(w > 0.0) {
            return Err(Error::NonPositiveWeight {
                path: path.to_path_buf(),
                line: lineno,
                weight: w,
            });
        }
        max_node = max_node.max(u).max(v);
        edges.push((u - 1, v - 1, T::of(w)));
    }
    WeightedGraph::new(max_node, edges)
}

/// Writes a graph back out as an edge list.
pub fn write_edge_list<T: Scalar>(path: impl AsRef<Path>, g: &WeightedGraph<T>) -> Result<()> {
    let mut out = String::new();
    for &(u, v, w) in g.edges() {
        out.push_str(&format!("{} {} {}\n", u + 1, v + 1, w.as_f64()));
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

/// Writes via a temp file and rename so failures leave no partial output.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let wrap = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("tmp-write");
    {
        let mut f = fs::File::create(&tmp).map_err(wrap)?;
        f.write_all(bytes).map_err(wrap)?;
        f.sync_all().map_err(wrap)?;
    }
    fs::rename(&tmp, path).map_err(wrap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let f = tempfile::NamedTempFile::new().unwrap();
        fs::write(f.path(), contents).unwrap();
        f
    }

    #[test]
    fn reads_identity_in_coordinate_format() {
        let f = write_tmp(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 1.0\n",
        );
        let m: ColMajorSparseMatrix = read_matrix_market(f.path()).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.column(0).entries(), &[(0, 1.0)]);
        assert_eq!(m.column(1).entries(), &[(1, 1.0)]);
    }

    #[test]
    fn rejects_duplicate_coordinates_without_summing() {
        let f = write_tmp(
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 1 2.0\n",
        );
        match read_matrix_market::<f64>(f.path()) {
            Err(Error::DuplicateCoordinate { line, row, col, .. }) => {
                assert_eq!((line, row, col), (4, 1, 1));
            }
            other => panic!("expected duplicate coordinate error, got {other:?}"),
        }
    }

    #[test]
    fn reads_single_edge_graph() {
        let f = write_tmp("# comment\n1 2 1.0\n");
        let g: WeightedGraph = read_edge_list(f.path()).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), &[(0, 1, 1.0)]);
    }

    #[test]
    fn reports_malformed_edge_line_with_its_number() {
        let f = write_tmp("1 2 1.0\n1 2\n");
        match read_edge_list::<f64>(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        let f = write_tmp("1 2 0.0\n");
        match read_edge_list::<f64>(f.path()) {
            Err(Error::NonPositiveWeight { line, weight, .. }) => {
                assert_eq!(line, 1);
                assert_eq!(weight, 0.0);
            }
            other => panic!("expected weight error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_header() {
        let f = write_tmp("%%MatrixMarket matrix array real general\n1 1 0\n");
        match read_matrix_market::<f64>(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    proptest! {
        // Bit-for-bit round trip across write/read.
        #[test]
        fn matrix_market_round_trips(
            rows in 1usize..8,
            cols in 1usize..8,
            raw in proptest::collection::vec((0usize..8, 0usize..8, -1e6f64..1e6f64), 0..24),
        ) {
            let mut per_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
            let mut seen = std::collections::HashSet::new();
            for (i, j, v) in raw {
                let (i, j) = (i % rows, j % cols);
                if seen.insert((i, j)) {
                    per_col[j].push((i, v));
                }
            }
            let columns: Vec<SparseVector> = per_col
                .into_iter()
                .map(|e| SparseVector::new(rows, e).unwrap())
                .collect();
            let m = ColMajorSparseMatrix::from_columns(rows, columns).unwrap();

            let f = tempfile::NamedTempFile::new().unwrap();
            write_matrix_market(f.path(), &m).unwrap();
            let back: ColMajorSparseMatrix = read_matrix_market(f.path()).unwrap();
            prop_assert_eq!(m, back);
        }
    }
}
