//! CSV readers and writers for edge lists, point clouds, signals and dense
//! matrices.
//!
//! Complex entries are written as `a+bi` with 17 significant digits, which
//! round-trips every `f64` exactly. Readers accept the same form as well as
//! plain real decimals.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use tvfrft_core::graph::{build_graph_from_edge_list, Edge, Graph, PointCloud};
use tvfrft_core::linalg::{C64, CMat};
use tvfrft_core::spectral::TimeVertexSignal;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error("{path}: file is empty")]
    Empty { path: PathBuf },
    #[error("{path}, line {line}: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}: expected header `{expected}`, found `{found}`")]
    Header { path: PathBuf, expected: String, found: String },
    #[error("{path}: {source}")]
    Graph { path: PathBuf, source: tvfrft_core::Error },
}

fn file_error(path: &Path, source: std::io::Error) -> IoError {
    IoError::File { path: path.to_path_buf(), source }
}

fn malformed(path: &Path, line: u64, message: impl Into<String>) -> IoError {
    IoError::Malformed { path: path.to_path_buf(), line, message: message.into() }
}

/// `a+bi` with 17 significant digits in each part.
pub fn format_complex(z: C64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
}

/// Parse a real decimal, `a+bi`, `a-bi` or a pure imaginary `bi`.
pub fn parse_complex(s: &str) -> Option<C64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().ok().map(|re| C64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // The split is the last sign that does not belong to an exponent.
    let split = (1..bytes.len()).rev().find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imaginary = |t: &str| match t {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => t.parse::<f64>().ok(),
    };
    match split {
        Some(k) => Some(C64::new(body[..k].trim().parse().ok()?, imaginary(body[k..].trim())?)),
        None => Some(C64::new(0.0, imaginary(body)?)),
    }
}

fn open(path: &Path) -> Result<String, IoError> {
    let mut text = String::new();
    File::open(path).and_then(|mut f| f.read_to_string(&mut text)).map_err(|e| file_error(path, e))?;
    if text.trim().is_empty() {
        return Err(IoError::Empty { path: path.to_path_buf() });
    }
    Ok(text)
}

fn reader(text: &str, headers: bool) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().has_headers(headers).trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn records(path: &Path, text: &str, headers: bool) -> Result<Vec<(u64, csv::StringRecord)>, IoError> {
    let mut rdr = reader(text, headers);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            malformed(path, line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push((line, rec));
    }
    Ok(rows)
}

fn header(path: &Path, text: &str) -> Result<Vec<String>, IoError> {
    let mut rdr = reader(text, true);
    let h = rdr.headers().map_err(|e| malformed(path, 1, e.to_string()))?;
    Ok(h.iter().map(str::to_string).collect())
}

/// Read an edge list with header `src,dst,weight`. The vertex count is
/// `vertices` when given, otherwise one more than the largest index.
pub fn read_edges(path: &Path, vertices: Option<usize>, directed: bool) -> Result<Graph, IoError> {
    let text = open(path)?;
    let found = header(path, &text)?;
    if found != ["src", "dst", "weight"] {
        return Err(IoError::Header { path: path.to_path_buf(), expected: "src,dst,weight".into(), found: found.join(",") });
    }
    let mut edges = Vec::new();
    for (line, rec) in records(path, &text, true)? {
        let index = |k: usize| rec[k].parse::<usize>().map_err(|_| malformed(path, line, format!("bad vertex index `{}`", &rec[k])));
        let (src, dst) = (index(0)?, index(1)?);
        let weight: f64 = rec[2].parse().map_err(|_| malformed(path, line, format!("bad weight `{}`", &rec[2])))?;
        edges.push(Edge::new(src, dst, weight));
    }
    if edges.is_empty() && vertices.is_none() {
        return Err(IoError::Empty { path: path.to_path_buf() });
    }
    let n = vertices.unwrap_or_else(|| edges.iter().map(|e| e.src.max(e.dst) + 1).max().unwrap_or(0));
    build_graph_from_edge_list(n, &edges, directed).map_err(|source| IoError::Graph { path: path.to_path_buf(), source })
}

/// Edge list of `graph` as CSV text; undirected edges appear once.
pub fn edges_csv(graph: &Graph) -> String {
    let mut out = String::from("src,dst,weight\n");
    for e in &graph.edges {
        out.push_str(&format!("{},{},{}\n", e.src, e.dst, e.weight.re));
    }
    out
}

pub fn write_edges(path: &Path, graph: &Graph) -> Result<(), IoError> {
    std::fs::write(path, edges_csv(graph)).map_err(|e| file_error(path, e))
}

/// Read a point cloud with header `x1,...,xd`.
pub fn read_points(path: &Path, kernel_width: f64, threshold: f64) -> Result<PointCloud, IoError> {
    let text = open(path)?;
    let found = header(path, &text)?;
    let expected: Vec<String> = (1..=found.len()).map(|k| format!("x{k}")).collect();
    if found != expected {
        return Err(IoError::Header { path: path.to_path_buf(), expected: expected.join(","), found: found.join(",") });
    }
    let mut points = Vec::new();
    for (line, rec) in records(path, &text, true)? {
        let p = rec
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| malformed(path, line, format!("bad coordinate `{v}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        points.push(p);
    }
    if points.is_empty() {
        return Err(IoError::Empty { path: path.to_path_buf() });
    }
    Ok(PointCloud { points, kernel_width, sparsify_threshold: threshold })
}

/// Read a headerless CSV of real or `a+bi` entries into a dense matrix.
pub fn read_matrix(path: &Path) -> Result<CMat, IoError> {
    let text = open(path)?;
    let rows = records(path, &text, false)?;
    let ncols = rows[0].1.len();
    let mut data = Vec::with_capacity(rows.len() * ncols);
    for (line, rec) in &rows {
        if rec.len() != ncols {
            return Err(malformed(path, *line, format!("expected {ncols} columns, found {}", rec.len())));
        }
        for v in rec.iter() {
            data.push(parse_complex(v).ok_or_else(|| malformed(path, *line, format!("bad value `{v}`")))?);
        }
    }
    Ok(CMat::from_row_slice(rows.len(), ncols, &data))
}

/// Write a dense matrix as a headerless CSV of `a+bi` entries.
pub fn write_matrix(path: &Path, m: &CMat) -> Result<(), IoError> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let mut f = File::create(path).map_err(|e| file_error(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| file_error(path, e))
}

/// Read an `N × T` signal: one row per vertex, one column per time instant.
pub fn read_signal(path: &Path) -> Result<TimeVertexSignal, IoError> {
    read_matrix(path).map(TimeVertexSignal::new)
}

pub fn write_signal(path: &Path, x: &TimeVertexSignal) -> Result<(), IoError> {
    write_matrix(path, &x.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_strings_round_trip() {
        for z in [C64::new(1.5, -2.25), C64::new(-0.0, 0.0), C64::new(1e-300, -3e200), C64::new(0.1, 0.2)] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }

    #[test]
    fn parses_assorted_forms() {
        assert_eq!(parse_complex("2.5"), Some(C64::new(2.5, 0.0)));
        assert_eq!(parse_complex("1-2i"), Some(C64::new(1.0, -2.0)));
        assert_eq!(parse_complex("-1e-3+4E+2i"), Some(C64::new(-1e-3, 400.0)));
        assert_eq!(parse_complex("3i"), Some(C64::new(0.0, 3.0)));
        assert_eq!(parse_complex("-i"), Some(C64::new(0.0, -1.0)));
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex(""), None);
    }
}
