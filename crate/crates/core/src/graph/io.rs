//! Plain-text dataset loading.
//!
//! Formats:
//! - edge list: one undirected edge per line, two whitespace-separated
//!   0-based node ids; lines starting with '#' are ignored;
//! - attributes: comma-separated decimal floats, row i = node i;
//! - anchors: one pair per line, "id_in_G1 <ws> id_in_G2".
//!
//! Node ids must be dense. For a plain graph the node count is inferred as
//! max id + 1 and gaps are rejected; for an attributed graph the attribute
//! row count fixes the node count (nodes left isolated by edge deletion are
//! then legal).

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;

use super::{AnchorRole, AnchorSet, Graph};
use crate::{Error, Result};

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { path: path.display().to_string(), line, msg: msg.into() }
}

fn read_pair_lines(path: &Path) -> Result<Vec<(usize, usize)>> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut it = trimmed.split_whitespace();
        let (a, b) = match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(parse_err(path, idx + 1, "expected exactly two node ids")),
        };
        let a: usize = a
            .parse()
            .map_err(|_| parse_err(path, idx + 1, format!("invalid node id {a:?}")))?;
        let b: usize = b
            .parse()
            .map_err(|_| parse_err(path, idx + 1, format!("invalid node id {b:?}")))?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

/// Read an undirected edge list.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Vec<(usize, usize)>> {
    read_pair_lines(path.as_ref())
}

/// Read a ground-truth anchor list.
pub fn load_anchors(path: impl AsRef<Path>) -> Result<AnchorSet> {
    let pairs = read_pair_lines(path.as_ref())?;
    AnchorSet::new(pairs, AnchorRole::Full)
}

/// Read a dense attribute matrix from comma-separated values.
pub fn load_attributes(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let row: Vec<f64> = trimmed
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(path, idx + 1, format!("invalid float {tok:?}")))
            })
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Shape(format!(
                    "{}: row {} has {} columns, expected {w}",
                    path.display(),
                    idx + 1,
                    row.len()
                )));
            }
            _ => {}
        }
        rows.push(row);
    }
    let width = width.unwrap_or(0);
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), width), flat)
        .map_err(|e| Error::Shape(format!("{}: {e}", path.display())))
}

/// Build one graph from an edge list and optional attributes.
///
/// With attributes the row count fixes n. Without them n is inferred as
/// one past the largest id seen in the edge list or in this side's anchor
/// list, and every id below that must appear in one of the two (nodes are
/// never remapped silently).
fn build_graph(
    edge_path: &Path,
    attr_path: Option<&Path>,
    anchor_ids: &[usize],
) -> Result<Graph> {
    let edges = load_edge_list(edge_path)?;
    let attrs = attr_path.map(load_attributes).transpose()?;
    let max_edge_id = edges.iter().map(|&(u, v)| u.max(v)).max();
    let n = match &attrs {
        Some(a) => {
            if let Some(m) = max_edge_id {
                if m >= a.nrows() {
                    return Err(Error::Range(format!(
                        "{}: node id {m} exceeds attribute row count {}",
                        edge_path.display(),
                        a.nrows()
                    )));
                }
            }
            a.nrows()
        }
        None => {
            let max_anchor = anchor_ids.iter().copied().max();
            let n = max_edge_id.max(max_anchor).map_or(0, |m| m + 1);
            let mut seen = vec![false; n];
            for &(u, v) in &edges {
                seen[u] = true;
                seen[v] = true;
            }
            for &a in anchor_ids {
                seen[a] = true;
            }
            if let Some(missing) = seen.iter().position(|s| !s) {
                return Err(Error::Range(format!(
                    "{}: node id {missing} appears in no edge or anchor; ids must be dense",
                    edge_path.display()
                )));
            }
            n
        }
    };
    Graph::new(n, &edges, attrs)
}

/// Load a full alignment instance: two graphs and the ground-truth anchors.
pub fn load_dataset(
    edges1: impl AsRef<Path>,
    edges2: impl AsRef<Path>,
    attrs1: Option<&Path>,
    attrs2: Option<&Path>,
    anchors: impl AsRef<Path>,
) -> Result<(Graph, Graph, AnchorSet)> {
    let anchor_set = load_anchors(anchors)?;
    let ids1: Vec<usize> = anchor_set.pairs().iter().map(|p| p.0).collect();
    let ids2: Vec<usize> = anchor_set.pairs().iter().map(|p| p.1).collect();
    let g1 = build_graph(edges1.as_ref(), attrs1, &ids1)?;
    let g2 = build_graph(edges2.as_ref(), attrs2, &ids2)?;
    anchor_set.validate_against(&g1, &g2)?;
    Ok((g1, g2, anchor_set))
}

/// Write an undirected edge list (u < v per line).
pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    for (u, v) in g.undirected_edges() {
        writeln!(out, "{u}\t{v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Write a dense matrix as comma-separated values, one row per line.
pub fn write_dense_csv(path: impl AsRef<Path>, m: &Array2<f64>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    for row in m.rows() {
        let mut first = true;
        for v in row {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{v}")?;
            first = false;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}
