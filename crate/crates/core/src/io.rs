//! CSV formats: edge lists `i,j`, weighted entries `i,j,w` and outcomes `id,y`.

use std::collections::HashSet;
use std::io::{Read, Write};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matrix::{DenseSymmetric, SparseGraph, SymmetricOperator};

#[derive(Deserialize)]
struct EdgeRow {
    i: usize,
    j: usize,
}

#[derive(Deserialize)]
struct OutcomeRow {
    id: usize,
    y: f64,
}

/// Reads undirected edges listed once each. `row` in errors counts data rows
/// from 1, excluding the header.
pub fn read_edge_list<R: Read>(reader: R) -> Result<Vec<(usize, usize)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (k, rec) in rdr.deserialize::<EdgeRow>().enumerate() {
        let row = k + 1;
        let EdgeRow { i, j } = rec.map_err(|e| Error::Parse(format!("edge list row {row}: {e}")))?;
        if i == j {
            return Err(Error::InvalidEdge(i, j));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::DuplicateEdge { row, i, j });
        }
        edges.push((i, j));
    }
    Ok(edges)
}

/// Reads outcomes; ids must be exactly `0..n` in any order.
pub fn read_outcomes<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut rows = Vec::new();
    for (k, rec) in rdr.deserialize::<OutcomeRow>().enumerate() {
        let r = rec.map_err(|e| Error::Parse(format!("outcomes row {}: {e}", k + 1)))?;
        rows.push((r.id, r.y));
    }
    let n = rows.len();
    let mut y = vec![f64::NAN; n];
    let mut filled = vec![false; n];
    for (id, v) in rows {
        if id >= n {
            return Err(Error::IdMismatch(format!("outcome id {id} outside 0..{n}")));
        }
        if std::mem::replace(&mut filled[id], true) {
            return Err(Error::IdMismatch(format!("outcome id {id} listed twice")));
        }
        y[id] = v;
    }
    Ok(y)
}

/// Binds an edge list to outcomes: every endpoint must have an outcome.
pub fn bind(edges: &[(usize, usize)], y: &[f64]) -> Result<SparseGraph> {
    let n = y.len();
    if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(Error::IdMismatch(format!("edge ({i}, {j}) references a node without an outcome")));
    }
    SparseGraph::from_edges(n, edges)
}

pub fn write_edge_list<W: Write>(writer: W, g: &SparseGraph) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j"])?;
    for (i, j) in g.edges() {
        w.write_record([i.to_string(), j.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the nonzero upper-triangle entries of `a`.
pub fn write_weighted<W: Write>(writer: W, a: &DenseSymmetric) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j", "w"])?;
    for i in 0..a.dim() {
        for j in (i + 1)..a.dim() {
            let v = a.get(i, j);
            if v != 0.0 {
                w.write_record([i.to_string(), j.to_string(), v.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads `i,j,w` rows into a dense matrix with `n` nodes.
pub fn read_weighted<R: Read>(reader: R, n: usize) -> Result<DenseSymmetric> {
    #[derive(Deserialize)]
    struct Row {
        i: usize,
        j: usize,
        w: f64,
    }
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut entries = std::collections::HashMap::new();
    for (k, rec) in rdr.deserialize::<Row>().enumerate() {
        let r = rec.map_err(|e| Error::Parse(format!("weighted row {}: {e}", k + 1)))?;
        if r.i == r.j || r.i >= n || r.j >= n {
            return Err(Error::InvalidEdge(r.i, r.j));
        }
        if entries.insert((r.i.min(r.j), r.i.max(r.j)), r.w).is_some() {
            return Err(Error::DuplicateEdge { row: k + 1, i: r.i, j: r.j });
        }
    }
    DenseSymmetric::from_upper(n, |i, j| entries.get(&(i, j)).copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = SparseGraph::from_edges(4, &[(0, 1), (2, 1), (3, 0)]).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&mut buf, &g).unwrap();
        let edges = read_edge_list(buf.as_slice()).unwrap();
        assert_eq!(SparseGraph::from_edges(4, &edges).unwrap(), g);
    }

    #[test]
    fn duplicate_rows_are_reported() {
        let text = "i,j\n0,1\n1,2\n1,0\n";
        assert_eq!(read_edge_list(text.as_bytes()), Err(Error::DuplicateEdge { row: 3, i: 1, j: 0 }));
    }

    #[test]
    fn outcome_binding() {
        let y = read_outcomes("id,y\n2,3\n0,1\n1,2\n".as_bytes()).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
        assert!(matches!(read_outcomes("id,y\n0,1\n2,2\n".as_bytes()), Err(Error::IdMismatch(_))));
        assert!(matches!(bind(&[(0, 3)], &y), Err(Error::IdMismatch(_))));
        assert_eq!(bind(&[(0, 1)], &y).unwrap().num_edges(), 1);
    }

    #[test]
    fn weighted_round_trip() {
        let a = DenseSymmetric::from_upper(3, |i, j| 0.1 * (i + j) as f64).unwrap();
        let mut buf = Vec::new();
        write_weighted(&mut buf, &a).unwrap();
        assert_eq!(read_weighted(buf.as_slice(), 3).unwrap(), a);
    }
}
