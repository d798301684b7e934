//! Graph text format v1.
//!
//! ```text
//! #robnet-graph v1 directed=0 n=4 m=3
//! 0 1
//! 1 2
//! 2 3
//! ```
//!
//! The header is followed by exactly `m` lines `<u> <v>` with 0-based ASCII
//! decimal ids and LF line endings.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use super::Graph;
use crate::error::{Error, Result};

pub const GRAPH_HEADER: &str = "#robnet-graph v1";

pub fn write_graph<W: Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{} directed={} n={} m={}",
        GRAPH_HEADER,
        u8::from(g.is_directed()),
        g.node_count(),
        g.edge_count()
    )?;
    for &(u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

fn header_field<'a>(tok: Option<&'a str>, key: &str) -> Result<&'a str> {
    tok.and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| Error::parse(1, format!("expected `{key}=` in header")))
}

fn parse_num(s: &str, line: usize) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("not a decimal id: {s:?}")));
    }
    s.parse()
        .map_err(|_| Error::parse(line, format!("number too large: {s}")))
}

/// Reads a graph in text format v1, rejecting self-loops, duplicates,
/// out-of-range ids and edge-count mismatches.
pub fn read_graph<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input"))??;
    let rest = header
        .strip_prefix(GRAPH_HEADER)
        .ok_or_else(|| Error::parse(1, "missing `#robnet-graph v1` header"))?;
    let mut toks = rest.split_ascii_whitespace();
    let directed = match header_field(toks.next(), "directed")? {
        "0" => false,
        "1" => true,
        other => return Err(Error::parse(1, format!("bad directed flag {other:?}"))),
    };
    let n = parse_num(header_field(toks.next(), "n")?, 1)?;
    let m = parse_num(header_field(toks.next(), "m")?, 1)?;
    if toks.next().is_some() {
        return Err(Error::parse(1, "trailing header fields"));
    }

    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        let lineno = idx + 2;
        if line.is_empty() && edges.len() == m {
            continue;
        }
        let mut parts = line.split(' ');
        let (Some(u), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(lineno, "expected `<u> <v>`"));
        };
        if edges.len() == m {
            return Err(Error::parse(lineno, format!("more than m={m} edge lines")));
        }
        edges.push((parse_num(u, lineno)?, parse_num(v, lineno)?));
    }
    if edges.len() != m {
        return Err(Error::Format(format!(
            "header declares m={m} but found {} edge lines",
            edges.len()
        )));
    }
    Graph::from_edges(n, directed, &edges)
}

/// Reads a plain whitespace-separated edge list with arbitrary integer ids.
///
/// Lines starting with `#` or `%` are skipped. Ids are compacted to `0..n`
/// in ascending order; self-loops and repeated edges are dropped.
pub fn read_edge_list<R: BufRead>(input: R, directed: bool) -> Result<Graph> {
    let mut raw = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        let mut parts = t.split(|c: char| c.is_whitespace() || c == ',');
        let mut next = || -> Result<i64> {
            let tok = parts
                .by_ref()
                .find(|p| !p.is_empty())
                .ok_or_else(|| Error::parse(idx + 1, "expected two node ids"))?;
            tok.parse()
                .map_err(|_| Error::parse(idx + 1, format!("bad node id {tok:?}")))
        };
        raw.push((next()?, next()?));
    }
    let mut ids = BTreeMap::new();
    for &(u, v) in &raw {
        ids.insert(u, 0usize);
        ids.insert(v, 0usize);
    }
    for (i, slot) in ids.values_mut().enumerate() {
        *slot = i;
    }
    let edges: Vec<(usize, usize)> = raw.iter().map(|(u, v)| (ids[u], ids[v])).collect();
    Ok(Graph::from_edges_lossy(ids.len(), directed, &edges))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Graph> {
        read_graph(s.as_bytes())
    }

    #[test]
    fn round_trip_bytes() {
        let g = Graph::from_edges(4, true, &[(2, 3), (0, 1), (1, 2)]).unwrap();
        let mut buf = Vec::new();
        write_graph(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text, "#robnet-graph v1 directed=1 n=4 m=3\n0 1\n1 2\n2 3\n");
        assert_eq!(parse(&text).unwrap(), g);
    }

    #[test]
    fn loader_rejects_bad_input() {
        assert!(matches!(
            parse("#robnet-graph v1 directed=0 n=3 m=1\n1 1\n"),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            parse("#robnet-graph v1 directed=0 n=3 m=2\n0 1\n1 0\n"),
            Err(Error::DuplicateEdge(..))
        ));
        assert!(matches!(
            parse("#robnet-graph v1 directed=1 n=3 m=1\n0 3\n"),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
        assert!(parse("#robnet-graph v1 directed=1 n=3 m=2\n0 1\n").is_err());
        assert!(parse("#robnet-graph v1 directed=1 n=3 m=1\n0 1\n1 2\n").is_err());
        assert!(parse("#robnet-graph v2 directed=1 n=3 m=0\n").is_err());
        assert!(parse("#robnet-graph v1 directed=1 n=3 m=1\n0  1\n").is_err());
        assert!(parse("#robnet-graph v1 directed=1 n=3 m=1\n-0 1\n").is_err());
    }

    #[test]
    fn edge_list_is_compacted() {
        let g = read_edge_list("# comment\n10 20\n20 30\n30 30\n20 10\n".as_bytes(), false)
            .unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }
}
