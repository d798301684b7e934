//! Immutable sparse graphs and the structural primitives built on them.
//!
//! A [`Graph`] is either directed or undirected, has dense node ids `0..n`,
//! and never changes after construction. Node removal during attacks is
//! tracked by a [`NodeMask`] instead of mutating the graph.

mod io;
mod metrics;

pub use self::io::{read_edge_list, read_graph, write_graph, GRAPH_HEADER};
pub use self::metrics::{
    betweenness, betweenness_masked, clustering_coefficient, clustering_coefficients, degree,
    degree_masked, largest_connected_component, DegreeMode,
};

pub(crate) use self::metrics::centrality_key;

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Immutable graph with dense 0-based node ids.
///
/// Undirected edges are stored once as `(u, v)` with `u < v`. Adjacency is
/// kept as sorted per-node lists: out-neighbors, in-neighbors, and the
/// neighbors of the underlying undirected graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    nbrs: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, directed: bool, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canon = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let e = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge(u, v));
            }
            canon.push(e);
        }
        Ok(Self::from_canonical(n, directed, canon))
    }

    /// Builds a graph from an edge list that is known to be valid, after
    /// silently dropping self-loops and duplicates.
    pub fn from_edges_lossy(n: usize, directed: bool, edges: &[(usize, usize)]) -> Graph {
        let mut canon: Vec<(usize, usize)> = edges
            .iter()
            .filter(|(u, v)| u != v && *u < n && *v < n)
            .map(|&(u, v)| if directed { (u, v) } else { (u.min(v), u.max(v)) })
            .collect();
        canon.sort_unstable();
        canon.dedup();
        Self::from_canonical(n, directed, canon)
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize, directed: bool) -> Graph {
        Self::from_canonical(n, directed, Vec::new())
    }

    fn from_canonical(n: usize, directed: bool, mut edges: Vec<(usize, usize)>) -> Graph {
        edges.sort_unstable();
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out_adj[u].push(v);
            in_adj[v].push(u);
            if !directed {
                out_adj[v].push(u);
                in_adj[u].push(v);
            }
        }
        let mut nbrs = Vec::with_capacity(n);
        for v in 0..n {
            out_adj[v].sort_unstable();
            in_adj[v].sort_unstable();
            if directed {
                let mut all: Vec<usize> = out_adj[v].iter().chain(&in_adj[v]).copied().collect();
                all.sort_unstable();
                all.dedup();
                nbrs.push(all);
            } else {
                nbrs.push(out_adj[v].clone());
            }
        }
        Graph {
            n,
            directed,
            edges,
            out_adj,
            in_adj,
            nbrs,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// Edges in canonical sorted order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    /// Neighbors in the underlying undirected graph.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.nbrs[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Average degree: `2m/n` for undirected graphs, `m/n` for directed ones.
    pub fn average_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let m = self.edges.len() as f64;
        if self.directed {
            m / self.n as f64
        } else {
            2.0 * m / self.n as f64
        }
    }

    /// Same topology with directions dropped (reciprocal pairs merged).
    pub fn to_undirected(&self) -> Graph {
        if !self.directed {
            return self.clone();
        }
        Graph::from_edges_lossy(self.n, false, &self.edges)
    }

    /// Dense row-major 0/1 adjacency matrix; `a[u*n+v] = 1` iff `u -> v`.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for u in 0..n {
            for &v in &self.out_adj[u] {
                a[u * n + v] = 1.0;
            }
        }
        a
    }

    pub(crate) fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::NodeOutOfRange { node: v, n: self.n })
        } else {
            Ok(())
        }
    }
}

/// Alive/removed flag per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeMask {
    alive: Vec<bool>,
    alive_count: usize,
}

impl NodeMask {
    /// Every node alive.
    pub fn full(n: usize) -> NodeMask {
        NodeMask {
            alive: vec![true; n],
            alive_count: n,
        }
    }

    pub fn from_alive(alive: Vec<bool>) -> NodeMask {
        let alive_count = alive.iter().filter(|&&a| a).count();
        NodeMask { alive, alive_count }
    }

    pub fn len(&self) -> usize {
        self.alive.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alive.is_empty()
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn is_alive(&self, v: usize) -> bool {
        self.alive[v]
    }

    /// Marks `v` removed. Returns false if it was already removed.
    pub fn remove(&mut self, v: usize) -> bool {
        if self.alive[v] {
            self.alive[v] = false;
            self.alive_count -= 1;
            true
        } else {
            false
        }
    }

    pub fn alive_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter_map(|(v, &a)| a.then_some(v))
    }
}

/// The graph induced by the alive nodes of a mask.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    /// `original_ids[new] = old`; increasing, so id order is preserved.
    pub original_ids: Vec<usize>,
}

/// Materializes the graph on the alive nodes of `mask`, with compacted ids.
pub fn induced_subgraph(g: &Graph, mask: &NodeMask) -> Subgraph {
    let mut new_id = vec![usize::MAX; g.node_count()];
    let original_ids: Vec<usize> = mask.alive_nodes().collect();
    for (i, &v) in original_ids.iter().enumerate() {
        new_id[v] = i;
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .filter(|(u, v)| mask.is_alive(*u) && mask.is_alive(*v))
        .map(|&(u, v)| (new_id[u], new_id[v]))
        .collect();
    Subgraph {
        graph: Graph::from_canonical(original_ids.len(), g.is_directed(), edges),
        original_ids,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_edges() {
        assert!(matches!(
            Graph::from_edges(3, false, &[(0, 0)]),
            Err(Error::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::from_edges(3, false, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(1, 0))
        ));
        assert!(Graph::from_edges(3, true, &[(0, 1), (1, 0)]).is_ok());
        assert!(matches!(
            Graph::from_edges(3, true, &[(0, 3)]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
    }

    #[test]
    fn undirected_edges_are_canonical() {
        let g = Graph::from_edges(3, false, &[(2, 0), (1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(0, 2), (1, 2)]);
        assert_eq!(g.neighbors(2), &[0, 1]);
        assert!(g.has_edge(2, 0) && g.has_edge(0, 2));
    }

    #[test]
    fn induced_subgraph_edge_cases() {
        let k4 = Graph::from_edges(4, false, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        let full = induced_subgraph(&k4, &NodeMask::full(4));
        assert_eq!(full.graph, k4);

        let none = induced_subgraph(&k4, &NodeMask::from_alive(vec![false; 4]));
        assert_eq!(none.graph.node_count(), 0);
        assert_eq!(none.graph.edge_count(), 0);

        let mut mask = NodeMask::full(4);
        mask.remove(1);
        let sub = induced_subgraph(&k4, &mask);
        assert_eq!(sub.original_ids, vec![0, 2, 3]);
        assert_eq!(sub.graph.edges(), &[(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn mask_counts() {
        let mut m = NodeMask::full(3);
        assert!(m.remove(1));
        assert!(!m.remove(1));
        assert_eq!(m.alive_count(), 2);
        assert_eq!(m.alive_nodes().collect::<Vec<_>>(), vec![0, 2]);
    }
}
