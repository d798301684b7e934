use std::collections::VecDeque;

use super::{Graph, NodeMask};
use crate::error::Result;

/// Which adjacency a degree counts. All modes agree on undirected graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    Total,
}

pub fn degree(g: &Graph, v: usize, mode: DegreeMode) -> Result<usize> {
    g.check_node(v)?;
    Ok(if !g.is_directed() {
        g.out_neighbors(v).len()
    } else {
        match mode {
            DegreeMode::In => g.in_neighbors(v).len(),
            DegreeMode::Out => g.out_neighbors(v).len(),
            DegreeMode::Total => g.in_neighbors(v).len() + g.out_neighbors(v).len(),
        }
    })
}

/// Degree of `v` counting only alive neighbors.
pub fn degree_masked(g: &Graph, v: usize, mode: DegreeMode, mask: &NodeMask) -> Result<usize> {
    g.check_node(v)?;
    let count = |list: &[usize]| list.iter().filter(|&&u| mask.is_alive(u)).count();
    Ok(if !g.is_directed() {
        count(g.out_neighbors(v))
    } else {
        match mode {
            DegreeMode::In => count(g.in_neighbors(v)),
            DegreeMode::Out => count(g.out_neighbors(v)),
            DegreeMode::Total => count(g.in_neighbors(v)) + count(g.out_neighbors(v)),
        }
    })
}

/// Local clustering coefficient on the underlying undirected graph; 0 when
/// the node has fewer than two neighbors.
pub fn clustering_coefficient(g: &Graph, v: usize) -> Result<f64> {
    g.check_node(v)?;
    Ok(local_clustering(g, v, &mut vec![false; g.node_count()]))
}

/// Clustering coefficient of every node.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    let mut mark = vec![false; g.node_count()];
    (0..g.node_count())
        .map(|v| local_clustering(g, v, &mut mark))
        .collect()
}

fn local_clustering(g: &Graph, v: usize, mark: &mut [bool]) -> f64 {
    let nb = g.neighbors(v);
    let k = nb.len();
    if k < 2 {
        return 0.0;
    }
    for &u in nb {
        mark[u] = true;
    }
    let mut links = 0usize;
    for &u in nb {
        links += g.neighbors(u).iter().filter(|&&w| w > u && mark[w]).count();
    }
    for &u in nb {
        mark[u] = false;
    }
    links as f64 / (k * (k - 1) / 2) as f64
}

/// Brandes shortest-path betweenness, unnormalized, endpoints excluded.
///
/// Directed graphs count ordered pairs along directed paths; undirected
/// graphs count each unordered pair once.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    brandes(g, None)
}

/// Betweenness of the graph induced by the alive nodes; removed nodes get 0.
pub fn betweenness_masked(g: &Graph, mask: &NodeMask) -> Vec<f64> {
    brandes(g, Some(mask))
}

fn brandes(g: &Graph, mask: Option<&NodeMask>) -> Vec<f64> {
    let n = g.node_count();
    let alive = |v: usize| mask.map_or(true, |m| m.is_alive(v));
    let mut cb = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        if !alive(s) {
            continue;
        }
        // Visited nodes from the previous source are exactly the stack.
        for &v in &stack {
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        stack.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.out_neighbors(v) {
                if !alive(w) {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        // Predecessors are recovered from in-neighbors one level closer.
        for &w in stack.iter().rev() {
            for &v in g.in_neighbors(w) {
                if alive(v) && dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    for &v in &stack {
        sigma[v] = 0.0;
        delta[v] = 0.0;
    }
    if !g.is_directed() {
        for c in &mut cb {
            *c /= 2.0;
        }
    }
    cb
}

/// Size of the largest (weakly) connected component among alive nodes.
pub fn largest_connected_component(g: &Graph, mask: &NodeMask) -> usize {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    let mut best = 0;
    for s in mask.alive_nodes() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        queue.push_back(s);
        let mut size = 0;
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in g.neighbors(v) {
                if mask.is_alive(w) && !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}

/// Integer key for comparing floating centralities: values that agree to
/// about six decimal places compare equal, so symmetric nodes whose scores
/// differ only by rounding fall through to the id tie-break.
pub(crate) fn centrality_key(x: f64) -> i64 {
    (x * 1_048_576.0).round() as i64
}
