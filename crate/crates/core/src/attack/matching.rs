//! Maximum matching for directed controllability.
//!
//! A digraph is split into a bipartite graph of out-copies and in-copies;
//! the arc `u -> v` becomes the edge `u_out - v_in`. The minimum number of
//! driver nodes is `max(1, n - |matching|)`.

use std::collections::VecDeque;

use crate::graph::{Graph, NodeMask};

const FREE: usize = usize::MAX;

/// Hopcroft–Karp maximum bipartite matching. `adj[u]` lists the right-side
/// vertices adjacent to left vertex `u`.
pub fn hopcroft_karp(n_right: usize, adj: &[Vec<usize>]) -> usize {
    let n_left = adj.len();
    let mut match_l = vec![FREE; n_left];
    let mut match_r = vec![FREE; n_right];
    let mut dist = vec![0usize; n_left];
    let mut queue = VecDeque::with_capacity(n_left);
    let mut size = 0;

    loop {
        // BFS layers from free left vertices.
        queue.clear();
        for u in 0..n_left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut it = vec![0usize; n_left];
        for u in 0..n_left {
            if match_l[u] == FREE && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut it)
            {
                size += 1;
            }
        }
    }
    size
}

// Iterative DFS along the BFS layering.
fn augment(
    root: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    it: &mut [usize],
) -> bool {
    let mut path: Vec<usize> = vec![root];
    while let Some(&u) = path.last() {
        if it[u] == adj[u].len() {
            dist[u] = usize::MAX;
            path.pop();
            continue;
        }
        let v = adj[u][it[u]];
        it[u] += 1;
        let w = match_r[v];
        if w == FREE {
            // Flip the alternating path ending at v.
            let mut v = v;
            while let Some(u) = path.pop() {
                let prev = match_l[u];
                match_l[u] = v;
                match_r[v] = u;
                v = prev;
            }
            return true;
        }
        if dist[w] != usize::MAX && dist[w] == dist[u] + 1 {
            path.push(w);
        }
    }
    false
}

/// Size of a maximum matching in the out/in split of `g`. Undirected graphs
/// are read as symmetric digraphs.
pub fn max_matching_directed(g: &Graph) -> usize {
    let adj: Vec<Vec<usize>> = (0..g.node_count())
        .map(|u| g.out_neighbors(u).to_vec())
        .collect();
    hopcroft_karp(g.node_count(), &adj)
}

/// Maximum matching of the digraph induced by the alive nodes.
pub fn max_matching_masked(g: &Graph, mask: &NodeMask) -> usize {
    let adj: Vec<Vec<usize>> = (0..g.node_count())
        .map(|u| {
            if mask.is_alive(u) {
                g.out_neighbors(u)
                    .iter()
                    .copied()
                    .filter(|&v| mask.is_alive(v))
                    .collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    hopcroft_karp(g.node_count(), &adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_and_star() {
        let chain = Graph::from_edges(4, true, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(max_matching_directed(&chain), 3);
        let star = Graph::from_edges(4, true, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(max_matching_directed(&star), 1);
        let cycle = Graph::from_edges(3, true, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(max_matching_directed(&cycle), 3);
    }

    #[test]
    fn needs_augmenting_paths() {
        // Greedy 0->1 first blocks 2->1; the optimum re-routes 0->3.
        let adj = vec![vec![1, 3], vec![], vec![1], vec![]];
        assert_eq!(hopcroft_karp(4, &adj), 2);
        let adj = vec![vec![0, 1], vec![0], vec![1, 2], vec![2]];
        assert_eq!(hopcroft_karp(3, &adj), 3);
    }

    #[test]
    fn masked_chain() {
        let chain = Graph::from_edges(4, true, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut mask = NodeMask::full(4);
        mask.remove(1);
        assert_eq!(max_matching_masked(&chain, &mask), 1);
    }
}
