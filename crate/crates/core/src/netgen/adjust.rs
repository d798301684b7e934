use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::Model;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{rng_from_seed, Rng};

/// Edge list with O(1) membership, insertion and random removal.
///
/// Iteration follows insertion order (modulo swap-removals), never hash
/// order, so results are reproducible for a fixed seed.
#[derive(Clone, Debug, Default)]
pub(crate) struct EdgeSet {
    directed: bool,
    list: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl EdgeSet {
    pub fn new(directed: bool) -> EdgeSet {
        EdgeSet {
            directed,
            ..Default::default()
        }
    }

    pub fn from_graph(g: &Graph) -> EdgeSet {
        let mut set = EdgeSet::new(g.is_directed());
        for &e in g.edges() {
            set.insert(e.0, e.1);
        }
        set
    }

    fn key(&self, u: usize, v: usize) -> (usize, usize) {
        if self.directed {
            (u, v)
        } else {
            (u.min(v), u.max(v))
        }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.index.contains_key(&self.key(u, v))
    }

    /// Adds `u-v` unless it is a self-loop or already present.
    pub fn insert(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let k = self.key(u, v);
        if self.index.contains_key(&k) {
            return false;
        }
        self.index.insert(k, self.list.len());
        self.list.push(k);
        true
    }

    pub fn remove(&mut self, u: usize, v: usize) -> bool {
        let k = self.key(u, v);
        let Some(i) = self.index.remove(&k) else {
            return false;
        };
        self.list.swap_remove(i);
        if i < self.list.len() {
            let moved = self.list[i];
            self.index.insert(moved, i);
        }
        true
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.list
    }

    pub fn into_graph(self, n: usize) -> Graph {
        Graph::from_edges_lossy(n, self.directed, &self.list)
    }
}

fn max_edges(n: usize, directed: bool) -> usize {
    let pairs = n * n.saturating_sub(1);
    if directed {
        pairs
    } else {
        pairs / 2
    }
}

/// Adds uniformly random non-edges until `set` holds `target` edges.
pub(crate) fn add_random_edges(set: &mut EdgeSet, n: usize, target: usize, rng: &mut Rng) {
    let max = max_edges(n, set.directed);
    debug_assert!(target <= max);
    if set.len() >= target {
        return;
    }
    let missing = target - set.len();
    // Rejection sampling while the graph is sparse; otherwise sample from the
    // explicit complement.
    if (set.len() + missing) * 2 <= max {
        while set.len() < target {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            set.insert(u, v);
        }
    } else {
        let mut complement = Vec::with_capacity(max - set.len());
        for u in 0..n {
            let start = if set.directed { 0 } else { u + 1 };
            for v in start..n {
                if u != v && !set.contains(u, v) {
                    complement.push((u, v));
                }
            }
        }
        let (chosen, _) = complement.partial_shuffle(rng, missing);
        for &(u, v) in chosen.iter() {
            set.insert(u, v);
        }
    }
}

/// Removes uniformly random unprotected edges until `set` holds `target`.
pub(crate) fn remove_random_edges(
    set: &mut EdgeSet,
    target: usize,
    protected: &HashSet<(usize, usize)>,
    rng: &mut Rng,
) -> Result<()> {
    if set.len() <= target {
        return Ok(());
    }
    let mut removable: Vec<(usize, usize)> = set
        .edges()
        .iter()
        .copied()
        .filter(|e| !protected.contains(e))
        .collect();
    removable.sort_unstable();
    let excess = set.len() - target;
    if removable.len() < excess {
        return Err(Error::InfeasibleEdgeCount(format!(
            "cannot reach {target} edges: only {} unprotected edges of {}",
            removable.len(),
            set.len()
        )));
    }
    let (chosen, _) = removable.partial_shuffle(rng, excess);
    for &(u, v) in chosen.iter() {
        set.remove(u, v);
    }
    Ok(())
}

pub(crate) fn adjust_set(
    set: &mut EdgeSet,
    n: usize,
    m_target: usize,
    protected: &[(usize, usize)],
    rng: &mut Rng,
) -> Result<()> {
    let max = max_edges(n, set.directed);
    if m_target > max {
        return Err(Error::InfeasibleEdgeCount(format!(
            "target {m_target} exceeds the maximum {max} for n={n}"
        )));
    }
    let protected: HashSet<(usize, usize)> =
        protected.iter().map(|&(u, v)| set.key(u, v)).collect();
    if set.len() > m_target {
        remove_random_edges(set, m_target, &protected, rng)
    } else {
        add_random_edges(set, n, m_target, rng);
        Ok(())
    }
}

/// Uniformly adds or removes edges until exactly `m_target` remain. Edges in
/// `protected` are never removed.
pub fn adjust_edge_count(
    g: &Graph,
    m_target: usize,
    protected: &[(usize, usize)],
    seed: u64,
) -> Result<Graph> {
    if g.edge_count() == m_target {
        return Ok(g.clone());
    }
    let mut set = EdgeSet::from_graph(g);
    adjust_set(&mut set, g.node_count(), m_target, protected, &mut rng_from_seed(seed))?;
    Ok(set.into_graph(g.node_count()))
}

/// Converts between directed and undirected forms.
///
/// Undirected to directed keeps the model's mandated patterns: the QS
/// backbone `i -> i+1` with every other edge pointing back to the lower id,
/// and the SW loop `0 -> 1 -> ... -> n-1 -> 0`. All remaining edges get a
/// uniformly random orientation. Directed to undirected drops directions.
pub fn set_direction(g: &Graph, directed: bool, model: Model, seed: u64) -> Graph {
    if g.is_directed() == directed {
        return g.clone();
    }
    if !directed {
        return g.to_undirected();
    }
    let n = g.node_count();
    let mut rng = rng_from_seed(seed);
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| match model {
            Model::Qs => {
                if v == u + 1 {
                    (u, v)
                } else {
                    (v, u)
                }
            }
            Model::SwNw | Model::SwWs if n >= 3 && v == u + 1 => (u, v),
            Model::SwNw | Model::SwWs if n >= 3 && u == 0 && v == n - 1 => (v, u),
            _ => {
                if rng.gen_bool(0.5) {
                    (u, v)
                } else {
                    (v, u)
                }
            }
        })
        .collect();
    Graph::from_edges_lossy(n, true, &edges)
}

/// Degree assortativity: Pearson correlation of endpoint degrees over the
/// edges of the underlying undirected graph.
///
/// Returns [`Error::Undefined`] when there are no edges or all endpoint
/// degrees are equal.
pub fn assortativity(g: &Graph) -> Result<f64> {
    let und = g.to_undirected();
    let m = und.edge_count() as f64;
    if und.edge_count() == 0 {
        return Err(Error::Undefined("assortativity of an edgeless graph"));
    }
    let deg = |v: usize| und.neighbors(v).len() as f64;
    let (mut prod, mut sum, mut sq) = (0.0, 0.0, 0.0);
    for &(u, v) in und.edges() {
        let (j, k) = (deg(u), deg(v));
        prod += j * k;
        sum += 0.5 * (j + k);
        sq += 0.5 * (j * j + k * k);
    }
    let mean = sum / m;
    let num = prod / m - mean * mean;
    let den = sq / m - mean * mean;
    if den.abs() <= 1e-12 * (sq / m).max(1.0) {
        return Err(Error::Undefined("assortativity with constant degrees"));
    }
    Ok((num / den).clamp(-1.0, 1.0))
}
