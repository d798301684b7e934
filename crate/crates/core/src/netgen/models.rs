//! The individual network models. Each returns an undirected graph with
//! exactly `m` edges; orientation is applied afterwards by the caller.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng as _;

use super::adjust::{add_random_edges, adjust_set, EdgeSet};
use super::max_undirected_edges;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Rng;

fn check_feasible(n: usize, m: usize) -> Result<()> {
    let max = max_undirected_edges(n);
    if m > max {
        return Err(Error::InfeasibleEdgeCount(format!(
            "m={m} exceeds n(n-1)/2={max}"
        )));
    }
    Ok(())
}

/// Erdős–Rényi G(n, m): uniformly random distinct pairs.
pub fn gen_er(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut set = EdgeSet::new(false);
    add_random_edges(&mut set, n, m, rng);
    Ok(set.into_graph(n))
}

/// Barabási–Albert preferential attachment from a 3-clique, then exact
/// edge-count adjustment.
pub fn gen_ba(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let m0 = n.min(3);
    let mut set = EdgeSet::new(false);
    // Every edge endpoint appears once here, so a uniform draw is a
    // degree-proportional draw.
    let mut endpoints = Vec::with_capacity(2 * m + 6);
    for u in 0..m0 {
        for v in u + 1..m0 {
            set.insert(u, v);
            endpoints.extend([u, v]);
        }
    }
    if n > m0 {
        let seed_edges = set.len();
        let per_node = ((m.saturating_sub(seed_edges)) as f64 / (n - m0) as f64).round() as usize;
        let per_node = per_node.max(1);
        let mut targets = Vec::with_capacity(per_node);
        for t in m0..n {
            let a = per_node.min(t);
            targets.clear();
            while targets.len() < a {
                let cand = if endpoints.is_empty() {
                    rng.gen_range(0..t)
                } else {
                    endpoints[rng.gen_range(0..endpoints.len())]
                };
                if !targets.contains(&cand) {
                    targets.push(cand);
                }
            }
            for &v in &targets {
                set.insert(t, v);
                endpoints.extend([t, v]);
            }
        }
    }
    adjust_set(&mut set, n, m, &[], rng)?;
    Ok(set.into_graph(n))
}

/// Static scale-free model: node `i` (1-based) has weight `(i+theta)^-sigma`
/// and pairs are drawn with probability proportional to the product of
/// their weights until `m` distinct edges exist.
pub fn gen_sf(n: usize, m: usize, sigma: f64, theta: f64, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut set = EdgeSet::new(false);
    if n >= 2 && m > 0 {
        let weights: Vec<f64> = (1..=n).map(|i| (i as f64 + theta).powf(-sigma)).collect();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::InvalidParameter(format!("SF weights: {e}")))?;
        let budget = 50 * m + 1000;
        let mut attempts = 0;
        while set.len() < m && attempts < budget {
            set.insert(dist.sample(rng), dist.sample(rng));
            attempts += 1;
        }
    }
    // Near-complete targets can exhaust the weighted draw; top up uniformly.
    add_random_edges(&mut set, n, m, rng);
    Ok(set.into_graph(n))
}

/// Degree-preserving double-edge swaps, each accepted only if it strictly
/// increases degree assortativity. `attempts` swaps are tried.
pub fn rewire_assortative(g: &Graph, attempts: usize, rng: &mut Rng) -> Graph {
    let n = g.node_count();
    let deg: Vec<f64> = (0..n).map(|v| g.neighbors(v).len() as f64).collect();
    let mut set = EdgeSet::from_graph(g);
    if set.len() < 2 {
        return g.clone();
    }
    for _ in 0..attempts {
        let i = rng.gen_range(0..set.len());
        let mut j = rng.gen_range(0..set.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = set.edges()[i];
        let (mut c, mut d) = set.edges()[j];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        // (a,b),(c,d) -> (a,d),(c,b)
        if a == d || c == b || set.contains(a, d) || set.contains(c, b) {
            continue;
        }
        // With the degree sequence fixed, assortativity is monotone in the
        // sum of endpoint-degree products over edges.
        let before = deg[a] * deg[b] + deg[c] * deg[d];
        let after = deg[a] * deg[d] + deg[c] * deg[b];
        if after > before {
            set.remove(a, b);
            set.remove(c, d);
            set.insert(a, d);
            set.insert(c, b);
        }
    }
    set.into_graph(n)
}

/// Onion-like scale-free: an SF graph followed by `2n` assortative rewiring
/// attempts.
pub fn gen_os(n: usize, m: usize, sigma: f64, theta: f64, rng: &mut Rng) -> Result<Graph> {
    let sf = gen_sf(n, m, sigma, theta, rng)?;
    Ok(rewire_assortative(&sf, 2 * n, rng))
}

/// Ring lattice where each node links to its `k/2` nearest nodes on each
/// side. The returned list starts with the distance-1 loop.
fn ring_lattice(n: usize, k: usize, set: &mut EdgeSet) -> Vec<(usize, usize)> {
    let mut loop_edges = Vec::new();
    if n < 2 {
        return loop_edges;
    }
    for i in 0..n {
        let j = (i + 1) % n;
        if set.insert(i, j) {
            loop_edges.push((i.min(j), i.max(j)));
        }
    }
    for d in 2..=k / 2 {
        for i in 0..n {
            set.insert(i, (i + d) % n);
        }
    }
    loop_edges
}

/// Newman–Watts small world: ring lattice plus uniformly random shortcuts;
/// lattice edges are never rewired.
pub fn gen_swnw(n: usize, m: usize, k: usize, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut set = EdgeSet::new(false);
    let protected = ring_lattice(n, k, &mut set);
    adjust_set(&mut set, n, m, &protected, rng)?;
    Ok(set.into_graph(n))
}

/// Watts–Strogatz small world: a ring lattice thickened with further ring
/// distances up to `m` edges, then each non-loop edge has one endpoint
/// rewired with probability `beta`. The distance-1 loop is kept intact.
pub fn gen_swws(n: usize, m: usize, k: usize, beta: f64, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut set = EdgeSet::new(false);
    let protected = ring_lattice(n, k, &mut set);
    let mut d = k / 2 + 1;
    while set.len() < m && d <= n / 2 {
        for i in 0..n {
            if set.len() == m {
                break;
            }
            set.insert(i, (i + d) % n);
        }
        d += 1;
    }
    adjust_set(&mut set, n, m, &protected, rng)?;

    let mut lattice: Vec<(usize, usize)> = set.edges().to_vec();
    lattice.sort_unstable();
    for (u, v) in lattice {
        let is_loop = v == u + 1 || (u == 0 && v + 1 == n);
        if is_loop || !rng.gen_bool(beta) {
            continue;
        }
        // Keep `u`, move the other endpoint.
        if set.edges().len() >= max_undirected_edges(n) {
            break;
        }
        for _ in 0..32 {
            let w = rng.gen_range(0..n);
            if w != u && !set.contains(u, w) {
                set.remove(u, v);
                set.insert(u, w);
                break;
            }
        }
    }
    Ok(set.into_graph(n))
}

/// q-snapback: backbone chain `0-1-...-(n-1)`; node `i` links back to each
/// earlier node `j <= i-2` with probability `q`. When `q` is `None` it is
/// chosen so that the expected edge count equals `m`.
pub fn gen_qs(n: usize, m: usize, q: Option<f64>, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    if m + 1 < n {
        return Err(Error::InfeasibleEdgeCount(format!(
            "QS backbone needs {} edges, m={m}",
            n - 1
        )));
    }
    let mut set = EdgeSet::new(false);
    let backbone: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    for &(u, v) in &backbone {
        set.insert(u, v);
    }
    let candidates = if n >= 2 { (n - 1) * (n - 2) / 2 } else { 0 };
    let q = q.unwrap_or_else(|| {
        if candidates == 0 {
            0.0
        } else {
            ((m + 1 - n) as f64 / candidates as f64).clamp(0.0, 1.0)
        }
    });
    if q > 0.0 {
        for i in 2..n {
            for j in 0..i - 1 {
                if rng.gen_bool(q) {
                    set.insert(j, i);
                }
            }
        }
    }
    adjust_set(&mut set, n, m, &backbone, rng)?;
    Ok(set.into_graph(n))
}

fn wire_cycle(nodes: &[usize], set: &mut EdgeSet, budget: usize) {
    match nodes.len() {
        0 | 1 => {}
        2 => {
            if set.len() < budget {
                set.insert(nodes[0], nodes[1]);
            }
        }
        len => {
            for i in 0..len {
                if set.len() >= budget {
                    return;
                }
                set.insert(nodes[i], nodes[(i + 1) % len]);
            }
        }
    }
}

/// Random motif networks: a chain of cycles of length `size` covering every
/// node (consecutive motifs share one node), then either random removals or
/// further motifs on random node tuples until exactly `m` edges exist.
fn gen_motifs(n: usize, m: usize, size: usize, rng: &mut Rng) -> Result<Graph> {
    check_feasible(n, m)?;
    let mut set = EdgeSet::new(false);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut placed: Vec<usize> = Vec::with_capacity(n);
    let mut next = 0;
    let mut motif = Vec::with_capacity(size);
    while next < n {
        motif.clear();
        if placed.is_empty() {
            let take = size.min(n);
            motif.extend_from_slice(&order[..take]);
            next = take;
        } else {
            let anchor = placed[rng.gen_range(0..placed.len())];
            motif.push(anchor);
            let take = (size - 1).min(n - next);
            motif.extend_from_slice(&order[next..next + take]);
            next += take;
            // Short final motif: borrow already-placed nodes.
            let mut guard = 0;
            while motif.len() < size && placed.len() + take >= size && guard < 64 * size {
                let extra = placed[rng.gen_range(0..placed.len())];
                if !motif.contains(&extra) {
                    motif.push(extra);
                }
                guard += 1;
            }
        }
        let fresh: Vec<usize> = motif.iter().copied().filter(|v| !placed.contains(v)).collect();
        placed.extend(fresh);
        wire_cycle(&motif, &mut set, usize::MAX);
    }

    if set.len() > m {
        adjust_set(&mut set, n, m, &[], rng)?;
    } else {
        let mut stale = 0;
        while set.len() < m && stale < 64 && n >= size {
            let before = set.len();
            let tuple: Vec<usize> = rand::seq::index::sample(rng, n, size).into_vec();
            wire_cycle(&tuple, &mut set, m);
            stale = if set.len() == before { stale + 1 } else { 0 };
        }
        add_random_edges(&mut set, n, m, rng);
    }
    Ok(set.into_graph(n))
}

/// Random triangle network.
pub fn gen_rt(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    gen_motifs(n, m, 3, rng)
}

/// Random hexagon network.
pub fn gen_rh(n: usize, m: usize, rng: &mut Rng) -> Result<Graph> {
    gen_motifs(n, m, 6, rng)
}
