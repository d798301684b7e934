//! Node-removal attacks and the robustness curves they produce.
//!
//! After `i` removals from an `N`-node network the connectivity curve holds
//! `p(i) = N_LCC(i) / (N - i)` and the controllability curve holds
//! `q(i) = N_D(i) / (N - i)`, for `i = 0..N`. `v(0)` is the intact network
//! and `v(N-1) = 1` always, since a single node is its own component and its
//! own driver.

mod matching;
mod rank;

pub use self::matching::{hopcroft_karp, max_matching_directed, max_matching_masked};
pub use self::rank::{
    adjacency_rank, adjacency_rank_masked, driver_count_undirected, integer_rank, rank_mod_p, PRIME_31,
    PRIME_61,
};

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::graph::{
    betweenness, betweenness_masked, centrality_key, degree, degree_masked,
    largest_connected_component, DegreeMode, Graph, NodeMask,
};
use crate::rng::{rng_from_seed, Rng};
use crate::text::sig17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttackKind {
    /// Random attack (RA).
    Random,
    /// Targeted degree-based attack (TD).
    Degree,
    /// Targeted betweenness-based attack (TB).
    Betweenness,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Random => "ra",
            AttackKind::Degree => "td",
            AttackKind::Betweenness => "tb",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ra" | "random" => Ok(AttackKind::Random),
            "td" | "degree" => Ok(AttackKind::Degree),
            "tb" | "betweenness" => Ok(AttackKind::Betweenness),
            _ => Err(Error::InvalidParameter(format!("unknown attack {s:?}"))),
        }
    }
}

/// How the next victim is chosen.
///
/// Targeted attacks re-rank the surviving graph after every removal unless
/// `recompute` is off, in which case the ranking of the intact graph is used
/// throughout. Random attacks ignore `recompute`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AttackStrategy {
    pub kind: AttackKind,
    pub recompute: bool,
    pub seed: u64,
}

impl AttackStrategy {
    pub fn new(kind: AttackKind, seed: u64) -> AttackStrategy {
        AttackStrategy {
            kind,
            recompute: true,
            seed,
        }
    }

    pub fn random(seed: u64) -> AttackStrategy {
        Self::new(AttackKind::Random, seed)
    }

    pub fn degree() -> AttackStrategy {
        Self::new(AttackKind::Degree, 0)
    }

    pub fn betweenness() -> AttackStrategy {
        Self::new(AttackKind::Betweenness, 0)
    }

    pub fn static_rank(mut self) -> AttackStrategy {
        self.recompute = false;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Connectivity,
    Controllability,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Connectivity => "conn",
            Metric::Controllability => "ctrl",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "conn" | "connectivity" => Ok(Metric::Connectivity),
            "ctrl" | "controllability" => Ok(Metric::Controllability),
            _ => Err(Error::InvalidParameter(format!("unknown metric {s:?}"))),
        }
    }
}

/// A robustness curve. Simulated curves have one value per removal step
/// (`values.len() == n`); predicted curves live on a fixed fractional grid.
#[derive(Clone, Debug, PartialEq)]
pub struct RobustnessCurve {
    pub metric: Metric,
    pub values: Vec<f64>,
    /// Node count of the network the curve describes.
    pub n: usize,
}

impl RobustnessCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Arithmetic mean of the curve, used as a scalar robustness.
    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Writes `delta,value` rows with 17 significant digits. `delta` is
    /// `i/N` for simulated curves and `j/(L-1)` for grid curves.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "delta,value")?;
        let len = self.values.len();
        let on_grid = len != self.n;
        for (i, v) in self.values.iter().enumerate() {
            let delta = if on_grid {
                if len > 1 {
                    i as f64 / (len - 1) as f64
                } else {
                    0.0
                }
            } else {
                i as f64 / self.n as f64
            };
            writeln!(out, "{},{}", sig17(delta), sig17(*v))?;
        }
        Ok(())
    }

    /// Reads the `value` column of a curve CSV. `n` is taken from the row
    /// count, so grid curves must have their `n` restored by the caller.
    pub fn read_csv<R: BufRead>(input: R, metric: Metric) -> Result<RobustnessCurve> {
        let mut values = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if i == 0 {
                if line.trim() != "delta,value" {
                    return Err(Error::parse(1, "expected header `delta,value`"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(i + 1, "expected two columns"))?;
            values.push(
                v.trim()
                    .parse()
                    .map_err(|_| Error::parse(i + 1, format!("bad value {v:?}")))?,
            );
        }
        Ok(RobustnessCurve {
            metric,
            n: values.len(),
            values,
        })
    }
}

/// Pointwise absolute error between a true and a predicted curve, and its
/// mean.
#[derive(Clone, Debug, PartialEq)]
pub struct PredictionError {
    pub pointwise: Vec<f64>,
    pub mean: f64,
}

pub fn prediction_error(truth: &[f64], pred: &[f64]) -> Result<PredictionError> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    let pointwise: Vec<f64> = truth.iter().zip(pred).map(|(t, p)| (t - p).abs()).collect();
    let mean = if pointwise.is_empty() {
        0.0
    } else {
        pointwise.iter().sum::<f64>() / pointwise.len() as f64
    };
    Ok(PredictionError { pointwise, mean })
}

/// Picks successive attack targets on one graph.
pub struct Attacker<'g> {
    graph: &'g Graph,
    strategy: AttackStrategy,
    rng: Rng,
    static_order: Option<Vec<usize>>,
}

impl<'g> Attacker<'g> {
    pub fn new(graph: &'g Graph, strategy: AttackStrategy) -> Attacker<'g> {
        let static_order = match strategy.kind {
            AttackKind::Random => None,
            _ if strategy.recompute => None,
            AttackKind::Degree => {
                let deg: Vec<i64> = (0..graph.node_count())
                    .map(|v| degree(graph, v, DegreeMode::Total).unwrap() as i64)
                    .collect();
                Some(rank_desc(&deg))
            }
            AttackKind::Betweenness => {
                let key: Vec<i64> = betweenness(graph).into_iter().map(centrality_key).collect();
                Some(rank_desc(&key))
            }
        };
        Attacker {
            graph,
            strategy,
            rng: rng_from_seed(strategy.seed),
            static_order,
        }
    }

    /// Next node to remove. Ties go to the smallest id.
    pub fn next_target(&mut self, mask: &NodeMask) -> Result<usize> {
        if mask.alive_count() == 0 {
            return Err(Error::EmptyMask);
        }
        if let Some(order) = &self.static_order {
            return Ok(*order.iter().find(|&&v| mask.is_alive(v)).expect("alive node"));
        }
        let g = self.graph;
        Ok(match self.strategy.kind {
            AttackKind::Random => {
                let k = self.rng.gen_range(0..mask.alive_count());
                mask.alive_nodes().nth(k).expect("alive node")
            }
            AttackKind::Degree => argmax(
                mask.alive_nodes()
                    .map(|v| (v, degree_masked(g, v, DegreeMode::Total, mask).unwrap() as i64)),
            ),
            AttackKind::Betweenness => {
                let b = betweenness_masked(g, mask);
                argmax(mask.alive_nodes().map(|v| (v, centrality_key(b[v]))))
            }
        })
    }
}

fn argmax(scores: impl Iterator<Item = (usize, i64)>) -> usize {
    let mut best: Option<(usize, i64)> = None;
    for (v, s) in scores {
        if best.map_or(true, |(_, bs)| s > bs) {
            best = Some((v, s));
        }
    }
    best.expect("non-empty").0
}

fn rank_desc(keys: &[i64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| keys[b].cmp(&keys[a]).then(a.cmp(&b)));
    order
}

/// One-shot target selection with a fresh attacker.
pub fn next_target(g: &Graph, mask: &NodeMask, strategy: AttackStrategy) -> Result<usize> {
    Attacker::new(g, strategy).next_target(mask)
}

/// The first `n - 1` nodes removed by the attack, in order.
pub fn attack_sequence(g: &Graph, strategy: AttackStrategy) -> Vec<usize> {
    let n = g.node_count();
    let mut attacker = Attacker::new(g, strategy);
    let mut mask = NodeMask::full(n);
    let mut order = Vec::with_capacity(n.saturating_sub(1));
    for _ in 1..n {
        let v = attacker.next_target(&mask).expect("alive node");
        mask.remove(v);
        order.push(v);
    }
    order
}

fn simulate(
    g: &Graph,
    strategy: AttackStrategy,
    metric: Metric,
    mut measure: impl FnMut(&NodeMask) -> usize,
) -> RobustnessCurve {
    let n = g.node_count();
    let mut attacker = Attacker::new(g, strategy);
    let mut mask = NodeMask::full(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            let v = attacker.next_target(&mask).expect("alive node");
            mask.remove(v);
        }
        values.push(measure(&mask) as f64 / (n - i) as f64);
    }
    RobustnessCurve { metric, values, n }
}

/// Fraction of surviving nodes in the largest (weakly) connected component.
pub fn connectivity_curve(g: &Graph, strategy: AttackStrategy) -> RobustnessCurve {
    simulate(g, strategy, Metric::Connectivity, |mask| {
        largest_connected_component(g, mask)
    })
}

/// Minimum driver nodes of the masked graph: `max(1, n - |E*|)` for
/// directed graphs, `max(1, n - rank A)` for undirected ones.
pub fn driver_nodes_masked(g: &Graph, mask: &NodeMask) -> usize {
    let alive = mask.alive_count();
    let covered = if g.is_directed() {
        max_matching_masked(g, mask)
    } else {
        adjacency_rank_masked(g, mask)
    };
    1.max(alive - covered)
}

pub fn driver_nodes(g: &Graph) -> usize {
    driver_nodes_masked(g, &NodeMask::full(g.node_count()))
}

/// Driver-node density of the surviving network.
pub fn controllability_curve(g: &Graph, strategy: AttackStrategy) -> RobustnessCurve {
    simulate(g, strategy, Metric::Controllability, |mask| {
        driver_nodes_masked(g, mask)
    })
}

pub fn robustness_curve(g: &Graph, strategy: AttackStrategy, metric: Metric) -> RobustnessCurve {
    match metric {
        Metric::Connectivity => connectivity_curve(g, strategy),
        Metric::Controllability => controllability_curve(g, strategy),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn und(n: usize, e: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, false, e).unwrap()
    }

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        und(n, &e)
    }

    #[test]
    fn targets() {
        let star = und(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let full = NodeMask::full(5);
        assert_eq!(next_target(&star, &full, AttackStrategy::degree()).unwrap(), 0);
        let p3 = und(3, &[(0, 1), (1, 2)]);
        assert_eq!(
            next_target(&p3, &NodeMask::full(3), AttackStrategy::betweenness()).unwrap(),
            1
        );
        let a = attack_sequence(&star, AttackStrategy::random(9));
        assert_eq!(a, attack_sequence(&star, AttackStrategy::random(9)));
        assert!(next_target(&star, &NodeMask::from_alive(vec![false; 5]), AttackStrategy::degree())
            .is_err());
    }

    #[test]
    fn complete_graph_stays_connected() {
        let k5 = complete(5);
        for s in [
            AttackStrategy::random(1),
            AttackStrategy::degree(),
            AttackStrategy::betweenness(),
        ] {
            assert!(connectivity_curve(&k5, s).values.iter().all(|&p| p == 1.0));
        }
    }

    #[test]
    fn path_p4_under_degree_attack() {
        let p4 = und(4, &[(0, 1), (1, 2), (2, 3)]);
        let c = connectivity_curve(&p4, AttackStrategy::degree());
        // Node 1 goes first: {0} and {2,3} remain.
        assert_eq!(c.values[0], 1.0);
        assert!((c.values[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.values[3], 1.0);
    }

    #[test]
    fn controllability_examples() {
        let chain = Graph::from_edges(4, true, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut mask = NodeMask::full(4);
        mask.remove(1);
        assert_eq!(driver_nodes_masked(&chain, &mask), 2);

        let empty = Graph::empty(6, true);
        let c = controllability_curve(&empty, AttackStrategy::random(3));
        assert!(c.values.iter().all(|&q| q == 1.0));
        let c = controllability_curve(&Graph::empty(6, false), AttackStrategy::degree());
        assert!(c.values.iter().all(|&q| q == 1.0));
        let c = controllability_curve(&complete(5), AttackStrategy::betweenness());
        assert_eq!(*c.values.last().unwrap(), 1.0);
    }

    #[test]
    fn prediction_error_examples() {
        let e = prediction_error(&[1.0, 0.5, 1.0], &[1.0, 0.5, 1.0]).unwrap();
        assert_eq!(e.mean, 0.0);
        let e = prediction_error(&[0.5; 4], &[0.6; 4]).unwrap();
        assert!((e.mean - 0.1).abs() < 1e-12);
        let e = prediction_error(&[1.0, 0.5, 1.0], &[0.8, 0.7, 1.0]).unwrap();
        assert!((e.pointwise[0] - 0.2).abs() < 1e-12);
        assert!((e.pointwise[1] - 0.2).abs() < 1e-12);
        assert_eq!(e.pointwise[2], 0.0);
        assert!((e.mean - 0.4 / 3.0).abs() < 1e-12);
        assert!(prediction_error(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn curve_csv_round_trip() {
        let c = RobustnessCurve {
            metric: Metric::Connectivity,
            values: vec![1.0, 2.0 / 3.0, 0.5, 1.0],
            n: 4,
        };
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("delta,value\n0.0000000000000000,1.0000000000000000\n"));
        assert!(text.contains("\n0.25000000000000000,0.66666666666666663\n"));
        let back = RobustnessCurve::read_csv(&buf[..], Metric::Connectivity).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn names_parse() {
        assert_eq!("TB".parse::<AttackKind>().unwrap(), AttackKind::Betweenness);
        assert_eq!("ctrl".parse::<Metric>().unwrap(), Metric::Controllability);
        assert!("x".parse::<Metric>().is_err());
    }
}
