//! Receptive-field encoding of a graph into a fixed-size tensor.
//!
//! The top `W` nodes by a labeling score each contribute one `g x h` field:
//! the node itself in row 0, then its nearest neighbors, each described by
//! `h` normalized attributes. Graphs with fewer than `W` nodes are padded
//! with all-zero fields. The flattened tensor can be reshaped into a square
//! image for a 2D network.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{betweenness, centrality_key, clustering_coefficients, Graph};

pub const TENSOR_MAGIC: &[u8; 8] = b"RNETLFR1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Labeling {
    Degree,
    Betweenness,
}

impl Labeling {
    pub fn name(self) -> &'static str {
        match self {
            Labeling::Degree => "degree",
            Labeling::Betweenness => "betweenness",
        }
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Labeling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "degree" | "deg" => Ok(Labeling::Degree),
            "betweenness" | "bet" => Ok(Labeling::Betweenness),
            _ => Err(Error::InvalidParameter(format!("unknown labeling {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Attribute {
    Degree,
    Clustering,
    Betweenness,
}

impl Attribute {
    pub fn name(self) -> &'static str {
        match self {
            Attribute::Degree => "deg",
            Attribute::Clustering => "cc",
            Attribute::Betweenness => "bet",
        }
    }

    /// Parses a comma-separated list such as `deg,cc`.
    pub fn parse_list(s: &str) -> Result<Vec<Attribute>> {
        s.split(',').map(|a| a.trim().parse()).collect()
    }

    pub fn format_list(attrs: &[Attribute]) -> String {
        attrs.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
    }
}

impl FromStr for Attribute {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "deg" | "degree" => Ok(Attribute::Degree),
            "cc" | "clustering" | "clustering_coefficient" => Ok(Attribute::Clustering),
            "bet" | "betweenness" => Ok(Attribute::Betweenness),
            _ => Err(Error::InvalidParameter(format!("unknown attribute {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LfrConfig {
    pub w: usize,
    pub g: usize,
    pub labeling: Labeling,
    pub attributes: Vec<Attribute>,
}

impl Default for LfrConfig {
    fn default() -> Self {
        LfrConfig {
            w: 500,
            g: 10,
            labeling: Labeling::Degree,
            attributes: vec![Attribute::Degree, Attribute::Clustering],
        }
    }
}

impl LfrConfig {
    pub fn new(w: usize, g: usize) -> LfrConfig {
        LfrConfig {
            w,
            g,
            ..Default::default()
        }
    }

    pub fn h(&self) -> usize {
        self.attributes.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.w == 0 || self.g == 0 {
            return Err(Error::InvalidParameter("w and g must be at least 1".into()));
        }
        if self.attributes.is_empty() {
            return Err(Error::InvalidParameter("at least one attribute is needed".into()));
        }
        Ok(())
    }

    /// Side of the square image holding `w * g * h` values.
    pub fn square_side(&self) -> usize {
        square_side(self.w * self.g * self.h())
    }
}

/// Per-node labeling keys and normalized attributes, computed once per graph.
#[derive(Clone, Debug)]
pub struct NodeFeatures {
    pub scores: Vec<i64>,
    /// Row-major `n x h`.
    pub attrs: Vec<f64>,
    h: usize,
}

impl NodeFeatures {
    pub fn compute(g: &Graph, cfg: &LfrConfig) -> NodeFeatures {
        let n = g.node_count();
        let needs_bet = cfg.labeling == Labeling::Betweenness
            || cfg.attributes.contains(&Attribute::Betweenness);
        let bet = if needs_bet { betweenness(g) } else { Vec::new() };
        let deg: Vec<usize> = (0..n)
            .map(|v| {
                if g.is_directed() {
                    g.out_neighbors(v).len() + g.in_neighbors(v).len()
                } else {
                    g.out_neighbors(v).len()
                }
            })
            .collect();
        let scores = match cfg.labeling {
            Labeling::Degree => deg.iter().map(|&d| d as i64).collect(),
            Labeling::Betweenness => bet.iter().map(|&b| centrality_key(b)).collect(),
        };

        let deg_den = if g.is_directed() { 2 * n.saturating_sub(1) } else { n.saturating_sub(1) };
        let bet_den = {
            let pairs = (n.saturating_sub(1) * n.saturating_sub(2)) as f64;
            if g.is_directed() {
                pairs
            } else {
                pairs / 2.0
            }
        };
        let cc = if cfg.attributes.contains(&Attribute::Clustering) {
            clustering_coefficients(g)
        } else {
            Vec::new()
        };
        let h = cfg.h();
        let mut attrs = vec![0.0; n * h];
        for v in 0..n {
            for (j, a) in cfg.attributes.iter().enumerate() {
                let x = match a {
                    Attribute::Degree if deg_den > 0 => deg[v] as f64 / deg_den as f64,
                    Attribute::Clustering => cc[v],
                    Attribute::Betweenness if bet_den > 0.0 => bet[v] / bet_den,
                    _ => 0.0,
                };
                attrs[v * h + j] = x.clamp(0.0, 1.0);
            }
        }
        NodeFeatures { scores, attrs, h }
    }

    fn row(&self, v: usize) -> &[f64] {
        &self.attrs[v * self.h..(v + 1) * self.h]
    }
}

fn by_score(scores: &[i64]) -> impl Fn(&usize, &usize) -> std::cmp::Ordering + '_ {
    move |&a, &b| scores[b].cmp(&scores[a]).then(a.cmp(&b))
}

/// Top `w` nodes by labeling score, ties to the smaller id.
pub fn select_nodes(g: &Graph, cfg: &LfrConfig) -> Vec<usize> {
    select_with(&NodeFeatures::compute(g, cfg), g.node_count(), cfg.w)
}

fn select_with(f: &NodeFeatures, n: usize, w: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(by_score(&f.scores));
    order.truncate(w);
    order
}

/// Breadth-first rings around `root` on the underlying undirected graph,
/// added whole until at least `size` nodes are collected or the component
/// is exhausted. Returns `(node, distance)` pairs in visit order.
pub fn assemble_neighborhood(g: &Graph, root: usize, size: usize) -> Vec<(usize, usize)> {
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[root] = 0;
    let mut out = vec![(root, 0)];
    let mut frontier = vec![root];
    let mut depth = 0;
    while out.len() < size && !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if dist[v] == usize::MAX {
                    dist[v] = depth;
                    next.push(v);
                    out.push((v, depth));
                }
            }
        }
        frontier = next;
    }
    out
}

/// The `g x h` field of `root`: row 0 is the root, then candidates ordered by
/// distance, score (descending) and id. Rows past the candidates stay zero.
pub fn normalize_field(
    g: &Graph,
    root: usize,
    candidates: &[(usize, usize)],
    cfg: &LfrConfig,
) -> Vec<f64> {
    let features = NodeFeatures::compute(g, cfg);
    normalize_with(&features, root, candidates, cfg.g)
}

fn normalize_with(
    f: &NodeFeatures,
    root: usize,
    candidates: &[(usize, usize)],
    size: usize,
) -> Vec<f64> {
    let mut rest: Vec<(usize, usize)> = candidates.iter().copied().filter(|c| c.0 != root).collect();
    rest.sort_by(|a, b| {
        a.1.cmp(&b.1)
            .then(f.scores[b.0].cmp(&f.scores[a.0]))
            .then(a.0.cmp(&b.0))
    });
    let h = f.h;
    let mut out = vec![0.0; size * h];
    let rows = std::iter::once(root).chain(rest.into_iter().map(|c| c.0));
    for (r, v) in rows.take(size).enumerate() {
        out[r * h..(r + 1) * h].copy_from_slice(f.row(v));
    }
    out
}

/// `w` fields of `g x h` values, flattened in (field, row, column) order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceptiveFieldTensor {
    pub w: usize,
    pub g: usize,
    pub h: usize,
    pub data: Vec<f32>,
    pub source_n: usize,
}

impl ReceptiveFieldTensor {
    pub fn field(&self, i: usize) -> &[f32] {
        let len = self.g * self.h;
        &self.data[i * len..(i + 1) * len]
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(TENSOR_MAGIC)?;
        for d in [self.w, self.g, self.h] {
            out.write_all(&(d as u32).to_le_bytes())?;
        }
        for x in &self.data {
            out.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a tensor file. The source node count is not stored and comes
    /// back as 0.
    pub fn read_from<R: Read>(mut input: R) -> Result<ReceptiveFieldTensor> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != TENSOR_MAGIC {
            return Err(Error::Format("not a receptive-field tensor".into()));
        }
        let mut dims = [0usize; 3];
        for d in &mut dims {
            let mut b = [0u8; 4];
            input.read_exact(&mut b)?;
            *d = u32::from_le_bytes(b) as usize;
        }
        let [w, g, h] = dims;
        let mut bytes = vec![0u8; w * g * h * 4];
        input.read_exact(&mut bytes)?;
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(ReceptiveFieldTensor {
            w,
            g,
            h,
            data,
            source_n: 0,
        })
    }
}

/// Full select, assemble and normalize pipeline.
pub fn encode(g: &Graph, cfg: &LfrConfig) -> ReceptiveFieldTensor {
    let features = NodeFeatures::compute(g, cfg);
    let field_len = cfg.g * cfg.h();
    let mut data = vec![0.0f32; cfg.w * field_len];
    for (i, root) in select_with(&features, g.node_count(), cfg.w).into_iter().enumerate() {
        let cand = assemble_neighborhood(g, root, cfg.g);
        let field = normalize_with(&features, root, &cand, cfg.g);
        for (dst, src) in data[i * field_len..(i + 1) * field_len].iter_mut().zip(field) {
            *dst = src as f32;
        }
    }
    ReceptiveFieldTensor {
        w: cfg.w,
        g: cfg.g,
        h: cfg.h(),
        data,
        source_n: g.node_count(),
    }
}

pub fn square_side(len: usize) -> usize {
    let mut s = (len as f64).sqrt() as usize;
    while s * s < len {
        s += 1;
    }
    while s > 0 && (s - 1) * (s - 1) >= len {
        s -= 1;
    }
    s
}

/// Row-major square image of side `ceil(sqrt(W g h))`, zero-padded at the
/// tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareImage {
    pub side: usize,
    pub data: Vec<f32>,
}

pub fn reshape_square(t: &ReceptiveFieldTensor) -> SquareImage {
    let side = square_side(t.data.len());
    let mut data = t.data.clone();
    data.resize(side * side, 0.0);
    SquareImage { side, data }
}

/// Inverse of [`reshape_square`] for known tensor dimensions.
pub fn unreshape(img: &SquareImage, w: usize, g: usize, h: usize) -> Result<ReceptiveFieldTensor> {
    let len = w * g * h;
    if len > img.data.len() {
        return Err(Error::Shape(format!(
            "{w}x{g}x{h} does not fit a {0}x{0} image",
            img.side
        )));
    }
    Ok(ReceptiveFieldTensor {
        w,
        g,
        h,
        data: img.data[..len].to_vec(),
        source_n: 0,
    })
}
