//! Synthetic network models with exact node and edge counts.
//!
//! Every model first builds an undirected topology, trims or tops it up to
//! exactly `m` edges with [`adjust_edge_count`], and finally orients it with
//! [`set_direction`] when a directed graph is requested. Directed outputs
//! never contain reciprocal pairs, so the feasible edge range is the same
//! for both variants: `m <= n(n-1)/2`.

mod adjust;
mod models;

pub use self::adjust::{adjust_edge_count, assortativity, set_direction};
pub use self::models::{
    gen_ba, gen_er, gen_os, gen_qs, gen_rh, gen_rt, gen_sf, gen_swnw, gen_swws,
    rewire_assortative,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{derive_seed, rng_from_seed};

/// The nine synthetic network models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Er,
    Ba,
    Sf,
    Os,
    SwNw,
    SwWs,
    Qs,
    Rh,
    Rt,
}

impl Model {
    pub const ALL: [Model; 9] = [
        Model::Er,
        Model::Ba,
        Model::Sf,
        Model::Os,
        Model::SwNw,
        Model::SwWs,
        Model::Qs,
        Model::Rh,
        Model::Rt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Er => "ER",
            Model::Ba => "BA",
            Model::Sf => "SF",
            Model::Os => "OS",
            Model::SwNw => "SW-NW",
            Model::SwWs => "SW-WS",
            Model::Qs => "QS",
            Model::Rh => "RH",
            Model::Rt => "RT",
        }
    }

    /// Range of average degree sampled when building datasets.
    pub fn degree_range(self) -> (f64, f64) {
        match self {
            Model::SwNw | Model::SwWs => (2.5, 5.0),
            Model::Rh => (2.0, 4.0),
            Model::Rt => (1.5, 3.0),
            _ => (3.0, 6.0),
        }
    }

    /// Fewest edges the model's mandatory structure needs.
    pub fn min_edges(self, n: usize) -> usize {
        match self {
            Model::Qs => n.saturating_sub(1),
            Model::SwNw | Model::SwWs => {
                if n >= 3 {
                    n
                } else {
                    n.saturating_sub(1)
                }
            }
            _ => 0,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Model> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        Ok(match key.as_str() {
            "ER" => Model::Er,
            "BA" => Model::Ba,
            "SF" => Model::Sf,
            "OS" => Model::Os,
            "SWNW" => Model::SwNw,
            "SWWS" => Model::SwWs,
            "QS" => Model::Qs,
            "RH" => Model::Rh,
            "RT" => Model::Rt,
            _ => return Err(Error::InvalidParameter(format!("unknown model {s:?}"))),
        })
    }
}

/// Model parameters. Fields irrelevant to a model are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    /// SF/OS weight exponent, in `[0, 1)`.
    pub sigma: f64,
    /// SF/OS weight offset, `>= 0`.
    pub theta: f64,
    /// SW ring lattice: total nearest neighbors per node (even).
    pub k: usize,
    /// QS snapback probability; derived from `m` when `None`.
    pub q: Option<f64>,
    /// SW-WS rewiring probability.
    pub beta: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            sigma: 0.5,
            theta: 1.0,
            k: 2,
            q: None,
            beta: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    pub directed: bool,
    pub params: GenParams,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(model: Model, n: usize, m: usize, directed: bool, seed: u64) -> GenSpec {
        GenSpec {
            model,
            n,
            m,
            directed,
            params: GenParams::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        if !(0.0..1.0).contains(&p.sigma) {
            return Err(Error::InvalidParameter(format!("sigma={} not in [0,1)", p.sigma)));
        }
        if !(p.theta >= 0.0) {
            return Err(Error::InvalidParameter(format!("theta={} < 0", p.theta)));
        }
        if p.k < 2 || p.k % 2 != 0 {
            return Err(Error::InvalidParameter(format!("k={} must be even and >= 2", p.k)));
        }
        if let Some(q) = p.q {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("q={q} not in [0,1]")));
            }
        }
        if !(0.0..=1.0).contains(&p.beta) {
            return Err(Error::InvalidParameter(format!("beta={} not in [0,1]", p.beta)));
        }
        let max = max_undirected_edges(self.n);
        if self.m > max {
            return Err(Error::InfeasibleEdgeCount(format!(
                "m={} exceeds n(n-1)/2={max} for n={}",
                self.m, self.n
            )));
        }
        let min = self.model.min_edges(self.n);
        if self.m < min {
            return Err(Error::InfeasibleEdgeCount(format!(
                "{} with n={} needs at least {min} edges, got m={}",
                self.model, self.n, self.m
            )));
        }
        Ok(())
    }
}

pub(crate) fn max_undirected_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Generates a graph with exactly `spec.n` nodes and `spec.m` edges.
pub fn generate(spec: &GenSpec) -> Result<Graph> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let (n, m, p) = (spec.n, spec.m, &spec.params);
    let g = match spec.model {
        Model::Er => gen_er(n, m, &mut rng)?,
        Model::Ba => gen_ba(n, m, &mut rng)?,
        Model::Sf => gen_sf(n, m, p.sigma, p.theta, &mut rng)?,
        Model::Os => gen_os(n, m, p.sigma, p.theta, &mut rng)?,
        Model::SwNw => gen_swnw(n, m, p.k, &mut rng)?,
        Model::SwWs => gen_swws(n, m, p.k, p.beta, &mut rng)?,
        Model::Qs => gen_qs(n, m, p.q, &mut rng)?,
        Model::Rh => gen_rh(n, m, &mut rng)?,
        Model::Rt => gen_rt(n, m, &mut rng)?,
    };
    debug_assert_eq!(g.edge_count(), m);
    if spec.directed {
        Ok(set_direction(&g, true, spec.model, derive_seed(spec.seed, 0xD1)))
    } else {
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_names_round_trip() {
        for model in Model::ALL {
            assert_eq!(model.name().parse::<Model>().unwrap(), model);
        }
        assert_eq!("sw_ws".parse::<Model>().unwrap(), Model::SwWs);
        assert!("XX".parse::<Model>().is_err());
    }

    #[test]
    fn infeasible_specs_are_rejected() {
        assert!(generate(&GenSpec::new(Model::Er, 5, 11, false, 1)).is_err());
        assert!(generate(&GenSpec::new(Model::Er, 5, 10, false, 1)).is_ok());
        assert!(generate(&GenSpec::new(Model::Qs, 10, 8, true, 1)).is_err());
        assert!(generate(&GenSpec::new(Model::SwNw, 10, 9, true, 1)).is_err());
        let mut bad = GenSpec::new(Model::Sf, 10, 15, false, 1);
        bad.params.sigma = 1.0;
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn er_exact_edges() {
        let g = generate(&GenSpec::new(Model::Er, 10, 20, false, 3)).unwrap();
        assert_eq!(g.edge_count(), 20);
        assert_eq!(g.node_count(), 10);
    }
}
