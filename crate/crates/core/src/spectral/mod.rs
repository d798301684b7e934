//! Spectral robustness measures and rank comparison.

use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, Graph, NodeMask};
use crate::text::sig17;

const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// All eigenvalues of a symmetric row-major `n x n` matrix, ascending, by
/// cyclic Jacobi rotations.
pub fn symmetric_eigenvalues(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::Shape(format!("{} entries for a {n}x{n} matrix", a.len())));
    }
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    if asym > 1e-12 {
        return Err(Error::NotSymmetric(asym));
    }
    let mut m = a.to_vec();
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOL * frob.max(1.0);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// Row-major `D - A` of an undirected graph.
pub fn laplacian(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut l = vec![0.0; n * n];
    for &(u, v) in g.edges() {
        l[u * n + v] -= 1.0;
        l[v * n + u] -= 1.0;
        l[u * n + u] += 1.0;
        l[v * n + v] += 1.0;
    }
    l
}

/// The six spectral measures of an undirected graph. `ef` and `st_log` are
/// `None` when the graph is disconnected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralReport {
    /// Algebraic connectivity, the second-smallest Laplacian eigenvalue.
    pub ac: f64,
    /// Effective graph resistance `N * sum 1/mu_i` over nonzero modes.
    pub ef: Option<f64>,
    /// Natural connectivity `ln(mean exp(lambda_i))`.
    pub nc: f64,
    /// Spectral gap `lambda_1 - lambda_2` of the adjacency matrix.
    pub sg: f64,
    /// Spectral radius `lambda_1`.
    pub sr: f64,
    /// Natural log of the spanning-tree count.
    pub st_log: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Ac,
    Ef,
    Nc,
    Sg,
    Sr,
    St,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Ac,
        Measure::Ef,
        Measure::Nc,
        Measure::Sg,
        Measure::Sr,
        Measure::St,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Ac => "ac",
            Measure::Ef => "ef",
            Measure::Nc => "nc",
            Measure::Sg => "sg",
            Measure::Sr => "sr",
            Measure::St => "st",
        }
    }

    /// Lower effective resistance means a more robust network.
    pub fn direction(self) -> Direction {
        match self {
            Measure::Ef => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }
}

impl SpectralReport {
    pub fn get(&self, m: Measure) -> Option<f64> {
        match m {
            Measure::Ac => Some(self.ac),
            Measure::Ef => self.ef,
            Measure::Nc => Some(self.nc),
            Measure::Sg => Some(self.sg),
            Measure::Sr => Some(self.sr),
            Measure::St => self.st_log,
        }
    }

    /// Header plus one row; undefined values are written as `nan`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "ac,ef,nc,sg,sr,st_log")?;
        let f = |x: Option<f64>| x.map_or_else(|| "nan".to_string(), sig17);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            sig17(self.ac),
            f(self.ef),
            sig17(self.nc),
            sig17(self.sg),
            sig17(self.sr),
            f(self.st_log)
        )?;
        Ok(())
    }
}

pub fn spectral_measures(g: &Graph) -> Result<SpectralReport> {
    if g.is_directed() {
        return Err(Error::InvalidParameter(
            "spectral measures need an undirected graph".into(),
        ));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(Error::Degenerate("empty graph"));
    }
    let connected = largest_connected_component(g, &NodeMask::full(n)) == n;
    let adj = symmetric_eigenvalues(&g.adjacency_matrix(), n)?;
    let mu = symmetric_eigenvalues(&laplacian(g), n)?;

    let l1 = adj[n - 1];
    let l2 = if n > 1 { adj[n - 2] } else { l1 };
    let nc = l1 + (adj.iter().map(|&l| (l - l1).exp()).sum::<f64>() / n as f64).ln();
    let (ac, ef, st_log) = if connected {
        let nonzero = &mu[1..];
        let ef = n as f64 * nonzero.iter().map(|m| 1.0 / m).sum::<f64>();
        let st = nonzero.iter().map(|m| m.ln()).sum::<f64>() - (n as f64).ln();
        (if n > 1 { mu[1].max(0.0) } else { 0.0 }, Some(ef), Some(st))
    } else {
        (0.0, None, None)
    };
    Ok(SpectralReport {
        ac,
        ef,
        nc,
        sg: l1 - l2,
        sr: l1,
        st_log,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

/// Ranks `1..=L`, best first. Equal values keep input order and undefined
/// values come last.
pub fn robustness_rank(values: &[Option<f64>], dir: Direction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| match (values[a], values[b]) {
        (Some(x), Some(y)) => match dir {
            Direction::HigherBetter => y.total_cmp(&x),
            Direction::LowerBetter => x.total_cmp(&y),
        },
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let mut rank = vec![0; values.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }
    rank
}

/// Pointwise `|predicted - true|` rank differences and their mean.
pub fn rank_error(predicted: &[usize], truth: &[usize]) -> Result<(Vec<usize>, f64)> {
    if predicted.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: predicted.len(),
        });
    }
    let diff: Vec<usize> = predicted.iter().zip(truth).map(|(&p, &t)| p.abs_diff(t)).collect();
    let mean = if diff.is_empty() {
        0.0
    } else {
        diff.iter().sum::<usize>() as f64 / diff.len() as f64
    };
    Ok((diff, mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, false, &e).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn analytic_spectra() {
        let p3 = Graph::from_edges(3, false, &[(0, 1), (1, 2)]).unwrap();
        let ev = symmetric_eigenvalues(&laplacian(&p3), 3).unwrap();
        for (a, b) in ev.iter().zip([0.0, 1.0, 3.0]) {
            assert!(close(*a, b, 1e-12));
        }
        let k5 = complete(5);
        let ev = symmetric_eigenvalues(&k5.adjacency_matrix(), 5).unwrap();
        assert!(ev[..4].iter().all(|&x| close(x, -1.0, 1e-12)));
        assert!(close(ev[4], 4.0, 1e-12));
        assert!(symmetric_eigenvalues(&[0.0, 1.0, 0.0, 0.0], 2).is_err());
    }

    #[test]
    fn measure_examples() {
        let p3 = Graph::from_edges(3, false, &[(0, 1), (1, 2)]).unwrap();
        assert!(close(spectral_measures(&p3).unwrap().ac, 1.0, 1e-12));
        let k4 = spectral_measures(&complete(4)).unwrap();
        assert!(close(k4.st_log.unwrap(), 16f64.ln(), 1e-12));
        let k2 = spectral_measures(&complete(2)).unwrap();
        assert!(close(k2.ef.unwrap(), 1.0, 1e-12));
        let e = spectral_measures(&Graph::empty(4, false)).unwrap();
        assert_eq!(e.nc, 0.0);
        assert_eq!(e.ac, 0.0);
        assert!(e.ef.is_none() && e.st_log.is_none());
        assert!(spectral_measures(&Graph::empty(2, true)).is_err());
    }

    #[test]
    fn ranks() {
        let v = [Some(3.0), Some(1.0), Some(2.0)];
        assert_eq!(robustness_rank(&v, Direction::HigherBetter), vec![1, 3, 2]);
        assert_eq!(robustness_rank(&v, Direction::LowerBetter), vec![3, 1, 2]);
        assert_eq!(robustness_rank(&[Some(1.0); 3], Direction::HigherBetter), vec![1, 2, 3]);
        let v = [None, Some(1.0), Some(2.0)];
        assert_eq!(robustness_rank(&v, Direction::LowerBetter), vec![3, 1, 2]);
    }

    #[test]
    fn rank_error_worked_example() {
        let (d, mean) = rank_error(&[5, 3, 1, 4, 2], &[2, 3, 1, 5, 4]).unwrap();
        assert_eq!(d, vec![3, 0, 0, 1, 2]);
        assert_eq!(mean, 1.2);
    }

    #[test]
    fn report_csv() {
        let mut buf = Vec::new();
        spectral_measures(&Graph::empty(2, false)).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("ac,ef,nc,sg,sr,st_log\n0.0000000000000000,nan,"));
    }
}
