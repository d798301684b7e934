//! Exact rank of 0/1 adjacency matrices for undirected controllability.
//!
//! Rank over a prime field never exceeds the rank over the rationals, and it
//! only drops when the prime divides every nonzero maximal minor. Taking the
//! larger of the ranks modulo two unrelated primes makes a miss vanishingly
//! unlikely for the matrix sizes handled here.

use crate::graph::{Graph, NodeMask};

/// Mersenne prime 2^61 - 1.
pub const PRIME_61: u64 = (1 << 61) - 1;
/// Mersenne prime 2^31 - 1, used as the cross-check.
pub const PRIME_31: u64 = (1 << 31) - 1;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Rank of a row-major `rows x cols` matrix over GF(p).
pub fn rank_mod_p(mut a: Vec<u64>, rows: usize, cols: usize, p: u64) -> usize {
    debug_assert_eq!(a.len(), rows * cols);
    for x in &mut a {
        *x %= p;
    }
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| a[r * cols + col] != 0) else {
            continue;
        };
        if pivot != rank {
            for c in col..cols {
                a.swap(pivot * cols + c, rank * cols + c);
            }
        }
        let inv = pow_mod(a[rank * cols + col], p - 2, p);
        for c in col..cols {
            a[rank * cols + c] = mul_mod(a[rank * cols + c], inv, p);
        }
        for r in rank + 1..rows {
            let f = a[r * cols + col];
            if f == 0 {
                continue;
            }
            for c in col..cols {
                let sub = mul_mod(f, a[rank * cols + c], p);
                let x = a[r * cols + c];
                a[r * cols + c] = if x >= sub { x - sub } else { x + p - sub };
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the adjacency matrix of the graph induced by the alive nodes.
pub fn adjacency_rank_masked(g: &Graph, mask: &NodeMask) -> usize {
    let alive: Vec<usize> = mask.alive_nodes().collect();
    let k = alive.len();
    let mut pos = vec![usize::MAX; g.node_count()];
    for (i, &v) in alive.iter().enumerate() {
        pos[v] = i;
    }
    let mut a = vec![0u64; k * k];
    for (i, &u) in alive.iter().enumerate() {
        for &v in g.out_neighbors(u) {
            if pos[v] != usize::MAX {
                a[i * k + pos[v]] = 1;
            }
        }
    }
    integer_rank(a, k, k)
}

/// Rank of a nonnegative integer matrix over the rationals, as the larger
/// of its ranks modulo [`PRIME_61`] and [`PRIME_31`].
pub fn integer_rank(a: Vec<u64>, rows: usize, cols: usize) -> usize {
    let r61 = rank_mod_p(a.clone(), rows, cols, PRIME_61);
    let r31 = rank_mod_p(a, rows, cols, PRIME_31);
    r61.max(r31)
}

pub fn adjacency_rank(g: &Graph) -> usize {
    adjacency_rank_masked(g, &NodeMask::full(g.node_count()))
}

/// `max(1, n - rank(A))` for an undirected graph.
pub fn driver_count_undirected(g: &Graph) -> usize {
    1.max(g.node_count() - adjacency_rank(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_ranks() {
        assert_eq!(driver_count_undirected(&Graph::empty(5, false)), 5);
        let k4 = Graph::from_edges(4, false, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
            .unwrap();
        assert_eq!(adjacency_rank(&k4), 4);
        assert_eq!(driver_count_undirected(&k4), 1);
        // Star: rank 2 regardless of the number of leaves.
        let star = Graph::from_edges(5, false, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(adjacency_rank(&star), 2);
        assert_eq!(driver_count_undirected(&star), 3);
        // Path P3 has eigenvalues {-sqrt2, 0, sqrt2}.
        let p3 = Graph::from_edges(3, false, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(adjacency_rank(&p3), 2);
    }

    #[test]
    fn small_prime_sees_zero_divisors() {
        // det = 2 vanishes mod 2 but not over the rationals.
        let a = vec![1, 1, 1, 3];
        assert_eq!(rank_mod_p(a.clone(), 2, 2, 2), 1);
        assert_eq!(rank_mod_p(a, 2, 2, PRIME_61), 2);
    }
}
