//! Deterministic space generators for test corpora and the `gen` command.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{default_labels, MetricSpace, Rat, SpaceError};

/// Generator families. Every family is deterministic in its parameters and
/// the seed; `Path` and `Cycle` ignore the seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenKind {
    /// `d(i, j) = |i - j|`.
    Path { n: usize },
    /// `d(i, j) = min(|i - j|, n - |i - j|)`.
    Cycle { n: usize },
    /// `n` distinct grid points with coordinates `k / denom`, `0 <= k <= grid`,
    /// under the L1 distance.
    RandomL1 {
        n: usize,
        dim: usize,
        grid: u32,
        denom: u32,
    },
    /// Metric closure of a random connected graph: a random spanning tree
    /// plus every other edge with probability `extra_edge_pct / 100`;
    /// weights are `k / denom` with `1 <= k <= max_weight`.
    RandomGraph {
        n: usize,
        extra_edge_pct: u32,
        max_weight: u32,
        denom: u32,
    },
}

impl GenKind {
    pub fn n(&self) -> usize {
        match *self {
            GenKind::Path { n }
            | GenKind::Cycle { n }
            | GenKind::RandomL1 { n, .. }
            | GenKind::RandomGraph { n, .. } => n,
        }
    }
}

fn bad(msg: impl Into<String>) -> SpaceError {
    SpaceError::BadParams(msg.into())
}

pub fn generate(kind: &GenKind, seed: u64) -> Result<MetricSpace, SpaceError> {
    let n = kind.n();
    if n == 0 {
        return Err(bad("point count must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        GenKind::Path { n } => integer_metric(n, |i, j| i.abs_diff(j)),
        GenKind::Cycle { n } => integer_metric(n, |i, j| {
            let k = i.abs_diff(j);
            k.min(n - k)
        }),
        GenKind::RandomL1 { n, dim, grid, denom } => {
            if dim == 0 || denom == 0 {
                return Err(bad("dim and denom must be positive"));
            }
            let cells = (grid as u128 + 1).checked_pow(dim as u32);
            if cells.map_or(false, |c| c < n as u128) {
                return Err(bad(format!(
                    "grid {grid}^{dim} has fewer than {n} distinct points"
                )));
            }
            let mut seen = BTreeSet::new();
            let mut points: Vec<Vec<i64>> = Vec::with_capacity(n);
            while points.len() < n {
                let p: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..=grid as i64)).collect();
                if seen.insert(p.clone()) {
                    points.push(p);
                }
            }
            let matrix = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let l1: i64 = points[i]
                                .iter()
                                .zip(&points[j])
                                .map(|(a, b)| (a - b).abs())
                                .sum();
                            Rat::new(l1, denom as i64)
                        })
                        .collect()
                })
                .collect();
            MetricSpace::new(matrix, default_labels(n))
        }
        GenKind::RandomGraph {
            n,
            extra_edge_pct,
            max_weight,
            denom,
        } => {
            if max_weight == 0 || denom == 0 || extra_edge_pct > 100 {
                return Err(bad("need max_weight >= 1, denom >= 1, extra_edge_pct <= 100"));
            }
            let weight = |rng: &mut ChaCha8Rng| {
                Rat::new(rng.gen_range(1..=max_weight as i64), denom as i64)
            };
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut edges = Vec::new();
            let mut tree = BTreeSet::new();
            for k in 1..n {
                let parent = order[rng.gen_range(0..k)];
                let (a, b) = (order[k].min(parent), order[k].max(parent));
                tree.insert((a, b));
                edges.push((a, b, weight(&mut rng)));
            }
            for i in 0..n {
                for j in i + 1..n {
                    if !tree.contains(&(i, j)) && rng.gen_range(0..100) < extra_edge_pct {
                        edges.push((i, j, weight(&mut rng)));
                    }
                }
            }
            MetricSpace::from_graph(n, &edges)
        }
    }
}

fn integer_metric(n: usize, d: impl Fn(usize, usize) -> usize) -> Result<MetricSpace, SpaceError> {
    let matrix = (0..n)
        .map(|i| (0..n).map(|j| Rat::integer(d(i, j) as i64)).collect())
        .collect();
    MetricSpace::new(matrix, default_labels(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_and_cycle() {
        let p3 = generate(&GenKind::Path { n: 3 }, 0).unwrap();
        assert_eq!(p3, MetricSpace::from_integers(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]]).unwrap());
        let c4 = generate(&GenKind::Cycle { n: 4 }, 0).unwrap();
        assert_eq!(c4.dist(0, 1), &Rat::integer(1));
        assert_eq!(c4.dist(0, 2), &Rat::integer(2));
        assert_eq!(c4.dist(0, 3), &Rat::integer(1));
    }

    #[test]
    fn zero_points_is_bad_params() {
        assert!(matches!(
            generate(&GenKind::Path { n: 0 }, 0),
            Err(SpaceError::BadParams(_))
        ));
        assert!(matches!(
            generate(&GenKind::RandomL1 { n: 5, dim: 1, grid: 2, denom: 1 }, 0),
            Err(SpaceError::BadParams(_))
        ));
    }

    #[test]
    fn deterministic_in_seed() {
        let kind = GenKind::RandomGraph { n: 6, extra_edge_pct: 40, max_weight: 3, denom: 2 };
        assert_eq!(generate(&kind, 7).unwrap(), generate(&kind, 7).unwrap());
        let l1 = GenKind::RandomL1 { n: 6, dim: 2, grid: 4, denom: 3 };
        assert_eq!(generate(&l1, 11).unwrap(), generate(&l1, 11).unwrap());
    }

    #[test]
    fn random_spaces_are_valid_metrics() {
        for seed in 0..30 {
            let kind = GenKind::RandomGraph { n: 7, extra_edge_pct: 25, max_weight: 5, denom: 1 };
            let s = generate(&kind, seed).unwrap();
            // Re-validating the rows exercises every axiom on the closure output.
            MetricSpace::from_matrix(s.rows()).unwrap();
        }
    }
}
