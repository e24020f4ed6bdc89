//! Finite metric spaces with exact rational distances.

mod codec;
pub mod corpus;
mod generate;
mod rat;

use std::collections::BTreeSet;
use std::fmt;

use sha2::{Digest, Sha256};

pub use codec::{decode, decode_value, encode};
pub use generate::{generate, GenKind};
pub use rat::{Rat, RatParseError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceError {
    #[error("empty space: at least one point is required")]
    EmptySpace,
    #[error("distance matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("{labels} labels given for {n} points")]
    LabelCount { labels: usize, n: usize },
    #[error("asymmetric distances: d({0},{1}) != d({1},{0})")]
    Asymmetric(usize, usize),
    #[error("nonzero diagonal entry d({0},{0})")]
    NonzeroDiagonal(usize),
    #[error("distinct points {0} and {1} have distance 0")]
    ZeroOffDiagonal(usize, usize),
    #[error("negative distance d({0},{1})")]
    NegativeDistance(usize, usize),
    #[error("triangle inequality violated: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    TriangleViolation(usize, usize, usize),
    #[error("points {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("edge ({0},{1}) refers to a point outside the space")]
    EdgeOutOfRange(usize, usize),
    #[error("edge ({0},{1}) has a nonpositive weight")]
    NonpositiveWeight(usize, usize),
    #[error("scale factor must be positive")]
    NonpositiveScale,
    #[error("bad generator parameters: {0}")]
    BadParams(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// A finite metric space over exact rationals.
///
/// Besides the rational matrix the space keeps a matrix of distance class
/// ids: the index of each distance in the sorted list of distinct distances.
/// Two pairs are at equal distance iff their class ids are equal, which is
/// all the equivalence engines ever need to ask.
#[derive(Clone, PartialEq, Eq)]
pub struct MetricSpace {
    labels: Vec<String>,
    dist: Vec<Rat>,
    classes: Vec<u32>,
    distinct: Vec<Rat>,
}

impl MetricSpace {
    /// Builds a space from a square grid, checking every metric axiom.
    pub fn new(matrix: Vec<Vec<Rat>>, labels: Vec<String>) -> Result<MetricSpace, SpaceError> {
        let n = matrix.len();
        if n == 0 {
            return Err(SpaceError::EmptySpace);
        }
        if let Some((row, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(SpaceError::NotSquare {
                row,
                len: r.len(),
                n,
            });
        }
        if labels.len() != n {
            return Err(SpaceError::LabelCount {
                labels: labels.len(),
                n,
            });
        }
        let m = &matrix;
        for i in 0..n {
            if !m[i][i].is_zero() {
                return Err(SpaceError::NonzeroDiagonal(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if m[i][j] != m[j][i] {
                    return Err(SpaceError::Asymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if m[i][j].is_zero() {
                    return Err(SpaceError::ZeroOffDiagonal(i, j));
                }
                if m[i][j].is_negative() {
                    return Err(SpaceError::NegativeDistance(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == j || k == i {
                        continue;
                    }
                    if m[i][k] > &m[i][j] + &m[j][k] {
                        return Err(SpaceError::TriangleViolation(i, j, k));
                    }
                }
            }
        }
        Ok(Self::assemble(matrix.into_iter().flatten().collect(), labels))
    }

    /// Like [`MetricSpace::new`] with labels `p0..p{n-1}`.
    pub fn from_matrix(matrix: Vec<Vec<Rat>>) -> Result<MetricSpace, SpaceError> {
        let labels = default_labels(matrix.len());
        MetricSpace::new(matrix, labels)
    }

    /// Convenience constructor over integer distances.
    pub fn from_integers(matrix: &[&[i64]]) -> Result<MetricSpace, SpaceError> {
        Self::from_matrix(
            matrix
                .iter()
                .map(|row| row.iter().map(|&v| Rat::integer(v)).collect())
                .collect(),
        )
    }

    fn assemble(dist: Vec<Rat>, labels: Vec<String>) -> MetricSpace {
        let distinct: Vec<Rat> = dist
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let classes = dist
            .iter()
            .map(|d| distinct.binary_search(d).expect("distance is present") as u32)
            .collect();
        MetricSpace {
            labels,
            dist,
            classes,
            distinct,
        }
    }

    /// Metric closure of a weighted graph on `n` points.
    pub fn from_graph(n: usize, edges: &[(usize, usize, Rat)]) -> Result<MetricSpace, SpaceError> {
        if n == 0 {
            return Err(SpaceError::EmptySpace);
        }
        let mut best: Vec<Option<Rat>> = vec![None; n * n];
        for i in 0..n {
            best[i * n + i] = Some(Rat::zero());
        }
        for (i, j, w) in edges {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(SpaceError::EdgeOutOfRange(i, j));
            }
            if !w.is_positive() {
                return Err(SpaceError::NonpositiveWeight(i, j));
            }
            if i == j {
                continue;
            }
            for (a, b) in [(i, j), (j, i)] {
                let slot = &mut best[a * n + b];
                if slot.as_ref().map_or(true, |cur| w < cur) {
                    *slot = Some(w.clone());
                }
            }
        }
        // Floyd-Warshall over the (min, +) semiring.
        for k in 0..n {
            for i in 0..n {
                let Some(ik) = best[i * n + k].clone() else {
                    continue;
                };
                for j in 0..n {
                    if let Some(kj) = &best[k * n + j] {
                        let via = &ik + kj;
                        let slot = &mut best[i * n + j];
                        if slot.as_ref().map_or(true, |cur| via < *cur) {
                            *slot = Some(via);
                        }
                    }
                }
            }
        }
        let mut dist = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                match &best[i * n + j] {
                    Some(d) => dist.push(d.clone()),
                    None => return Err(SpaceError::Disconnected(i.min(j), i.max(j))),
                }
            }
        }
        Ok(Self::assemble(dist, default_labels(n)))
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rat {
        &self.dist[i * self.n() + j]
    }

    /// Distance class of the pair: equal classes iff equal distances.
    #[inline]
    pub fn class(&self, i: usize, j: usize) -> u32 {
        self.classes[i * self.n() + j]
    }

    /// Distinct distances in increasing order (including 0).
    pub fn distinct_distances(&self) -> &[Rat] {
        &self.distinct
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.dist.chunks(self.n()).map(|r| r.to_vec()).collect()
    }

    /// Every distance multiplied by a positive rational.
    pub fn scale(&self, factor: &Rat) -> Result<MetricSpace, SpaceError> {
        if !factor.is_positive() {
            return Err(SpaceError::NonpositiveScale);
        }
        let dist = self.dist.iter().map(|d| d * factor).collect();
        Ok(Self::assemble(dist, self.labels.clone()))
    }

    /// The space carried along a bijection: point `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> MetricSpace {
        let n = self.n();
        assert_eq!(perm.len(), n, "permutation length");
        let mut dist = vec![Rat::zero(); n * n];
        let mut labels = vec![String::new(); n];
        for i in 0..n {
            labels[perm[i]] = self.labels[i].clone();
            for j in 0..n {
                dist[perm[i] * n + perm[j]] = self.dist(i, j).clone();
            }
        }
        Self::assemble(dist, labels)
    }

    /// Content hash of the canonical encoding, as 16 hex digits.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(encode(self).as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for MetricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricSpace")
            .field("labels", &self.labels)
            .field("d", &self.rows())
            .finish()
    }
}

pub(crate) fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// Validates a grid and labels into a [`MetricSpace`].
pub fn validate_space(matrix: Vec<Vec<Rat>>, labels: Vec<String>) -> Result<MetricSpace, SpaceError> {
    MetricSpace::new(matrix, labels)
}

/// Path metric on `n` points: `d(i, j) = |i - j|`.
pub fn path(n: usize) -> MetricSpace {
    generate(&GenKind::Path { n }, 0).expect("n >= 1")
}

/// Cycle metric on `n` points.
pub fn cycle(n: usize) -> MetricSpace {
    generate(&GenKind::Cycle { n }, 0).expect("n >= 1")
}
