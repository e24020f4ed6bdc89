//! Exhaustive small-space corpora, deduplicated up to isometry.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{default_labels, MetricSpace, Rat, SpaceError};
use crate::perm::for_each_permutation;

/// All metric spaces on exactly `n` points whose nonzero distances are drawn
/// from `values`, one representative per isometry class.
///
/// Representatives are listed in increasing order of their canonical code
/// (the lexicographically least upper-triangle value-index sequence over
/// all relabelings).
pub fn exhaustive(n: usize, values: &[Rat]) -> Vec<MetricSpace> {
    let mut values: Vec<Rat> = values.iter().filter(|v| v.is_positive()).cloned().collect();
    values.sort();
    values.dedup();
    if n == 0 || values.is_empty() && n > 1 {
        return Vec::new();
    }
    let m = values.len();
    // ok[a][b][c]: values[c] <= values[a] + values[b]
    let mut ok = vec![false; m * m * m];
    for a in 0..m {
        for b in 0..m {
            let sum = &values[a] + &values[b];
            for c in 0..m {
                ok[(a * m + b) * m + c] = values[c] <= sum;
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let slot = |i: usize, j: usize| -> usize {
        let (i, j) = (i.min(j), i.max(j));
        // index of (i, j) in row-major upper-triangle order
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    };
    let mut seen = BTreeSet::new();
    let mut code = vec![0usize; pairs.len()];
    loop {
        let metric = (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    i == j
                        || j == k
                        || i == k
                        || ok[(code[slot(i, j)] * m + code[slot(j, k)]) * m + code[slot(i, k)]]
                })
            })
        });
        if metric {
            let mut best: Option<Vec<usize>> = None;
            for_each_permutation(n, |perm| {
                let relabeled: Vec<usize> = pairs
                    .iter()
                    .map(|&(i, j)| code[slot(perm[i], perm[j])])
                    .collect();
                if best.as_ref().map_or(true, |b| relabeled < *b) {
                    best = Some(relabeled);
                }
            });
            seen.insert(best.expect("at least one permutation"));
        }
        // next assignment, odometer style
        let mut pos = 0;
        while pos < code.len() {
            code[pos] += 1;
            if code[pos] < m {
                break;
            }
            code[pos] = 0;
            pos += 1;
        }
        if pos == code.len() {
            break;
        }
    }
    seen.into_iter()
        .map(|canon| {
            let mut matrix = vec![vec![Rat::zero(); n]; n];
            for (&(i, j), &v) in pairs.iter().zip(&canon) {
                matrix[i][j] = values[v].clone();
                matrix[j][i] = values[v].clone();
            }
            MetricSpace::new(matrix, default_labels(n)).expect("corpus entries are metrics")
        })
        .collect()
}

/// Corpus description `n<=K,distances={v1,v2,...}` as accepted by the
/// `check --corpus` command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSpec {
    pub max_n: usize,
    pub distances: Vec<Rat>,
}

impl CorpusSpec {
    pub fn spaces(&self) -> Vec<MetricSpace> {
        (1..=self.max_n)
            .flat_map(|n| exhaustive(n, &self.distances))
            .collect()
    }
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let values: Vec<String> = self.distances.iter().map(|d| d.to_string()).collect();
        write!(f, "n<={},distances={{{}}}", self.max_n, values.join(","))
    }
}

impl FromStr for CorpusSpec {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<CorpusSpec, SpaceError> {
        let bad = |m: &str| SpaceError::BadParams(format!("corpus spec {s:?}: {m}"));
        let s = s.trim();
        let rest = s.strip_prefix("n<=").ok_or_else(|| bad("must start with n<="))?;
        let (n_part, rest) = rest.split_once(',').ok_or_else(|| bad("missing distances"))?;
        let max_n: usize = n_part.trim().parse().map_err(|_| bad("bad point bound"))?;
        let list = rest
            .trim()
            .strip_prefix("distances={")
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| bad("expected distances={...}"))?;
        let distances = list
            .split(',')
            .map(|v| v.trim().parse::<Rat>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(&e.to_string()))?;
        if distances.is_empty() || distances.iter().any(|d| !d.is_positive()) {
            return Err(bad("distances must be positive"));
        }
        Ok(CorpusSpec { max_n, distances })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::integer(x)).collect()
    }

    #[test]
    fn counts_for_two_values_match_graph_counts() {
        // {1, 2}-metrics on n points are exactly simple graphs up to isomorphism.
        let counts: Vec<usize> = (1..=5).map(|n| exhaustive(n, &ints(&[1, 2])).len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 11, 34]);
    }

    #[test]
    fn three_values_on_three_points() {
        // multisets of three values from {1,2,3} obeying the triangle
        // inequality: all except {1,1,3}.
        assert_eq!(exhaustive(3, &ints(&[1, 2, 3])).len(), 9);
    }

    #[test]
    fn spec_parse_round_trip() {
        let spec: CorpusSpec = "n<=4,distances={1,2,3}".parse().unwrap();
        assert_eq!(spec.max_n, 4);
        assert_eq!(spec.distances, ints(&[1, 2, 3]));
        assert_eq!(spec.to_string(), "n<=4,distances={1,2,3}");
        assert!("n<4,distances={1}".parse::<CorpusSpec>().is_err());
        assert!("n<=4,distances={0}".parse::<CorpusSpec>().is_err());
    }
}
