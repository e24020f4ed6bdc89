//! Tuple pairs, partial maps between point indices, and the partial
//! isometry predicate.
//!
//! A metric space is read as a relational structure with relations
//! `d_q(x, y) :<=> d(x, y) < q` and `d^q(x, y) :<=> d(x, y) > q` for every
//! positive rational `q`. A map preserves all of them iff it preserves every
//! distance exactly: if `d(x, y) != d(x', y')` some rational strictly
//! between the two separates them. Exact equality of rationals is therefore
//! the only place where the relational encoding is consulted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::space::MetricSpace;
use crate::Error;

/// Which structure copy a challenge is played in: `L` picks a point on the
/// `a` (domain) side, `R` on the `b` (range) side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::L, Side::R];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::L => "L",
            Side::R => "R",
        })
    }
}

/// A pair of equal-length tuples of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TuplePair {
    a: Vec<usize>,
    b: Vec<usize>,
}

impl TuplePair {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Result<TuplePair, Error> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        Ok(TuplePair { a, b })
    }

    pub fn empty() -> TuplePair {
        TuplePair {
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    pub fn a(&self) -> &[usize] {
        &self.a
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn check_bounds(&self, n: usize) -> Result<(), Error> {
        match self.a.iter().chain(&self.b).find(|&&i| i >= n) {
            Some(&index) => Err(Error::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }

    /// The induced correspondence `a_i -> b_i`, if it is a function and
    /// injective.
    pub fn normalize(&self) -> Result<PartialMap, Inconsistent> {
        let mut pairs: Vec<(usize, usize)> = self.a.iter().copied().zip(self.b.iter().copied()).collect();
        pairs.sort_unstable();
        pairs.dedup();
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Inconsistent::NotFunctional { source: w[0].0 });
            }
        }
        let mut targets: Vec<usize> = pairs.iter().map(|&(_, t)| t).collect();
        targets.sort_unstable();
        for w in targets.windows(2) {
            if w[0] == w[1] {
                return Err(Inconsistent::NotInjective { target: w[0] });
            }
        }
        Ok(PartialMap { pairs })
    }
}

/// Why a tuple pair induces no partial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inconsistent {
    NotFunctional { source: usize },
    NotInjective { target: usize },
}

impl fmt::Display for Inconsistent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inconsistent::NotFunctional { source } => write!(f, "point {source} is mapped two ways"),
            Inconsistent::NotInjective { target } => write!(f, "point {target} is hit twice"),
        }
    }
}

/// A finite injective partial function on point indices, kept sorted by
/// source.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PartialMap {
    pairs: Vec<(usize, usize)>,
}

/// Why an extension step failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, thiserror::Error)]
#[serde(rename_all = "kebab-case")]
pub enum InvalidExtension {
    /// A source would be sent to two different targets.
    #[error("conflict")]
    Conflict,
    /// Two sources would share one target.
    #[error("duplicate-target")]
    DuplicateTarget,
}

impl PartialMap {
    pub fn empty() -> PartialMap {
        PartialMap::default()
    }

    /// Builds a map from pairs, rejecting non-functional or non-injective
    /// input.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<PartialMap, Inconsistent> {
        let (a, b) = pairs.into_iter().unzip();
        TuplePair { a, b }.normalize()
    }

    pub fn identity(n: usize) -> PartialMap {
        PartialMap {
            pairs: (0..n).map(|i| (i, i)).collect(),
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn get(&self, source: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&source, |&(s, _)| s)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn preimage(&self, target: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, t)| t == target).map(|&(s, _)| s)
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(s, _)| s)
    }

    pub fn range(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs.iter().map(|&(_, t)| t)
    }

    pub fn inverse(&self) -> PartialMap {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(s, t)| (t, s)).collect();
        pairs.sort_unstable();
        PartialMap { pairs }
    }

    /// `self` is a restriction of `other`.
    pub fn is_subset_of(&self, other: &PartialMap) -> bool {
        self.pairs.iter().all(|&(s, t)| other.get(s) == Some(t))
    }

    /// The tuple pair listing the map in source order.
    pub fn to_tuple_pair(&self) -> TuplePair {
        let (a, b) = self.pairs.iter().copied().unzip();
        TuplePair { a, b }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.pairs.iter().map(|&(s, t)| s.max(t)).max()
    }

    pub fn check_bounds(&self, n: usize) -> Result<(), Error> {
        match self.max_index() {
            Some(index) if index >= n => Err(Error::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }

    /// Inserts a pair known to keep the map functional and injective.
    fn insert_fresh(&self, source: usize, target: usize) -> PartialMap {
        let mut pairs = self.pairs.clone();
        let at = pairs.partition_point(|&(s, _)| s < source);
        pairs.insert(at, (source, target));
        PartialMap { pairs }
    }

    /// One back-and-forth step. On side `L` the challenge is a source and the
    /// response its image; on side `R` the challenge is a target and the
    /// response its preimage. A challenge already covered is answered only by
    /// the existing partner, leaving the map unchanged.
    pub fn extend(&self, side: Side, challenge: usize, response: usize) -> Result<PartialMap, InvalidExtension> {
        let (source, target) = match side {
            Side::L => (challenge, response),
            Side::R => (response, challenge),
        };
        match side {
            Side::L => match self.get(source) {
                Some(t) if t == target => Ok(self.clone()),
                Some(_) => Err(InvalidExtension::Conflict),
                None if self.preimage(target).is_some() => Err(InvalidExtension::DuplicateTarget),
                None => Ok(self.insert_fresh(source, target)),
            },
            Side::R => match self.preimage(target) {
                Some(s) if s == source => Ok(self.clone()),
                Some(_) => Err(InvalidExtension::DuplicateTarget),
                None if self.get(source).is_some() => Err(InvalidExtension::Conflict),
                None => Ok(self.insert_fresh(source, target)),
            },
        }
    }
}

impl fmt::Display for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (s, t)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}->{t}")?;
        }
        f.write_str("}")
    }
}

/// Checked extension: bounds on both points, then [`PartialMap::extend`].
pub fn extend(
    space: &MetricSpace,
    map: &PartialMap,
    side: Side,
    challenge: usize,
    response: usize,
) -> Result<Result<PartialMap, InvalidExtension>, Error> {
    let n = space.n();
    for index in [challenge, response] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    Ok(map.extend(side, challenge, response))
}

/// Distance preservation check that assumes indices are in bounds.
pub(crate) fn preserves_distances(space: &MetricSpace, map: &PartialMap) -> bool {
    let pairs = map.pairs();
    pairs.iter().enumerate().all(|(k, &(s1, t1))| {
        pairs[k + 1..]
            .iter()
            .all(|&(s2, t2)| space.class(s1, s2) == space.class(t1, t2))
    })
}

/// True iff the map preserves every pairwise distance exactly.
pub fn is_partial_isometry(space: &MetricSpace, map: &PartialMap) -> Result<bool, Error> {
    map.check_bounds(space.n())?;
    Ok(preserves_distances(space, map))
}

/// Every distance-preserving partial map of the space, ordered by size and
/// then lexicographically by pairs.
pub fn partial_isometries(space: &MetricSpace) -> Vec<PartialMap> {
    let n = space.n();
    let mut out = Vec::new();
    let mut current: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; n];
    fn walk(
        space: &MetricSpace,
        next: usize,
        current: &mut Vec<(usize, usize)>,
        used: &mut [bool],
        out: &mut Vec<PartialMap>,
    ) {
        let n = space.n();
        if next == n {
            out.push(PartialMap {
                pairs: current.clone(),
            });
            return;
        }
        walk(space, next + 1, current, used, out);
        for target in 0..n {
            if used[target] {
                continue;
            }
            if current
                .iter()
                .all(|&(s, t)| space.class(s, next) == space.class(t, target))
            {
                used[target] = true;
                current.push((next, target));
                walk(space, next + 1, current, used, out);
                current.pop();
                used[target] = false;
            }
        }
    }
    walk(space, 0, &mut current, &mut used, &mut out);
    out.sort_by(|p, q| p.len().cmp(&q.len()).then_with(|| p.pairs.cmp(&q.pairs)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::path;
    use proptest::prelude::*;

    fn map(pairs: &[(usize, usize)]) -> PartialMap {
        PartialMap::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let tp = TuplePair::new(vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(tp.normalize().unwrap(), map(&[(0, 1), (1, 0)]));
        let dup = TuplePair::new(vec![0, 0], vec![1, 1]).unwrap();
        assert_eq!(dup.normalize().unwrap(), map(&[(0, 1)]));
        let bad = TuplePair::new(vec![0, 0], vec![1, 2]).unwrap();
        assert_eq!(bad.normalize(), Err(Inconsistent::NotFunctional { source: 0 }));
        let bad = TuplePair::new(vec![0, 1], vec![2, 2]).unwrap();
        assert_eq!(bad.normalize(), Err(Inconsistent::NotInjective { target: 2 }));
        assert!(matches!(
            TuplePair::new(vec![0], vec![]),
            Err(Error::LengthMismatch { a: 1, b: 0 })
        ));
    }

    #[test]
    fn partial_isometry_examples() {
        let p3 = path(3);
        assert!(is_partial_isometry(&p3, &map(&[(0, 2)])).unwrap());
        assert!(is_partial_isometry(&p3, &map(&[(0, 1), (1, 2)])).unwrap());
        assert!(!is_partial_isometry(&p3, &map(&[(0, 0), (2, 1)])).unwrap());
        assert!(matches!(
            is_partial_isometry(&p3, &map(&[(0, 3)])),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
    }

    #[test]
    fn extend_examples() {
        let p = map(&[(0, 1)]);
        assert_eq!(p.extend(Side::L, 2, 0), Ok(map(&[(0, 1), (2, 0)])));
        assert_eq!(p.extend(Side::L, 0, 1), Ok(p.clone()));
        assert_eq!(p.extend(Side::R, 1, 2), Err(InvalidExtension::DuplicateTarget));
        assert_eq!(p.extend(Side::L, 0, 2), Err(InvalidExtension::Conflict));
        assert_eq!(p.extend(Side::L, 2, 1), Err(InvalidExtension::DuplicateTarget));
        assert_eq!(p.extend(Side::R, 2, 0), Err(InvalidExtension::Conflict));
        assert_eq!(p.extend(Side::R, 1, 0), Ok(p.clone()));
        assert_eq!(p.extend(Side::R, 0, 2), Ok(map(&[(0, 1), (2, 0)])));
        assert!(matches!(
            extend(&path(3), &p, Side::L, 5, 0),
            Err(Error::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn display_format() {
        assert_eq!(map(&[(2, 0), (0, 1)]).to_string(), "{0->1, 2->0}");
        assert_eq!(PartialMap::empty().to_string(), "{}");
    }

    #[test]
    fn enumeration_of_p3() {
        let all = partial_isometries(&path(3));
        // 1 empty + 9 singletons + pairs preserving distance + 2 total.
        assert_eq!(all[0], PartialMap::empty());
        assert_eq!(all.iter().filter(|p| p.len() == 1).count(), 9);
        assert_eq!(all.iter().filter(|p| p.len() == 3).count(), 2);
        for p in &all {
            assert!(is_partial_isometry(&path(3), p).unwrap());
        }
    }

    fn arb_map(n: usize) -> impl Strategy<Value = PartialMap> {
        (
            proptest::collection::vec(any::<bool>(), n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(move |(keep, targets)| {
                PartialMap::from_pairs((0..n).filter(|&i| keep[i]).map(|i| (i, targets[i]))).unwrap()
            })
    }

    proptest! {
        #[test]
        fn normalize_ignores_enumeration_order(p in arb_map(6), shuffle in any::<u64>(), dups in 0usize..4) {
            let mut pairs: Vec<(usize, usize)> = p.pairs().to_vec();
            for k in 0..dups.min(pairs.len()) {
                pairs.push(pairs[k]);
            }
            let len = pairs.len();
            if len > 1 {
                pairs.rotate_left((shuffle as usize) % len);
            }
            let tp = TuplePair::new(pairs.iter().map(|x| x.0).collect(), pairs.iter().map(|x| x.1).collect()).unwrap();
            prop_assert_eq!(tp.normalize().unwrap(), p);
        }

        #[test]
        fn isometry_inversion_and_restriction(p in arb_map(6), seed in 0u64..50, mask in any::<u64>()) {
            let space = crate::space::generate(&crate::space::GenKind::RandomL1 { n: 6, dim: 2, grid: 2, denom: 1 }, seed).unwrap();
            let iso = is_partial_isometry(&space, &p).unwrap();
            prop_assert_eq!(iso, is_partial_isometry(&space, &p.inverse()).unwrap());
            if iso {
                let sub = PartialMap::from_pairs(p.pairs().iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &x)| x)).unwrap();
                prop_assert!(sub.is_subset_of(&p));
                prop_assert!(is_partial_isometry(&space, &sub).unwrap());
            }
        }

        #[test]
        fn extend_keeps_invariants(p in arb_map(5), left in any::<bool>(), c in 0usize..5, r in 0usize..5) {
            let side = if left { Side::L } else { Side::R };
            if let Ok(q) = p.extend(side, c, r) {
                prop_assert!(p.is_subset_of(&q));
                prop_assert_eq!(PartialMap::from_pairs(q.pairs().iter().copied()).unwrap(), q.clone());
                let (s, t) = if left { (c, r) } else { (r, c) };
                prop_assert_eq!(q.get(s), Some(t));
            }
        }
    }
}
