//! Brute-force autoisometries: group enumeration, extension of partial maps,
//! orbits and the ultrahomogeneity test. Nothing here consults the
//! refinement table.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::partial_map::{partial_isometries, preserves_distances, PartialMap};
use crate::space::MetricSpace;
use crate::{ensure_size, Error, Limits};

/// A distance-preserving permutation of the points.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Isometry {
    perm: Vec<usize>,
}

impl Isometry {
    pub fn identity(n: usize) -> Isometry {
        Isometry { perm: (0..n).collect() }
    }

    /// Checks that `perm` is a permutation preserving every distance.
    pub fn new(space: &MetricSpace, perm: Vec<usize>) -> Option<Isometry> {
        let n = space.n();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return None;
            }
        }
        let ok = perm.len() == n
            && (0..n).all(|i| (i + 1..n).all(|j| space.class(i, j) == space.class(perm[i], perm[j])));
        ok.then_some(Isometry { perm })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            perm: other.perm.iter().map(|&i| self.perm[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Isometry {
        let mut perm = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        Isometry { perm }
    }

    pub fn to_map(&self) -> PartialMap {
        PartialMap::from_pairs(self.perm.iter().copied().enumerate()).expect("a permutation is injective")
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.perm)
    }
}

/// Backtracking state shared by enumeration and extension.
struct Search<'a> {
    space: &'a MetricSpace,
    /// Points with equal sorted distance rows share a profile.
    profile: Vec<usize>,
    image: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl<'a> Search<'a> {
    fn new(space: &'a MetricSpace) -> Search<'a> {
        let n = space.n();
        let rows: Vec<Vec<u32>> = (0..n)
            .map(|i| {
                let mut row: Vec<u32> = (0..n).map(|j| space.class(i, j)).collect();
                row.sort_unstable();
                row
            })
            .collect();
        let profile = (0..n).map(|i| rows.iter().position(|r| *r == rows[i]).unwrap()).collect();
        Search {
            space,
            profile,
            image: vec![None; n],
            used: vec![false; n],
        }
    }

    fn fits(&self, x: usize, y: usize) -> bool {
        !self.used[y]
            && self.profile[x] == self.profile[y]
            && self
                .image
                .iter()
                .enumerate()
                .all(|(d, img)| img.is_none_or(|fd| self.space.class(x, d) == self.space.class(y, fd)))
    }

    fn candidates(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.space.n()).filter(move |&y| self.fits(x, y))
    }

    fn assign(&mut self, x: usize, y: usize) {
        self.image[x] = Some(y);
        self.used[y] = true;
    }

    fn unassign(&mut self, x: usize) {
        let y = self.image[x].take().expect("assigned");
        self.used[y] = false;
    }

    fn current(&self) -> Isometry {
        Isometry {
            perm: self.image.iter().map(|y| y.expect("total")).collect(),
        }
    }

    /// Enumerates completions in lexicographic order, assigning points in
    /// index order.
    fn enumerate(&mut self, x: usize, out: &mut Vec<Isometry>) {
        if x == self.space.n() {
            out.push(self.current());
            return;
        }
        if self.image[x].is_some() {
            return self.enumerate(x + 1, out);
        }
        for y in self.candidates(x).collect::<Vec<_>>() {
            self.assign(x, y);
            self.enumerate(x + 1, out);
            self.unassign(x);
        }
    }

    /// Finds one completion, always branching on the open point with the
    /// fewest candidates.
    fn complete(&mut self) -> Option<Isometry> {
        let open = (0..self.space.n())
            .filter(|&x| self.image[x].is_none())
            .map(|x| (self.candidates(x).count(), x))
            .min();
        let Some((_, x)) = open else {
            return Some(self.current());
        };
        for y in self.candidates(x).collect::<Vec<_>>() {
            self.assign(x, y);
            if let Some(iso) = self.complete() {
                return Some(iso);
            }
            self.unassign(x);
        }
        None
    }
}

/// The full autoisometry group, sorted lexicographically by permutation.
pub fn autoisometries(space: &MetricSpace) -> Result<Vec<Isometry>, Error> {
    autoisometries_with_limits(space, &Limits::default())
}

pub fn autoisometries_with_limits(space: &MetricSpace, limits: &Limits) -> Result<Vec<Isometry>, Error> {
    ensure_size(space.n(), limits.group_max_n)?;
    let mut out = Vec::new();
    Search::new(space).enumerate(0, &mut out);
    Ok(out)
}

/// Some autoisometry extending `map`, found by direct search.
pub fn extends_to_autoisometry(space: &MetricSpace, map: &PartialMap) -> Result<Option<Isometry>, Error> {
    extends_with_limits(space, map, &Limits::default())
}

pub fn extends_with_limits(space: &MetricSpace, map: &PartialMap, limits: &Limits) -> Result<Option<Isometry>, Error> {
    ensure_size(space.n(), limits.extension_max_n)?;
    map.check_bounds(space.n())?;
    if !preserves_distances(space, map) {
        return Ok(None);
    }
    let mut search = Search::new(space);
    for &(x, y) in map.pairs() {
        if search.profile[x] != search.profile[y] {
            return Ok(None);
        }
        search.assign(x, y);
    }
    Ok(search.complete())
}

/// All injective `k`-tuples in lexicographic order.
fn injective_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in 0..n {
            if !cur.contains(&x) {
                cur.push(x);
                go(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn check_orbit_args(space: &MetricSpace, k: usize) -> Result<(), Error> {
    if k > space.n() {
        return Err(Error::LimitExceeded(format!(
            "tuple length {k} exceeds the {} points of the space",
            space.n()
        )));
    }
    Ok(())
}

/// Orbits of injective `k`-tuples under the autoisometry group. Each orbit
/// is sorted, and orbits are ordered by their least tuple.
pub fn orbits(space: &MetricSpace, k: usize) -> Result<Vec<Vec<Vec<usize>>>, Error> {
    let limits = Limits::default();
    if space.n() <= limits.group_max_n {
        orbits_by_group(space, k)
    } else {
        orbits_by_extension(space, k)
    }
}

pub fn orbits_by_group(space: &MetricSpace, k: usize) -> Result<Vec<Vec<Vec<usize>>>, Error> {
    check_orbit_args(space, k)?;
    let group = autoisometries(space)?;
    let mut orbits: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut placed = std::collections::HashSet::new();
    for t in injective_tuples(space.n(), k) {
        if placed.contains(&t) {
            continue;
        }
        let mut orbit: Vec<Vec<usize>> = group
            .iter()
            .map(|g| t.iter().map(|&x| g.apply(x)).collect())
            .collect();
        orbit.sort();
        orbit.dedup();
        placed.extend(orbit.iter().cloned());
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Same partition as [`orbits_by_group`], from pairwise extension queries.
pub fn orbits_by_extension(space: &MetricSpace, k: usize) -> Result<Vec<Vec<Vec<usize>>>, Error> {
    check_orbit_args(space, k)?;
    let mut rest = injective_tuples(space.n(), k);
    let mut orbits = Vec::new();
    while !rest.is_empty() {
        let t = rest.remove(0);
        let mut orbit = vec![t.clone()];
        let mut others = Vec::new();
        for u in rest {
            let map = PartialMap::from_pairs(t.iter().copied().zip(u.iter().copied())).expect("injective tuples");
            if extends_to_autoisometry(space, &map)?.is_some() {
                orbit.push(u);
            } else {
                others.push(u);
            }
        }
        orbits.push(orbit);
        rest = others;
    }
    Ok(orbits)
}

/// The first distance-preserving map, in (size, lexicographic) order, with
/// no extension to an autoisometry.
pub fn non_extendable(space: &MetricSpace) -> Result<Option<PartialMap>, Error> {
    ensure_size(space.n(), Limits::default().group_max_n)?;
    for map in partial_isometries(space) {
        if extends_to_autoisometry(space, &map)?.is_none() {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

/// Every distance-preserving partial map extends to an autoisometry.
pub fn is_ultrahomogeneous(space: &MetricSpace) -> Result<bool, Error> {
    Ok(non_extendable(space)?.is_none())
}
