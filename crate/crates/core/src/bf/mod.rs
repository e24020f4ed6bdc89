//! The back-and-forth hierarchy over partial maps.
//!
//! `E_0` is the set of distance-preserving partial maps (the empty map and
//! the autoisometries included). `E_{a+1}` keeps those `p` in `E_a` such that
//! every point outside the domain can be added with some image, and every
//! point outside the range with some preimage, landing back in `E_a`. A map
//! has rank `k` when it first drops out at level `k`, and rank [`Rank::Top`]
//! when it never does.

mod naive;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::partial_map::{PartialMap, TuplePair};
use crate::space::MetricSpace;
use crate::{ensure_size, Error, Limits};

pub use naive::{rank_of_pair_naive, NaiveEvaluator};

/// Rank of a pair: the first level it fails, or `Top` if it fails none.
/// `Finite(_) < Top`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rank {
    Finite(u32),
    Top,
}

impl Rank {
    pub fn is_top(self) -> bool {
        self == Rank::Top
    }

    /// Whether a map of this rank belongs to `E_alpha`.
    pub fn survives(self, alpha: u32) -> bool {
        self > Rank::Finite(alpha)
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(k) => write!(f, "{k}"),
            Rank::Top => f.write_str("top"),
        }
    }
}

impl Serialize for Rank {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Rank::Finite(k) => serializer.serialize_u32(*k),
            Rank::Top => serializer.serialize_str("top"),
        }
    }
}

impl<'de> Deserialize<'de> for Rank {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rank, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Finite(u32),
            Named(String),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Finite(k) => Ok(Rank::Finite(k)),
            Wire::Named(s) if s == "top" => Ok(Rank::Top),
            Wire::Named(s) => Err(serde::de::Error::custom(format!("unknown rank {s:?}"))),
        }
    }
}

const TOP: u32 = u32::MAX;

/// Packed partial map: nibble `x` holds `target + 1`, or 0 when `x` is
/// unmapped.
type Key = u64;

#[inline]
fn slot(key: Key, x: usize) -> u64 {
    (key >> (4 * x)) & 0xF
}

#[inline]
fn with_pair(key: Key, source: usize, target: usize) -> Key {
    key | ((target as u64 + 1) << (4 * source))
}

fn masks(key: Key, n: usize) -> (u32, u32) {
    let (mut dom, mut ran) = (0u32, 0u32);
    for x in 0..n {
        let v = slot(key, x);
        if v != 0 {
            dom |= 1 << x;
            ran |= 1 << (v - 1);
        }
    }
    (dom, ran)
}

fn key_of(map: &PartialMap) -> Key {
    map.pairs()
        .iter()
        .fold(0, |key, &(s, t)| with_pair(key, s, t))
}

fn map_of(key: Key, n: usize) -> PartialMap {
    PartialMap::from_pairs(
        (0..n)
            .filter(|&x| slot(key, x) != 0)
            .map(|x| (x, slot(key, x) as usize - 1)),
    )
    .expect("packed maps are injective")
}

/// Sort key realizing (size, pairs lexicographically).
fn order_key(key: Key, n: usize) -> u128 {
    let mut size = 0u128;
    let mut seq = 0u128;
    for x in 0..n {
        let v = slot(key, x);
        if v != 0 {
            seq = (seq << 8) | ((x as u128) << 4) | (v as u128 - 1);
            size += 1;
        }
    }
    (size << 120) | (seq << (8 * (15 - size as u32)))
}

/// Dense numbering of all injective partial maps on `n` points: maps are
/// grouped by domain subset, and within a group ranked by their target
/// sequence as a mixed-radix number with radices `n, n-1, ...`.
struct MapIndex {
    n: usize,
    offsets: Vec<usize>,
    total: usize,
}

impl MapIndex {
    fn new(n: usize) -> MapIndex {
        let falling = |k: u32| ((n - k as usize + 1)..=n).product::<usize>();
        let mut offsets = Vec::with_capacity(1 << n);
        let mut total = 0;
        for mask in 0u32..(1 << n) {
            offsets.push(total);
            total += falling(mask.count_ones());
        }
        MapIndex { n, offsets, total }
    }

    #[inline]
    fn index(&self, key: Key) -> usize {
        let (mut dom, mut used, mut rank, mut placed) = (0u32, 0u32, 0usize, 0usize);
        for x in 0..self.n {
            let v = slot(key, x);
            if v != 0 {
                let t = (v - 1) as u32;
                dom |= 1 << x;
                let below = (((1u32 << t) - 1) & !used).count_ones() as usize;
                rank = rank * (self.n - placed) + below;
                used |= 1 << t;
                placed += 1;
            }
        }
        self.offsets[dom as usize] + rank
    }
}

/// The refinement chain of one space, with the rank of every partial map.
pub struct RefinementTable {
    space_id: String,
    index: MapIndex,
    /// Rank per dense index; 0 for maps outside `E_0`, `TOP` for survivors.
    ranks: Vec<u32>,
    /// Distance-preserving maps in (size, lexicographic) order.
    preserving: Vec<Key>,
    alpha_star: u32,
    level_sizes: Vec<usize>,
}

/// Scott rank of a space and a map attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScottRank {
    /// Supremum of `rank + 1` over pairs that admit a partial isometry.
    pub value: u32,
    /// A maximizing map of least size, then lexicographically least.
    pub witness: Option<PartialMap>,
    /// The supremum taken over all tuple pairs, including those that are
    /// not even level-0 equivalent.
    pub literal: u32,
}

/// Serializable dump of a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableExport {
    pub space: String,
    pub alpha_star: u32,
    pub level_sizes: Vec<usize>,
    pub entries: Vec<TableEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub map: String,
    pub rank: Rank,
}

/// Refines with the default size limit.
pub fn refine(space: &MetricSpace) -> Result<RefinementTable, Error> {
    refine_with_limit(space, Limits::default().refine_max_n)
}

pub fn refine_with_limit(space: &MetricSpace, limit: usize) -> Result<RefinementTable, Error> {
    let n = space.n();
    ensure_size(n, limit.min(Limits::REFINE_CEILING))?;
    let index = MapIndex::new(n);
    let mut ranks = vec![0u32; index.total];

    let mut preserving = Vec::new();
    collect_preserving(space, 0, 0, 0, &mut preserving);
    for &key in &preserving {
        ranks[index.index(key)] = TOP;
    }
    preserving.sort_unstable_by_key(|&k| order_key(k, n));

    let mut alive = preserving.clone();
    let mut level_sizes = vec![alive.len()];
    let mut alpha = 0u32;
    loop {
        // Survival at level alpha+1 reads membership in E_alpha only. Maps
        // dropped in this pass get rank alpha+1 > alpha, so writing them in
        // afterwards leaves E_alpha intact for the next pass's reads too.
        let dropped: Vec<Key> = {
            let ranks = &ranks;
            let index = &index;
            alive
                .par_iter()
                .copied()
                .filter(|&key| !survives(index, ranks, key, alpha))
                .collect()
        };
        if dropped.is_empty() {
            break;
        }
        for &key in &dropped {
            ranks[index.index(key)] = alpha + 1;
        }
        alive.retain(|&key| ranks[index.index(key)] == TOP);
        alpha += 1;
        level_sizes.push(alive.len());
    }
    // Each strict step removes at least one of the finitely many maps, so
    // the chain is constant from alpha on: E_alpha = E_omega, and every
    // later level, limit or successor, equals it. Natural levels suffice.
    Ok(RefinementTable {
        space_id: space.fingerprint(),
        index,
        ranks,
        preserving,
        alpha_star: alpha,
        level_sizes,
    })
}

fn collect_preserving(space: &MetricSpace, next: usize, key: Key, used: u32, out: &mut Vec<Key>) {
    let n = space.n();
    if next == n {
        out.push(key);
        return;
    }
    collect_preserving(space, next + 1, key, used, out);
    for target in 0..n {
        if used >> target & 1 == 1 {
            continue;
        }
        let consistent = (0..next).all(|s| {
            let v = slot(key, s);
            v == 0 || space.class(s, next) == space.class(v as usize - 1, target)
        });
        if consistent {
            collect_preserving(space, next + 1, with_pair(key, next, target), used | 1 << target, out);
        }
    }
}

fn survives(index: &MapIndex, ranks: &[u32], key: Key, alpha: u32) -> bool {
    let n = index.n;
    let (dom, ran) = masks(key, n);
    let in_level = |k: Key| ranks[index.index(k)] > alpha;
    let forth = (0..n)
        .filter(|x| dom >> x & 1 == 0)
        .all(|x| (0..n).filter(|y| ran >> y & 1 == 0).any(|y| in_level(with_pair(key, x, y))));
    forth
        && (0..n)
            .filter(|y| ran >> y & 1 == 0)
            .all(|y| (0..n).filter(|x| dom >> x & 1 == 0).any(|x| in_level(with_pair(key, x, y))))
}

impl RefinementTable {
    pub fn n(&self) -> usize {
        self.index.n
    }

    /// Fingerprint of the space the table was built for.
    pub fn space_id(&self) -> &str {
        &self.space_id
    }

    /// Least level at which the chain becomes constant.
    pub fn alpha_star(&self) -> u32 {
        self.alpha_star
    }

    /// `|E_0|, |E_1|, ..., |E_alpha_star|`.
    pub fn level_sizes(&self) -> &[usize] {
        &self.level_sizes
    }

    fn rank_of_key(&self, key: Key) -> Rank {
        match self.ranks[self.index.index(key)] {
            TOP => Rank::Top,
            k => Rank::Finite(k),
        }
    }

    /// Rank of any partial map; maps that do not preserve distances have
    /// rank 0.
    pub fn rank(&self, map: &PartialMap) -> Result<Rank, Error> {
        map.check_bounds(self.n())?;
        Ok(self.rank_of_key(key_of(map)))
    }

    /// Membership `map ∈ E_alpha`.
    pub fn contains(&self, map: &PartialMap, alpha: u32) -> Result<bool, Error> {
        Ok(self.rank(map)?.survives(alpha))
    }

    /// Every distance-preserving map with its rank, in (size, lexicographic)
    /// order.
    pub fn entries(&self) -> impl Iterator<Item = (PartialMap, Rank)> + '_ {
        self.preserving
            .iter()
            .map(|&key| (map_of(key, self.n()), self.rank_of_key(key)))
    }

    /// Members of `E_alpha`.
    pub fn level(&self, alpha: u32) -> impl Iterator<Item = PartialMap> + '_ {
        self.preserving
            .iter()
            .filter(move |&&key| self.rank_of_key(key).survives(alpha))
            .map(|&key| map_of(key, self.n()))
    }

    /// Rank of a tuple pair: 0 when the tuples induce no distance-preserving
    /// map, otherwise the rank of the induced map.
    pub fn rank_of_pair(&self, tp: &TuplePair) -> Result<Rank, Error> {
        tp.check_bounds(self.n())?;
        match tp.normalize() {
            Err(_) => Ok(Rank::Finite(0)),
            Ok(map) => self.rank(&map),
        }
    }

    /// Whether the tuples are `alpha`-equivalent.
    pub fn equiv_at(&self, tp: &TuplePair, alpha: u32) -> Result<bool, Error> {
        Ok(self.rank_of_pair(tp)?.survives(alpha))
    }

    pub fn scott_rank(&self) -> ScottRank {
        let mut best: Option<(u32, Key)> = None;
        for &key in &self.preserving {
            if let Rank::Finite(k) = self.rank_of_key(key) {
                if best.map_or(true, |(b, _)| k > b) {
                    best = Some((k, key));
                }
            }
        }
        let value = best.map_or(0, |(k, _)| k + 1);
        // With two or more points a tuple pair such as ((0, 0), (0, 1)) has
        // no partial isomorphism at all and contributes rank 0 + 1.
        let literal = if self.n() >= 2 { value.max(1) } else { value };
        ScottRank {
            value,
            witness: best.map(|(_, key)| map_of(key, self.n())),
            literal,
        }
    }

    /// Maps of maximal finite rank, in canonical order.
    pub fn worst_pairs(&self) -> Vec<(PartialMap, Rank)> {
        let Some(max) = self
            .preserving
            .iter()
            .filter_map(|&k| match self.rank_of_key(k) {
                Rank::Finite(r) => Some(r),
                Rank::Top => None,
            })
            .max()
        else {
            return Vec::new();
        };
        self.entries()
            .filter(|(_, r)| *r == Rank::Finite(max))
            .collect()
    }

    pub fn export(&self) -> TableExport {
        TableExport {
            space: self.space_id.clone(),
            alpha_star: self.alpha_star,
            level_sizes: self.level_sizes.clone(),
            entries: self
                .entries()
                .map(|(map, rank)| TableEntry {
                    map: map.to_string(),
                    rank,
                })
                .collect(),
        }
    }

    /// Same (map, rank) pairs as another table.
    pub fn same_ranks(&self, other: &RefinementTable) -> bool {
        self.n() == other.n() && self.preserving == other.preserving && self.entries().eq(other.entries())
    }
}

impl fmt::Debug for RefinementTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RefinementTable")
            .field("space", &self.space_id)
            .field("alpha_star", &self.alpha_star)
            .field("level_sizes", &self.level_sizes)
            .finish()
    }
}

/// `tp ∈ ≡_alpha` in `space`.
pub fn equiv_at(space: &MetricSpace, tp: &TuplePair, alpha: u32) -> Result<bool, Error> {
    tp.check_bounds(space.n())?;
    refine(space)?.equiv_at(tp, alpha)
}

pub fn rank_of_pair(space: &MetricSpace, tp: &TuplePair) -> Result<Rank, Error> {
    tp.check_bounds(space.n())?;
    refine(space)?.rank_of_pair(tp)
}

pub fn scott_rank(space: &MetricSpace) -> Result<ScottRank, Error> {
    Ok(refine(space)?.scott_rank())
}
