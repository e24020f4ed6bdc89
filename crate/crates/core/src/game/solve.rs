//! Exhaustive game-tree solver, independent of the refinement table.
//!
//! Clocked games are solved by memoized search over `(map, clock)`. The
//! unclocked game is solved by a greatest fixpoint over the positions
//! reachable from the start. Either way the winner gets a certificate that
//! [`Verdict::verify`] checks against every line the opponent can play.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::{Challenge, Clock, Player};
use crate::partial_map::{preserves_distances, InvalidExtension, PartialMap, Side, TuplePair};
use crate::space::MetricSpace;
use crate::{ensure_size, Error, Limits};

/// Player II's replies, keyed by position, remaining clock and challenge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StrategyTable {
    entries: BTreeMap<(PartialMap, Clock, Challenge), usize>,
}

impl StrategyTable {
    pub fn reply(&self, map: &PartialMap, clock: Clock, challenge: Challenge) -> Option<usize> {
        self.entries.get(&(map.clone(), clock, challenge)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Player I's winning plan: one challenge per position, branching on every
/// response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChallengeTree {
    /// The start position is already lost for II.
    Immediate,
    Node { challenge: Challenge, replies: Vec<(usize, Reply)> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reply {
    Invalid { reason: InvalidExtension },
    /// The game ends here with a map that is not a partial isometry.
    Lost,
    Continue { tree: ChallengeTree },
}

impl ChallengeTree {
    /// Length of the longest line I needs, in rounds.
    pub fn depth(&self) -> usize {
        match self {
            ChallengeTree::Immediate => 0,
            ChallengeTree::Node { replies, .. } => {
                1 + replies
                    .iter()
                    .map(|(_, r)| match r {
                        Reply::Continue { tree } => tree.depth(),
                        _ => 0,
                    })
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// The first challenge, if any round is played.
    pub fn first(&self) -> Option<Challenge> {
        match self {
            ChallengeTree::Immediate => None,
            ChallengeTree::Node { challenge, .. } => Some(*challenge),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Strategy(StrategyTable),
    Challenges(ChallengeTree),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub winner: Player,
    pub certificate: Certificate,
}

fn challenges(n: usize, clock: Clock) -> Vec<Challenge> {
    let ordinals: Vec<Option<u32>> = match clock {
        Clock::Finite(c) => (0..c).map(Some).collect(),
        Clock::Infinity => vec![None],
    };
    ordinals
        .into_iter()
        .flat_map(|ordinal| {
            Side::BOTH
                .into_iter()
                .flat_map(move |side| (0..n).map(move |point| Challenge { ordinal, side, point }))
        })
        .collect()
}

fn next_clock(ch: &Challenge) -> Clock {
    ch.ordinal.map_or(Clock::Infinity, Clock::Finite)
}

/// Memoized solver for one space.
pub struct GameSolver<'a> {
    space: &'a MetricSpace,
    clocked: HashMap<(PartialMap, u32), bool>,
}

impl<'a> GameSolver<'a> {
    pub fn new(space: &'a MetricSpace) -> GameSolver<'a> {
        GameSolver {
            space,
            clocked: HashMap::new(),
        }
    }

    /// Whether II survives a round with ordinal `k` ending in `next`.
    fn ii_survives_round(&mut self, next: &PartialMap, k: u32) -> bool {
        if k == 0 {
            preserves_distances(self.space, next)
        } else {
            self.ii_wins_clocked(next, k)
        }
    }

    /// II wins `EF(map, c)` with I to move and `c >= 1`, or `c = 0` and the
    /// map decides.
    pub fn ii_wins_clocked(&mut self, map: &PartialMap, c: u32) -> bool {
        if c == 0 {
            return preserves_distances(self.space, map);
        }
        if let Some(&v) = self.clocked.get(&(map.clone(), c)) {
            return v;
        }
        let n = self.space.n();
        // Lower ordinals first: they are cheaper and usually decide.
        let mut result = true;
        'outer: for k in 0..c {
            for side in Side::BOTH {
                for x in 0..n {
                    let answered = (0..n).any(|y| match map.extend(side, x, y) {
                        Ok(next) => self.ii_survives_round(&next, k),
                        Err(_) => false,
                    });
                    if !answered {
                        result = false;
                        break 'outer;
                    }
                }
            }
        }
        self.clocked.insert((map.clone(), c), result);
        result
    }

    fn ii_table_clocked(&mut self, map: &PartialMap, c: u32, table: &mut StrategyTable, seen: &mut HashSet<(PartialMap, u32)>) {
        if c == 0 || !seen.insert((map.clone(), c)) {
            return;
        }
        let n = self.space.n();
        for ch in challenges(n, Clock::Finite(c)) {
            let k = ch.ordinal.unwrap_or(0);
            let reply = (0..n).find_map(|y| match map.extend(ch.side, ch.point, y) {
                Ok(next) if self.ii_survives_round(&next, k) => Some((y, next)),
                _ => None,
            });
            let Some((y, next)) = reply else { continue };
            table.entries.insert((map.clone(), Clock::Finite(c), ch), y);
            self.ii_table_clocked(&next, k, table, seen);
        }
    }

    fn i_tree_clocked(&mut self, map: &PartialMap, c: u32) -> ChallengeTree {
        let n = self.space.n();
        for ch in challenges(n, Clock::Finite(c)) {
            let k = ch.ordinal.unwrap_or(0);
            let wins = (0..n).all(|y| match map.extend(ch.side, ch.point, y) {
                Ok(next) => !self.ii_survives_round(&next, k),
                Err(_) => true,
            });
            if !wins {
                continue;
            }
            let replies = (0..n)
                .map(|y| {
                    let reply = match map.extend(ch.side, ch.point, y) {
                        Err(reason) => Reply::Invalid { reason },
                        Ok(_) if k == 0 => Reply::Lost,
                        Ok(next) => Reply::Continue {
                            tree: self.i_tree_clocked(&next, k),
                        },
                    };
                    (y, reply)
                })
                .collect();
            return ChallengeTree::Node { challenge: ch, replies };
        }
        unreachable!("I-tree requested for a position II wins")
    }

    /// Removal round for every position reachable from `start` in the
    /// unclocked game; `None` means II survives forever from there.
    /// Positions that fail to preserve distances are removed in round 0.
    fn unclocked_fixpoint(&self, start: &PartialMap) -> HashMap<PartialMap, Option<u32>> {
        let n = self.space.n();
        let mut removed: HashMap<PartialMap, Option<u32>> = HashMap::new();
        let mut queue = VecDeque::from([start.clone()]);
        removed.insert(start.clone(), None);
        while let Some(map) = queue.pop_front() {
            if !preserves_distances(self.space, &map) {
                removed.insert(map, Some(0));
                continue;
            }
            if map.len() == n {
                continue;
            }
            for side in Side::BOTH {
                for x in 0..n {
                    for y in 0..n {
                        if let Ok(next) = map.extend(side, x, y) {
                            if !removed.contains_key(&next) {
                                removed.insert(next.clone(), None);
                                queue.push_back(next);
                            }
                        }
                    }
                }
            }
        }
        let mut round = 0;
        loop {
            round += 1;
            let dropped: Vec<PartialMap> = removed
                .iter()
                .filter(|(map, r)| r.is_none() && map.len() < n)
                .filter(|(map, _)| {
                    Side::BOTH.into_iter().any(|side| {
                        (0..n).any(|x| {
                            (0..n).all(|y| match map.extend(side, x, y) {
                                Ok(next) => removed[&next].is_some(),
                                Err(_) => true,
                            })
                        })
                    })
                })
                .map(|(map, _)| map.clone())
                .collect();
            if dropped.is_empty() {
                return removed;
            }
            for map in dropped {
                removed.insert(map, Some(round));
            }
        }
    }

    fn ii_table_unclocked(
        &self,
        removed: &HashMap<PartialMap, Option<u32>>,
        map: &PartialMap,
        table: &mut StrategyTable,
        seen: &mut HashSet<PartialMap>,
    ) {
        let n = self.space.n();
        if map.len() == n || !seen.insert(map.clone()) {
            return;
        }
        for ch in challenges(n, Clock::Infinity) {
            let reply = (0..n).find_map(|y| match map.extend(ch.side, ch.point, y) {
                Ok(next) if removed[&next].is_none() => Some((y, next)),
                _ => None,
            });
            let (y, next) = reply.expect("surviving position answers every challenge");
            table.entries.insert((map.clone(), Clock::Infinity, ch), y);
            self.ii_table_unclocked(removed, &next, table, seen);
        }
    }

    fn i_tree_unclocked(&self, removed: &HashMap<PartialMap, Option<u32>>, map: &PartialMap) -> ChallengeTree {
        let n = self.space.n();
        let round = removed[map].expect("I-tree requested for a surviving position");
        let ch = challenges(n, Clock::Infinity)
            .into_iter()
            .find(|ch| {
                (0..n).all(|y| match map.extend(ch.side, ch.point, y) {
                    Ok(next) => matches!(removed[&next], Some(r) if r < round),
                    Err(_) => true,
                })
            })
            .expect("removed position has a refuting challenge");
        let replies = (0..n)
            .map(|y| {
                let reply = match map.extend(ch.side, ch.point, y) {
                    Err(reason) => Reply::Invalid { reason },
                    Ok(next) if !preserves_distances(self.space, &next) => Reply::Lost,
                    Ok(next) => Reply::Continue {
                        tree: self.i_tree_unclocked(removed, &next),
                    },
                };
                (y, reply)
            })
            .collect();
        ChallengeTree::Node { challenge: ch, replies }
    }

    /// Solves `EF(tuples, clock)`.
    pub fn solve(&mut self, tuples: &TuplePair, clock: Clock) -> Result<Verdict, Error> {
        tuples.check_bounds(self.space.n())?;
        let start = match tuples.normalize() {
            Ok(m) if preserves_distances(self.space, &m) => m,
            _ => {
                return Ok(Verdict {
                    winner: Player::I,
                    certificate: Certificate::Challenges(ChallengeTree::Immediate),
                })
            }
        };
        let verdict = match clock {
            Clock::Finite(c) => {
                if self.ii_wins_clocked(&start, c) {
                    let mut table = StrategyTable::default();
                    self.ii_table_clocked(&start, c, &mut table, &mut HashSet::new());
                    Verdict {
                        winner: Player::II,
                        certificate: Certificate::Strategy(table),
                    }
                } else {
                    Verdict {
                        winner: Player::I,
                        certificate: Certificate::Challenges(self.i_tree_clocked(&start, c)),
                    }
                }
            }
            Clock::Infinity => {
                let removed = self.unclocked_fixpoint(&start);
                if removed[&start].is_none() {
                    let mut table = StrategyTable::default();
                    self.ii_table_unclocked(&removed, &start, &mut table, &mut HashSet::new());
                    Verdict {
                        winner: Player::II,
                        certificate: Certificate::Strategy(table),
                    }
                } else {
                    Verdict {
                        winner: Player::I,
                        certificate: Certificate::Challenges(self.i_tree_unclocked(&removed, &start)),
                    }
                }
            }
        };
        Ok(verdict)
    }
}

/// Solves `EF(a, b, clock)` under the default size limit.
pub fn solve(space: &MetricSpace, tuples: &TuplePair, clock: Clock) -> Result<Verdict, Error> {
    solve_with_limits(space, tuples, clock, &Limits::default())
}

pub fn solve_with_limits(space: &MetricSpace, tuples: &TuplePair, clock: Clock, limits: &Limits) -> Result<Verdict, Error> {
    ensure_size(space.n(), limits.game_max_n)?;
    GameSolver::new(space).solve(tuples, clock)
}

impl Verdict {
    /// Replays the certificate against every line of the opponent. Returns
    /// `false` if any line escapes it.
    pub fn verify(&self, space: &MetricSpace, tuples: &TuplePair, clock: Clock) -> bool {
        let start = match tuples.normalize() {
            Ok(m) if preserves_distances(space, &m) => Some(m),
            _ => None,
        };
        match (&self.certificate, start) {
            (Certificate::Challenges(ChallengeTree::Immediate), start) => start.is_none() && self.winner == Player::I,
            (_, None) => false,
            (Certificate::Strategy(table), Some(start)) => {
                self.winner == Player::II && verify_ii(space, table, &start, clock, &mut HashSet::new())
            }
            (Certificate::Challenges(tree), Some(start)) => {
                self.winner == Player::I && verify_i(space, tree, &start, clock)
            }
        }
    }
}

/// Every I line against `table` ends in a win for II. An unclocked line
/// may revisit a position; play that never ends is won by II, so a revisit
/// counts as checked.
fn verify_ii(space: &MetricSpace, table: &StrategyTable, map: &PartialMap, clock: Clock, seen: &mut HashSet<(PartialMap, Clock)>) -> bool {
    let n = space.n();
    match clock {
        Clock::Finite(0) => return true,
        Clock::Infinity if map.len() == n => return true,
        _ => {}
    }
    if !seen.insert((map.clone(), clock)) {
        return true;
    }
    challenges(n, clock).into_iter().all(|ch| {
        let Some(y) = table.reply(map, clock, ch) else {
            return false;
        };
        let Ok(next) = map.extend(ch.side, ch.point, y) else {
            return false;
        };
        if !preserves_distances(space, &next) {
            return false;
        }
        match ch.ordinal {
            Some(0) => true,
            _ => verify_ii(space, table, &next, next_clock(&ch), seen),
        }
    })
}

/// Every II line against `tree` ends in a win for I.
fn verify_i(space: &MetricSpace, tree: &ChallengeTree, map: &PartialMap, clock: Clock) -> bool {
    let n = space.n();
    let ChallengeTree::Node { challenge: ch, replies } = tree else {
        return false;
    };
    let legal = match (clock, ch.ordinal) {
        (Clock::Finite(c), Some(k)) => k < c,
        (Clock::Infinity, None) => map.len() < n,
        _ => false,
    };
    if !legal || ch.point >= n || replies.len() != n {
        return false;
    }
    replies.iter().enumerate().all(|(y, (ry, reply))| {
        if *ry != y {
            return false;
        }
        match (map.extend(ch.side, ch.point, y), reply) {
            (Err(e), Reply::Invalid { reason }) => e == *reason,
            (Ok(next), Reply::Lost) => {
                !preserves_distances(space, &next) && matches!(ch.ordinal, Some(0) | None)
            }
            // A clocked game goes on after a broken round; the unclocked
            // game would have ended.
            (Ok(next), Reply::Continue { tree }) => {
                let ends = match ch.ordinal {
                    Some(k) => k == 0,
                    None => !preserves_distances(space, &next),
                };
                !ends && verify_i(space, tree, &next, next_clock(ch))
            }
            _ => false,
        }
    })
}
