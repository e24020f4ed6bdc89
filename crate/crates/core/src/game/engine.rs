//! Table-driven play: the engine's move choice and per-position hints.

use serde::Serialize;

use super::{Challenge, Clock, GameState, Move, Phase};
use crate::bf::{Rank, RefinementTable};
use crate::partial_map::{PartialMap, Side};
use crate::Error;

fn check_table(state: &GameState, table: &RefinementTable) -> Result<(), Error> {
    if table.n() != state.space().n() || table.space_id() != state.space_id() {
        return Err(Error::TableMismatch);
    }
    Ok(())
}

/// Rank after a response, `None` when the response is not a valid extension.
fn rank_after(table: &RefinementTable, map: &PartialMap, side: Side, x: usize, y: usize) -> Option<Rank> {
    map.extend(side, x, y).ok().map(|m| table.rank(&m).expect("indices checked"))
}

/// Whether II is still winning after a round ending at `rank` with the
/// given ordinal. Unclocked, only autoisometry-extendable maps survive.
fn ii_holds(rank: Rank, ordinal: Option<u32>) -> bool {
    match ordinal {
        Some(k) => rank.survives(k),
        None => rank.is_top(),
    }
}

/// Challenge order for tie-breaks: lowest point first, L before R.
fn challenge_order(n: usize) -> impl Iterator<Item = (usize, Side)> {
    (0..n).flat_map(|x| Side::BOTH.into_iter().map(move |side| (x, side)))
}

fn surviving_responses(table: &RefinementTable, map: &PartialMap, side: Side, x: usize, ordinal: Option<u32>) -> usize {
    (0..table.n())
        .filter(|&y| rank_after(table, map, side, x, y).is_some_and(|r| ii_holds(r, ordinal)))
        .count()
}

/// I's challenge with the fewest surviving responses at this ordinal. The
/// unclocked game only gets fresh points: a pebbled point leaves the map as
/// it is and play could cycle.
fn stingiest(table: &RefinementTable, map: &PartialMap, ordinal: Option<u32>, fresh_only: bool) -> Challenge {
    let fresh = |x: usize, side: Side| match side {
        Side::L => map.get(x).is_none(),
        Side::R => map.preimage(x).is_none(),
    };
    let (point, side) = challenge_order(table.n())
        .filter(|&(x, side)| !fresh_only || fresh(x, side))
        .min_by_key(|&(x, side)| surviving_responses(table, map, side, x, ordinal))
        .expect("a game in progress has a fresh point");
    Challenge { ordinal, side, point }
}

fn engine_challenge(state: &GameState, table: &RefinementTable) -> Challenge {
    let map = state.map();
    let rank = table.rank(map).expect("indices checked");
    match (state.clock(), rank) {
        // A broken map: any round with ordinal 0 ends the game.
        (Clock::Finite(_), Rank::Finite(0)) => Challenge {
            ordinal: Some(0),
            side: Side::L,
            point: 0,
        },
        // Winning for I: declare one below the rank and refute.
        (Clock::Finite(c), Rank::Finite(s)) if s <= c => stingiest(table, map, Some(s - 1), false),
        (Clock::Finite(c), _) => stingiest(table, map, Some(c - 1), false),
        // Unclocked and winning: push the rank strictly down.
        (Clock::Infinity, Rank::Finite(s)) if s > 0 => stingiest(table, map, Some(s - 1), true).without_ordinal(),
        (Clock::Infinity, _) => stingiest(table, map, None, true),
    }
}

impl Challenge {
    fn without_ordinal(self) -> Challenge {
        Challenge { ordinal: None, ..self }
    }
}

/// The engine's move for whichever player is to move.
///
/// Player I declares one below the current map's rank when that is within
/// the clock and picks a challenge every response to which falls out of the
/// next level. Player II answers with the response of highest rank. Ties go
/// to the lowest point index, then L before R.
pub fn engine_move(state: &GameState, table: &RefinementTable) -> Result<Move, Error> {
    check_table(state, table)?;
    match state.phase() {
        Phase::Over(_) => Err(Error::GameOver),
        Phase::AwaitChallenge => Ok(Move::Challenge(engine_challenge(state, table))),
        Phase::AwaitResponse(ch) => {
            let map = state.map();
            let point = (0..table.n())
                .rev()
                .max_by_key(|&y| rank_after(table, map, ch.side, ch.point, y))
                .expect("space is nonempty");
            Ok(Move::Response { point })
        }
    }
}

/// Advice for the player to move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hints {
    /// Rank of the current map.
    pub rank: Rank,
    /// Moves after which the mover still wins with best play.
    pub non_losing: Vec<Move>,
}

pub fn hints(state: &GameState, table: &RefinementTable) -> Result<Hints, Error> {
    check_table(state, table)?;
    let map = state.map();
    let rank = table.rank(map)?;
    let n = table.n();
    let non_losing = match state.phase() {
        Phase::Over(_) => return Err(Error::GameOver),
        Phase::AwaitChallenge => state
            .legal_moves()?
            .into_iter()
            .filter(|mv| match mv {
                Move::Challenge(ch) => {
                    (0..n).all(|y| !rank_after(table, map, ch.side, ch.point, y).is_some_and(|r| ii_holds(r, ch.ordinal)))
                }
                Move::Response { .. } => false,
            })
            .collect(),
        Phase::AwaitResponse(ch) => (0..n)
            .filter(|&y| rank_after(table, map, ch.side, ch.point, y).is_some_and(|r| ii_holds(r, ch.ordinal)))
            .map(|point| Move::Response { point })
            .collect(),
    };
    Ok(Hints { rank, non_losing })
}
