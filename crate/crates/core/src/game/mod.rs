//! Clocked and unclocked Ehrenfeucht-Fraisse games on a metric space.
//!
//! Player I challenges by naming a side and a point (and, in the clocked
//! game, an ordinal strictly below the previous one); Player II answers with
//! a point on the other side. Positions are partial maps: the `a` tuple plus
//! all left-side points against the `b` tuple plus all right-side points.

mod engine;
mod solve;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::partial_map::{preserves_distances, InvalidExtension, PartialMap, Side, TuplePair};
use crate::space::MetricSpace;
use crate::Error;

pub use engine::{engine_move, hints, Hints};
pub use solve::{solve, solve_with_limits, Certificate, ChallengeTree, GameSolver, Reply, StrategyTable, Verdict};

/// Game clock: a natural-number ordinal budget, or none at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clock {
    Finite(u32),
    Infinity,
}

impl fmt::Display for Clock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clock::Finite(k) => write!(f, "{k}"),
            Clock::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Clock {
    type Err = String;

    fn from_str(s: &str) -> Result<Clock, String> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Clock::Infinity),
            _ => s
                .parse()
                .map(Clock::Finite)
                .map_err(|_| format!("clock must be a natural number or 'inf', got {s:?}")),
        }
    }
}

impl Serialize for Clock {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Clock::Finite(k) => serializer.serialize_u32(*k),
            Clock::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Clock {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Clock, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Finite(u32),
            Named(String),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Finite(k) => Ok(Clock::Finite(k)),
            Wire::Named(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

/// A challenge by Player I. `ordinal` is present exactly in clocked games.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Challenge {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<u32>,
    pub side: Side,
    pub point: usize,
}

impl fmt::Display for Challenge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ordinal {
            Some(k) => write!(f, "({k}, {}, {})", self.side, self.point),
            None => write!(f, "({}, {})", self.side, self.point),
        }
    }
}

/// Wire form: `{"type":"challenge","ordinal":k,"side":"L","point":i}` or
/// `{"type":"response","point":j}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Move {
    Challenge(Challenge),
    Response { point: usize },
}

impl Move {
    pub fn challenge(ordinal: Option<u32>, side: Side, point: usize) -> Move {
        Move::Challenge(Challenge { ordinal, side, point })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Challenge(c) => write!(f, "challenge {c}"),
            Move::Response { point } => write!(f, "response {point}"),
        }
    }
}

/// A completed round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal: Option<u32>,
    pub side: Side,
    pub challenge: usize,
    pub response: usize,
}

impl Round {
    /// The (left point, right point) pebble pair placed this round.
    pub fn pebbles(&self) -> (usize, usize) {
        match self.side {
            Side::L => (self.challenge, self.response),
            Side::R => (self.response, self.challenge),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OverReason {
    /// The starting tuples admit no partial isometry.
    BaseNotPreserving,
    /// Clock 0: no round can be played; the base map decides.
    ZeroClock,
    /// Player II's response broke functionality or injectivity.
    InvalidExtension { reason: InvalidExtension },
    /// A round with declared ordinal 0 was completed.
    ClockExpired,
    /// Unclocked game: the map covers every point.
    MapTotal,
    /// Unclocked game: the map stopped preserving distances.
    NotIsometry,
}

impl fmt::Display for OverReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverReason::BaseNotPreserving => f.write_str("base map is not a partial isometry"),
            OverReason::ZeroClock => f.write_str("0-clock: base map decides"),
            OverReason::InvalidExtension { reason } => write!(f, "invalid extension ({reason})"),
            OverReason::ClockExpired => f.write_str("round with ordinal 0 completed"),
            OverReason::MapTotal => f.write_str("map is total"),
            OverReason::NotIsometry => f.write_str("map no longer preserves distances"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub winner: Player,
    pub reason: OverReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    AwaitChallenge,
    AwaitResponse(Challenge),
    Over(Outcome),
}

/// An immutable snapshot of a game. [`GameState::apply_move`] returns a new
/// snapshot.
#[derive(Debug, Clone)]
pub struct GameState {
    space: Arc<MetricSpace>,
    space_id: String,
    tuples: TuplePair,
    initial_clock: Clock,
    clock: Clock,
    map: PartialMap,
    rounds: Vec<Round>,
    log: Vec<Move>,
    phase: Phase,
}

impl GameState {
    /// Starts `EF(a, b, clock)`. Tuples that induce no partial isometry
    /// end the game at once with Player I the winner.
    pub fn new(space: Arc<MetricSpace>, tuples: TuplePair, clock: Clock) -> Result<GameState, Error> {
        tuples.check_bounds(space.n())?;
        let base = tuples
            .normalize()
            .ok()
            .filter(|m| preserves_distances(&space, m));
        let n = space.n();
        let (map, phase) = match base {
            None => (
                PartialMap::empty(),
                Phase::Over(Outcome {
                    winner: Player::I,
                    reason: OverReason::BaseNotPreserving,
                }),
            ),
            Some(map) => {
                let phase = match clock {
                    Clock::Finite(0) => Phase::Over(Outcome {
                        winner: Player::II,
                        reason: OverReason::ZeroClock,
                    }),
                    Clock::Infinity if map.len() == n => Phase::Over(Outcome {
                        winner: Player::II,
                        reason: OverReason::MapTotal,
                    }),
                    _ => Phase::AwaitChallenge,
                };
                (map, phase)
            }
        };
        Ok(GameState {
            space_id: space.fingerprint(),
            space,
            tuples,
            initial_clock: clock,
            clock,
            map,
            rounds: Vec::new(),
            log: Vec::new(),
            phase,
        })
    }

    /// Rebuilds a state by applying a logged move sequence to a fresh game.
    pub fn replay(space: Arc<MetricSpace>, tuples: TuplePair, clock: Clock, log: &[Move]) -> Result<GameState, Error> {
        log.iter()
            .try_fold(GameState::new(space, tuples, clock)?, |state, mv| state.apply_move(*mv))
    }

    pub fn space(&self) -> &Arc<MetricSpace> {
        &self.space
    }

    pub fn space_id(&self) -> &str {
        &self.space_id
    }

    pub fn tuples(&self) -> &TuplePair {
        &self.tuples
    }

    pub fn initial_clock(&self) -> Clock {
        self.initial_clock
    }

    /// Remaining clock: the last declared ordinal, or the initial clock.
    pub fn clock(&self) -> Clock {
        self.clock
    }

    pub fn map(&self) -> &PartialMap {
        &self.map
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    pub fn log(&self) -> &[Move] {
        &self.log
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.phase {
            Phase::Over(o) => Some(o),
            _ => None,
        }
    }

    pub fn is_over(&self) -> bool {
        matches!(self.phase, Phase::Over(_))
    }

    /// Player whose move it is, `None` once the game is over.
    pub fn to_move(&self) -> Option<Player> {
        match self.phase {
            Phase::AwaitChallenge => Some(Player::I),
            Phase::AwaitResponse(_) => Some(Player::II),
            Phase::Over(_) => None,
        }
    }

    fn ordinals(&self) -> Vec<Option<u32>> {
        match self.clock {
            Clock::Finite(c) => (0..c).map(Some).collect(),
            Clock::Infinity => vec![None],
        }
    }

    /// All legal moves: ordinals ascending, then side, then point.
    pub fn legal_moves(&self) -> Result<Vec<Move>, Error> {
        let n = self.space.n();
        match self.phase {
            Phase::Over(_) => Err(Error::GameOver),
            Phase::AwaitResponse(_) => Ok((0..n).map(|point| Move::Response { point }).collect()),
            Phase::AwaitChallenge => Ok(self
                .ordinals()
                .into_iter()
                .flat_map(|ordinal| {
                    Side::BOTH
                        .into_iter()
                        .flat_map(move |side| (0..n).map(move |point| Move::challenge(ordinal, side, point)))
                })
                .collect()),
        }
    }

    fn expected(&self) -> String {
        let n = self.space.n();
        match (self.phase, self.clock) {
            (Phase::AwaitResponse(_), _) => format!("a response with point in 0..{n}"),
            (Phase::AwaitChallenge, Clock::Finite(c)) => {
                format!("a challenge with ordinal in 0..{c}, side L or R, point in 0..{n}")
            }
            (Phase::AwaitChallenge, Clock::Infinity) => {
                format!("a challenge without ordinal, side L or R, point in 0..{n}")
            }
            (Phase::Over(_), _) => "nothing: the game is over".into(),
        }
    }

    fn illegal(&self, mv: Move) -> Error {
        Error::IllegalMove {
            attempted: mv.to_string(),
            expected: self.expected(),
        }
    }

    pub fn apply_move(&self, mv: Move) -> Result<GameState, Error> {
        let n = self.space.n();
        match (self.phase, mv) {
            (Phase::Over(_), _) => Err(Error::GameOver),
            (Phase::AwaitChallenge, Move::Challenge(ch)) => {
                let ordinal_ok = match (self.clock, ch.ordinal) {
                    (Clock::Finite(c), Some(k)) => k < c,
                    (Clock::Infinity, None) => true,
                    _ => false,
                };
                if !ordinal_ok || ch.point >= n {
                    return Err(self.illegal(mv));
                }
                let mut next = self.clone();
                next.phase = Phase::AwaitResponse(ch);
                next.log.push(mv);
                Ok(next)
            }
            (Phase::AwaitResponse(ch), Move::Response { point }) => {
                if point >= n {
                    return Err(self.illegal(mv));
                }
                let mut next = self.clone();
                next.log.push(mv);
                next.rounds.push(Round {
                    ordinal: ch.ordinal,
                    side: ch.side,
                    challenge: ch.point,
                    response: point,
                });
                let extended = match self.map.extend(ch.side, ch.point, point) {
                    Ok(m) => m,
                    Err(reason) => {
                        next.phase = Phase::Over(Outcome {
                            winner: Player::I,
                            reason: OverReason::InvalidExtension { reason },
                        });
                        return Ok(next);
                    }
                };
                let preserving = preserves_distances(&self.space, &extended);
                let total = extended.len() == n;
                next.map = extended;
                next.phase = match ch.ordinal {
                    Some(k) => {
                        next.clock = Clock::Finite(k);
                        if k == 0 {
                            Phase::Over(Outcome {
                                winner: if preserving { Player::II } else { Player::I },
                                reason: OverReason::ClockExpired,
                            })
                        } else {
                            Phase::AwaitChallenge
                        }
                    }
                    None if !preserving => Phase::Over(Outcome {
                        winner: Player::I,
                        reason: OverReason::NotIsometry,
                    }),
                    None if total => Phase::Over(Outcome {
                        winner: Player::II,
                        reason: OverReason::MapTotal,
                    }),
                    None => Phase::AwaitChallenge,
                };
                Ok(next)
            }
            _ => Err(self.illegal(mv)),
        }
    }
}

/// Starts a game from index tuples.
pub fn new_game(space: Arc<MetricSpace>, a: &[usize], b: &[usize], clock: Clock) -> Result<GameState, Error> {
    GameState::new(space, TuplePair::new(a.to_vec(), b.to_vec())?, clock)
}

#[cfg(test)]
mod tests;
