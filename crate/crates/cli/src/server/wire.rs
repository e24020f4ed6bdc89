//! JSON views returned by the service.

use serde::Serialize;
use serde_json::Value;

use scottrank::game::{hints, Challenge, Hints, Outcome, Phase, Round};
use scottrank::{Clock, Error, Move, Player, Rank};

use super::{Session, SpaceEntry};

#[derive(Debug, Serialize)]
pub struct SpaceView {
    pub id: String,
    pub n: usize,
    pub labels: Vec<String>,
    pub d: Vec<Vec<String>>,
}

impl SpaceView {
    pub fn of(entry: &SpaceEntry) -> SpaceView {
        SpaceView {
            id: entry.id.clone(),
            n: entry.space.n(),
            labels: entry.space.labels().to_vec(),
            d: entry
                .space
                .rows()
                .into_iter()
                .map(|row| row.iter().map(|r| r.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseView {
    AwaitChallenge,
    AwaitResponse { challenge: Challenge },
    Over { winner: Player, reason: Value, description: String },
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub winner: Player,
    pub text: String,
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub id: String,
    pub space: String,
    pub role: Player,
    pub to_move: Option<Player>,
    pub human_to_move: bool,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub initial_clock: Clock,
    pub clock: Clock,
    pub phase: PhaseView,
    pub map: Vec<(usize, usize)>,
    pub rounds: Vec<Round>,
    pub log: Vec<Move>,
    /// Engine moves played in reply to this request.
    pub engine_moves: Vec<Move>,
    pub legal: Vec<Move>,
    pub verdict: Option<Verdict>,
    pub hints_on: bool,
    pub hints: Option<HintView>,
}

#[derive(Debug, Serialize)]
pub struct HintView {
    pub rank: Rank,
    pub non_losing: Vec<Move>,
    /// Player II keeps an autoisometry in reach whatever happens.
    pub survives_forever: bool,
}

fn verdict(o: Outcome) -> Verdict {
    Verdict {
        winner: o.winner,
        text: format!("Player {} wins", o.winner),
    }
}

impl SessionView {
    pub fn of(s: &Session, engine_moves: Vec<Move>) -> Result<SessionView, Error> {
        let state = &s.state;
        let phase = match state.phase() {
            Phase::AwaitChallenge => PhaseView::AwaitChallenge,
            Phase::AwaitResponse(challenge) => PhaseView::AwaitResponse { challenge },
            Phase::Over(o) => PhaseView::Over {
                winner: o.winner,
                reason: serde_json::to_value(o.reason).expect("reason serializes"),
                description: o.reason.to_string(),
            },
        };
        let to_move = state.to_move();
        let human_to_move = to_move == Some(s.human);
        let hint = match (s.hints, state.is_over()) {
            (true, false) => {
                let Hints { rank, non_losing } = hints(state, &s.space.table)?;
                Some(HintView {
                    rank,
                    non_losing,
                    survives_forever: rank.is_top(),
                })
            }
            _ => None,
        };
        Ok(SessionView {
            id: s.id.clone(),
            space: s.space.id.clone(),
            role: s.human,
            to_move,
            human_to_move,
            a: state.tuples().a().to_vec(),
            b: state.tuples().b().to_vec(),
            initial_clock: state.initial_clock(),
            clock: state.clock(),
            phase,
            map: state.map().pairs().to_vec(),
            rounds: state.rounds().to_vec(),
            log: state.log().to_vec(),
            engine_moves,
            legal: if human_to_move { state.legal_moves()? } else { Vec::new() },
            verdict: state.outcome().map(verdict),
            hints_on: s.hints,
            hints: hint,
        })
    }
}
