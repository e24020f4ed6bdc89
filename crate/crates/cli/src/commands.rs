//! The subcommands. Each returns its output text, or a [`CliError`] that
//! knows its exit code.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use clap::{Args, Subcommand, ValueEnum};
use serde::Serialize;

use scottrank::game::{engine_move, solve, GameSolver, OverReason, Phase};
use scottrank::isometry::{extends_to_autoisometry, is_ultrahomogeneous, non_extendable, orbits};
use scottrank::space::corpus::CorpusSpec;
use scottrank::space::{decode, encode, generate, GenKind};
use scottrank::{Clock, GameState, Limits, MetricSpace, Move, Player, Side, TuplePair};

use crate::report::{render_pairs, AnalysisReport};
use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

pub fn read_space(path: &Path) -> Result<MetricSpace, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn machine<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn rank(space: &MetricSpace, pairs: bool, literal_sup: bool, format: Format) -> Result<String, CliError> {
    let (table, report) = AnalysisReport::analyze(space)?;
    Ok(match format {
        Format::Machine => machine(&report),
        Format::Text => {
            let mut out = report.render(literal_sup);
            if pairs {
                out.push_str("maps of finite rank:\n");
                out.push_str(&render_pairs(&table));
            }
            out
        }
    })
}

/// Findings of the three-way cross-check on one space.
#[derive(Debug, Default, Serialize)]
pub struct CheckSummary {
    pub maps: usize,
    pub game_tree: bool,
    pub mismatches: Vec<String>,
}

/// Largest space checked against the game tree as well.
const GAME_TREE_MAX_N: usize = 5;

/// Compares refinement levels with the game solver and autoisometry
/// extension, and ultrahomogeneity with Scott rank 0.
pub fn check_space(space: &MetricSpace) -> Result<CheckSummary, CliError> {
    let (table, report) = AnalysisReport::analyze(space)?;
    let game_tree = space.n() <= GAME_TREE_MAX_N;
    let mut solver = GameSolver::new(space);
    let mut summary = CheckSummary {
        game_tree,
        ..CheckSummary::default()
    };
    for (map, rank) in table.entries() {
        summary.maps += 1;
        let extends = extends_to_autoisometry(space, &map)?.is_some();
        if rank.is_top() != extends {
            summary
                .mismatches
                .push(format!("map {map}: rank {rank} but autoisometry extension {extends}"));
        }
        if !game_tree {
            continue;
        }
        let tuples = map.to_tuple_pair();
        for alpha in 0..=table.alpha_star() + 1 {
            let ii = solver.solve(&tuples, Clock::Finite(alpha))?.winner == Player::II;
            if ii != rank.survives(alpha) {
                summary
                    .mismatches
                    .push(format!("map {map} level {alpha}: rank {rank} but game winner II = {ii}"));
            }
        }
        let ii = solver.solve(&tuples, Clock::Infinity)?.winner == Player::II;
        if ii != extends {
            summary
                .mismatches
                .push(format!("map {map}: EF(inf) winner II = {ii} but extension {extends}"));
        }
    }
    if report.ultrahomogeneous != (report.scott_rank == 0) {
        summary.mismatches.push(format!(
            "ultrahomogeneous {} but sr = {}",
            report.ultrahomogeneous, report.scott_rank
        ));
    }
    Ok(summary)
}

pub fn check(space: &MetricSpace, format: Format) -> Result<String, CliError> {
    let summary = check_space(space)?;
    let out = match format {
        Format::Machine => machine(&summary),
        Format::Text if summary.mismatches.is_empty() => {
            if summary.game_tree {
                "maps: all agree at all levels; EF(∞) = autoisometry: ok\n".to_string()
            } else {
                "maps: rank top = autoisometry: ok (game tree skipped above 5 points)\n".to_string()
            }
        }
        Format::Text => {
            let mut s = String::new();
            for m in &summary.mismatches {
                writeln!(s, "mismatch: {m}").unwrap();
            }
            s
        }
    };
    if summary.mismatches.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Mismatch(out.trim_end().to_string()))
    }
}

pub fn check_corpus(spec: &CorpusSpec, format: Format) -> Result<String, CliError> {
    let spaces = spec.spaces();
    let mut failures = Vec::new();
    let mut maps = 0;
    for (i, space) in spaces.iter().enumerate() {
        let summary = check_space(space)?;
        maps += summary.maps;
        for m in summary.mismatches {
            failures.push(format!("space {i} ({}): {m}", space.fingerprint()));
        }
    }
    #[derive(Serialize)]
    struct CorpusSummary<'a> {
        corpus: String,
        spaces: usize,
        maps: usize,
        mismatches: &'a [String],
    }
    let out = match format {
        Format::Machine => machine(&CorpusSummary {
            corpus: spec.to_string(),
            spaces: spaces.len(),
            maps,
            mismatches: &failures,
        }),
        Format::Text => {
            let mut s = format!("corpus {spec}: {} spaces, {maps} maps", spaces.len());
            if failures.is_empty() {
                s.push_str(", all agree\n");
            } else {
                s.push('\n');
                for f in &failures {
                    writeln!(s, "mismatch: {f}").unwrap();
                }
            }
            s
        }
    };
    if failures.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Mismatch(out.trim_end().to_string()))
    }
}

fn describe(mv: &Move) -> String {
    match mv {
        Move::Challenge(c) => format!("I plays {c}"),
        Move::Response { point } => format!("II answers {point}"),
    }
}

fn verdict_text(state: &GameState) -> String {
    let outcome = state.outcome().expect("game is over");
    let winner = format!("Player {} wins", outcome.winner);
    match outcome.reason {
        OverReason::ZeroClock => format!("{winner} (0-clock: base map is a partial isometry)"),
        OverReason::BaseNotPreserving => format!("{winner} (base map is not a partial isometry)"),
        _ => winner,
    }
}

#[derive(Debug, Serialize)]
struct GameReport {
    winner: Player,
    line: Vec<Move>,
    solved_by: &'static str,
}

/// Solves the game and prints the verdict with the engine's line of play.
pub fn game(space: &MetricSpace, tuples: TuplePair, clock: Clock, format: Format) -> Result<String, CliError> {
    let (table, _) = AnalysisReport::analyze(space)?;
    let space = Arc::new(space.clone());
    let mut state = GameState::new(space.clone(), tuples.clone(), clock)?;
    while !state.is_over() {
        state = state.apply_move(engine_move(&state, &table)?)?;
    }
    let played = state.outcome().expect("loop ends when over").winner;
    let (winner, solved_by) = if space.n() <= Limits::default().game_max_n {
        (solve(&space, &tuples, clock)?.winner, "game tree")
    } else {
        let rank = table.rank_of_pair(&tuples)?;
        let ii = match clock {
            Clock::Finite(c) => rank.survives(c),
            Clock::Infinity => rank.is_top(),
        };
        (if ii { Player::II } else { Player::I }, "refinement table")
    };
    if winner != played {
        return Err(CliError::Mismatch(format!(
            "solver says Player {winner} wins but engine self-play ended with Player {played}"
        )));
    }
    Ok(match format {
        Format::Machine => machine(&GameReport {
            winner,
            line: state.log().to_vec(),
            solved_by,
        }),
        Format::Text if state.log().is_empty() => format!("{}\n", verdict_text(&state)),
        Format::Text => {
            let line: Vec<String> = state.log().iter().map(describe).collect();
            format!("{}; line: {}\n", verdict_text(&state), line.join(", "))
        }
    })
}

/// Reads a human move: `ORD SIDE POINT` (clocked challenge), `SIDE POINT`
/// (unclocked challenge) or `POINT` (response).
pub fn parse_move(text: &str) -> Option<Move> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    let side = |s: &str| match s {
        "L" | "l" => Some(Side::L),
        "R" | "r" => Some(Side::R),
        _ => None,
    };
    match parts.as_slice() {
        [p] => p.parse().ok().map(|point| Move::Response { point }),
        [s, p] => Some(Move::challenge(None, side(s)?, p.parse().ok()?)),
        [k, s, p] => Some(Move::challenge(Some(k.parse().ok()?), side(s)?, p.parse().ok()?)),
        _ => None,
    }
}

/// Terminal play against the engine.
pub fn interactive(
    space: &MetricSpace,
    tuples: TuplePair,
    clock: Clock,
    human: Player,
    input: &mut dyn BufRead,
    output: &mut dyn Write,
) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: "terminal".into(),
        source,
    };
    let (table, _) = AnalysisReport::analyze(space)?;
    let mut state = GameState::new(Arc::new(space.clone()), tuples, clock)?;
    while !state.is_over() {
        if state.to_move() == Some(human) {
            let prompt = match state.phase() {
                Phase::AwaitChallenge => format!("map {} clock {}; your challenge: ", state.map(), state.clock()),
                Phase::AwaitResponse(c) => format!("map {}; I plays {c}; your response: ", state.map()),
                Phase::Over(_) => unreachable!(),
            };
            write!(output, "{prompt}").map_err(io)?;
            output.flush().map_err(io)?;
            let mut line = String::new();
            if input.read_line(&mut line).map_err(io)? == 0 {
                return Err(CliError::Invalid("input ended before the game did".into()));
            }
            let Some(mv) = parse_move(&line) else {
                writeln!(output, "could not read a move from {:?}", line.trim()).map_err(io)?;
                continue;
            };
            match state.apply_move(mv) {
                Ok(next) => state = next,
                Err(e) => writeln!(output, "{e}").map_err(io)?,
            }
        } else {
            let mv = engine_move(&state, &table)?;
            writeln!(output, "engine: {}", describe(&mv)).map_err(io)?;
            state = state.apply_move(mv)?;
        }
    }
    writeln!(output, "{}", verdict_text(&state)).map_err(io)?;
    Ok(())
}

#[derive(Debug, Clone, Subcommand)]
pub enum GenCommand {
    /// Points 0..n on a line, unit spacing.
    Path { n: usize },
    /// Shortest-path metric of the n-cycle.
    Cycle { n: usize },
    /// Distinct random grid points under the L1 norm.
    L1(L1Args),
    /// Shortest-path metric of a random weighted connected graph.
    Graph(GraphArgs),
}

#[derive(Debug, Clone, Args)]
pub struct L1Args {
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 4)]
    pub grid: u32,
    #[arg(long, default_value_t = 1)]
    pub denom: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct GraphArgs {
    pub n: usize,
    #[arg(long, default_value_t = 30)]
    pub extra_edge_pct: u32,
    #[arg(long, default_value_t = 3)]
    pub max_weight: u32,
    #[arg(long, default_value_t = 1)]
    pub denom: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn gen(cmd: &GenCommand) -> Result<String, CliError> {
    let (kind, seed) = match cmd {
        GenCommand::Path { n } => (GenKind::Path { n: *n }, 0),
        GenCommand::Cycle { n } => (GenKind::Cycle { n: *n }, 0),
        GenCommand::L1(a) => (
            GenKind::RandomL1 {
                n: a.n,
                dim: a.dim,
                grid: a.grid,
                denom: a.denom,
            },
            a.seed,
        ),
        GenCommand::Graph(a) => (
            GenKind::RandomGraph {
                n: a.n,
                extra_edge_pct: a.extra_edge_pct,
                max_weight: a.max_weight,
                denom: a.denom,
            },
            a.seed,
        ),
    };
    let space = generate(&kind, seed).map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(encode(&space))
}

pub fn orbit_list(space: &MetricSpace, k: usize, format: Format) -> Result<String, CliError> {
    let parts = orbits(space, k)?;
    Ok(match format {
        Format::Machine => machine(&parts),
        Format::Text => {
            let mut s = format!("{} orbits of injective {k}-tuples\n", parts.len());
            for orbit in &parts {
                let tuples: Vec<String> = orbit
                    .iter()
                    .map(|t| {
                        let inner: Vec<String> = t.iter().map(|x| x.to_string()).collect();
                        format!("({})", inner.join(", "))
                    })
                    .collect();
                writeln!(s, "  {{{}}}", tuples.join(", ")).unwrap();
            }
            s
        }
    })
}

pub fn hom(space: &MetricSpace, format: Format) -> Result<String, CliError> {
    let witness = non_extendable(space)?;
    #[derive(Serialize)]
    struct Hom {
        ultrahomogeneous: bool,
        non_extendable: Option<String>,
    }
    debug_assert_eq!(witness.is_none(), is_ultrahomogeneous(space)?);
    Ok(match format {
        Format::Machine => machine(&Hom {
            ultrahomogeneous: witness.is_none(),
            non_extendable: witness.as_ref().map(|m| m.to_string()),
        }),
        Format::Text => match witness {
            None => "ultrahomogeneous: yes\n".to_string(),
            Some(m) => format!("ultrahomogeneous: no; {m} does not extend to an autoisometry\n"),
        },
    })
}
