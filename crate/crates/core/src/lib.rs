//! Back-and-forth equivalence, Scott ranks and Ehrenfeucht-Fraisse games on
//! finite metric spaces with exact rational distances.
//!
//! A metric space is treated as a relational structure, and partial maps
//! between its points are refined level by level:
//!
//! - [`space`]: validated spaces, generators, the text codec and corpora.
//! - [`partial_map`]: tuple pairs, partial maps, the partial isometry test.
//! - [`bf`]: the refinement chain `E_0 ⊇ E_1 ⊇ ...` and Scott ranks.
//! - [`game`]: clocked and unclocked EF games, an independent solver, and
//!   the engine strategy.
//! - [`isometry`]: brute-force autoisometry search, orbits, and the
//!   ultrahomogeneity test.

pub mod bf;
pub mod game;
pub mod isometry;
pub mod partial_map;
mod perm;
pub mod space;

pub use bf::{refine, Rank, RefinementTable, ScottRank};
pub use game::{Clock, GameState, Move, Player};
pub use partial_map::{PartialMap, Side, TuplePair};
pub use space::{MetricSpace, Rat, SpaceError};

/// Errors shared by the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("point index {index} out of range for a space of {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("tuples have different lengths ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("space has {n} points; the limit for this operation is {limit}")]
    SpaceTooLarge { n: usize, limit: usize },
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("the game is over")]
    GameOver,
    #[error("illegal move {attempted}; expected {expected}")]
    IllegalMove { attempted: String, expected: String },
    #[error("refinement table was built for a different space")]
    TableMismatch,
}

/// Size limits for the exhaustive procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest space [`bf::refine`] accepts.
    pub refine_max_n: usize,
    /// Largest space the game-tree solver accepts.
    pub game_max_n: usize,
    /// Largest space whose full autoisometry group is enumerated.
    pub group_max_n: usize,
    /// Largest space for single extension queries.
    pub extension_max_n: usize,
    /// Longest starting tuple for the literal tuple-level evaluator.
    pub naive_max_len: usize,
    /// Largest level for the literal tuple-level evaluator.
    pub naive_max_alpha: u32,
}

impl Limits {
    /// Hard ceiling for refinement: maps are packed four bits per point.
    pub const REFINE_CEILING: usize = 10;
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            refine_max_n: 8,
            game_max_n: 6,
            group_max_n: 10,
            extension_max_n: 12,
            naive_max_len: 4,
            naive_max_alpha: 4,
        }
    }
}

pub(crate) fn ensure_size(n: usize, limit: usize) -> Result<(), Error> {
    if n > limit {
        Err(Error::SpaceTooLarge { n, limit })
    } else {
        Ok(())
    }
}
