//! Engine for the queens placing game: two players alternately put queens
//! on an `n x n` board so that no two queens attack each other, and the
//! last player able to move wins.

pub mod board;
pub mod error;
pub mod reporting;
pub mod solver;
pub mod strategies;
pub mod tables;

pub use board::{
    attacks, canonical_first_moves, mirror, AnyOccupancy, CompactOccupancy, Conflict, Dims,
    GameState, GeneralOccupancy, Occupancy, Player, Position, Representation,
};
pub use error::{BoardError, SolveError, StrategyError, TableError};
pub use solver::{
    oracle_solve, solve, wins, NoProgress, Outcome, ProgressSink, SearchOptions, SearchStats,
    Solution,
};
pub use strategies::{playout, Strategy, StrategyKind};
pub use tables::{generate_tables, AnswerTables, ReplyByte};
